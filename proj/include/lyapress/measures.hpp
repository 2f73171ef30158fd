#ifndef LYAPRESS_MEASURES_HPP
#define LYAPRESS_MEASURES_HPP

#include <optional>
#include <string>

#include "lyapress/cylinders.hpp"
#include "lyapress/pressure.hpp"

namespace lyapress {

/// Markov measure compatible with the SFT: row-stochastic P with
/// P_ij > 0 => Q_ij = 1, together with its stationary vector pi P = pi.
class MarkovMeasure {
public:
    MarkovMeasure(const SubshiftSpec& sft, Matrix stochastic);

    static MarkovMeasure bernoulli(const SubshiftSpec& sft, const Vector& probabilities);
    /// Measure of maximal entropy (Parry): P_ij = Q_ij v_j / (lambda v_i).
    static MarkovMeasure parry(const SubshiftSpec& sft);
    /// Point mass on the fixed point of `symbol` (requires Q[s][s] = 1).
    static MarkovMeasure dirac_fixed_point(const SubshiftSpec& sft, int symbol);

    const Matrix& transition() const { return p_; }
    const Vector& stationary() const { return pi_; }
    int alphabet_size() const { return static_cast<int>(pi_.size()); }

    double cylinder_mass(std::span<const int> word) const;
    double cylinder_log_mass(std::span<const int> word) const;

private:
    Matrix p_;
    Vector pi_;
};

/// Entropy rate -sum_ij pi_i P_ij log P_ij.
double entropy_rate(const MarkovMeasure& m);

/// Entropy of the length-n cylinder marginal, -sum_I mu[I] log mu[I].
double block_entropy(const SubshiftSpec& sft, const MarkovMeasure& m, int n,
                     const SweepOptions& opts = {});

enum class ExponentMethod { ExactCylinder, MonteCarlo };

struct ExponentReport {
    Vector chi;                   // decreasing finite-n estimates
    double chi_psi_q = 0.0;       // (1/n) E_mu log psi^q(A(I)); 0 when q absent
    int n_used = 0;
    ExponentMethod method = ExponentMethod::ExactCylinder;
    double mc_standard_error = 0.0;   // flagged for monte-carlo results
};

struct LyapunovOptions {
    std::uint64_t budget = std::uint64_t{1} << 22;
    int threads = 0;
    std::uint64_t mc_samples = 20000;
    std::uint64_t seed = 1;
};

/// chi_i estimate (1/n) sum_I mu[I] log sigma_i(A(I)); falls back to seeded
/// monte-carlo sampling of mu when the word count exceeds the budget.
ExponentReport lyapunov_vector(const CocycleSpec& c, const MarkovMeasure& m, int n,
                               const std::optional<ExponentVector>& q = std::nullopt,
                               const LyapunovOptions& opts = {});

/// (1/n) log Z_n(q) - [H_n(mu)/n + chi_psi_q]; >= 0 up to rounding by the
/// finite-n Gibbs inequality.
double variational_gap(const CocycleSpec& c, const MarkovMeasure& m, const ExponentVector& q,
                       int n, const LyapunovOptions& opts = {});

struct MaximizeOptions {
    int restarts = 20;
    int max_iterations = 400;
    double fd_step = 1e-5;
    std::uint64_t seed = 1;
    std::uint64_t budget = std::uint64_t{1} << 22;
    int threads = 0;
};

struct MaximizeResult {
    MarkovMeasure measure;
    double objective = 0.0;       // h_mu(T) + chi_psi_q at depth n
    double entropy_term = 0.0;
    double exponent_term = 0.0;
};

/// Projected-gradient ascent of h_mu(T) + (1/n) E_mu log psi^q over
/// Q-compatible stochastic matrices; multi-start, deterministic seeds, merge
/// by max objective with lexicographic tie-break.  The returned objective is
/// a certified lower bound for (1/n) log Z_n(q) + 1e-9.
MaximizeResult maximize_variational(const CocycleSpec& c, const ExponentVector& q, int n,
                                    const MaximizeOptions& opts = {});

/// Penalty variant used by the spectrum curve: maximize h_mu subject to the
/// finite-n Lyapunov vector lying near `alpha` (quadratic penalty schedule).
struct ConstrainedMaximizeResult {
    MarkovMeasure measure;
    double entropy = 0.0;
    double chi_distance = 0.0;    // |chi(mu) - alpha|_2 at the final measure
};
ConstrainedMaximizeResult maximize_entropy_at_alpha(const CocycleSpec& c, const Vector& alpha,
                                                    int n, const MaximizeOptions& opts = {});

} // namespace lyapress

#endif
