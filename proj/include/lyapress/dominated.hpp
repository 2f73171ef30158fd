#ifndef LYAPRESS_DOMINATED_HPP
#define LYAPRESS_DOMINATED_HPP

#include <optional>
#include <vector>

#include "lyapress/measures.hpp"
#include "lyapress/pressure.hpp"
#include "lyapress/structure.hpp"

namespace lyapress {

/// One letter of the induced alphabet: core word I extended by connector
/// words of lengths m1, m2 <= K0 through the distinguished fixed/periodic
/// point, together with the loop matrix B.
struct InducedLetter {
    Word core;
    Word full;                 // length m1 + |core| + m2
    int m1 = 0, m2 = 0;
    Matrix loop_matrix;        // B over the loop (holonomies exact for w = 1)
};

struct ConeSystem {
    double tau1 = 0.1;         // source radius
    double tau2 = 0.3;         // target radius
    std::vector<Vector> centers;   // leading eigendirection of A_t(p), per t = 1..d-1
};

struct DominatedOptions {
    double tau1 = 0.1;
    double tau2 = 0.3;
    int k0 = 12;                       // connector search budget
    std::uint64_t budget = std::uint64_t{1} << 22;
    int threads = 0;
    ConeCheckOptions cone;
    StructureOptions structure;
};

/// The induced one-step cocycle over the full shift on the letter alphabet.
/// `as_cocycle` round-trips through every other module.
struct InducedCocycle {
    std::vector<InducedLetter> letters;
    ConeSystem cone;
    int core_n = 0;
    int k0 = 0;
    int base_alphabet = 0;     // alphabet size of the underlying subshift

    CocycleSpec as_cocycle(double holder_alpha = 1.0) const;
    /// Re-verifies the cone certificate of every letter at every exterior
    /// power; throws ValidationError on the first violation.
    void verify_cones(const ConeCheckOptions& opts = {}) const;
};

/// Cone parameters for a typicality pair: centers are the top
/// eigendirections of the exterior powers of the period matrix.
ConeSystem cone_system_for(const CocycleSpec& c, const PeriodicPointSym& p,
                           double tau1, double tau2);

struct LoopSearchFailure {
    Word core;
    std::string reason;
};

/// Searches connector prefixes/suffixes (lengths 0..K0, lexicographic order:
/// (m1, m2), then prefix, then suffix) through the periodic point such that
/// the loop matrix of prefix+core+suffix contracts every cone; first
/// certified candidate wins.  Requires a one-step cocycle; typicality of
/// (p, z) is the caller's certified precondition.
std::optional<InducedLetter> find_loop_for_word(const CocycleSpec& c, const PeriodicPointSym& p,
                                                const Word& core, const ConeSystem& cones,
                                                const DominatedOptions& opts);

/// Maps find_loop_for_word over all of L_n; throws SearchExhausted with the
/// aggregated failure list when any word finds no certified loop.
InducedCocycle build_induced(const CocycleSpec& c, const PeriodicPointSym& p,
                             const HomoclinicPointSym& z, int n, const DominatedOptions& opts);

/// (1/k_max) log sum over k_max-tuples of letters of psi^q(B(I_1...I_k)),
/// with the almost-additivity Fekete bracket once kappa is fitted on letter
/// pairs.
PressureEstimate induced_pressure(const InducedCocycle& ic, const ExponentVector& q, int k_max,
                                  const DominatedOptions& opts = {});

/// Fits the almost-additivity constant: the largest kappa <= 1 with
/// ||B_t(IJ)|| >= kappa ||B_t(I)|| ||B_t(J)|| over all letter pairs and all
/// exterior powers t.  Returned in log space (<= 0).
double fit_almost_additivity_log(const InducedCocycle& ic);

struct PressureComparisonRow {
    int n = 0;
    double induced_over_n = 0.0;       // (1/n) P_{n,D}
    double direct_at_n = 0.0;          // (1/n) log Z_n of the original cocycle
    double difference = 0.0;           // |induced_over_n - direct_at_n|
    int k_used = 0;
    int alphabet_size = 0;
};

std::vector<PressureComparisonRow> pressure_comparison(const CocycleSpec& c,
                                                       const PeriodicPointSym& p,
                                                       const HomoclinicPointSym& z,
                                                       const ExponentVector& q,
                                                       const std::vector<int>& n_list,
                                                       const DominatedOptions& opts);

/// Finite-depth check of the entropy/exponent transfer inequalities between
/// a measure on the induced full shift and its pushed-forward sliding-block
/// measure on the base subshift.
struct TransferReport {
    double h_mu = 0.0;                 // entropy rate on the induced shift
    double h_nu_hat = 0.0;             // block-entropy proxy H_m(nu)/m on the base
    int nu_depth = 0;
    double mean_letter_length = 0.0;
    double ineq1_lhs = 0.0;            // n * h_nu_hat
    double ineq1_mid = 0.0;            // h_mu
    double ineq1_rhs = 0.0;            // (n + 2 K0) h_nu_hat + slack term
    bool ineq1_holds = false;
    double chi_nu_q = 0.0;             // finite-depth psi^q exponent under nu
    double chi_mu_q = 0.0;             // finite-depth psi^q exponent under mu (induced)
    bool ineq2_holds = false;          // n chi_nu <= chi_mu + tol
    bool ineq3_holds = false;          // chi_mu <= (n + 2 K0) chi_nu + tol
};

TransferReport entropy_exponent_transfer(const CocycleSpec& base, const InducedCocycle& ic,
                                         const MarkovMeasure& mu, int depth,
                                         const ExponentVector& q,
                                         const DominatedOptions& opts = {});

} // namespace lyapress

#endif
