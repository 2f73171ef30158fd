#ifndef LYAPRESS_SPECTRUM_HPP
#define LYAPRESS_SPECTRUM_HPP

#include <optional>
#include <string>
#include <vector>

#include "lyapress/cylinders.hpp"
#include "lyapress/measures.hpp"

namespace lyapress {

/// Target Lyapunov vector alpha_1 >= ... >= alpha_d.
struct LyapunovTarget {
    Vector alpha;
    explicit LyapunovTarget(Vector a);
};

/// Outer proxy of the Lyapunov spectrum at depth n: the convex hull of the
/// finite-time vectors (1/n)(log sigma_1 .. log sigma_d) over all words.
/// In dimension >= 3 the stored vertex set is the extreme points along a
/// fixed direction grid (an inner approximation; membership tests against it
/// are conservative).
struct SpectrumEstimate {
    std::vector<Vector> hull_vertices;
    int n = 0;

    /// Euclidean distance from alpha to the convex hull of the vertices.
    double distance(const Vector& alpha) const;
    /// Strict interior test: every probe alpha + margin * u stays inside.
    bool interior(const Vector& alpha, double margin) const;
    bool contains(const Vector& alpha, double tol = 1e-9) const;
};

enum class SpectrumMethod { Duality, Oracle, MeasureSup };
std::string to_string(SpectrumMethod m);

struct SpectrumPoint {
    Vector alpha;
    /// Entropy value; empty oracle counts are an explicit empty state, never
    /// a sentinel float.
    std::optional<double> entropy;
    std::optional<Vector> q_star;
    SpectrumMethod method = SpectrumMethod::Duality;
    int n = 0;
    bool boundary_hit = false;      // q* touched the optimization box
    bool boundary_target = false;   // alpha within the margin collar; no claimed validity
    bool empty_level_set = false;   // oracle count was zero
    std::optional<double> measure_lower;     // attached measure-sup lower bound
    std::optional<double> measure_chi_gap;   // |chi(mu) - alpha| of that measure
};

struct SpectrumOptions {
    std::uint64_t budget = std::uint64_t{1} << 22;
    int threads = 0;
    double q_box = 20.0;            // optimize over [-q_box, q_box]^d
    double interior_margin = 1e-3;
    double q_tol = 1e-6;
    std::uint64_t seed = 1;
    bool attach_measure_bound = false;
    int measure_restarts = 8;
};

SpectrumEstimate estimate_spectrum_domain(const CocycleSpec& c, int n,
                                          const SweepOptions& opts = {});

/// Legendre transform at fixed depth: minimize (1/n) log Z_n(q) - <q, alpha>
/// over the q-box (convex objective); coordinate golden-section multistart
/// followed by a gradient polish.
SpectrumPoint legendre_entropy(const CocycleSpec& c, const LyapunovTarget& alpha,
                               int n_max, const SpectrumOptions& opts = {});

/// Brute-force level-set count: (1/n) log #{ I : |(1/n)log sigma_i - alpha_i|
/// < eps for all i }, empty when the count is zero.
SpectrumPoint level_set_entropy_oracle(const CocycleSpec& c, const LyapunovTarget& alpha,
                                       int n, double eps, const SweepOptions& opts = {});

/// Default oracle tolerance 2 * (hull diameter) / n.
double default_oracle_eps(const SpectrumEstimate& domain, int n);

std::vector<SpectrumPoint> spectrum_curve(const CocycleSpec& c,
                                          const std::vector<LyapunovTarget>& targets,
                                          int n_max, const SpectrumOptions& opts = {});

} // namespace lyapress

#endif
