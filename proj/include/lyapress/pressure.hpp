#ifndef LYAPRESS_PRESSURE_HPP
#define LYAPRESS_PRESSURE_HPP

#include <optional>
#include <string>
#include <vector>

#include "lyapress/cylinders.hpp"

namespace lyapress {

/// Exact alternative route for the distinguished q-directions, attached as a
/// cross-check: q = 0 (Perron eigenvalue of Q) and q = (s/d,...,s/d) (the
/// additive determinant potential, transfer-matrix computable for w = 1).
struct PressureCrossCheck {
    std::string kind;                  // "q-zero" | "determinant-direction"
    double limit_value = 0.0;          // log spectral radius of the weighted matrix
    double finite_n_value = 0.0;       // log Z_n by matrix powers (same n as point estimate)
    double finite_n_difference = 0.0;  // |enumerated - matrix-power| log Z_n
};

struct PressureEstimate {
    std::vector<double> q;
    int n_max = 0;
    std::vector<std::pair<int, double>> values;   // (n, (1/n) log Z_n(q))
    double point_estimate = 0.0;                  // (1/n_max) log Z_{n_max}(q)
    std::optional<double> superadditive_lower;    // Fekete bracket, see below
    std::optional<int> gap_k;
    std::optional<double> qm_constant_log;        // log C_2
    std::optional<double> aitken;                 // diagnostic extrapolation only
    std::optional<PressureCrossCheck> crosscheck;
    bool values_nonincreasing = true;             // diagnostic
    double max_uptick = 0.0;                      // diagnostic
};

struct PressureOptions {
    std::uint64_t budget = std::uint64_t{1} << 22;
    int threads = 0;
    /// Depths at which (1/n) log Z_n is recorded; empty = 1..n_max.
    std::vector<int> value_grid;
    /// Quasi-multiplicativity constant (log C_2, connector length k): enables
    /// the superadditive bracket sup_n (log Z_n + log C_2)/(n + k) and the
    /// hard Fekete assertion on all computed triples.
    std::optional<std::pair<double, int>> qm_constant;
    bool attach_crosscheck = true;
};

/// log Z_n(q): log-sum-exp over the admissible words in lexicographic order
/// with a pairwise tree reduction; deterministic for every thread count.
double partition_function_log(const CocycleSpec& c, const ExponentVector& q, int n,
                              const SweepOptions& opts = {});

PressureEstimate estimate_pressure(const CocycleSpec& c, const ExponentVector& q, int n_max,
                                   const PressureOptions& opts = {});

/// Max over n <= n_max and I in L_n of the cylinder max/min ratio of
/// ||A^{wedge t}|| over window extensions; exactly 1 for one-step cocycles.
double bounded_distortion_constant(const CocycleSpec& c, int t, int n_max,
                                   const SweepOptions& opts = {});

/// log of the spectral radius of the transition matrix (topological entropy).
double log_spectral_radius(const SubshiftSpec& sft);

/// Finite-n and limit values of the additive pressure of the potential
/// f(x) = log w(x_0) for per-symbol weights w (one-step route): log Z_n by
/// matrix powers of diag(w) Q and the limit log rho(diag(w) Q).
struct AdditivePressure {
    double finite_n_log_z = 0.0;
    double limit = 0.0;
};
AdditivePressure additive_pressure_transfer(const SubshiftSpec& sft,
                                            const std::vector<double>& log_weights, int n);

} // namespace lyapress

#endif
