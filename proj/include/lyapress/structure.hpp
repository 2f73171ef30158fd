#ifndef LYAPRESS_STRUCTURE_HPP
#define LYAPRESS_STRUCTURE_HPP

#include "lyapress/cocycle.hpp"
#include "lyapress/cylinders.hpp"

namespace lyapress {

struct StructureOptions {
    double gap_tol = 1e-8;        // relative eigenvalue-modulus gap for pinching
    double lin_tol = 1e-8;        // smallest-singular-value threshold for twisting
    std::uint64_t combinatorial_cap = 1000000;
    double qm_slope_threshold = -0.05;
    double qm_r2_threshold = 0.9;
    double domination_slope_tol = 1e-3;
    std::uint64_t budget = std::uint64_t{1} << 22;
    int threads = 0;
    HolonomyOptions holonomy;
};

/// Pinching: the eigenvalues of A^{per(p)}(p) and of every exterior power
/// (A^{per(p)}(p))^{wedge t}, t <= d-1, have multiplicity 1 and pairwise
/// distinct absolute values (relative gap above gap_tol).
StructureVerdict check_pinching(const CocycleSpec& c, const PeriodicPointSym& p,
                                const StructureOptions& opts = {});

/// Loop matrix H~ = A^{-n}(p) H^s_{p <- T^n z} A^n(z) H^u_{z <- p} at
/// exterior power t (holonomies are exact identities for one-step cocycles).
Matrix homoclinic_loop_matrix(const CocycleSpec& c, const PeriodicPointSym& p,
                              const HomoclinicPointSym& z, int t,
                              const StructureOptions& opts = {});

/// Twisting at level t: for eigenvectors {v_i} of (A^{per(p)}(p))^{wedge t}
/// and the loop matrix H~, every stacked family {H~ v_i : i in I} union
/// {v_j : j in J} with |I|+|J| <= d_t has smallest singular value above
/// lin_tol after column normalization.
StructureVerdict check_twisting(const CocycleSpec& c, const PeriodicPointSym& p,
                                const HomoclinicPointSym& z, int t,
                                const StructureOptions& opts = {});

/// Conjunction of pinching and twisting over all 1 <= t <= d-1.
StructureVerdict check_typical(const CocycleSpec& c, const PeriodicPointSym& p,
                               const HomoclinicPointSym& z,
                               const StructureOptions& opts = {});

/// Probes simultaneous quasi-multiplicativity: for k <= k_max tracks
/// c_k(n) = min over pairs (I,J) in L_n^2 of the best admissible connector
/// value max_K min_i ||A_i(IKJ)|| / (||A_i(I)|| ||A_i(J)||), n <= n_pairs,
/// and fits the log-trend.  Pass: some k shows no decay; fail: all k decay
/// linearly (slope < -0.05 with R^2 > 0.9) or admit no connector.
StructureVerdict probe_quasi_multiplicativity(const CocycleSpec& c, int n_pairs, int k_max,
                                              const StructureOptions& opts = {});

/// Domination with index i: fits log g_n, g_n = max over words of the
/// singular value ratio sigma_{i+1}/sigma_i; pass iff the fitted slope is
/// negative (tau = e^{slope} < 1) with small residuals.
StructureVerdict check_domination(const CocycleSpec& c, int index, int n_max,
                                  const StructureOptions& opts = {});

} // namespace lyapress

#endif
