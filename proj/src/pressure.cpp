#include "lyapress/pressure.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "lyapress/errors.hpp"
#include "lyapress/numeric.hpp"

namespace lyapress {

double partition_function_log(const CocycleSpec& c, const ExponentVector& q, int n,
                              const SweepOptions& opts) {
    if (!c.sft().is_primitive())
        throw NotPrimitive("pressure requires a primitive transition matrix");
    if (q.dimension() != c.dimension())
        throw ValidationError("exponent vector dimension mismatch");
    // Collect per-word values in lexicographic order (per-block buffers merged
    // in block order keep the order exact), then one deterministic reduction.
    using Buf = std::vector<double>;
    std::span<const double> qs(q.q.data(), q.q.size());
    Buf vals = sweep_accumulate<Buf>(
        c, n, opts,
        [qs](Buf& acc, const CylinderView& view) {
            double best = kNegInf;
            for (int j = 0; j < view.num_candidates(); ++j) {
                const auto cand = view.candidate(j);
                double dot = 0.0;
                for (int i = 0; i < view.d; ++i) dot += qs[i] * cand[i];
                best = std::max(best, dot);
            }
            acc.push_back(best);
        },
        [](Buf& into, const Buf& from) { into.insert(into.end(), from.begin(), from.end()); },
        Buf{});
    return log_sum_exp(vals);
}

double log_spectral_radius(const SubshiftSpec& sft) {
    const int k = sft.alphabet_size();
    Matrix q(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) q(a, b) = sft.transition(a, b) ? 1.0 : 0.0;
    const auto eivals = Eigen::EigenSolver<Matrix>(q, false).eigenvalues();
    double rho = 0.0;
    for (int i = 0; i < eivals.size(); ++i) rho = std::max(rho, std::abs(eivals(i)));
    return std::log(rho);
}

AdditivePressure additive_pressure_transfer(const SubshiftSpec& sft,
                                            const std::vector<double>& log_weights, int n) {
    const int k = sft.alphabet_size();
    if (static_cast<int>(log_weights.size()) != k)
        throw ValidationError("one log-weight per symbol required");
    Matrix m(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            m(a, b) = sft.transition(a, b) ? std::exp(log_weights[a]) : 0.0;
    AdditivePressure out;
    const auto eivals = Eigen::EigenSolver<Matrix>(m, false).eigenvalues();
    double rho = 0.0;
    for (int i = 0; i < eivals.size(); ++i) rho = std::max(rho, std::abs(eivals(i)));
    out.limit = std::log(rho);
    // Z_n = sum_{words} prod w(x_t) = 1^T (M)^{n-1} w_vec with M_{ab} = w_a Q_{ab}
    Vector v(k);
    for (int a = 0; a < k; ++a) v(a) = std::exp(log_weights[a]);
    double log_scale = 0.0;
    for (int step = 1; step < n; ++step) {
        v = (m * v).eval();
        const double mx = v.cwiseAbs().maxCoeff();
        if (mx > 0x1.0p+200) {
            const int e = std::ilogb(mx);
            v *= std::ldexp(1.0, -e);
            log_scale += e * M_LN2;
        }
    }
    out.finite_n_log_z = std::log(v.sum()) + log_scale;
    return out;
}

double bounded_distortion_constant(const CocycleSpec& c, int t, int n_max,
                                   const SweepOptions& opts) {
    if (c.one_step_cocycle()) return 1.0;
    double worst_log = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        double local = sweep_accumulate<double>(
            c, n, opts,
            [&](double& acc, const CylinderView& view) {
                double hi = kNegInf, lo = -kNegInf;
                for (int j = 0; j < view.num_candidates(); ++j) {
                    const auto cand = view.candidate(j);
                    double norm_log = 0.0;
                    for (int i = 0; i < t; ++i) norm_log += cand[i];
                    hi = std::max(hi, norm_log);
                    lo = std::min(lo, norm_log);
                }
                acc = std::max(acc, hi - lo);
            },
            [](double& into, const double& from) { into = std::max(into, from); }, 0.0);
        worst_log = std::max(worst_log, local);
    }
    return std::exp(worst_log);
}

PressureEstimate estimate_pressure(const CocycleSpec& c, const ExponentVector& q, int n_max,
                                   const PressureOptions& opts) {
    if (n_max < 1) throw ValidationError("n_max must be >= 1");
    PressureEstimate out;
    out.q.assign(q.q.data(), q.q.data() + q.q.size());
    out.n_max = n_max;

    SweepOptions sweep{opts.budget, opts.threads};
    std::vector<int> grid = opts.value_grid;
    if (grid.empty())
        for (int n = 1; n <= n_max; ++n) grid.push_back(n);
    if (std::find(grid.begin(), grid.end(), n_max) == grid.end()) grid.push_back(n_max);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> log_zs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        log_zs[i] = partition_function_log(c, q, grid[i], sweep);
        out.values.emplace_back(grid[i], log_zs[i] / grid[i]);
    }
    out.point_estimate = out.values.back().second;

    for (std::size_t i = 1; i < out.values.size(); ++i) {
        const double up = out.values[i].second - out.values[i - 1].second;
        if (up > 1e-12) {
            out.values_nonincreasing = false;
            out.max_uptick = std::max(out.max_uptick, up);
        }
    }
    {
        std::vector<double> seq;
        for (const auto& [n, v] : out.values) seq.push_back(v);
        out.aitken = aitken_extrapolate(seq);
    }

    if (opts.qm_constant) {
        const double log_c2 = opts.qm_constant->first;
        const int k = opts.qm_constant->second;
        out.qm_constant_log = log_c2;
        out.gap_k = k;
        // Hard Fekete assertion: a_{n+m+k} >= a_n + a_m with a_n = logZ_n + logC2
        // on every computed triple.
        auto log_z_at = [&](int n) -> std::optional<double> {
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (grid[i] == n) return log_zs[i];
            return std::nullopt;
        };
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (std::size_t j = 0; j < grid.size(); ++j) {
                const auto sum = log_z_at(grid[i] + grid[j] + k);
                if (!sum) continue;
                const double lhs = *sum + log_c2;
                const double rhs = (log_zs[i] + log_c2) + (log_zs[j] + log_c2);
                if (lhs + 1e-9 < rhs)
                    throw ValidationError(
                        "supplied qm constant violates Fekete superadditivity at n=" +
                        std::to_string(grid[i]) + ", m=" + std::to_string(grid[j]));
            }
        double best = kNegInf;
        for (std::size_t i = 0; i < grid.size(); ++i)
            best = std::max(best, (log_zs[i] + log_c2) / (grid[i] + k));
        out.superadditive_lower = best;
    }

    if (opts.attach_crosscheck && c.one_step_cocycle()) {
        if (q.is_zero()) {
            PressureCrossCheck cc;
            cc.kind = "q-zero";
            cc.limit_value = log_spectral_radius(c.sft());
            AdditivePressure ap = additive_pressure_transfer(
                c.sft(), std::vector<double>(c.sft().alphabet_size(), 0.0), n_max);
            cc.finite_n_value = ap.finite_n_log_z;
            cc.finite_n_difference = std::abs(ap.finite_n_log_z - log_zs.back());
            out.crosscheck = cc;
        } else if (q.is_constant()) {
            // q = (s/d, ..., s/d): log psi^q = (s/d) log|det|, additive over symbols
            PressureCrossCheck cc;
            cc.kind = "determinant-direction";
            const int k = c.sft().alphabet_size();
            std::vector<double> log_w(k);
            for (int a = 0; a < k; ++a) {
                const std::vector<int> window{a};
                const Matrix& g = c.generator(window);
                log_w[a] = q.q(0) * std::log(std::abs(g.determinant()));
            }
            AdditivePressure ap = additive_pressure_transfer(c.sft(), log_w, n_max);
            cc.limit_value = ap.limit;
            cc.finite_n_value = ap.finite_n_log_z;
            cc.finite_n_difference = std::abs(ap.finite_n_log_z - log_zs.back());
            out.crosscheck = cc;
        }
    }
    return out;
}

} // namespace lyapress
