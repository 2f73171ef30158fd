#include "lyapress/structure.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lyapress/errors.hpp"
#include "lyapress/numeric.hpp"

namespace lyapress {

namespace {

// A^{per(p)}(p) as a plain matrix (period-length product; desk scale).
Matrix period_matrix(const CocycleSpec& c, const PeriodicPointSym& p) {
    const SymbolicPoint x = SymbolicPoint::periodic(p);
    if (!x.admissible(c.sft())) throw InadmissibleWord("periodic word is not admissible");
    return forward_product(c, x, p.period()).dense();
}

struct ModulusGap {
    double min_rel_gap = std::numeric_limits<double>::infinity();
    std::pair<double, double> worst_pair{0.0, 0.0};
};

ModulusGap modulus_gap(const Eigen::VectorXcd& eivals) {
    std::vector<double> mods(eivals.size());
    for (int i = 0; i < eivals.size(); ++i) mods[i] = std::abs(eivals(i));
    std::sort(mods.rbegin(), mods.rend());
    ModulusGap out;
    for (std::size_t i = 0; i + 1 < mods.size(); ++i) {
        const double scale = std::max(mods[i], 1e-300);
        const double rel = (mods[i] - mods[i + 1]) / scale;
        if (rel < out.min_rel_gap) {
            out.min_rel_gap = rel;
            out.worst_pair = {mods[i], mods[i + 1]};
        }
    }
    if (mods.size() == 1) out.min_rel_gap = 1.0;   // d = 1: trivially pinched
    return out;
}

// Real eigenvectors sorted by decreasing |eigenvalue|; requires the pinching
// gap to have passed so the spectrum is real and simple.
std::vector<Vector> sorted_real_eigenvectors(const Matrix& a, double gap_tol) {
    Eigen::EigenSolver<Matrix> es(a);
    const auto vals = es.eigenvalues();
    const auto vecs = es.eigenvectors();
    std::vector<int> order(vals.size());
    for (int i = 0; i < vals.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return std::abs(vals(i)) > std::abs(vals(j)); });
    std::vector<Vector> out;
    for (int idx : order) {
        if (std::abs(vals(idx).imag()) > gap_tol * std::max(std::abs(vals(idx)), 1.0))
            throw ValidationError("complex eigenvalue where pinching was assumed");
        Vector v = vecs.col(idx).real();
        v.normalize();
        out.push_back(v);
    }
    return out;
}

nlohmann::ordered_json eigenvalue_list(const Eigen::VectorXcd& vals) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (int i = 0; i < vals.size(); ++i)
        out.push_back({{"re", vals(i).real()}, {"im", vals(i).imag()}});
    return out;
}

} // namespace

StructureVerdict check_pinching(const CocycleSpec& c, const PeriodicPointSym& p,
                                const StructureOptions& opts) {
    StructureVerdict v;
    v.kind = CheckKind::Pinching;
    const Matrix ap = period_matrix(c, p);
    const int d = c.dimension();
    double margin = std::numeric_limits<double>::infinity();
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    int worst_level = 1;
    for (int t = 1; t <= std::max(1, d - 1); ++t) {
        const Matrix at = (t == 1) ? ap : exterior_power(ap, t);
        Eigen::EigenSolver<Matrix> es(at, false);
        const ModulusGap gap = modulus_gap(es.eigenvalues());
        levels.push_back({{"t", t},
                          {"min_relative_gap", gap.min_rel_gap},
                          {"eigenvalues", eigenvalue_list(es.eigenvalues())}});
        if (gap.min_rel_gap < margin) {
            margin = gap.min_rel_gap;
            worst_level = t;
        }
    }
    v.margin = margin;
    v.verdict = (margin > opts.gap_tol) ? VerdictState::Pass : VerdictState::Fail;
    v.witness = {{"levels", levels}, {"worst_level", worst_level}, {"gap_tol", opts.gap_tol}};
    return v;
}

Matrix homoclinic_loop_matrix(const CocycleSpec& c, const PeriodicPointSym& p,
                              const HomoclinicPointSym& z, int t,
                              const StructureOptions& opts) {
    const SymbolicPoint pp = SymbolicPoint::periodic(p);
    const SymbolicPoint zz = SymbolicPoint::homoclinic(z);
    if (!zz.admissible(c.sft()))
        throw InadmissibleWord("homoclinic excursion is not admissible");
    const long n = z.entry_time;
    const CocycleSpec ct = (t == 1) ? c : c.wedge(t);

    // H^u_{z <- p} and H^s_{p <- T^n z}; identities for one-step cocycles.
    const HolonomyResult hu = unstable_holonomy(ct, pp, zz, opts.holonomy);
    const HolonomyResult hs = stable_holonomy(ct, zz.shifted(n), pp, opts.holonomy);

    const ScaledMatrix an_z = forward_product(ct, zz, n);
    const ScaledMatrix an_p_inv = backward_product_inverse(ct, pp, n);
    // A^{-n}(p) for the periodic point equals (A^n(T^{-n}p))^{-1}; scales cancel
    Matrix out = an_p_inv.m * hs.h * an_z.m * hu.h;
    return out * std::exp(an_p_inv.log_scale + an_z.log_scale);
}

StructureVerdict check_twisting(const CocycleSpec& c, const PeriodicPointSym& p,
                                const HomoclinicPointSym& z, int t,
                                const StructureOptions& opts) {
    StructureVerdict v;
    v.kind = CheckKind::Twisting;
    const Matrix ap = period_matrix(c, p);
    const Matrix at = (t == 1) ? ap : exterior_power(ap, t);
    const int dt = static_cast<int>(at.rows());

    // guard: eigenvectors are only trustworthy under the pinching gap
    {
        Eigen::EigenSolver<Matrix> es(at, false);
        const ModulusGap gap = modulus_gap(es.eigenvalues());
        if (gap.min_rel_gap <= opts.gap_tol) {
            v.verdict = VerdictState::Inconclusive;
            v.margin = gap.min_rel_gap;
            v.witness = {{"reason", "near-degenerate eigenvalue moduli; no eigenbasis"},
                         {"t", t}};
            return v;
        }
    }
    std::vector<Vector> eigvecs = sorted_real_eigenvectors(at, opts.gap_tol);
    const Matrix loop = homoclinic_loop_matrix(c, p, z, t, opts);

    // budget: sum over (I, J) pairs with |I| + |J| <= dt
    std::uint64_t pair_count = 0;
    for (int a = 0; a <= dt; ++a)
        for (int b = 0; a + b <= dt; ++b)
            pair_count += static_cast<std::uint64_t>(binomial(dt, a)) * binomial(dt, b);
    if (pair_count > opts.combinatorial_cap)
        throw CombinatorialBudget("twisting pair count " + std::to_string(pair_count) +
                                  " exceeds cap " + std::to_string(opts.combinatorial_cap));

    double margin = std::numeric_limits<double>::infinity();
    nlohmann::ordered_json worst;
    for (int a = 0; a <= dt; ++a) {
        const auto& subsets_i = subset_basis(dt, a);
        for (int b = 0; a + b <= dt; ++b) {
            if (a + b == 0) continue;
            const auto& subsets_j = subset_basis(dt, b);
            for (const auto& si : subsets_i) {
                for (const auto& sj : subsets_j) {
                    Matrix stacked(dt, a + b);
                    int col = 0;
                    for (int i : si) {
                        Vector w = loop * eigvecs[i];
                        stacked.col(col++) = w / w.norm();
                    }
                    for (int j : sj) stacked.col(col++) = eigvecs[j];
                    const double smin =
                        Eigen::JacobiSVD<Matrix>(stacked).singularValues().minCoeff();
                    if (smin < margin) {
                        margin = smin;
                        worst = {{"I", si}, {"J", sj}, {"smallest_singular_value", smin}};
                    }
                }
            }
        }
    }
    v.margin = margin;
    v.verdict = (margin > opts.lin_tol) ? VerdictState::Pass : VerdictState::Fail;
    v.witness = {{"t", t}, {"worst_pair", worst}, {"lin_tol", opts.lin_tol},
                 {"pairs_checked", pair_count}};
    return v;
}

StructureVerdict check_typical(const CocycleSpec& c, const PeriodicPointSym& p,
                               const HomoclinicPointSym& z, const StructureOptions& opts) {
    StructureVerdict v;
    v.kind = CheckKind::Typical;
    v.margin = std::numeric_limits<double>::infinity();
    nlohmann::ordered_json parts = nlohmann::ordered_json::array();

    const StructureVerdict pinch = check_pinching(c, p, opts);
    parts.push_back({{"check", "pinching"}, {"verdict", to_string(pinch.verdict)},
                     {"margin", pinch.margin}});
    v.margin = std::min(v.margin, pinch.margin);
    VerdictState state = pinch.verdict;

    const int d = c.dimension();
    for (int t = 1; t <= std::max(1, d - 1) && state == VerdictState::Pass; ++t) {
        const StructureVerdict tw = check_twisting(c, p, z, t, opts);
        parts.push_back({{"check", "twisting"}, {"t", t}, {"verdict", to_string(tw.verdict)},
                         {"margin", tw.margin}});
        v.margin = std::min(v.margin, tw.margin);
        if (tw.verdict != VerdictState::Pass) state = tw.verdict;
    }
    v.verdict = state;
    v.witness = {{"parts", parts}};
    return v;
}

namespace {

// log ||A^{wedge i}(I)|| for all words of length n and 1 <= i <= i_max,
// flattened words-major; exact cylinder maxima.
std::vector<double> wedge_norm_table(const CocycleSpec& c, int n, int i_max,
                                     const StructureOptions& opts) {
    const CylinderTable table = CylinderTable::build(c, n, SweepOptions{opts.budget, opts.threads});
    std::vector<double> out(table.num_words() * static_cast<std::size_t>(i_max));
    const int d = table.dimension();
    for (std::uint64_t w = 0; w < table.num_words(); ++w) {
        const auto cands = table.candidates(w);
        const int nc = static_cast<int>(cands.size()) / d;
        for (int i = 1; i <= i_max; ++i) {
            double best = kNegInf;
            for (int j = 0; j < nc; ++j) {
                double acc = 0.0;
                for (int s = 0; s < i; ++s) acc += cands[static_cast<std::size_t>(j) * d + s];
                best = std::max(best, acc);
            }
            out[w * static_cast<std::size_t>(i_max) + (i - 1)] = best;
        }
    }
    return out;
}

} // namespace

StructureVerdict probe_quasi_multiplicativity(const CocycleSpec& c, int n_pairs, int k_max,
                                              const StructureOptions& opts) {
    StructureVerdict v;
    v.kind = CheckKind::QuasiMultiplicative;
    const SubshiftSpec& sft = c.sft();
    const int d = c.dimension();
    const int i_max = std::max(1, d - 1);

    // per-length norm tables for all lengths we will look up
    std::vector<std::vector<double>> norms(2 * n_pairs + k_max + 1);
    for (int len = 1; len <= 2 * n_pairs + k_max; ++len)
        norms[len] = wedge_norm_table(c, len, i_max, opts);

    // c_k(n) in log space; kNegInf marks a pair with no admissible connector
    std::vector<std::vector<double>> log_c(k_max + 1, std::vector<double>(n_pairs + 1, 0.0));
    nlohmann::ordered_json worst_witness;

    std::vector<Word> words_n;
    for (int n = 1; n <= n_pairs; ++n) {
        words_n.clear();
        for_each_word(sft, n, opts.budget, [&](const Word& w) { words_n.push_back(w); });
        for (int k = 0; k <= k_max; ++k) {
            std::vector<Word> connectors;
            if (k > 0)
                for_each_word(sft, k, opts.budget, [&](const Word& w) { connectors.push_back(w); });
            double worst = -kNegInf;   // +inf: minimum over pairs
            Word worst_i, worst_j, worst_k;
            std::vector<int> joined;
            for (const auto& wi : words_n) {
                for (const auto& wj : words_n) {
                    double best = kNegInf;  // maximum over connectors
                    Word best_k;
                    auto try_connector = [&](const Word* conn) {
                        joined.clear();
                        joined.insert(joined.end(), wi.symbols.begin(), wi.symbols.end());
                        if (conn) joined.insert(joined.end(), conn->symbols.begin(), conn->symbols.end());
                        joined.insert(joined.end(), wj.symbols.begin(), wj.symbols.end());
                        if (!sft.word_admissible(joined)) return;
                        const int len = static_cast<int>(joined.size());
                        const std::uint64_t rank = word_rank(sft, joined);
                        const std::uint64_t ri = word_rank(sft, wi.symbols);
                        const std::uint64_t rj = word_rank(sft, wj.symbols);
                        double ratio_min = -kNegInf;
                        for (int i = 1; i <= i_max; ++i) {
                            const double num = norms[len][rank * i_max + (i - 1)];
                            const double den = norms[n][ri * i_max + (i - 1)] +
                                               norms[n][rj * i_max + (i - 1)];
                            ratio_min = std::min(ratio_min, num - den);
                        }
                        if (ratio_min > best) {
                            best = ratio_min;
                            best_k = conn ? *conn : Word();
                        }
                    };
                    if (k == 0) {
                        try_connector(nullptr);
                    } else {
                        for (const auto& wk : connectors) try_connector(&wk);
                    }
                    if (best < worst) {
                        worst = best;
                        worst_i = wi;
                        worst_j = wj;
                        worst_k = best_k;
                    }
                }
            }
            log_c[k][n] = worst;
            if (n == n_pairs && worst > kNegInf) {
                worst_witness = {{"k", k},
                                 {"I", worst_i.to_string()},
                                 {"J", worst_j.to_string()},
                                 {"K", worst_k.to_string()},
                                 {"log_c", worst}};
            }
        }
    }

    // fit log c_k(n) against n for each k
    bool any_pass = false;
    bool all_fail = true;
    double best_slope = kNegInf;
    int best_k = -1;
    nlohmann::ordered_json fits = nlohmann::ordered_json::array();
    for (int k = 0; k <= k_max; ++k) {
        std::vector<double> xs, ys;
        bool dead = false;
        for (int n = 1; n <= n_pairs; ++n) {
            if (log_c[k][n] == kNegInf) { dead = true; break; }
            xs.push_back(n);
            ys.push_back(log_c[k][n]);
        }
        if (dead) {
            fits.push_back({{"k", k}, {"dead", true}});
            continue;
        }
        const LinearFit fit = fit_line(xs, ys);
        fits.push_back({{"k", k}, {"slope", fit.slope}, {"r2", fit.r2},
                        {"log_c_last", ys.back()}});
        const bool decays = fit.slope < opts.qm_slope_threshold && fit.r2 > opts.qm_r2_threshold;
        if (!decays) all_fail = false;
        if (fit.slope >= opts.qm_slope_threshold) any_pass = true;
        if (fit.slope > best_slope) {
            best_slope = fit.slope;
            best_k = k;
        }
    }
    if (best_k < 0) {
        v.verdict = VerdictState::Fail;   // no k admits connectors at all
        v.margin = 0.0;
    } else if (any_pass) {
        v.verdict = VerdictState::Pass;
        v.margin = best_slope - opts.qm_slope_threshold;
    } else if (all_fail) {
        v.verdict = VerdictState::Fail;
        v.margin = best_slope - opts.qm_slope_threshold;
    } else {
        v.verdict = VerdictState::Inconclusive;
        v.margin = best_slope - opts.qm_slope_threshold;
    }
    v.witness = {{"fits", fits},
                 {"best_k", best_k},
                 {"worst_pair_at_n_max", worst_witness},
                 {"thresholds", {{"slope", opts.qm_slope_threshold}, {"r2", opts.qm_r2_threshold}}}};
    return v;
}

StructureVerdict check_domination(const CocycleSpec& c, int index, int n_max,
                                  const StructureOptions& opts) {
    StructureVerdict v;
    v.kind = CheckKind::Dominated;
    v.index = index;
    const int d = c.dimension();
    if (index < 1 || index >= d) throw ValidationError("domination index must lie in 1..d-1");

    std::vector<double> xs, ys;
    SweepOptions sweep{opts.budget, opts.threads};
    for (int n = 1; n <= n_max; ++n) {
        const double g_log = sweep_accumulate<double>(
            c, n, sweep,
            [&](double& acc, const CylinderView& view) {
                for (int j = 0; j < view.num_candidates(); ++j) {
                    const auto cand = view.candidate(j);
                    acc = std::max(acc, cand[index] - cand[index - 1]);
                }
            },
            [](double& into, const double& from) { into = std::max(into, from); }, kNegInf);
        xs.push_back(n);
        ys.push_back(g_log);
    }
    const LinearFit fit = fit_line(xs, ys);
    const double tau_hat = std::exp(fit.slope);
    const double log_c_hat = fit.intercept;
    const bool good_fit = fit.r2 > 0.9 || fit.max_residual < 0.1;
    v.margin = -fit.slope;
    if (fit.slope <= -opts.domination_slope_tol && good_fit)
        v.verdict = VerdictState::Pass;
    else if (fit.slope > -opts.domination_slope_tol)
        v.verdict = VerdictState::Fail;
    else
        v.verdict = VerdictState::Inconclusive;
    v.witness = {{"index", index},
                 {"tau_hat", tau_hat},
                 {"log_C_hat", log_c_hat},
                 {"slope", fit.slope},
                 {"r2", fit.r2},
                 {"max_residual", fit.max_residual},
                 {"g_log", ys}};
    return v;
}

} // namespace lyapress
