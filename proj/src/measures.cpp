#include "lyapress/measures.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "lyapress/errors.hpp"
#include "lyapress/numeric.hpp"
#include "lyapress/parallel.hpp"
#include "lyapress/rng.hpp"

namespace lyapress {

namespace {

Vector solve_stationary(const Matrix& p) {
    const int k = static_cast<int>(p.rows());
    Matrix a = p.transpose() - Matrix::Identity(k, k);
    a.row(k - 1).setOnes();
    Vector rhs = Vector::Zero(k);
    rhs(k - 1) = 1.0;
    Vector pi = a.fullPivLu().solve(rhs);
    bool ok = true;
    for (int i = 0; i < k; ++i)
        if (pi(i) < -1e-10) ok = false;
    if (ok) {
        for (int i = 0; i < k; ++i) pi(i) = std::max(pi(i), 0.0);
        const double s = pi.sum();
        if (s > 0) pi /= s;
        if ((pi.transpose() * p).transpose().isApprox(pi, 1e-9) ||
            ((pi.transpose() * p).transpose() - pi).norm() < 1e-11)
            return pi;
    }
    // reducible or periodic chain: Cesaro-averaged power iteration
    Vector v = Vector::Constant(k, 1.0 / k);
    Vector avg = Vector::Zero(k);
    for (int it = 0; it < 20000; ++it) {
        v = (v.transpose() * p).transpose();
        avg += v;
    }
    avg /= avg.sum();
    // polish: a few extra averaged rounds
    for (int round = 0; round < 64; ++round) {
        Vector nxt = (avg.transpose() * p).transpose();
        avg = 0.5 * (avg + nxt);
    }
    avg /= avg.sum();
    if (((avg.transpose() * p).transpose() - avg).norm() > 1e-10)
        throw ValidationError("could not compute a stationary vector for the stochastic matrix");
    return avg;
}

} // namespace

MarkovMeasure::MarkovMeasure(const SubshiftSpec& sft, Matrix stochastic) : p_(std::move(stochastic)) {
    const int k = sft.alphabet_size();
    if (p_.rows() != k || p_.cols() != k)
        throw ValidationError("stochastic matrix must be k x k");
    for (int i = 0; i < k; ++i) {
        double row = 0.0;
        for (int j = 0; j < k; ++j) {
            const double v = p_(i, j);
            if (v < 0.0 || !std::isfinite(v))
                throw ValidationError("stochastic entries must be finite and nonnegative");
            if (v > 0.0 && !sft.transition(i, j))
                throw ValidationError("stochastic support leaves the subshift at " +
                                      std::to_string(i) + "->" + std::to_string(j));
            row += v;
        }
        if (std::abs(row - 1.0) > 1e-9)
            throw ValidationError("stochastic row " + std::to_string(i) + " does not sum to 1");
        p_.row(i) /= row;
    }
    pi_ = solve_stationary(p_);
    // refine to the contract tolerance
    for (int it = 0; it < 8; ++it) pi_ = (pi_.transpose() * p_).transpose();
    pi_ /= pi_.sum();
    if (((pi_.transpose() * p_).transpose() - pi_).lpNorm<Eigen::Infinity>() > 1e-12)
        throw ValidationError("stationary vector fails pi P = pi at 1e-12");
}

MarkovMeasure MarkovMeasure::bernoulli(const SubshiftSpec& sft, const Vector& probabilities) {
    const int k = sft.alphabet_size();
    if (probabilities.size() != k) throw ValidationError("need one probability per symbol");
    Matrix p(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) p(i, j) = probabilities(j);
    return MarkovMeasure(sft, p);
}

MarkovMeasure MarkovMeasure::parry(const SubshiftSpec& sft) {
    if (!sft.is_primitive()) throw NotPrimitive("Parry measure needs a primitive subshift");
    const int k = sft.alphabet_size();
    Matrix q(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) q(i, j) = sft.transition(i, j) ? 1.0 : 0.0;
    Eigen::EigenSolver<Matrix> es(q);
    int best = 0;
    double rho = 0.0;
    for (int i = 0; i < k; ++i)
        if (std::abs(es.eigenvalues()(i)) > rho) {
            rho = std::abs(es.eigenvalues()(i));
            best = i;
        }
    Vector v = es.eigenvectors().col(best).real().cwiseAbs();
    Matrix p = Matrix::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (sft.transition(i, j)) p(i, j) = v(j) / (rho * v(i));
    return MarkovMeasure(sft, p);
}

MarkovMeasure MarkovMeasure::dirac_fixed_point(const SubshiftSpec& sft, int symbol) {
    if (!sft.transition(symbol, symbol))
        throw ValidationError("symbol does not carry a fixed point");
    const int k = sft.alphabet_size();
    Matrix p = Matrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        if (sft.transition(i, symbol)) {
            p(i, symbol) = 1.0;
        } else {
            for (int j = 0; j < k; ++j)
                if (sft.transition(i, j)) { p(i, j) = 1.0; break; }
        }
    }
    return MarkovMeasure(sft, p);
}

double MarkovMeasure::cylinder_mass(std::span<const int> word) const {
    double acc = pi_(word[0]);
    for (std::size_t t = 0; t + 1 < word.size(); ++t) acc *= p_(word[t], word[t + 1]);
    return acc;
}

double MarkovMeasure::cylinder_log_mass(std::span<const int> word) const {
    const double m = cylinder_mass(word);
    return m > 0.0 ? std::log(m) : kNegInf;
}

double entropy_rate(const MarkovMeasure& m) {
    const Matrix& p = m.transition();
    const Vector& pi = m.stationary();
    double h = 0.0;
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j)
            if (p(i, j) > 0.0) h -= pi(i) * p(i, j) * std::log(p(i, j));
    return h;
}

namespace {

// Serial lexicographic DFS over admissible words accumulating the Markov
// cylinder masses; `leaf(index, weight)` sees words in order.
void mu_dfs(const SubshiftSpec& sft, const Matrix& p, const Vector& pi, int n,
            const std::function<void(std::uint64_t, double, std::span<const int>)>& leaf) {
    std::vector<int> word(n);
    std::vector<double> mass(n + 1);
    std::uint64_t index = 0;
    std::function<void(int)> rec = [&](int pos) {
        for (int s = 0; s < sft.alphabet_size(); ++s) {
            if (pos == 0) {
                mass[1] = pi(s);
            } else {
                if (!sft.transition(word[pos - 1], s)) continue;
                mass[pos + 1] = mass[pos] * p(word[pos - 1], s);
            }
            word[pos] = s;
            if (pos == n - 1)
                leaf(index++, mass[n], word);
            else
                rec(pos + 1);
        }
    };
    rec(0);
}

} // namespace

double block_entropy(const SubshiftSpec& sft, const MarkovMeasure& m, int n,
                     const SweepOptions& opts) {
    bool sat = false;
    if (sft.word_count(n, &sat) > opts.budget || sat)
        throw BudgetExceeded("block entropy at n=" + std::to_string(n));
    double h = 0.0;
    mu_dfs(sft, m.transition(), m.stationary(), n,
           [&](std::uint64_t, double w, std::span<const int>) {
               if (w > 0.0) h -= w * std::log(w);
           });
    return h;
}

ExponentReport lyapunov_vector(const CocycleSpec& c, const MarkovMeasure& m, int n,
                               const std::optional<ExponentVector>& q,
                               const LyapunovOptions& opts) {
    const int d = c.dimension();
    ExponentReport out;
    out.n_used = n;
    bool sat = false;
    const std::uint64_t words = c.sft().word_count(n, &sat);
    if (!sat && words <= opts.budget) {
        using Buf = std::vector<double>;             // d chi sums + psi sum
        SweepOptions sweep{opts.budget, opts.threads};
        Buf acc = sweep_accumulate<Buf>(
            c, n, sweep,
            [&](Buf& a, const CylinderView& view) {
                const double w = m.cylinder_mass(view.word);
                if (w == 0.0) return;
                // representative (max-norm candidate)
                int best = 0;
                for (int j = 1; j < view.num_candidates(); ++j)
                    if (view.candidate(j)[0] > view.candidate(best)[0]) best = j;
                const auto rep = view.candidate(best);
                for (int i = 0; i < d; ++i) a[i] += w * rep[i];
                if (q) {
                    double psi = kNegInf;
                    for (int j = 0; j < view.num_candidates(); ++j) {
                        const auto cand = view.candidate(j);
                        double dot = 0.0;
                        for (int i = 0; i < d; ++i) dot += q->q(i) * cand[i];
                        psi = std::max(psi, dot);
                    }
                    a[d] += w * psi;
                }
            },
            [](Buf& into, const Buf& from) {
                for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
            },
            Buf(d + 1, 0.0));
        out.chi.resize(d);
        for (int i = 0; i < d; ++i) out.chi(i) = acc[i] / n;
        out.chi_psi_q = q ? acc[d] / n : 0.0;
        out.method = ExponentMethod::ExactCylinder;
        return out;
    }

    // Monte-carlo fallback with a flagged standard error.  Singular values
    // come from per-level exterior products so deep sigma_i stay accurate on
    // long sampled blocks.
    out.method = ExponentMethod::MonteCarlo;
    const Vector& pi = m.stationary();
    const Matrix& p = m.transition();
    const int k = c.sft().alphabet_size();
    Vector chi_sum = Vector::Zero(d);
    double psi_sum = 0.0, psi_sq = 0.0;
    Rng rng(opts.seed);
    const int block_len = c.determining_length(n);
    std::vector<int> word(block_len);
    for (std::uint64_t s = 0; s < opts.mc_samples; ++s) {
        double u = rng.next_double();
        int cur = k - 1;
        double cumulative = 0.0;
        for (int j = 0; j < k; ++j) {
            cumulative += pi(j);
            if (u < cumulative) { cur = j; break; }
        }
        word[0] = cur;
        for (int t = 1; t < block_len; ++t) {
            u = rng.next_double();
            cumulative = 0.0;
            int nxt = -1;
            for (int j = 0; j < k; ++j) {
                cumulative += p(cur, j);
                if (u < cumulative) { nxt = j; break; }
            }
            if (nxt < 0) {
                for (int j = k - 1; j >= 0; --j)
                    if (p(cur, j) > 0) { nxt = j; break; }
            }
            word[t] = nxt;
            cur = nxt;
        }
        const Vector ls = block_log_sigma_stable(c, word);
        chi_sum += ls;
        if (q) {
            double dot = 0.0;
            for (int i = 0; i < d; ++i) dot += q->q(i) * ls(i);
            psi_sum += dot;
            psi_sq += dot * dot;
        }
    }
    const double inv = 1.0 / static_cast<double>(opts.mc_samples);
    out.chi = chi_sum * inv / n;
    if (q) {
        const double mean = psi_sum * inv;
        out.chi_psi_q = mean / n;
        const double var = std::max(psi_sq * inv - mean * mean, 0.0);
        out.mc_standard_error = std::sqrt(var / static_cast<double>(opts.mc_samples)) / n;
    }
    return out;
}

double variational_gap(const CocycleSpec& c, const MarkovMeasure& m, const ExponentVector& q,
                       int n, const LyapunovOptions& opts) {
    SweepOptions sweep{opts.budget, opts.threads};
    const double log_z = partition_function_log(c, q, n, sweep);
    const double h_n = block_entropy(c.sft(), m, n, sweep);
    const ExponentReport rep = lyapunov_vector(c, m, n, q, opts);
    if (rep.method != ExponentMethod::ExactCylinder)
        throw BudgetExceeded("variational gap requires the exact-cylinder route");
    return log_z / n - (h_n / n + rep.chi_psi_q);
}

namespace {

struct AscentProblem {
    const SubshiftSpec& sft;
    std::vector<std::vector<int>> support;   // allowed columns per row
    int k;

    explicit AscentProblem(const SubshiftSpec& s) : sft(s), k(s.alphabet_size()) {
        support.resize(k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (s.transition(i, j)) support[i].push_back(j);
    }

    Matrix random_point(Rng& rng) const {
        Matrix p = Matrix::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            double total = 0.0;
            std::vector<double> w(support[i].size());
            for (std::size_t a = 0; a < w.size(); ++a) {
                w[a] = -std::log(std::max(rng.next_double(), 1e-300));
                total += w[a];
            }
            for (std::size_t a = 0; a < w.size(); ++a) p(i, support[i][a]) = w[a] / total;
        }
        return p;
    }

    // Euclidean projection of each row onto its support simplex.
    void project(Matrix& p) const {
        for (int i = 0; i < k; ++i) {
            std::vector<double> v;
            v.reserve(support[i].size());
            for (int j : support[i]) v.push_back(p(i, j));
            std::vector<double> sorted = v;
            std::sort(sorted.rbegin(), sorted.rend());
            double cum = 0.0, theta = 0.0;
            int rho = 0;
            for (std::size_t a = 0; a < sorted.size(); ++a) {
                cum += sorted[a];
                const double t = (cum - 1.0) / static_cast<double>(a + 1);
                if (sorted[a] - t > 0) { rho = static_cast<int>(a + 1); theta = t; }
            }
            p.row(i).setZero();
            for (std::size_t a = 0; a < v.size(); ++a)
                p(i, support[i][a]) = std::max(v[a] - theta, 0.0);
        }
    }
};

// Deterministic projected-gradient ascent with central finite differences.
Matrix ascend(const AscentProblem& prob, Matrix p, const std::function<double(const Matrix&)>& f,
              int max_iter, double fd_step) {
    double fp = f(p);
    double step = 0.05;
    for (int it = 0; it < max_iter; ++it) {
        Matrix grad = Matrix::Zero(prob.k, prob.k);
        for (int i = 0; i < prob.k; ++i) {
            if (prob.support[i].size() < 2) continue;
            for (int j : prob.support[i]) {
                Matrix hi = p, lo = p;
                hi(i, j) += fd_step;
                lo(i, j) -= fd_step;
                prob.project(hi);
                prob.project(lo);
                grad(i, j) = (f(hi) - f(lo)) / (2.0 * fd_step);
            }
        }
        const double gn = grad.norm();
        if (gn < 1e-12) break;
        bool improved = false;
        for (int tries = 0; tries < 24; ++tries) {
            Matrix cand = p + (step / gn) * grad;
            prob.project(cand);
            const double fc = f(cand);
            if (fc > fp + 1e-15) {
                p = std::move(cand);
                fp = fc;
                step *= 1.4;
                improved = true;
                break;
            }
            step *= 0.45;
            if (step < 1e-14) break;
        }
        if (!improved) break;
    }
    return p;
}

bool lexicographically_smaller(const Matrix& a, const Matrix& b) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (a(i, j) < b(i, j)) return true;
            if (a(i, j) > b(i, j)) return false;
        }
    return false;
}

// weighted sum over words of per_word values under the Markov measure of P
double mu_dot(const SubshiftSpec& sft, const Matrix& p, const Vector& pi, int n,
              const std::vector<double>& per_word) {
    double acc = 0.0;
    mu_dfs(sft, p, pi, n, [&](std::uint64_t idx, double w, std::span<const int>) {
        if (w > 0.0) acc += w * per_word[idx];
    });
    return acc;
}

Vector mu_dot_sigma(const SubshiftSpec& sft, const Matrix& p, const Vector& pi, int n,
                    const CylinderTable& table) {
    Vector acc = Vector::Zero(table.dimension());
    mu_dfs(sft, p, pi, n, [&](std::uint64_t idx, double w, std::span<const int>) {
        if (w <= 0.0) return;
        const auto rep = table.representative(idx);
        for (int i = 0; i < table.dimension(); ++i) acc(i) += w * rep[i];
    });
    return acc;
}

double entropy_rate_of(const Matrix& p, const Vector& pi) {
    double h = 0.0;
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j)
            if (p(i, j) > 0.0) h -= pi(i) * p(i, j) * std::log(p(i, j));
    return h;
}

struct RestartOutcome {
    Matrix p;
    double objective = kNegInf;
};

} // namespace

MaximizeResult maximize_variational(const CocycleSpec& c, const ExponentVector& q, int n,
                                    const MaximizeOptions& opts) {
    const SubshiftSpec& sft = c.sft();
    AscentProblem prob(sft);
    const bool q_zero = q.is_zero();

    // Per-word log psi^q cache; skipped entirely at q = 0 where the exponent
    // term vanishes.
    CylinderTable table;
    std::vector<double> c_q;
    if (!q_zero) {
        table = CylinderTable::build(c, n, SweepOptions{opts.budget, opts.threads});
        std::span<const double> qs(q.q.data(), q.q.size());
        table.word_values(qs, c_q);
    }

    auto objective = [&](const Matrix& p) -> double {
        Vector pi;
        try {
            pi = solve_stationary(p);
        } catch (const ValidationError&) {
            return kNegInf;
        }
        double val = entropy_rate_of(p, pi);
        if (!q_zero) val += mu_dot(sft, p, pi, n, c_q) / n;
        return val;
    };

    std::vector<RestartOutcome> outcomes(opts.restarts);
    parallel_blocks(opts.restarts, opts.threads, [&](std::size_t r) {
        Rng rng = Rng::sub_stream(opts.seed, r);
        Matrix start = (r == 0) ? MarkovMeasure::parry(sft).transition() : prob.random_point(rng);
        Matrix best = ascend(prob, start, objective, opts.max_iterations, opts.fd_step);
        outcomes[r] = {best, objective(best)};
    });
    int winner = 0;
    for (int r = 1; r < opts.restarts; ++r) {
        if (outcomes[r].objective > outcomes[winner].objective ||
            (outcomes[r].objective == outcomes[winner].objective &&
             lexicographically_smaller(outcomes[r].p, outcomes[winner].p)))
            winner = r;
    }

    MarkovMeasure m(sft, outcomes[winner].p);
    MaximizeResult out{m, 0.0, 0.0, 0.0};
    out.entropy_term = entropy_rate(m);
    if (!q_zero) out.exponent_term = mu_dot(sft, m.transition(), m.stationary(), n, c_q) / n;
    out.objective = out.entropy_term + out.exponent_term;
    return out;
}

ConstrainedMaximizeResult maximize_entropy_at_alpha(const CocycleSpec& c, const Vector& alpha,
                                                    int n, const MaximizeOptions& opts) {
    const SubshiftSpec& sft = c.sft();
    AscentProblem prob(sft);
    CylinderTable table = CylinderTable::build(c, n, SweepOptions{opts.budget, opts.threads});

    auto chi_of = [&](const Matrix& p, const Vector& pi) {
        return (mu_dot_sigma(sft, p, pi, n, table) / n).eval();
    };
    const double penalties[] = {10.0, 100.0, 1000.0};

    std::vector<RestartOutcome> outcomes(opts.restarts);
    parallel_blocks(opts.restarts, opts.threads, [&](std::size_t r) {
        Rng rng = Rng::sub_stream(opts.seed ^ 0x5eedULL, r);
        Matrix p = (r == 0) ? MarkovMeasure::parry(sft).transition() : prob.random_point(rng);
        for (double lambda : penalties) {
            auto objective = [&](const Matrix& m) -> double {
                Vector pi;
                try {
                    pi = solve_stationary(m);
                } catch (const ValidationError&) {
                    return kNegInf;
                }
                const Vector chi = chi_of(m, pi);
                return entropy_rate_of(m, pi) - lambda * (chi - alpha).squaredNorm();
            };
            p = ascend(prob, p, objective, opts.max_iterations, opts.fd_step);
        }
        Vector pi = solve_stationary(p);
        const Vector chi = chi_of(p, pi);
        outcomes[r] = {p, entropy_rate_of(p, pi) -
                              penalties[2] * (chi - alpha).squaredNorm()};
    });
    int winner = 0;
    for (int r = 1; r < opts.restarts; ++r)
        if (outcomes[r].objective > outcomes[winner].objective) winner = r;

    MarkovMeasure m(sft, outcomes[winner].p);
    ConstrainedMaximizeResult out{m, 0.0, 0.0};
    out.entropy = entropy_rate(m);
    const Vector chi = (mu_dot_sigma(sft, m.transition(), m.stationary(), n, table) / n).eval();
    out.chi_distance = (chi - Vector(alpha)).norm();
    return out;
}

} // namespace lyapress
