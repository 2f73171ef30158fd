#include "lyapress/cocycle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "lyapress/errors.hpp"

namespace lyapress {

void ScaledMatrix::renormalize() {
    const double mx = m.cwiseAbs().maxCoeff();
    if (mx == 0.0 || !std::isfinite(mx)) return;
    if (mx > 0x1.0p+200 || mx < 0x1.0p-200) {
        const int e = std::ilogb(mx);
        const double f = std::ldexp(1.0, -e);   // exact power of two
        m *= f;
        log_scale += e * M_LN2;
    }
}

ScaledMatrix ScaledMatrix::left_multiplied(const Matrix& a) const {
    ScaledMatrix out{a * m, log_scale};
    out.renormalize();
    return out;
}

ScaledMatrix ScaledMatrix::right_multiplied(const Matrix& a) const {
    ScaledMatrix out{m * a, log_scale};
    out.renormalize();
    return out;
}

Vector ScaledMatrix::log_sigma() const {
    Vector ls = log_singular_values(m);
    for (int i = 0; i < ls.size(); ++i) ls(i) += log_scale;
    return ls;
}

Matrix ScaledMatrix::dense() const {
    return m * std::exp(log_scale);
}

namespace {

std::uint64_t radix_code(std::span<const int> word, int k) {
    std::uint64_t code = 0;
    for (int s : word) code = code * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(s);
    return code;
}

} // namespace

CocycleSpec::CocycleSpec(SubshiftSpec sft, int dimension, int window, double holder_alpha,
                         std::vector<Matrix> generators_by_code, int window_anchor)
    : sft_(std::move(sft)), d_(dimension), w_(window), anchor_(window_anchor),
      alpha_(holder_alpha), gen_(std::move(generators_by_code)) {
    if (d_ < 1 || d_ > kMaxDimension)
        throw ValidationError("dimension must lie in 1.." + std::to_string(kMaxDimension));
    if (w_ < 1) throw ValidationError("window must be >= 1");
    if (w_ > 4) throw ValidationError("window capped at 4");
    if (anchor_ > 0 || anchor_ < -(w_ - 1))
        throw ValidationError("window_anchor must lie in -(window-1)..0");
    if (!(alpha_ > 0.0) || alpha_ > 1.0)
        throw ValidationError("holder_alpha must lie in (0,1]");
    const int k = sft_.alphabet_size();
    std::uint64_t slots = 1;
    for (int i = 0; i < w_; ++i) slots *= static_cast<std::uint64_t>(k);
    if (gen_.size() != slots)
        throw ValidationError("generator table must have k^window slots");
    gen_inv_.resize(gen_.size());
    // every admissible window word needs an invertible generator
    std::vector<int> word(w_);
    for (std::uint64_t code = 0; code < slots; ++code) {
        std::uint64_t c = code;
        for (int i = w_ - 1; i >= 0; --i) { word[i] = static_cast<int>(c % k); c /= k; }
        if (!sft_.word_admissible(word)) continue;
        const Matrix& a = gen_[code];
        if (a.rows() != d_ || a.cols() != d_)
            throw ValidationError("generator for window '" + Word(word).to_string() +
                                  "' has wrong shape");
        if (!generator_invertible(a))
            throw ValidationError("generator for window '" + Word(word).to_string() +
                                  "' fails the invertibility floor");
        gen_inv_[code] = a.inverse();
    }
}

CocycleSpec CocycleSpec::one_step(SubshiftSpec sft, std::vector<Matrix> per_symbol,
                                  double holder_alpha) {
    if (per_symbol.empty()) throw ValidationError("no generators");
    const int d = static_cast<int>(per_symbol.front().rows());
    return CocycleSpec(std::move(sft), d, 1, holder_alpha, std::move(per_symbol), 0);
}

std::uint64_t CocycleSpec::window_code(std::span<const int> window_word) const {
    if (static_cast<int>(window_word.size()) != w_)
        throw ValidationError("window word has wrong length");
    return radix_code(window_word, sft_.alphabet_size());
}

bool CocycleSpec::has_generator(std::uint64_t code) const {
    return code < gen_.size() && gen_[code].size() > 0;
}

const Matrix& CocycleSpec::generator(std::uint64_t code) const {
    if (!has_generator(code)) throw InadmissibleWord("no generator for window code");
    return gen_[code];
}

const Matrix& CocycleSpec::generator(std::span<const int> window_word) const {
    return generator(window_code(window_word));
}

const Matrix& CocycleSpec::generator_inverse(std::uint64_t code) const {
    if (!has_generator(code)) throw InadmissibleWord("no generator for window code");
    return gen_inv_[code];
}

std::vector<std::pair<Word, Matrix>> CocycleSpec::generators() const {
    std::vector<std::pair<Word, Matrix>> out;
    const int k = sft_.alphabet_size();
    std::vector<int> word(w_);
    for (std::uint64_t code = 0; code < gen_.size(); ++code) {
        std::uint64_t c = code;
        for (int i = w_ - 1; i >= 0; --i) { word[i] = static_cast<int>(c % k); c /= k; }
        if (!sft_.word_admissible(word)) continue;
        out.emplace_back(Word(word), gen_[code]);
    }
    return out;
}

const Matrix& CocycleSpec::value_at(const SymbolicPoint& x, long t) const {
    std::vector<int> window(w_);
    for (int i = 0; i < w_; ++i) window[i] = x.at(t + anchor_ + i);
    return generator(window);
}

CocycleSpec CocycleSpec::wedge(int t) const {
    std::vector<Matrix> gens(gen_.size());
    for (std::size_t i = 0; i < gen_.size(); ++i)
        if (gen_[i].size() > 0) gens[i] = exterior_power(gen_[i], t);
    const int dt = binomial(d_, t);
    if (dt > binomial(kMaxDimension, kMaxDimension / 2))
        throw ValidationError("exterior dimension beyond the envelope");
    CocycleSpec out(sft_, dt, w_, alpha_, std::move(gens), anchor_);
    return out;
}

namespace {

// Product along an explicit symbol block of length n + w - 1 (the symbols
// that determine A^n on the cylinder).
ScaledMatrix block_product(const CocycleSpec& c, std::span<const int> block) {
    const int w = c.window();
    const int n = static_cast<int>(block.size()) - (w - 1);
    ScaledMatrix acc = ScaledMatrix::identity(c.dimension());
    for (int t = 0; t < n; ++t)
        acc = acc.left_multiplied(c.generator(block.subspan(t, w)));
    return acc;
}

// All admissible extensions of `word` by w-1 symbols, lexicographic.
void for_each_extension(const SubshiftSpec& sft, const Word& word, int ext_len,
                        const std::function<void(std::span<const int>)>& fn) {
    std::vector<int> block = word.symbols;
    block.resize(word.symbols.size() + ext_len);
    std::function<void(int)> rec = [&](int depth) {
        if (depth == ext_len) {
            fn(block);
            return;
        }
        const int last = (depth == 0) ? word.last() : block[word.symbols.size() + depth - 1];
        for (int s = 0; s < sft.alphabet_size(); ++s) {
            if (!sft.transition(last, s)) continue;
            block[word.symbols.size() + depth] = s;
            rec(depth + 1);
        }
    };
    rec(0);
}

} // namespace

WordMatrix evaluate_word(const CocycleSpec& c, const Word& word) {
    if (!c.sft().word_admissible(word.symbols))
        throw InadmissibleWord("'" + word.to_string() + "'");
    WordMatrix out;
    out.word = word;
    if (c.one_step_cocycle()) {
        out.matrix = block_product(c, word.symbols);
        out.exact = true;
        out.log_norm_min = out.log_norm_max = out.matrix.log_operator_norm();
        return out;
    }
    bool first = true;
    for_each_extension(c.sft(), word, c.window() - 1, [&](std::span<const int> block) {
        ScaledMatrix cand = block_product(c, block);
        const double ln = cand.log_operator_norm();
        if (first || ln > out.log_norm_max) {
            out.matrix = cand;
            out.log_norm_max = ln;
        }
        out.log_norm_min = first ? ln : std::min(out.log_norm_min, ln);
        first = false;
    });
    if (first) throw InadmissibleWord("word admits no window extension");
    out.exact = false;
    return out;
}

CylinderNorm norm_over_cylinder(const CocycleSpec& c, const Word& word, int t) {
    if (!c.sft().word_admissible(word.symbols))
        throw InadmissibleWord("'" + word.to_string() + "'");
    if (t < 1 || t > c.dimension()) throw ValidationError("exterior index out of range");
    CylinderNorm out;
    bool first = true;
    auto absorb = [&](const ScaledMatrix& prod) {
        const Vector ls = prod.log_sigma();
        double acc = 0.0;
        for (int i = 0; i < t; ++i) acc += ls(i);   // ||A^{wedge t}|| = sigma_1...sigma_t
        if (first) {
            out.log_norm = out.log_norm_min = acc;
        } else {
            out.log_norm = std::max(out.log_norm, acc);
            out.log_norm_min = std::min(out.log_norm_min, acc);
        }
        first = false;
    };
    if (c.one_step_cocycle()) {
        absorb(block_product(c, word.symbols));
        out.exact = true;
        return out;
    }
    for_each_extension(c.sft(), word, c.window() - 1,
                       [&](std::span<const int> block) { absorb(block_product(c, block)); });
    out.exact = true;   // the max over finitely many extensions is the exact cylinder max
    return out;
}

StructureVerdict check_fiber_bunched(const CocycleSpec& c) {
    StructureVerdict v;
    v.kind = CheckKind::FiberBunched;
    const double bound = std::pow(2.0, c.holder_alpha());
    double worst = 0.0;
    Word worst_window;
    for (const auto& [word, a] : c.generators()) {
        const double cond = a.operatorNorm() * a.inverse().operatorNorm();
        if (cond > worst) {
            worst = cond;
            worst_window = word;
        }
    }
    v.margin = bound - worst;
    v.verdict = (worst < bound) ? VerdictState::Pass : VerdictState::Fail;
    v.witness = {{"bound", bound},
                 {"worst_condition", worst},
                 {"worst_window", worst_window.to_string()}};
    return v;
}

ScaledMatrix forward_product(const CocycleSpec& c, const SymbolicPoint& x, long n) {
    ScaledMatrix acc = ScaledMatrix::identity(c.dimension());
    for (long t = 0; t < n; ++t) acc = acc.left_multiplied(c.value_at(x, t));
    return acc;
}

Vector block_log_sigma_stable(const CocycleSpec& c, std::span<const int> block) {
    const int d = c.dimension();
    const int w = c.window();
    const int n = static_cast<int>(block.size()) - (w - 1);
    if (n < 1) throw ValidationError("block shorter than the window");
    Vector level_norms(d + 1);
    level_norms(0) = 0.0;
    for (int t = 1; t <= d; ++t) {
        ScaledMatrix acc = ScaledMatrix::identity(binomial(d, t));
        for (int s = 0; s < n; ++s) {
            const Matrix& gen = c.generator(block.subspan(s, w));
            acc = acc.left_multiplied(t == 1 ? gen : exterior_power(gen, t));
        }
        level_norms(t) = acc.log_operator_norm();
    }
    Vector out(d);
    for (int t = 1; t <= d; ++t) out(t - 1) = level_norms(t) - level_norms(t - 1);
    return out;
}

ScaledMatrix backward_product_inverse(const CocycleSpec& c, const SymbolicPoint& x, long n) {
    // (A^n(T^{-n}x))^{-1} = A(T^{-n}x)^{-1} ... A(T^{-1}x)^{-1}
    ScaledMatrix acc = ScaledMatrix::identity(c.dimension());
    for (long t = -n; t <= -1; ++t) {
        std::vector<int> window(c.window());
        for (int i = 0; i < c.window(); ++i) window[i] = x.at(t + c.window_anchor() + i);
        acc = acc.left_multiplied(c.generator_inverse(c.window_code(window)));
    }
    return acc;
}

namespace {

struct IterationCert {
    double last_delta = 0.0;
    double ratio = 0.0;
    double tail = 0.0;
};

// Limit of M_n with Cauchy stopping; `step` must return M_n for n >= 1.
Matrix iterate_to_limit(const std::function<Matrix(int)>& step, const HolonomyOptions& opts,
                        int stabilize_at, IterationCert& cert, int& n_used) {
    Matrix prev = step(1);
    double prev_delta = -1.0;
    for (int n = 2; n <= opts.n_max; ++n) {
        Matrix cur = step(n);
        const double delta = (cur - prev).norm();
        if (delta <= opts.tol && n >= stabilize_at) {
            cert.last_delta = delta;
            cert.ratio = (prev_delta > 0.0) ? delta / prev_delta : 0.0;
            if (cert.ratio < 1.0)
                cert.tail = delta * cert.ratio / (1.0 - cert.ratio);
            else
                cert.tail = std::numeric_limits<double>::infinity();
            n_used = n;
            return cur;
        }
        prev_delta = delta;
        prev = std::move(cur);
    }
    throw NoConvergence("holonomy iteration did not reach tol within n_max");
}

} // namespace

HolonomyResult stable_holonomy(const CocycleSpec& c, const SymbolicPoint& x,
                               const SymbolicPoint& y, const HolonomyOptions& opts) {
    if (!y.agrees_forward(x, 0))
        throw NotOnStableSet("stable holonomy needs agreement on coordinates >= 0");
    HolonomyResult out;
    out.h = Matrix::Identity(c.dimension(), c.dimension());
    if (c.window_anchor() >= 0) {   // window reads no negative coordinate
        out.exact = true;
        return out;
    }
    // M_n = A^n(y)^{-1} A^n(x); the factors with index >= -anchor coincide,
    // so the sequence stabilizes exactly after -anchor steps.
    const int stabilize = -c.window_anchor();
    auto step = [&](int n) {
        const ScaledMatrix px = forward_product(c, x, n);
        const ScaledMatrix py = forward_product(c, y, n);
        Matrix sol = py.m.partialPivLu().solve(px.m);
        return (sol * std::exp(px.log_scale - py.log_scale)).eval();
    };
    IterationCert cert;
    out.h = iterate_to_limit(step, opts, stabilize + 1, cert, out.n_used);
    out.last_delta = cert.last_delta;
    out.ratio_estimate = cert.ratio;
    out.tail_bound = cert.tail;
    return out;
}

HolonomyResult unstable_holonomy(const CocycleSpec& c, const SymbolicPoint& x,
                                 const SymbolicPoint& y, const HolonomyOptions& opts) {
    if (!y.agrees_backward(x, 0))
        throw NotOnStableSet("unstable holonomy needs agreement on coordinates <= 0");
    HolonomyResult out;
    out.h = Matrix::Identity(c.dimension(), c.dimension());
    // Factors A(T^{-j} .) for j >= 1 read coordinates up to anchor + w - 2;
    // they all coincide when that never reaches +1.
    if (c.window_anchor() + c.window() - 1 <= 1) {
        out.exact = true;
        return out;
    }
    const int stabilize = c.window_anchor() + c.window() - 1;
    auto step = [&](int n) {
        // M_n = A^{-n}(y)^{-1} A^{-n}(x) = A^n(T^{-n}y) (A^n(T^{-n}x))^{-1}
        const ScaledMatrix ry = forward_product(c, y.shifted(-n), n);
        const ScaledMatrix rx = forward_product(c, x.shifted(-n), n);
        Matrix sol = rx.m.transpose().partialPivLu().solve(ry.m.transpose()).transpose();
        return (sol * std::exp(ry.log_scale - rx.log_scale)).eval();
    };
    IterationCert cert;
    out.h = iterate_to_limit(step, opts, stabilize + 1, cert, out.n_used);
    out.last_delta = cert.last_delta;
    out.ratio_estimate = cert.ratio;
    out.tail_bound = cert.tail;
    return out;
}

HolonomyResult global_stable_holonomy(const CocycleSpec& c, const SymbolicPoint& x,
                                      const SymbolicPoint& y, long n,
                                      const HolonomyOptions& opts) {
    const SymbolicPoint xs = x.shifted(n);
    const SymbolicPoint ys = y.shifted(n);
    HolonomyResult inner = stable_holonomy(c, xs, ys, opts);
    if (n == 0) return inner;
    const ScaledMatrix ax = forward_product(c, x, n);
    const ScaledMatrix ay = forward_product(c, y, n);
    Matrix z = inner.h * ax.m;
    Matrix sol = ay.m.partialPivLu().solve(z);
    HolonomyResult out = inner;
    out.h = sol * std::exp(ax.log_scale - ay.log_scale);
    out.exact = false;
    return out;
}

} // namespace lyapress
