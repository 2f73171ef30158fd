#ifndef LYAPRESS_COCYCLE_HPP
#define LYAPRESS_COCYCLE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lyapress/multilinear.hpp"
#include "lyapress/symbolic.hpp"
#include "lyapress/verdict.hpp"

namespace lyapress {

/// Matrix with a separated power-of-two log scale so long products never
/// overflow.  Rescaling multiplies entries by an exact power of two, so a
/// scaled product is bit-identical to the unscaled one (range permitting).
struct ScaledMatrix {
    Matrix m;
    double log_scale = 0.0;

    static ScaledMatrix identity(int d) { return {Matrix::Identity(d, d), 0.0}; }
    void renormalize();
    ScaledMatrix left_multiplied(const Matrix& a) const;   // a * this
    ScaledMatrix right_multiplied(const Matrix& a) const;  // this * a
    double log_operator_norm() const { return std::log(m.operatorNorm()) + log_scale; }
    Vector log_sigma() const;     // decreasing log singular values incl. scale
    Matrix dense() const;         // may overflow; fine at desk scale
};

/// Finite-window locally constant GL(d,R)-cocycle over an SFT.  The
/// generator at x reads the window x_{anchor} .. x_{anchor+w-1}; anchor = 0
/// (the forward window x_0..x_{w-1}) is the default, negative anchors give
/// the two-sided variants used by the holonomy fixtures.
class CocycleSpec {
public:
    CocycleSpec(SubshiftSpec sft, int dimension, int window, double holder_alpha,
                std::vector<Matrix> generators_by_code, int window_anchor = 0);

    /// One-step cocycle from one matrix per symbol.
    static CocycleSpec one_step(SubshiftSpec sft, std::vector<Matrix> per_symbol,
                                double holder_alpha = 1.0);

    const SubshiftSpec& sft() const { return sft_; }
    int dimension() const { return d_; }
    int window() const { return w_; }
    int window_anchor() const { return anchor_; }
    double holder_alpha() const { return alpha_; }
    bool one_step_cocycle() const { return w_ == 1; }
    /// Length of the symbol block that determines A^n on a cylinder.
    int determining_length(int n) const { return n + w_ - 1; }

    std::uint64_t window_code(std::span<const int> window_word) const;
    bool has_generator(std::uint64_t code) const;
    const Matrix& generator(std::uint64_t code) const;
    const Matrix& generator(std::span<const int> window_word) const;
    const Matrix& generator_inverse(std::uint64_t code) const;
    std::vector<std::pair<Word, Matrix>> generators() const;  // admissible windows, lexicographic

    /// A(T^t x): reads the window of x at time t.
    const Matrix& value_at(const SymbolicPoint& x, long t) const;

    /// The exterior-power cocycle A^{wedge t} over the same base.
    CocycleSpec wedge(int t) const;

private:
    SubshiftSpec sft_;
    int d_, w_, anchor_;
    double alpha_;
    std::vector<Matrix> gen_;      // indexed by radix window code; empty if absent
    std::vector<Matrix> gen_inv_;
};

/// Product of the cocycle along a word.  Exact (constant on the cylinder)
/// for one-step cocycles; otherwise the representative maximizing the
/// operator norm over all admissible window extensions, with norm bounds.
struct WordMatrix {
    Word word;
    ScaledMatrix matrix;
    bool exact = true;
    double log_norm_min = 0.0;
    double log_norm_max = 0.0;
};

WordMatrix evaluate_word(const CocycleSpec& c, const Word& word);

struct CylinderNorm {
    double log_norm = 0.0;   // log ||A_t(I)|| = max over the cylinder
    double log_norm_min = 0.0;
    bool exact = true;
};

/// log ||A^{wedge t}(I)|| with exact extension enumeration.
CylinderNorm norm_over_cylinder(const CocycleSpec& c, const Word& word, int t);

/// Fiber bunching: max over generators of ||A|| ||A^{-1}|| < 2^alpha.
StructureVerdict check_fiber_bunched(const CocycleSpec& c);

struct HolonomyOptions {
    double tol = 1e-10;
    int n_max = 256;
};

struct HolonomyResult {
    Matrix h;
    bool exact = false;        // window analysis proves the identity value
    int n_used = 0;
    double last_delta = 0.0;
    double ratio_estimate = 0.0;
    double tail_bound = 0.0;
};

/// H^s_{y<-x} = lim A^n(y)^{-1} A^n(x) for y in W^s_loc(x); identity exactly
/// for forward-window cocycles.
HolonomyResult stable_holonomy(const CocycleSpec& c, const SymbolicPoint& x,
                               const SymbolicPoint& y, const HolonomyOptions& opts = {});

/// H^u_{y<-x} = lim A^{-n}(y)^{-1} A^{-n}(x) for y in W^u_loc(x); identity
/// exactly when the window reaches no coordinate beyond +1.
HolonomyResult unstable_holonomy(const CocycleSpec& c, const SymbolicPoint& x,
                                 const SymbolicPoint& y, const HolonomyOptions& opts = {});

/// Global stable holonomy via H = A^n(y)^{-1} H^s_{T^n y <- T^n x} A^n(x).
HolonomyResult global_stable_holonomy(const CocycleSpec& c, const SymbolicPoint& x,
                                      const SymbolicPoint& y, long n,
                                      const HolonomyOptions& opts = {});

/// Ordered product A(T^{n-1}x) ... A(x) (n >= 1), or the identity (n == 0).
ScaledMatrix forward_product(const CocycleSpec& c, const SymbolicPoint& x, long n);

/// log singular values of the product along a determining block (length
/// n + w - 1), computed per exterior level with rescaling: log sigma_t =
/// log||A_t^n|| - log||A_{t-1}^n||.  Stable at condition numbers far beyond
/// what a final-matrix SVD can resolve; intended for long products.
Vector block_log_sigma_stable(const CocycleSpec& c, std::span<const int> block);

/// A^{-n}(x) as a scaled matrix: (A^n(T^{-n}x))^{-1}.
ScaledMatrix backward_product_inverse(const CocycleSpec& c, const SymbolicPoint& x, long n);

} // namespace lyapress

#endif
