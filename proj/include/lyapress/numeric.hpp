#ifndef LYAPRESS_NUMERIC_HPP
#define LYAPRESS_NUMERIC_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace lyapress {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Deterministic pairwise (balanced tree) summation.  The reduction shape
// depends only on the length of the input, never on thread count, so results
// are bit-stable across runs.
double pairwise_sum(std::span<const double> xs);

// log(sum(exp(xs))) evaluated as max + log(pairwise_sum(exp(xs - max))).
// Empty input and all -inf input return -inf.
double log_sum_exp(std::span<const double> xs);

// log(exp(a) + exp(b))
double log_add_exp(double a, double b);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;        // coefficient of determination; 1 when residuals vanish
    double max_residual = 0.0;
    std::size_t count = 0;
};

// Ordinary least squares of y against x.  With fewer than two points the fit
// is degenerate (slope 0).  When the y-values are constant, r2 is defined as
// 1 if the fit is exact and 0 otherwise.
LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

// Aitken delta-squared extrapolation of the last three terms; returns the
// last term unchanged when the sequence is too short or the denominator
// nearly vanishes.
double aitken_extrapolate(std::span<const double> seq);

} // namespace lyapress

#endif
