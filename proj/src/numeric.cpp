#include "lyapress/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace lyapress {

namespace {

double pairwise_sum_rec(const double* xs, std::size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return xs[0];
    if (n == 2) return xs[0] + xs[1];
    const std::size_t half = n / 2;
    return pairwise_sum_rec(xs, half) + pairwise_sum_rec(xs + half, n - half);
}

} // namespace

double pairwise_sum(std::span<const double> xs) {
    return pairwise_sum_rec(xs.data(), xs.size());
}

double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) return kNegInf;
    double hi = kNegInf;
    for (double x : xs) hi = std::max(hi, x);
    if (hi == kNegInf) return kNegInf;
    std::vector<double> shifted(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) shifted[i] = std::exp(xs[i] - hi);
    return hi + std::log(pairwise_sum(shifted));
}

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    LinearFit out;
    out.count = std::min(xs.size(), ys.size());
    const std::size_t n = out.count;
    if (n == 0) return out;
    if (n == 1) {
        out.intercept = ys[0];
        out.r2 = 1.0;
        return out;
    }
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += xs[i]; sy += ys[i]; }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    out.slope = (sxx > 0.0) ? sxy / sxx : 0.0;
    out.intercept = my - out.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (out.intercept + out.slope * xs[i]);
        ss_res += r * r;
        out.max_residual = std::max(out.max_residual, std::abs(r));
    }
    if (syy > 0.0) {
        out.r2 = 1.0 - ss_res / syy;
    } else {
        out.r2 = (ss_res <= 1e-24) ? 1.0 : 0.0;
    }
    return out;
}

double aitken_extrapolate(std::span<const double> seq) {
    const std::size_t n = seq.size();
    if (n < 3) return n == 0 ? 0.0 : seq[n - 1];
    const double a = seq[n - 3], b = seq[n - 2], c = seq[n - 1];
    const double denom = (c - b) - (b - a);
    if (std::abs(denom) < 1e-14 * (std::abs(c) + 1.0)) return c;
    return c - (c - b) * (c - b) / denom;
}

} // namespace lyapress
