#include "lyapress/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/SVD>

#include "lyapress/errors.hpp"
#include "lyapress/numeric.hpp"
#include "lyapress/rng.hpp"

namespace lyapress {

double SingularSpectrum::log_sigma(int i) const {
    return std::log(sigma(i - 1));
}

Vector SingularSpectrum::log_vector() const {
    Vector out(sigma.size());
    for (int i = 0; i < sigma.size(); ++i) out(i) = std::log(sigma(i));
    return out;
}

double ExponentVector::t(int i) const {
    const int d = dimension();
    return (i < d) ? q(i - 1) - q(i) : q(d - 1);
}

bool ExponentVector::is_zero() const {
    for (int i = 0; i < q.size(); ++i)
        if (q(i) != 0.0) return false;
    return true;
}

bool ExponentVector::is_constant() const {
    for (int i = 1; i < q.size(); ++i)
        if (q(i) != q(0)) return false;
    return q.size() > 0;
}

SingularSpectrum singular_values(const Matrix& a) {
    const int d = static_cast<int>(a.rows());
    SingularSpectrum out;
    out.sigma.resize(d);
    if (d == 1) {
        out.sigma(0) = std::abs(a(0, 0));
        return out;
    }
    if (d == 2) {
        // sigma_1 from the stable large root, sigma_2 = |det|/sigma_1 so the
        // small value keeps full relative accuracy.
        const double t = a.squaredNorm();
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        const double disc = std::max(t * t - 4.0 * det * det, 0.0);
        const double s1sq = 0.5 * (t + std::sqrt(disc));
        const double s1 = std::sqrt(s1sq);
        out.sigma(0) = s1;
        out.sigma(1) = (s1 > 0.0) ? std::abs(det) / s1 : 0.0;
        return out;
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    out.sigma = svd.singularValues();
    return out;
}

Vector log_singular_values(const Matrix& a) {
    return singular_values(a).log_vector();
}

int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
}

const std::vector<std::vector<int>>& subset_basis(int d, int t) {
    static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({d, t});
    if (it != cache.end()) return it->second;
    std::vector<std::vector<int>> subsets;
    std::vector<int> cur(t);
    for (int i = 0; i < t; ++i) cur[i] = i;
    if (t == 0) {
        subsets.push_back({});
    } else {
        for (;;) {
            subsets.push_back(cur);
            int pos = t - 1;
            while (pos >= 0 && cur[pos] == d - t + pos) --pos;
            if (pos < 0) break;
            ++cur[pos];
            for (int i = pos + 1; i < t; ++i) cur[i] = cur[i - 1] + 1;
        }
    }
    return cache.emplace(std::make_pair(d, t), std::move(subsets)).first->second;
}

namespace {

double minor_det(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
    const int t = static_cast<int>(rows.size());
    Matrix m(t, t);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j) m(i, j) = a(rows[i], cols[j]);
    if (t == 1) return m(0, 0);
    if (t == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (t == 3)
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    return m.determinant();
}

} // namespace

Matrix exterior_power(const Matrix& a, int t) {
    const int d = static_cast<int>(a.rows());
    if (t < 1 || t > d) throw ValidationError("exterior power index out of range");
    if (t == 1) return a;
    const auto& basis = subset_basis(d, t);
    const int dim = static_cast<int>(basis.size());
    Matrix out(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) out(i, j) = minor_det(a, basis[i], basis[j]);
    return out;
}

double psi_q_log(const Vector& log_sigma, const ExponentVector& q) {
    const int d = static_cast<int>(log_sigma.size());
    if (q.dimension() != d) throw ValidationError("exponent vector dimension mismatch");
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
        if (q.q(i) == 0.0) continue;  // 0 * (-inf) treated as 0: sigma_i^0 = 1
        acc += q.q(i) * log_sigma(i);
    }
    return acc;
}

double psi_q_log(const Matrix& a, const ExponentVector& q) {
    const SingularSpectrum s = singular_values(a);
    const int d = s.dimension();
    if (s.sigma(d - 1) <= 0.0) {
        for (int i = 0; i < d; ++i)
            if (q.q(i) < 0.0 && s.sigma(i) <= 0.0)
                throw SingularMatrix("psi^q needs a positive sigma_" + std::to_string(i + 1));
    }
    return psi_q_log(s.log_vector(), q);
}

ExponentVector phi_exponents(double s, int d) {
    if (s < 0.0) throw NegativeS("phi^s requires s >= 0");
    Vector q = Vector::Zero(d);
    if (s >= d) {
        for (int i = 0; i < d; ++i) q(i) = s / d;
    } else {
        const int m = static_cast<int>(std::floor(s));
        for (int i = 0; i < m; ++i) q(i) = 1.0;
        if (m < d) q(m) = s - m;
    }
    return ExponentVector(std::move(q));
}

double phi_s_log(const Vector& log_sigma, double s, double log_abs_det) {
    if (s < 0.0) throw NegativeS("phi^s requires s >= 0");
    const int d = static_cast<int>(log_sigma.size());
    if (s >= d) return (s / d) * log_abs_det;
    const int m = static_cast<int>(std::floor(s));
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += log_sigma(i);
    if (s > m) acc += (s - m) * log_sigma(m);
    return acc;
}

double phi_s_log(const Matrix& a, double s) {
    const Vector ls = log_singular_values(a);
    double log_det = 0.0;
    for (int i = 0; i < ls.size(); ++i) log_det += ls(i);
    return phi_s_log(ls, s, log_det);
}

bool generator_invertible(const Matrix& a) {
    if (!a.allFinite()) return false;
    const int d = static_cast<int>(a.rows());
    const double det = std::abs(a.determinant());
    const double norm = a.operatorNorm();
    return det > kDegenerateTol * std::pow(norm, d);
}

double angular_metric(const Vector& u, const Vector& v) {
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) throw ValidationError("angular metric of zero vector");
    double c = std::abs(u.dot(v)) / (nu * nv);
    c = std::min(c, 1.0);
    return std::acos(c);
}

Cone::Cone(Vector c, double r) : center(std::move(c)), radius(r) {
    const double n = center.norm();
    if (n == 0.0) throw ValidationError("cone center must be nonzero");
    center /= n;
    if (!(radius > 0.0) || !(radius < M_PI / 2))
        throw ValidationError("cone radius must lie in (0, pi/2)");
}

double projective_lipschitz_bound(const Matrix& a) {
    const SingularSpectrum s = singular_values(a);
    const int d = s.dimension();
    const double sd = s.sigma(d - 1);
    if (sd <= 0.0) throw SingularMatrix("projective Lipschitz bound needs invertibility");
    const double s2 = (d >= 2) ? s.sigma(1) : s.sigma(0);
    return (M_PI / 2.0) * s.sigma(0) * s2 / (sd * sd);
}

namespace {

// Orthonormal basis of the complement of span(v).
Matrix orthogonal_complement(const Vector& v) {
    const int m = static_cast<int>(v.size());
    Matrix base(m, 1);
    base.col(0) = v.normalized();
    Eigen::HouseholderQR<Matrix> qr(base);
    Matrix q = qr.householderQ();
    return q.rightCols(m - 1);
}

// Boundary samples of C(v, theta) plus the achieved covering resolution of
// the sample set on the boundary sphere.  Exact (h = 0) in dimension 2,
// uniform circle in dimension 3, seeded quasi-random in dimension >= 4 with
// an estimated covering radius.
struct BoundarySamples {
    std::vector<Vector> points;
    double resolution = 0.0;
    bool estimated = false;
};

BoundarySamples sample_boundary(const Cone& cone, double target_h, std::uint64_t seed) {
    const int m = static_cast<int>(cone.center.size());
    BoundarySamples out;
    const double ct = std::cos(cone.radius), st = std::sin(cone.radius);
    if (m == 1) {
        out.points.push_back(cone.center);
        return out;
    }
    const Matrix w = orthogonal_complement(cone.center);
    if (m == 2) {
        out.points.push_back(ct * cone.center + st * w.col(0));
        out.points.push_back(ct * cone.center - st * w.col(0));
        return out;
    }
    if (m == 3) {
        int n = std::max<int>(16, static_cast<int>(std::ceil(M_PI * st / std::max(target_h, 1e-6))));
        n = std::min(n, 1 << 14);
        for (int i = 0; i < n; ++i) {
            const double phi = 2.0 * M_PI * i / n;
            out.points.push_back(ct * cone.center +
                                 st * (std::cos(phi) * w.col(0) + std::sin(phi) * w.col(1)));
        }
        // half arc between adjacent samples, measured on the boundary circle
        out.resolution = angular_metric(out.points[0], out.points[1]) / 2.0;
        return out;
    }
    // dimension >= 4: seeded samples on the (m-2)-sphere of directions; the
    // covering radius is probed, not proven
    const int n = 2048;
    Rng rng(seed ^ 0xabcdef12ULL);
    auto draw = [&]() {
        Vector dir(m - 1);
        for (int i = 0; i < m - 1; ++i) {
            // Box-Muller from two uniforms
            const double u1 = std::max(rng.next_double(), 1e-300);
            const double u2 = rng.next_double();
            dir(i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
        dir.normalize();
        return (ct * cone.center + st * (w * dir)).eval();
    };
    for (int i = 0; i < n; ++i) out.points.push_back(draw());
    double cover = 0.0;
    for (int probe = 0; probe < 256; ++probe) {
        const Vector p = draw();
        double nearest = M_PI;
        for (const auto& s : out.points) nearest = std::min(nearest, angular_metric(p, s));
        cover = std::max(cover, nearest);
    }
    out.resolution = cover;
    out.estimated = true;
    return out;
}

} // namespace

ConeCheckResult cone_image_contained(const Matrix& a, const Cone& src, const Cone& dst,
                                     const ConeCheckOptions& opts) {
    if (a.rows() != src.center.size() || a.rows() != dst.center.size())
        throw ValidationError("cone dimensions do not match the matrix");
    if (!generator_invertible(a))
        throw SingularMatrix("cone image of a degenerate matrix");

    BoundarySamples bs = sample_boundary(src, opts.boundary_resolution, opts.seed);
    bs.points.push_back(src.center);   // interior maxima occur only at the center

    double worst = 0.0;
    for (const auto& p : bs.points) {
        const Vector img = a * p;
        worst = std::max(worst, angular_metric(img, dst.center));
    }
    const double lipschitz = projective_lipschitz_bound(a);
    const double margin = lipschitz * bs.resolution;

    ConeCheckResult out;
    out.margin = margin;
    out.sample_resolution = bs.resolution;
    out.resolution_estimated = bs.estimated;
    if (worst + margin < dst.radius) {
        out.contained = true;
        out.slack = dst.radius - worst - margin;
        return out;
    }
    if (worst >= dst.radius) {
        out.contained = false;
        out.slack = dst.radius - worst;   // negative overshoot witnessed by a sample
        return out;
    }
    throw ResolutionTooCoarse("cone containment not certifiable at resolution " +
                              std::to_string(bs.resolution));
}

double projective_norm_estimate(const Matrix& a, int samples, std::uint64_t seed) {
    const int m = static_cast<int>(a.rows());
    if (m < 2) return 1.0;
    Rng rng(seed);
    auto gaussian_dir = [&]() {
        Vector v(m);
        for (int i = 0; i < m; ++i) {
            const double u1 = std::max(rng.next_double(), 1e-300);
            const double u2 = rng.next_double();
            v(i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
        v.normalize();
        return v;
    };
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Vector u = gaussian_dir();
        Vector v = gaussian_dir();
        const double duv = angular_metric(u, v);
        if (duv < 1e-9) continue;
        best = std::max(best, angular_metric(a * u, a * v) / duv);
    }
    return best;
}

} // namespace lyapress
