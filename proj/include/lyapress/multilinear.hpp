#ifndef LYAPRESS_MULTILINEAR_HPP
#define LYAPRESS_MULTILINEAR_HPP

#include <Eigen/Dense>
#include <vector>

namespace lyapress {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Hard cap on the base dimension; C(6,3) = 20 exterior dimensions max.
inline constexpr int kMaxDimension = 6;

/// Invertibility floor: a generator is accepted when |det A| > deg_tol * ||A||^d.
inline constexpr double kDegenerateTol = 1e-10;

/// Singular values in decreasing order.
struct SingularSpectrum {
    Vector sigma;
    int dimension() const { return static_cast<int>(sigma.size()); }
    /// log sigma_i, 1-based index
    double log_sigma(int i) const;
    Vector log_vector() const;
};

/// Exponent vector q = (q_1..q_d); t_i = q_i - q_{i+1} with q_{d+1} = 0.
struct ExponentVector {
    Vector q;
    explicit ExponentVector(Vector v) : q(std::move(v)) {}
    ExponentVector() = default;
    int dimension() const { return static_cast<int>(q.size()); }
    double t(int i) const;        // 1-based
    bool is_zero() const;
    bool is_constant() const;     // q = (c,...,c), the determinant direction
};

SingularSpectrum singular_values(const Matrix& a);

/// Decreasing vector of log singular values (the workhorse of the sweeps).
Vector log_singular_values(const Matrix& a);

int binomial(int n, int k);

/// Lexicographically ordered t-element subsets of {0..d-1}.
const std::vector<std::vector<int>>& subset_basis(int d, int t);

/// t-th exterior power: the C(d,t) x C(d,t) matrix of t x t minors, basis
/// ordered by lexicographic index subsets, minors with rows/columns in
/// increasing order.
Matrix exterior_power(const Matrix& a, int t);

/// log psi^q(A) = sum_i q_i log sigma_i(A).
double psi_q_log(const Matrix& a, const ExponentVector& q);
double psi_q_log(const Vector& log_sigma, const ExponentVector& q);

/// log phi^s(A), Falconer's singular value function in log space.
double phi_s_log(const Matrix& a, double s);
double phi_s_log(const Vector& log_sigma, double s, double log_abs_det);

/// The q-embedding (1,...,1,s-m,0,...,0) realizing phi^s for s in [0,d].
ExponentVector phi_exponents(double s, int d);

bool generator_invertible(const Matrix& a);

/// Projective angular metric between the lines spanned by u and v.
double angular_metric(const Vector& u, const Vector& v);

/// Cone C(v, theta): lines within angular distance theta of span(v).
struct Cone {
    Vector center;          // unit representative
    double radius;          // in (0, pi/2)
    Cone(Vector c, double r);
};

struct ConeCheckResult {
    bool contained = false;
    /// Worst-case certified angular slack: positive distance to the boundary
    /// of the target cone when contained, negative overshoot when not.
    double slack = 0.0;
    double margin = 0.0;         // Lipschitz-margin used in the certificate
    double sample_resolution = 0.0;
    bool resolution_estimated = false;  // true in dimension >= 4
};

struct ConeCheckOptions {
    double boundary_resolution = 1e-3;  // target angular resolution h (radians)
    std::uint64_t seed = 1;             // sampling in dimension >= 4
};

/// Certifies A . src subset interior(dst).  Boundary (plus center) sampling
/// with a Lipschitz safety margin L*h, where L is the rigorous projective
/// Lipschitz bound (pi/2) sigma_1 sigma_2 / sigma_d^2.  Throws
/// ResolutionTooCoarse when neither verdict can be certified.
ConeCheckResult cone_image_contained(const Matrix& a, const Cone& src, const Cone& dst,
                                     const ConeCheckOptions& opts = {});

/// Sampled estimate of the projective operator norm sup rho(Au,Av)/rho(u,v).
/// Diagnostic only; certificates use the rigorous bound below.
double projective_norm_estimate(const Matrix& a, int samples = 512, std::uint64_t seed = 1);

/// Rigorous upper bound for the projective Lipschitz constant of A.
double projective_lipschitz_bound(const Matrix& a);

} // namespace lyapress

#endif
