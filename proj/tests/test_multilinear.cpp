#include <doctest.h>

#include <cmath>

#include "lyapress/errors.hpp"
#include "lyapress/multilinear.hpp"
#include "lyapress/rng.hpp"

#include "oracles.hpp"

using namespace lyapress;

namespace {

Matrix random_matrix(Rng& rng, int d, double scale = 1.0) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = scale * (2.0 * rng.next_double() - 1.0);
    return m;
}

Matrix random_invertible(Rng& rng, int d) {
    for (;;) {
        Matrix m = random_matrix(rng, d);
        if (generator_invertible(m)) return m;
    }
}

Matrix rotation2(double theta) {
    Matrix r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

} // namespace

TEST_CASE("singular values: identity, diagonal, shear") {
    const SingularSpectrum id = singular_values(Matrix::Identity(3, 3));
    for (int i = 0; i < 3; ++i) CHECK(id.sigma(i) == 1.0);

    Matrix d(2, 2);
    d << 3, 0, 0, 2;
    const SingularSpectrum ds = singular_values(d);
    CHECK(ds.sigma(0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(ds.sigma(1) == doctest::Approx(2.0).epsilon(1e-15));

    // [[1,1],[0,1]]: singular values phi, 1/phi from the eigenvalues of A^T A
    Matrix shear(2, 2);
    shear << 1, 1, 0, 1;
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const SingularSpectrum ss = singular_values(shear);
    CHECK(ss.sigma(0) == doctest::Approx(phi).epsilon(1e-12));
    CHECK(ss.sigma(1) == doctest::Approx(1.0 / phi).epsilon(1e-12));
    // independent oracle route
    const auto nv = oracles::naive_singular_values(shear);
    CHECK(ss.sigma(0) == doctest::Approx(nv(0)).epsilon(1e-12));
    CHECK(ss.sigma(1) == doctest::Approx(nv(1)).epsilon(1e-12));
}

TEST_CASE("singular values: decreasing, det product, high relative accuracy") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_below(kMaxDimension));
        const Matrix a = random_invertible(rng, d);
        const SingularSpectrum s = singular_values(a);
        double prod = 1.0;
        for (int i = 0; i < d; ++i) {
            prod *= s.sigma(i);
            if (i > 0) CHECK(s.sigma(i) <= s.sigma(i - 1) * (1 + 1e-14));
        }
        CHECK(prod == doctest::Approx(std::abs(a.determinant())).epsilon(1e-9));
    }
    // exactly representable spectrum at condition number 1e8
    Matrix hard = Matrix::Zero(2, 2);
    hard << 1e4, 0, 0, 1e-4;
    const SingularSpectrum hs = singular_values(hard);
    CHECK(hs.sigma(0) == doctest::Approx(1e4).epsilon(1e-12));
    CHECK(hs.sigma(1) == doctest::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("exterior power: basics and diagonal minors") {
    Matrix a(2, 2);
    a << 3, 1, 2, 5;
    const Matrix top = exterior_power(a, 2);
    REQUIRE(top.rows() == 1);
    CHECK(top(0, 0) == doctest::Approx(13.0).epsilon(1e-15));

    Matrix d3 = Matrix::Zero(3, 3);
    d3.diagonal() << 3, 2, 1;
    const Matrix w2 = exterior_power(d3, 2);
    REQUIRE(w2.rows() == 3);
    CHECK(w2(0, 0) == 6);   // {0,1}
    CHECK(w2(1, 1) == 3);   // {0,2}
    CHECK(w2(2, 2) == 2);   // {1,2}
    CHECK(w2.cwiseAbs().sum() == doctest::Approx(11.0));
}

TEST_CASE("exterior power functoriality and determinant identity") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_below(kMaxDimension - 1));
        const Matrix a = random_invertible(rng, d);
        const Matrix b = random_invertible(rng, d);
        for (int t = 1; t <= d; ++t) {
            const Matrix lhs = exterior_power((a * b).eval(), t);
            const Matrix rhs = exterior_power(a, t) * exterior_power(b, t);
            CHECK((lhs - rhs).norm() <=
                  1e-10 * exterior_power(a, t).norm() * exterior_power(b, t).norm() + 1e-13);
            // det(A^{wedge t}) = det(A)^{C(d-1, t-1)}
            const double lhs_det = exterior_power(a, t).determinant();
            const double rhs_det = std::pow(a.determinant(), binomial(d - 1, t - 1));
            CHECK(lhs_det == doctest::Approx(rhs_det).epsilon(1e-8));
        }
        // against the naive oracle
        const int t = 1 + static_cast<int>(rng.next_below(d));
        CHECK((exterior_power(a, t) - oracles::naive_exterior(a, t)).norm() < 1e-12);
    }
}

TEST_CASE("norm of the exterior power is the singular value product") {
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_below(kMaxDimension - 1));
        const Matrix a = random_invertible(rng, d);
        const SingularSpectrum s = singular_values(a);
        for (int t = 1; t <= d; ++t) {
            double expect = 0.0;
            for (int i = 0; i < t; ++i) expect += std::log(s.sigma(i));
            const double got = std::log(exterior_power(a, t).operatorNorm());
            CHECK(got == doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("psi^q: identity, diagonal, exterior form agreement") {
    Vector q2(2);
    q2 << 1.7, -0.3;
    CHECK(psi_q_log(Matrix(Matrix::Identity(2, 2)), ExponentVector(q2)) == 0.0);

    Matrix d42(2, 2);
    d42 << 4, 0, 0, 2;
    Vector q(2);
    q << 2, -1;
    CHECK(psi_q_log(d42, ExponentVector(q)) == doctest::Approx(std::log(8.0)).epsilon(1e-14));

    Matrix d321 = Matrix::Zero(3, 3);
    d321.diagonal() << 3, 2, 1;
    Vector q3(3);
    q3 << 1, 1, 0;
    CHECK(psi_q_log(d321, ExponentVector(q3)) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
    CHECK(psi_q_log(d321, ExponentVector(q3)) ==
          doctest::Approx(std::log(exterior_power(d321, 2).operatorNorm())).epsilon(1e-9));
}

TEST_CASE("psi^q is linear in q and matches the exterior-power form") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_below(kMaxDimension));
        const Matrix a = random_invertible(rng, d);
        Vector qa(d), qb(d);
        for (int i = 0; i < d; ++i) {
            qa(i) = 4.0 * rng.next_double() - 2.0;
            qb(i) = 4.0 * rng.next_double() - 2.0;
        }
        const double la = psi_q_log(a, ExponentVector(qa));
        const double lb = psi_q_log(a, ExponentVector(qb));
        const double lab = psi_q_log(a, ExponentVector((qa + qb).eval()));
        CHECK(lab == doctest::Approx(la + lb).epsilon(1e-12));

        // sum_i t_i log||A^{wedge i}||
        const ExponentVector q(qa);
        double viaext = 0.0;
        for (int i = 1; i <= d; ++i)
            viaext += q.t(i) * std::log(exterior_power(a, i).operatorNorm());
        CHECK(la == doctest::Approx(viaext).epsilon(1e-9));
    }
}

TEST_CASE("psi^q submultiplicative for decreasing nonnegative q") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_below(kMaxDimension - 1));
        const Matrix a = random_invertible(rng, d);
        const Matrix b = random_invertible(rng, d);
        Vector q(d);
        double cur = 3.0 * rng.next_double();
        for (int i = 0; i < d; ++i) {
            q(i) = cur;
            cur *= rng.next_double();
        }
        const ExponentVector qe(q);
        CHECK(psi_q_log((a * b).eval(), qe) <=
              psi_q_log(a, qe) + psi_q_log(b, qe) + 1e-10);
    }
}

TEST_CASE("phi^s: values and submultiplicativity") {
    Matrix d42(2, 2);
    d42 << 4, 0, 0, 2;
    CHECK(phi_s_log(d42, 0.0) == 0.0);
    CHECK(phi_s_log(d42, 1.5) == doctest::Approx(std::log(4.0) + 0.5 * std::log(2.0)));
    CHECK(phi_s_log(d42, 3.0) == doctest::Approx(1.5 * std::log(8.0)));
    CHECK_THROWS_AS(phi_s_log(d42, -0.1), NegativeS);

    // coincides with the q-embedding on [0, d]
    Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_below(kMaxDimension - 1));
        const Matrix a = random_invertible(rng, d);
        const double s = d * rng.next_double();
        CHECK(phi_s_log(a, s) ==
              doctest::Approx(psi_q_log(a, phi_exponents(s, d))).epsilon(1e-12));
    }
    // classical Falconer submultiplicativity on random pairs
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_below(kMaxDimension - 1));
        const Matrix a = random_invertible(rng, d);
        const Matrix b = random_invertible(rng, d);
        const double s = 1.5 * d * rng.next_double();
        CHECK(phi_s_log((a * b).eval(), s) <= phi_s_log(a, s) + phi_s_log(b, s) + 1e-10);
    }
}

TEST_CASE("cone containment certificates") {
    Vector e1 = Vector::Zero(2);
    e1(0) = 1.0;

    Matrix contract(2, 2);
    contract << 10, 0, 0, 1;
    const Cone c03(e1, 0.3);
    const Cone c02(e1, 0.2);
    // closed-form image angle atan(tan(0.3)/10) ~ 0.0309
    auto res = cone_image_contained(contract, c03, c03);
    CHECK(res.contained);
    CHECK(res.slack == doctest::Approx(0.3 - std::atan(std::tan(0.3) / 10.0)).epsilon(1e-9));

    CHECK_FALSE(cone_image_contained(Matrix::Identity(2, 2), c03, c02).contained);
    CHECK_FALSE(cone_image_contained(rotation2(M_PI / 2), c03, c03).contained);

    // identity into the same cone: the boundary maps onto the boundary, a
    // sampled witness refutes interior containment with zero slack
    auto same = cone_image_contained(Matrix(Matrix::Identity(2, 2)), c03, c03);
    CHECK_FALSE(same.contained);
    CHECK(same.slack == doctest::Approx(0.0));
}

TEST_CASE("cone containment in dimension 3") {
    Vector e1 = Vector::Zero(3);
    e1(0) = 1.0;
    Matrix contract = Matrix::Zero(3, 3);
    contract.diagonal() << 20, 1, 1;
    const Cone src(e1, 0.3);
    const Cone dst(e1, 0.3);
    CHECK(cone_image_contained(contract, src, dst).contained);

    Matrix swap = Matrix::Zero(3, 3);
    swap(0, 1) = 1;
    swap(1, 0) = 1;
    swap(2, 2) = 1;
    CHECK_FALSE(cone_image_contained(swap, src, dst).contained);

    // an almost-neutral map leaves the image within the Lipschitz margin of
    // the boundary: neither verdict is certifiable
    Matrix nearly = Matrix::Zero(3, 3);
    nearly.diagonal() << 1.0 + 1e-5, 1, 1;
    CHECK_THROWS_AS(cone_image_contained(nearly, src, dst), ResolutionTooCoarse);
}

TEST_CASE("projective Lipschitz bound dominates sampled estimates") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_below(3));
        const Matrix a = random_invertible(rng, d);
        const double bound = projective_lipschitz_bound(a);
        const double est = projective_norm_estimate(a, 256, trial + 1);
        CHECK(est <= bound * (1 + 1e-9));
    }
}

TEST_CASE("degenerate generators are rejected") {
    Matrix singular(2, 2);
    singular << 1, 1, 1, 1;
    CHECK_FALSE(generator_invertible(singular));
    Matrix near(2, 2);
    near << 1, 0, 0, 1e-12;
    CHECK_FALSE(generator_invertible(near));
    CHECK(generator_invertible(Matrix::Identity(2, 2)));
}
