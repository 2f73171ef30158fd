#include <doctest.h>

#include <cmath>

#include "lyapress/errors.hpp"
#include "lyapress/pressure.hpp"
#include "lyapress/rng.hpp"

#include "oracles.hpp"

using namespace lyapress;

namespace {

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m.diagonal() << a, b;
    return m;
}

Matrix scalar(double v) {
    Matrix m(1, 1);
    m << v;
    return m;
}

CocycleSpec scalar23() {
    return CocycleSpec::one_step(SubshiftSpec::full_shift(2), {scalar(2), scalar(3)});
}

CocycleSpec diagonal_pair() {
    return CocycleSpec::one_step(SubshiftSpec::full_shift(2), {diag2(2, 1), diag2(1, 2)});
}

ExponentVector qvec(std::initializer_list<double> vals) {
    Vector q(static_cast<int>(vals.size()));
    int i = 0;
    for (double v : vals) q(i++) = v;
    return ExponentVector(q);
}

} // namespace

TEST_CASE("partition function: q = 0 counts words") {
    const CocycleSpec c = diagonal_pair();
    for (int n : {1, 4, 9})
        CHECK(partition_function_log(c, qvec({0, 0}), n) ==
              doctest::Approx(n * std::log(2.0)).epsilon(1e-13));

    const SubshiftSpec gm(2, {{1, 1}, {1, 0}});
    const CocycleSpec cg = CocycleSpec::one_step(gm, {diag2(2, 1), diag2(1, 2)});
    CHECK(partition_function_log(cg, qvec({0, 0}), 3) ==
          doctest::Approx(std::log(5.0)).epsilon(1e-13));
}

TEST_CASE("partition function: scalar system is (2^q + 3^q)^n") {
    const CocycleSpec c = scalar23();
    for (int n = 1; n <= 10; ++n) {
        const double got = partition_function_log(c, qvec({1}), n);
        CHECK(got == doctest::Approx(n * std::log(5.0)).epsilon(1e-12));
        // independent brute-force oracle
        const double oracle = oracles::scalar_log_partition({{1, 1}, {1, 1}}, {2, 3}, 1.0, n);
        CHECK(got == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("partition function: diagonal pair single step") {
    const CocycleSpec c = diagonal_pair();
    CHECK(partition_function_log(c, qvec({1, 0}), 1) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-13));
}

TEST_CASE("partition function matches the binomial oracle for the commuting pair") {
    const CocycleSpec c = diagonal_pair();
    for (int n = 1; n <= 14; ++n) {
        const double got = partition_function_log(c, qvec({1, 0}), n);
        CHECK(got == doctest::Approx(oracles::commuting_pair_log_partition(n, 1, 0))
                         .epsilon(1e-11));
        const double got2 = partition_function_log(c, qvec({0.7, -0.4}), n);
        CHECK(got2 == doctest::Approx(oracles::commuting_pair_log_partition(n, 0.7, -0.4))
                          .epsilon(1e-11));
    }
}

TEST_CASE("partition function requires primitivity") {
    const SubshiftSpec period2(2, {{0, 1}, {1, 0}});
    const CocycleSpec c = CocycleSpec::one_step(period2, {scalar(2), scalar(3)});
    CHECK_THROWS_AS(partition_function_log(c, qvec({1}), 4), NotPrimitive);
}

TEST_CASE("estimate_pressure: scalar anchor and diagnostics") {
    const CocycleSpec c = scalar23();
    PressureOptions opts;
    const PressureEstimate est = estimate_pressure(c, qvec({1}), 12, opts);
    CHECK(est.point_estimate == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    CHECK(est.values.size() == 12);
    CHECK(est.values_nonincreasing);
    REQUIRE(est.aitken.has_value());
    CHECK(*est.aitken == doctest::Approx(std::log(5.0)).epsilon(1e-9));
}

TEST_CASE("estimate_pressure: commuting pair decreases toward the oracle") {
    const CocycleSpec c = diagonal_pair();
    const PressureEstimate est = estimate_pressure(c, qvec({1, 0}), 14, {});
    // frozen oracle values, not asserted a priori
    for (const auto& [n, v] : est.values)
        CHECK(v == doctest::Approx(oracles::commuting_pair_log_partition(n, 1, 0) / n)
                       .epsilon(1e-11));
    CHECK(est.values_nonincreasing);
}

TEST_CASE("q-zero crosscheck: Perron eigenvalue routes") {
    const SubshiftSpec gm(2, {{1, 1}, {1, 0}});
    const CocycleSpec c = CocycleSpec::one_step(gm, {diag2(2, 1), diag2(1, 2)});
    const PressureEstimate est = estimate_pressure(c, qvec({0, 0}), 18, {});
    REQUIRE(est.crosscheck.has_value());
    CHECK(est.crosscheck->kind == "q-zero");
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(est.crosscheck->limit_value == doctest::Approx(std::log(golden)).epsilon(1e-12));
    CHECK(est.crosscheck->finite_n_difference < 1e-10);
    // the finite-n point estimate stays above the limit and is n-dependent
    CHECK(est.point_estimate > est.crosscheck->limit_value);
}

TEST_CASE("determinant-direction crosscheck agrees with the transfer matrix") {
    const SubshiftSpec gm(2, {{1, 1}, {1, 0}});
    Matrix g0(2, 2), g1(2, 2);
    g0 << 2, 1, 0, 1;        // det 2
    g1 << 1, 0.5, -1, 1;     // det 1.5
    const CocycleSpec c = CocycleSpec::one_step(gm, {g0, g1});
    const PressureEstimate est = estimate_pressure(c, qvec({0.8, 0.8}), 12, {});
    REQUIRE(est.crosscheck.has_value());
    CHECK(est.crosscheck->kind == "determinant-direction");
    CHECK(est.crosscheck->finite_n_difference < 1e-8);
    // limit: log rho(diag(w) Q) with w_a = |det A_a|^{0.8}
    Matrix m(2, 2);
    m << std::pow(2.0, 0.8), std::pow(2.0, 0.8), std::pow(1.5, 0.8), 0;
    CHECK(est.crosscheck->limit_value ==
          doctest::Approx(std::log(oracles::power_spectral_radius(m))).epsilon(1e-9));
}

TEST_CASE("convexity of the fixed-n pressure in q") {
    const CocycleSpec c = diagonal_pair();
    Rng rng(41);
    const int n = 6;
    for (int trial = 0; trial < 100; ++trial) {
        Vector qa(2), qb(2);
        for (int i = 0; i < 2; ++i) {
            qa(i) = 6.0 * rng.next_double() - 3.0;
            qb(i) = 6.0 * rng.next_double() - 3.0;
        }
        const double fa = partition_function_log(c, ExponentVector(qa), n) / n;
        const double fb = partition_function_log(c, ExponentVector(qb), n) / n;
        const double fm =
            partition_function_log(c, ExponentVector(((qa + qb) / 2).eval()), n) / n;
        CHECK(fm <= 0.5 * (fa + fb) + 1e-9);
    }
}

TEST_CASE("superadditive bracket with a quasi-multiplicativity constant") {
    const CocycleSpec c = scalar23();
    PressureOptions opts;
    opts.qm_constant = std::make_pair(0.0, 0);   // exact multiplicativity: C2 = 1, k = 0
    const PressureEstimate est = estimate_pressure(c, qvec({1}), 10, opts);
    REQUIRE(est.superadditive_lower.has_value());
    CHECK(*est.superadditive_lower == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    // bracket never exceeds point estimates at larger n
    for (const auto& [n, v] : est.values)
        CHECK(*est.superadditive_lower <= v + 1e-12);
}

TEST_CASE("Fekete hard assertion rejects an inconsistent constant") {
    const CocycleSpec c = diagonal_pair();
    PressureOptions opts;
    opts.qm_constant = std::make_pair(1.0, 0);   // C2 = e is impossible here
    CHECK_THROWS_AS(estimate_pressure(c, qvec({1, 0}), 8, opts), ValidationError);
}

TEST_CASE("bounded distortion constant") {
    const CocycleSpec one_step = diagonal_pair();
    CHECK(bounded_distortion_constant(one_step, 1, 6) == 1.0);

    const CocycleSpec id2 =
        CocycleSpec::one_step(SubshiftSpec::full_shift(2),
                              {Matrix(Matrix::Identity(2, 2)), Matrix(Matrix::Identity(2, 2))});
    CHECK(bounded_distortion_constant(id2, 1, 5) == 1.0);

    // w = 2: finite, non-decreasing in n, plateaus
    std::vector<Matrix> gens(4);
    gens[0] = diag2(2, 1);
    gens[1] = diag2(1.5, 0.9);
    gens[2] = diag2(1.2, 1.1);
    gens[3] = diag2(0.8, 1.3);
    const CocycleSpec w2(SubshiftSpec::full_shift(2), 2, 2, 1.0, gens, 0);
    double prev = 1.0;
    double last = 0.0, secondlast = 0.0;
    for (int n = 1; n <= 8; ++n) {
        const double cn = bounded_distortion_constant(w2, 1, n);
        CHECK(cn >= prev - 1e-12);
        prev = cn;
        secondlast = last;
        last = cn;
    }
    CHECK(std::isfinite(last));
    CHECK(last == doctest::Approx(secondlast).epsilon(1e-9));   // plateau
}

TEST_CASE("partition values are independent of the thread count") {
    const CocycleSpec c = diagonal_pair();
    const ExponentVector q = qvec({0.9, -0.2});
    SweepOptions serial{1 << 22, 1};
    SweepOptions wide{1 << 22, 7};
    for (int n : {3, 8, 11}) {
        const double a = partition_function_log(c, q, n, serial);
        const double b = partition_function_log(c, q, n, wide);
        CHECK(a == b);   // bit-identical
    }
}
