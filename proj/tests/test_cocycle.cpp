#include <doctest.h>

#include <cmath>

#include "lyapress/cocycle.hpp"
#include "lyapress/errors.hpp"

using namespace lyapress;

namespace {

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m.diagonal() << a, b;
    return m;
}

CocycleSpec diagonal_pair() {
    return CocycleSpec::one_step(SubshiftSpec::full_shift(2), {diag2(2, 1), diag2(1, 2)});
}

// w = 2 fiber-bunched cocycle anchored at -1 (window {-1, 0}); generators are
// mild perturbations of the identity so ||A|| ||A^-1|| < 2^alpha.
CocycleSpec two_sided_fixture() {
    std::vector<Matrix> gens(4);
    auto bump = [](double a, double b, double c, double d) {
        Matrix m(2, 2);
        m << 1.0 + a, b, c, 1.0 + d;
        return m;
    };
    gens[0] = bump(0.05, 0.02, -0.01, -0.03);   // window 00
    gens[1] = bump(-0.04, 0.03, 0.02, 0.05);    // window 01
    gens[2] = bump(0.02, -0.05, 0.04, 0.01);    // window 10
    gens[3] = bump(-0.01, 0.04, -0.03, 0.02);   // window 11
    return CocycleSpec(SubshiftSpec::full_shift(2), 2, 2, 0.5, std::move(gens), -1);
}

SymbolicPoint fixed_point(int s) { return SymbolicPoint::periodic(PeriodicPointSym{Word({s})}); }

} // namespace

TEST_CASE("evaluate_word: one-step products") {
    const CocycleSpec c = diagonal_pair();
    const WordMatrix w01 = evaluate_word(c, Word({0, 1}));
    CHECK(w01.exact);
    CHECK((w01.matrix.dense() - diag2(2, 2)).norm() < 1e-14);

    const WordMatrix w1 = evaluate_word(c, Word({1}));
    CHECK((w1.matrix.dense() - diag2(1, 2)).norm() == 0.0);

    Matrix a(2, 2);
    a << 2, 1, 1, 1;
    const CocycleSpec cs = CocycleSpec::one_step(SubshiftSpec::full_shift(1), {a});
    Matrix expect(2, 2);
    expect << 5, 3, 3, 2;   // A * A by hand
    CHECK((evaluate_word(cs, Word({0, 0})).matrix.dense() - expect).norm() < 1e-14);
}

TEST_CASE("evaluate_word rejects inadmissible words") {
    const SubshiftSpec gm(2, {{1, 1}, {1, 0}});
    const CocycleSpec c = CocycleSpec::one_step(gm, {diag2(2, 1), diag2(1, 2)});
    CHECK_THROWS_AS(evaluate_word(c, Word({1, 1})), InadmissibleWord);
}

TEST_CASE("cocycle identity A(IJ) = A(J after shift) A(I) for one-step") {
    const SubshiftSpec sft(3, {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}});
    std::vector<Matrix> gens;
    Matrix g0(2, 2), g1(2, 2), g2(2, 2);
    g0 << 2, 1, 0, 1;
    g1 << 1, 0, 1, 1;
    g2 << 1, -1, 1, 1;
    gens = {g0, g1, g2};
    const CocycleSpec c = CocycleSpec::one_step(sft, gens);
    for (int n = 1; n <= 4; ++n)
        for (int m = 1; m + n <= 8; ++m) {
            for_each_word(sft, n + m, 1 << 16, [&](const Word& w) {
                const Word wi(std::vector<int>(w.symbols.begin(), w.symbols.begin() + n));
                const Word wj(std::vector<int>(w.symbols.begin() + n, w.symbols.end()));
                const Matrix lhs = evaluate_word(c, w).matrix.dense();
                const Matrix rhs =
                    evaluate_word(c, wj).matrix.dense() * evaluate_word(c, wi).matrix.dense();
                CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
            });
        }
}

TEST_CASE("norm_over_cylinder: diagonal pair and determinant index") {
    const CocycleSpec c = diagonal_pair();
    const CylinderNorm n1 = norm_over_cylinder(c, Word({0, 1}), 1);
    CHECK(n1.log_norm == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // t = d: log|det| summed over symbols
    const CylinderNorm n2 = norm_over_cylinder(c, Word({0, 1}), 2);
    CHECK(n2.log_norm == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("norm_over_cylinder enumerates window extensions exactly for w = 2") {
    const CocycleSpec c = two_sided_fixture();
    // golden-mean style check on the full shift: both extensions enumerated
    const Word w({0, 1});
    const CylinderNorm nc = norm_over_cylinder(c, w, 1);
    CHECK(nc.exact);
    // direct: extensions 0 and 1 append a symbol; window anchored at -1 means
    // the product over the word uses factors at windows (w[0]w[1]) and (w[1]e)
    double best = -1e300, low = 1e300;
    for (int e = 0; e < 2; ++e) {
        const Matrix m =
            c.generator(std::vector<int>{1, e}) * c.generator(std::vector<int>{0, 1});
        const double v = std::log(m.operatorNorm());
        best = std::max(best, v);
        low = std::min(low, v);
    }
    CHECK(nc.log_norm == doctest::Approx(best).epsilon(1e-12));
    CHECK(nc.log_norm_min == doctest::Approx(low).epsilon(1e-12));
}

TEST_CASE("fiber bunching checks") {
    // all orthogonal generators: condition number exactly 1
    Matrix rot(2, 2);
    rot << 0, -1, 1, 0;
    const CocycleSpec ortho =
        CocycleSpec::one_step(SubshiftSpec::full_shift(2), {Matrix(Matrix::Identity(2, 2)), rot});
    CHECK(check_fiber_bunched(ortho).passed());

    const CocycleSpec bad =
        CocycleSpec::one_step(SubshiftSpec::full_shift(1), {diag2(2, 0.5)});
    CHECK_FALSE(check_fiber_bunched(bad).passed());

    std::vector<Matrix> mild = {diag2(1.1, 1.0)};
    const CocycleSpec good(SubshiftSpec::full_shift(1), 2, 1, 0.5, mild, 0);
    const StructureVerdict v = check_fiber_bunched(good);
    CHECK(v.passed());
    CHECK(v.margin == doctest::Approx(std::pow(2.0, 0.5) - 1.1).epsilon(1e-12));
}

TEST_CASE("stable holonomy is the exact identity for forward windows") {
    const CocycleSpec c = diagonal_pair();
    const SymbolicPoint x = fixed_point(0);
    // y agrees with x on coordinates >= 0, differs in the past
    HomoclinicPointSym hz;
    hz.base = PeriodicPointSym{Word({0})};
    hz.excursion = Word({1});
    hz.entry_time = 2;
    const SymbolicPoint y = SymbolicPoint::homoclinic(hz).shifted(2);
    REQUIRE(y.agrees_forward(x, 0));
    const HolonomyResult h = stable_holonomy(c, x, y);
    CHECK(h.exact);
    CHECK((h.h - Matrix::Identity(2, 2)).norm() == 0.0);

    const HolonomyResult hxx = stable_holonomy(c, x, x);
    CHECK((hxx.h - Matrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("unstable holonomy is the exact identity for narrow windows") {
    const CocycleSpec c = diagonal_pair();
    const SymbolicPoint x = fixed_point(0);
    HomoclinicPointSym hz;
    hz.base = PeriodicPointSym{Word({0})};
    hz.excursion = Word({1});
    hz.entry_time = 2;
    const SymbolicPoint z = SymbolicPoint::homoclinic(hz);
    REQUIRE(z.agrees_backward(x, 0));
    const HolonomyResult h = unstable_holonomy(c, x, z);
    CHECK(h.exact);
    CHECK((h.h - Matrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("stable holonomy converges with certificate on the two-sided fixture") {
    const CocycleSpec c = two_sided_fixture();
    REQUIRE(check_fiber_bunched(c).passed());

    const SymbolicPoint x = fixed_point(0);
    HomoclinicPointSym hz;
    hz.base = PeriodicPointSym{Word({0})};
    hz.excursion = Word({1});
    hz.entry_time = 2;
    const SymbolicPoint y = SymbolicPoint::homoclinic(hz).shifted(2);
    REQUIRE(y.agrees_forward(x, 0));

    const HolonomyResult h = stable_holonomy(c, x, y);
    CHECK_FALSE(h.exact);
    CHECK(h.ratio_estimate < 1.0);
    CHECK(h.tail_bound < 1e-8);
    // the limit is A(window of y at 0)^{-1} A(window of x at 0): windows read
    // coordinates {-1, 0}: y_{-1} = 1, x_{-1} = 0
    const Matrix expect = c.generator(std::vector<int>{1, 0}).inverse() *
                          c.generator(std::vector<int>{0, 0});
    CHECK((h.h - expect).norm() < 1e-10);
    CHECK((h.h - Matrix::Identity(2, 2)).norm() > 1e-3);   // genuinely nontrivial
}

TEST_CASE("holonomy equivariance and composition on the two-sided fixture") {
    const CocycleSpec c = two_sided_fixture();
    const SymbolicPoint x = fixed_point(0);

    auto stable_partner = [&](std::vector<int> past) {
        // point agreeing with 0^infty on coordinates >= 0 with custom recent past
        const int m = static_cast<int>(past.size());
        std::vector<int> core = past;
        return SymbolicPoint(std::vector<int>{0}, core, std::vector<int>{0}, -m);
    };
    const SymbolicPoint y = stable_partner({1});
    const SymbolicPoint z = stable_partner({1, 1});

    // equivariance: A(y) H^s_{y<-x} = H^s_{Ty<-Tx} A(x)
    const Matrix lhs = c.value_at(y, 0) * stable_holonomy(c, x, y).h;
    const Matrix rhs = stable_holonomy(c, x.shifted(1), y.shifted(1)).h * c.value_at(x, 0);
    CHECK((lhs - rhs).norm() < 1e-8);

    // composition: H^s_{z<-y} H^s_{y<-x} = H^s_{z<-x}
    const Matrix comp = stable_holonomy(c, y, z).h * stable_holonomy(c, x, y).h;
    CHECK((comp - stable_holonomy(c, x, z).h).norm() < 1e-8);

    // Holder decay: deeper past agreement gives smaller ||H - I||
    double prev = 1e300;
    for (int depth = 1; depth <= 4; ++depth) {
        std::vector<int> past(depth, 0);
        past[0] = 1;   // difference at coordinate -depth only
        const double dev =
            (stable_holonomy(c, x, stable_partner(past)).h - Matrix::Identity(2, 2)).norm();
        CHECK(dev <= prev + 1e-15);
        prev = dev;
    }
}

TEST_CASE("global stable holonomy: consistency across valid n") {
    const CocycleSpec c = two_sided_fixture();
    const SymbolicPoint x = fixed_point(0);
    HomoclinicPointSym hz;
    hz.base = PeriodicPointSym{Word({0})};
    hz.excursion = Word({1});
    hz.entry_time = 2;
    const SymbolicPoint z = SymbolicPoint::homoclinic(hz);   // differs at +1 only
    // T^2 z lies on the local stable set of T^2 x; so does T^3
    const Matrix h2 = global_stable_holonomy(c, x, z, 2).h;
    const Matrix h3 = global_stable_holonomy(c, x, z, 3).h;
    CHECK((h2 - h3).norm() < 1e-8);

    // n = 0 with a local pair reduces to the local holonomy
    const SymbolicPoint y = SymbolicPoint(std::vector<int>{0}, {1}, std::vector<int>{0}, -1);
    CHECK((global_stable_holonomy(c, x, y, 0).h - stable_holonomy(c, x, y).h).norm() == 0.0);

    // one-step cocycles: global holonomy equals A^n(y)^{-1} A^n(x)
    const CocycleSpec one = diagonal_pair();
    const Matrix g = global_stable_holonomy(one, x, z, 2).h;
    const Matrix ax = forward_product(one, x, 2).dense();
    const Matrix ay = forward_product(one, z, 2).dense();
    CHECK((g - ay.inverse() * ax).norm() < 1e-12);
}

TEST_CASE("preconditions on stable/unstable sets are enforced") {
    const CocycleSpec c = diagonal_pair();
    const SymbolicPoint x = fixed_point(0);
    const SymbolicPoint y = fixed_point(1);
    CHECK_THROWS_AS(stable_holonomy(c, x, y), NotOnStableSet);
    CHECK_THROWS_AS(unstable_holonomy(c, x, y), NotOnStableSet);
}

TEST_CASE("scaled matrices keep long products finite") {
    const CocycleSpec c = diagonal_pair();
    const SymbolicPoint x = fixed_point(0);
    const ScaledMatrix big = forward_product(c, x, 2000);
    CHECK(std::isfinite(big.m.norm()));
    CHECK(big.log_operator_norm() == doctest::Approx(2000 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("wedge cocycle evaluates as the exterior power of products") {
    const SubshiftSpec gm(2, {{1, 1}, {1, 0}});
    Matrix g0(3, 3), g1(3, 3);
    g0 << 2, 1, 0, 0, 1, 1, 1, 0, 1;
    g1 << 1, 0, 1, 1, 2, 0, 0, 1, 1;
    const CocycleSpec c = CocycleSpec::one_step(gm, {g0, g1});
    const CocycleSpec c2 = c.wedge(2);
    const Word w({0, 1, 0, 0, 1});
    const Matrix lhs = evaluate_word(c2, w).matrix.dense();
    const Matrix rhs = exterior_power(evaluate_word(c, w).matrix.dense(), 2);
    CHECK((lhs - rhs).norm() < 1e-9 * rhs.norm());
}
