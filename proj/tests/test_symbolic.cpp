#include <doctest.h>

#include <set>

#include "lyapress/errors.hpp"
#include "lyapress/symbolic.hpp"

#include "oracles.hpp"

using namespace lyapress;

namespace {

SubshiftSpec golden_mean() { return SubshiftSpec(2, {{1, 1}, {1, 0}}); }

std::vector<Word> collect(const SubshiftSpec& sft, int n) {
    std::vector<Word> out;
    for_each_word(sft, n, 1 << 24, [&](const Word& w) { out.push_back(w); });
    return out;
}

} // namespace

TEST_CASE("word enumeration: full shift and golden mean") {
    const SubshiftSpec full = SubshiftSpec::full_shift(2);
    auto words = collect(full, 2);
    REQUIRE(words.size() == 4);
    CHECK(words[0].symbols == std::vector<int>{0, 0});
    CHECK(words[3].symbols == std::vector<int>{1, 1});

    const SubshiftSpec gm = golden_mean();
    words = collect(gm, 3);
    REQUIRE(words.size() == 5);
    // brute-force oracle: filter all 2^3 strings by Q
    const auto brute = oracles::brute_words({{1, 1}, {1, 0}}, 3);
    REQUIRE(brute.size() == words.size());
    for (std::size_t i = 0; i < brute.size(); ++i) CHECK(words[i].symbols == brute[i]);
}

TEST_CASE("word enumeration: n = 1 lists all symbols") {
    const SubshiftSpec gm = golden_mean();
    const auto words = collect(gm, 1);
    REQUIRE(words.size() == 2);
}

TEST_CASE("word_count matches enumeration and saturates on overflow") {
    const SubshiftSpec gm = golden_mean();
    for (int n = 1; n <= 12; ++n)
        CHECK(gm.word_count(n) == collect(gm, n).size());
    CHECK(SubshiftSpec::full_shift(3).word_count(4) == 81);
    bool sat = false;
    SubshiftSpec::full_shift(4).word_count(40, &sat);
    CHECK(sat);
}

TEST_CASE("enumeration budget is enforced up front") {
    const SubshiftSpec full = SubshiftSpec::full_shift(2);
    auto run = [&] { return collect(full, 25); };
    CHECK_THROWS_AS(run(), BudgetExceeded);
}

TEST_CASE("concatenation identity: L_{n+m} = admissible joins of L_n x L_m") {
    for (const auto& rows : {std::vector<std::vector<int>>{{1, 1}, {1, 0}},
                             std::vector<std::vector<int>>{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}}) {
        const SubshiftSpec sft(static_cast<int>(rows.size()), rows);
        for (int n = 1; n <= 4; ++n)
            for (int m = 1; m <= 4; ++m) {
                std::set<std::vector<int>> joined;
                for (const auto& a : collect(sft, n))
                    for (const auto& b : collect(sft, m)) {
                        if (!concat_admissible(sft, a, b)) continue;
                        std::vector<int> j = a.symbols;
                        j.insert(j.end(), b.symbols.begin(), b.symbols.end());
                        joined.insert(j);
                    }
                const auto direct = collect(sft, n + m);
                REQUIRE(joined.size() == direct.size());
                for (const auto& w : direct) CHECK(joined.count(w.symbols) == 1);
            }
    }
}

TEST_CASE("concat_admissible on the golden mean shift") {
    const SubshiftSpec gm = golden_mean();
    CHECK(concat_admissible(gm, Word({0, 1}), Word({0, 0})));
    CHECK_FALSE(concat_admissible(gm, Word({0, 1}), Word({1, 0})));
    const SubshiftSpec full = SubshiftSpec::full_shift(2);
    CHECK(concat_admissible(full, Word({1}), Word({1})));
}

TEST_CASE("subshift validation rejects dead symbols") {
    CHECK_THROWS_AS(SubshiftSpec(2, {{1, 1}, {0, 0}}), ValidationError);
    CHECK_THROWS_AS(SubshiftSpec(2, {{1, 0}, {1, 0}}), ValidationError);
}

TEST_CASE("primitivity detection") {
    CHECK(SubshiftSpec::full_shift(2).is_primitive());
    CHECK(golden_mean().is_primitive());
    // period-2 permutation is irreducible but not primitive
    CHECK_FALSE(SubshiftSpec(2, {{0, 1}, {1, 0}}).is_primitive());
}

TEST_CASE("symbolic distance basics") {
    const PeriodicPointSym p{Word({0})};
    const SymbolicPoint x = SymbolicPoint::periodic(p);
    CHECK(symbolic_distance(x, x) == 0.0);

    const PeriodicPointSym q{Word({1})};
    const SymbolicPoint y = SymbolicPoint::periodic(q);
    CHECK(symbolic_distance(x, y) == 1.0);   // differ at coordinate 0

    // homoclinic point agreeing with the fixed point on |i| <= 0, differing at +1
    HomoclinicPointSym z;
    z.base = p;
    z.excursion = Word({1});
    z.entry_time = 2;
    const SymbolicPoint zz = SymbolicPoint::homoclinic(z);
    CHECK(symbolic_distance(x, zz) == 0.5);  // first difference at i = 1

    // shift z so the difference sits at coordinate 4: agree on |i| <= 3
    CHECK(symbolic_distance(x, zz.shifted(-3)) == 0.0625);
}

TEST_CASE("symbolic distance is symmetric and ultrametric on samples") {
    std::vector<SymbolicPoint> pts;
    pts.push_back(SymbolicPoint::periodic(PeriodicPointSym{Word({0})}));
    pts.push_back(SymbolicPoint::periodic(PeriodicPointSym{Word({1})}));
    pts.push_back(SymbolicPoint::periodic(PeriodicPointSym{Word({0, 1})}));
    HomoclinicPointSym z;
    z.base = PeriodicPointSym{Word({0})};
    z.excursion = Word({1, 1});
    z.entry_time = 3;
    pts.push_back(SymbolicPoint::homoclinic(z));
    pts.push_back(pts.back().shifted(2));
    pts.push_back(pts.back().shifted(-5));

    for (const auto& a : pts)
        for (const auto& b : pts) {
            CHECK(symbolic_distance(a, b) == symbolic_distance(b, a));
            for (const auto& c : pts) {
                const double ab = symbolic_distance(a, b);
                CHECK(ab <= std::max(symbolic_distance(a, c), symbolic_distance(c, b)) + 1e-15);
            }
        }
}

TEST_CASE("periodic and homoclinic representations are exact") {
    const SubshiftSpec gm = golden_mean();
    const PeriodicPointSym p{Word({0, 1})};
    const SymbolicPoint x = SymbolicPoint::periodic(p);
    CHECK(x.admissible(gm));
    CHECK(x.at(0) == 0);
    CHECK(x.at(1) == 1);
    CHECK(x.at(-1) == 1);
    CHECK(x.at(-2) == 0);
    CHECK(x.at(7) == 1);

    // shifting by the period is the identity on symbols
    for (long i = -6; i <= 6; ++i) CHECK(x.shifted(2).at(i) == x.at(i));

    HomoclinicPointSym z;
    z.base = PeriodicPointSym{Word({0})};
    z.excursion = Word({1});
    z.entry_time = 2;
    const SymbolicPoint zz = SymbolicPoint::homoclinic(z);
    CHECK(zz.admissible(gm));
    CHECK(zz.at(0) == 0);
    CHECK(zz.at(1) == 1);
    CHECK(zz.at(2) == 0);
    CHECK(zz.at(-1) == 0);
    CHECK(zz.agrees_backward(SymbolicPoint::periodic(z.base), 0));
    CHECK(zz.shifted(2).agrees_forward(SymbolicPoint::periodic(z.base), 0));
}

TEST_CASE("degenerate homoclinic excursion is rejected") {
    HomoclinicPointSym z;
    z.base = PeriodicPointSym{Word({0})};
    z.excursion = Word({0});   // stays on the fixed point
    z.entry_time = 2;
    CHECK_THROWS_AS(SymbolicPoint::homoclinic(z), ValidationError);
}

TEST_CASE("word rank is the lexicographic enumeration index") {
    const SubshiftSpec gm = golden_mean();
    const auto words = collect(gm, 6);
    for (std::size_t i = 0; i < words.size(); ++i)
        CHECK(word_rank(gm, words[i].symbols) == i);
}
