#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fprw/mc.hpp"

using namespace fprw;

namespace {

FactorSpec flip() { return FiniteGroupSpec::flip(); }
FactorSpec c3() { return FiniteGroupSpec::cyclic(3, {0.0, 0.5, 0.5}); }

const FreeProductSpec kPi3{{flip(), flip(), flip()}, {1.0, 1.0, 1.0}};

}  // namespace

TEST_CASE("factor groups: identities, inverses and distances") {
    const auto lat = make_factor_group(LatticeSpec::simple(3));
    const Element a{1, -2, 0}, b{0, 2, 5};
    CHECK(lat->multiply(a, b) == Element{1, 0, 5});
    CHECK(lat->is_identity(lat->multiply(a, lat->inverse(a))));
    CHECK(lat->distance(a) == 3);
    CHECK(lat->steps().size() == 6);

    const auto cyc = make_factor_group(FiniteGroupSpec::cyclic(5, {0.0, 0.5, 0.0, 0.0, 0.5}));
    CHECK(cyc->multiply({3}, {4}) == Element{2});
    CHECK(cyc->inverse({2}) == Element{3});
    CHECK(cyc->distance({2}) == 2);
    CHECK(cyc->distance({0}) == 0);

    const auto tree = make_factor_group(HomTreeSpec{3});
    CHECK(tree->multiply({0, 1}, {1, 2}) == Element{0, 2});
    CHECK(tree->is_identity(tree->multiply({0, 2, 1}, tree->inverse({0, 2, 1}))));
    CHECK(tree->distance({0, 2, 1}) == 3);

    ExplicitSpec e;
    e.coeffs = {1.0, 0.0, 0.5};
    CHECK_THROWS_AS(make_factor_group(e), Error);
}

TEST_CASE("words stay reduced and steps undo exactly") {
    const FreeProductSpec spec{{LatticeSpec::simple(2), c3(), HomTreeSpec{3}, flip()}, {1.0, 1.0, 1.0, 1.0}};
    const ProductGroup pg(spec);
    std::mt19937_64 rng(99);
    Word w;
    for (int i = 0; i < 20000; ++i) {
        const std::size_t f = rng() % pg.size();
        const auto& steps = pg.group(f).steps();
        const Element& g = steps[rng() % steps.size()].g;
        const Word before = w;
        w = word_multiply(pg, w, f, g);
        REQUIRE(pg.is_normal_form(w));
        CHECK(pg.multiply(w, f, pg.group(f).inverse(g)) == before);
        if (w.size() > 40) w.clear();
    }
    Word bad{{0, {1, 0}}, {0, {0, 1}}};
    CHECK_FALSE(pg.is_normal_form(bad));
    CHECK_FALSE(pg.is_normal_form(Word{{1, {0}}}));
}

TEST_CASE("word distance is the sum of letter distances") {
    const ProductGroup pg({{LatticeSpec::simple(2), c3()}, {0.5, 0.5}});
    Word w;
    w = pg.multiply(w, 0, {2, -1});
    w = pg.multiply(w, 1, {1});
    w = pg.multiply(w, 0, {0, 1});
    CHECK(pg.distance(w) == 3 + 1 + 1);
    CHECK(encode(w) != encode(pg.multiply(w, 1, {1})));
}

TEST_CASE("BFS reproduces the 3-regular tree and conserves mass") {
    const PowerSeries b = bfs_convolution(kPi3, 14);
    const PowerSeries t = tree_series(HomTreeSpec{3}, 14);
    for (std::size_t n = 0; n <= 14; ++n) CHECK(b[n] == doctest::Approx(t[n]).epsilon(1e-13));

    const BfsProfile p = bfs_profile({{LatticeSpec::simple(1), c3()}, {0.4, 0.6}}, 10, {50'000'000, false});
    for (double m : p.total_mass) CHECK(std::abs(m - 1.0) <= 1e-12);
}

TEST_CASE("BFS refuses to exceed the state cap") {
    try {
        bfs_profile({{LatticeSpec::simple(2), LatticeSpec::simple(2)}, {0.5, 0.5}}, 12, {1000, false});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StateExplosion);
    }
}

TEST_CASE("simulation is reproducible and independent of the thread count") {
    SimulateOptions one, many;
    one.threads = 1;
    many.threads = 4;
    const ReturnProfile a = simulate(kPi3, 10, 20000, 5, one);
    const ReturnProfile b = simulate(kPi3, 10, 20000, 5, many);
    CHECK(a.returns == b.returns);
    const ReturnProfile c = simulate(kPi3, 10, 20000, 6, one);
    CHECK(a.returns != c.returns);
    CHECK(a.returns[0] == 20000);
    CHECK(a.returns[1] == 0);
}

TEST_CASE("return frequencies agree with the exact series") {
    const FreeProductSpec spec{{LatticeSpec{{1.0}, {0.6}}, HomTreeSpec{3}, c3()}, {0.3, 0.3, 0.4}};
    const PowerSeries exact = product_green_series(FreeProduct::from_spec(spec), 12);
    for (std::uint64_t seed : {11u, 12u}) {
        const ReturnProfile p = simulate(spec, 12, 100000, seed);
        for (std::size_t n = 1; n <= 12; ++n) {
            const double sd = std::sqrt(exact[n] * (1.0 - exact[n]) / 100000.0);
            if (sd == 0.0) CHECK(p.returns[n] == 0);
            else CHECK(std::abs(p.frequency(n) - exact[n]) / sd <= 4.0);
        }
    }
}

TEST_CASE("spectral radius from Monte Carlo with the polynomial correction") {
    const ReturnProfile p = simulate(kPi3, 80, 200000, 42);
    const double exact = 2.0 * std::sqrt(2.0) / 3.0;
    CHECK(mc_growth_rate(p, 2, 40, 80, 1.5) == doctest::Approx(exact).epsilon(0.02));
    CHECK_THROWS_AS(mc_growth_rate(p, 2, 80, 40, 1.5), Error);
}
