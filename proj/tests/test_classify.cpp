#include <doctest.h>

#include <cmath>

#include "fprw/classify.hpp"

using namespace fprw;

namespace {

FactorSpec flip() { return FiniteGroupSpec::flip(); }
FactorSpec lattice(int d) { return LatticeSpec::simple(d); }

AsymptoticLaw law2(FactorSpec a, FactorSpec b, double alpha1) {
    return classify_two(FreeProduct::from_spec({{a, b}, {alpha1, 1.0 - alpha1}}));
}

// Z^5 as raw data: coefficients and boundary values without a singularity.
ExplicitSpec z5_without_singularity() {
    const GreenModelPtr m = make_model(LatticeSpec::simple(5));
    ExplicitSpec e;
    e.coeffs = m->series(200).coeffs();
    e.radius = 1.0;
    e.g_at_r = m->g_at_radius();
    e.gprime_at_r = m->gprime_at_radius();
    e.period = 2;
    return e;
}

}  // namespace

TEST_CASE("labels") {
    CHECK(exponent_label(2.5, 0) == "n^-5/2");
    CHECK(exponent_label(3.0, 0) == "n^-3");
    CHECK(exponent_label(3.0, 1) == "n^-3 log n");
    CHECK(exponent_label(4.0, 2) == "n^-4 log^2 n");
    CHECK(exponent_label(0.5, 0) == "n^-1/2");
    CHECK(law_kind_name(LawKind::ThreeHalves) == "three_halves");
}

TEST_CASE("Z^5 * Z^6 inherits from whichever factor attains theta_bar") {
    const double ac = 0.508654;  // theta_1 / (theta_1 + theta_2) from the lattice Green values
    const AsymptoticLaw hi = law2(lattice(5), lattice(6), 0.7);
    CHECK(hi.kind == LawKind::Inherited);
    CHECK(hi.factor_index == 0);
    CHECK(hi.label() == "n^-5/2");
    const AsymptoticLaw lo = law2(lattice(5), lattice(6), 0.1);
    CHECK(lo.factor_index == 1);
    CHECK(lo.label() == "n^-3");
    CHECK(law2(lattice(5), lattice(6), ac + 1e-3).label() == "n^-5/2");
    CHECK(law2(lattice(5), lattice(6), ac - 1e-3).label() == "n^-3");
    CHECK(hi.period == 2);
}

TEST_CASE("low-dimensional and finite factors give n^-3/2") {
    CHECK(law2(lattice(3), lattice(4), 0.5).kind == LawKind::ThreeHalves);
    CHECK(law2(flip(), FiniteGroupSpec::cyclic(3, {0.0, 0.5, 0.5}), 0.5).kind == LawKind::ThreeHalves);
    CHECK(law2(lattice(2), lattice(7), 0.9).kind == LawKind::ThreeHalves);
    CHECK(law2(lattice(2), lattice(7), 0.5).label() == "n^-7/2");
}

TEST_CASE("Z/2 * Z/2 is recurrent with the n^-1/2 law") {
    const AsymptoticLaw l = law2(flip(), flip(), 0.5);
    CHECK(l.kind == LawKind::OneHalfDegenerate);
    CHECK(l.label() == "n^-1/2");
    CHECK(l.radius == 1.0);
}

TEST_CASE("fold over three factors matches the direct formula") {
    const std::vector<FreeProductSpec> specs = {
        {{lattice(5), lattice(6), lattice(7)}, {0.1, 0.1, 0.8}},
        {{lattice(5), lattice(6), lattice(7)}, {0.6, 0.2, 0.2}},
        {{lattice(5), lattice(6), lattice(7)}, {1.0, 1.0, 1.0}},
        {{flip(), lattice(6), lattice(5)}, {0.2, 0.2, 0.6}},
        {{flip(), flip(), flip()}, {1.0, 1.0, 1.0}},
        {{HomTreeSpec{3}, lattice(8), lattice(1)}, {0.3, 0.5, 0.2}},
    };
    for (const auto& s : specs) {
        const FreeProduct fp = FreeProduct::from_spec(s);
        const AsymptoticLaw a = classify_multi(fp);
        const AsymptoticLaw b = classify_direct(fp);
        CHECK(a.kind == b.kind);
        CHECK(a.label() == b.label());
        if (a.kind == LawKind::Inherited) CHECK(a.factor_index == b.factor_index);
    }
    CHECK(classify_multi(FreeProduct::from_spec(specs[0])).label() == "n^-7/2");
}

TEST_CASE("classify_two refuses three factors") {
    try {
        classify_two(FreeProduct::from_spec({{flip(), flip(), flip()}, {1.0, 1.0, 1.0}}));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedFactorCount);
    }
}

TEST_CASE("an inherited law needs the factor's singularity") {
    const FreeProduct fp = FreeProduct::from_spec({{z5_without_singularity(), lattice(6)}, {0.7, 0.3}});
    try {
        classify_two(fp);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingSingularity);
    }
    ExplicitSpec with = z5_without_singularity();
    with.sing = make_singularity(1.5, 0);
    CHECK(classify_two(FreeProduct::from_spec({{with, lattice(6)}, {0.7, 0.3}})).label() == "n^-5/2");
}

TEST_CASE("every archetype pair reaches exactly one branch") {
    const std::vector<FactorSpec> arch = {flip(),    FiniteGroupSpec::cyclic(3, {0.0, 0.5, 0.5}),
                                          HomTreeSpec{3}, lattice(1), lattice(3), lattice(5), lattice(6)};
    for (std::size_t i = 0; i < arch.size(); ++i)
        for (std::size_t j = 0; j < arch.size(); ++j)
            for (double a : {0.05, 0.3, 0.5, 0.7, 0.95}) {
                const FreeProduct fp = FreeProduct::from_spec({{arch[i], arch[j]}, {a, 1.0 - a}});
                AsymptoticLaw law;
                CHECK_NOTHROW(law = classify_two(fp));
                const bool inherited = law.kind == LawKind::Inherited;
                CHECK(inherited == (law.psi_bar > 1e-8 && !fp.degenerate()));
            }
}

TEST_CASE("near-critical products are flagged") {
    const FreeProduct fp = FreeProduct::from_spec({{lattice(5), lattice(6)}, {0.5, 0.5}});
    ClassifyOptions opt;
    opt.warning_band = 1.0;
    CHECK(classify_two(fp, opt).confidence == Confidence::NearCritical);
    CHECK(classify_two(fp).confidence == Confidence::Exact);
}

TEST_CASE("the product viewed as a factor keeps radius and series") {
    const FreeProduct fp = FreeProduct::from_spec({{lattice(5), lattice(6)}, {0.7, 0.3}});
    const GreenModelPtr g = product_as_factor(fp);
    const ProductAnalytics pa = analyze_product(fp);
    CHECK(g->radius() == doctest::Approx(pa.radius));
    CHECK(g->g_at_radius().value() == doctest::Approx(pa.g_at_radius.value()));
    const PowerSeries a = g->series(40), b = product_green_series(fp, 40);
    for (std::size_t n = 0; n <= 40; ++n) CHECK(a[n] == doctest::Approx(b[n]));
    CHECK(g->singularity()->lambda == 2.5);
}

TEST_CASE("exponent fit recovers synthetic laws") {
    std::vector<double> c(2001, 0.0), d(2001, 0.0);
    for (std::size_t n = 1; n <= 2000; ++n) {
        const double x = static_cast<double>(n);
        c[n] = std::pow(0.9, x) * std::pow(x, -2.5) * (1.0 + 0.3 / x);
        if (n % 2 == 0) d[n] = std::pow(x, -3.0) * std::log(x);
    }
    const ExponentFit a = fit_exponent(PowerSeries(c), 1.0 / 0.9, 1, 100, 2000);
    CHECK(a.lambda == doctest::Approx(2.5).epsilon(1e-3));
    const ExponentFit b = fit_exponent(PowerSeries(d), 1.0, 2, 100, 2000, 1);
    CHECK(b.lambda == doctest::Approx(3.0).epsilon(0.01));
    CHECK(series_growth_rate(PowerSeries(c), 1, 2000) == doctest::Approx(0.9).epsilon(1e-4));
}

TEST_CASE("a tie between identical laws reports the first factor") {
    const AsymptoticLaw l = law2(lattice(5), lattice(5), 0.5);
    CHECK(l.kind == LawKind::Inherited);
    CHECK(l.factor_index == 0);
}
