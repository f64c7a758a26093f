#include "fprw/selftest.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "fprw/mc.hpp"
#include "fprw/phase.hpp"

namespace fprw::selftest {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

FactorSpec flip() { return FiniteGroupSpec::flip(); }
FactorSpec c3() { return FiniteGroupSpec::cyclic(3, {0.0, 0.5, 0.5}); }
FactorSpec lattice(int d) { return LatticeSpec::simple(d); }

struct Named {
    std::string name;
    FreeProductSpec spec;
};

std::vector<Named> oracle_suite() {
    const std::vector<std::pair<std::string, std::vector<FactorSpec>>> shapes = {
        {"Z/2*Z/3", {flip(), c3()}},
        {"Z*Z", {lattice(1), lattice(1)}},
        {"Z*Z/2", {lattice(1), flip()}},
        {"Pi3", {flip(), flip(), flip()}},
        {"Z^2*Z/3", {lattice(2), c3()}},
    };
    const std::vector<std::vector<double>> two = {{0.5, 0.5}, {0.3, 0.7}, {0.85, 0.15}};
    const std::vector<std::vector<double>> three = {{1.0, 1.0, 1.0}, {0.2, 0.3, 0.5}, {0.6, 0.25, 0.15}};
    std::vector<Named> out;
    for (const auto& [name, factors] : shapes)
        for (const auto& w : factors.size() == 2 ? two : three) {
            std::ostringstream os;
            os << name << " (";
            for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
            os << ")";
            out.push_back({os.str(), {factors, w}});
        }
    return out;
}

struct Reporter {
    std::ostream& out;
    bool all = true;

    void line(int k, bool ok, const std::string& what, const std::string& detail) {
        out << (ok ? "PASS" : "FAIL") << " criterion " << k << ": " << what << " | " << detail << '\n';
        out.flush();
        all = all && ok;
    }
};

// Runs one criterion; an exception counts as a failure with its message.
void guarded(Reporter& r, int k, const std::string& what, const std::function<bool(std::ostringstream&)>& body) {
    std::ostringstream detail;
    bool ok = false;
    const auto t0 = Clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail << " threw " << e.what();
    }
    detail << " [" << std::round(seconds_since(t0) * 100.0) / 100.0 << " s]";
    r.line(k, ok, what, detail.str());
}

bool cartwright(std::ostringstream& d) {
    const auto t0 = Clock::now();
    const double expected[] = {0.691, 0.824, 0.876};
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
        const GreenModelPtr m = make_model(LatticeSpec::simple(5 + i));
        const double psi = m->psi_at(m->radius());
        ok = ok && std::abs(psi - expected[i]) <= 0.002;
        d << "Z^" << 5 + i << " " << psi << "; ";
    }
    const double t = seconds_since(t0);
    d << "runtime " << t << " s";
    return ok && t < 5.0;
}

bool composite_bound(std::ostringstream& d) {
    const FactorPair pair = FactorPair::from_specs(lattice(5), lattice(6));
    const double ac = *critical_alpha(pair);
    const double psi = analyze_product(pair.product(ac)).psi_bar;
    d << "alpha_c " << ac << ", Psi " << psi;
    return std::abs(psi - 0.515) <= 0.004;
}

bool oracle_equivalence(std::ostringstream& d) {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (const auto& s : oracle_suite()) {
        const PowerSeries a = product_green_series(FreeProduct::from_spec(s.spec), 14);
        const PowerSeries b = bfs_convolution(s.spec, 14);
        for (std::size_t n = 0; n <= 14; ++n) worst = std::max(worst, std::abs(a[n] - b[n]));
    }
    const double t = seconds_since(t0);
    d << "15 products, max |diff| " << worst << ", runtime " << t << " s";
    return worst <= 1e-10 && t < 60.0;
}

bool radius_consistency(std::ostringstream& d) {
    double worst = 0.0;
    bool saw_root = false, saw_theta = false;
    std::vector<Named> specs = oracle_suite();
    // Products with Psi(theta_bar) >= 0, where rho = theta_bar / Phi(theta_bar).
    specs.push_back({"Z^5*Z^6 (0.7)", {{lattice(5), lattice(6)}, {0.7, 0.3}}});
    specs.push_back({"Z^5*Z^6 (0.1)", {{lattice(5), lattice(6)}, {0.1, 0.9}}});
    specs.push_back({"Z^5*Z^5 (0.8)", {{lattice(5), lattice(5)}, {0.8, 0.2}}});
    for (const auto& s : specs) {
        const FreeProduct fp = FreeProduct::from_spec(s.spec);
        const ProductAnalytics pa = analyze_product(fp);
        if (pa.degenerate) continue;
        (pa.psi_root_branch ? saw_root : saw_theta) = true;
        const double growth = series_growth_rate(product_green_series(fp, 400), pa.period, 400);
        worst = std::max(worst, std::abs(1.0 - (1.0 / pa.radius) / growth));
    }
    d << "max relative error " << worst << ", root branch " << (saw_root ? "yes" : "no") << ", theta branch "
      << (saw_theta ? "yes" : "no");
    return worst <= 0.01 && saw_root && saw_theta;
}

bool exponent_agreement(std::ostringstream& d) {
    const auto t0 = Clock::now();
    const std::vector<Named> cases = {
        {"Pi3", {{flip(), flip(), flip()}, {1.0, 1.0, 1.0}}},
        {"Z^5*Z^5 (0.8)", {{lattice(5), lattice(5)}, {0.8, 0.2}}},
        {"Z^5*Z^6 (0.1)", {{lattice(5), lattice(6)}, {0.1, 0.9}}},
    };
    const double expected[] = {1.5, 2.5, 3.0};
    bool ok = true;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const FreeProduct fp = FreeProduct::from_spec(cases[i].spec);
        const ProductAnalytics pa = analyze_product(fp);
        const AsymptoticLaw law = classify_multi(fp);
        const PowerSeries s = product_green_series_scaled(fp, 2000, pa.radius);
        const ExponentFit fit = fit_exponent(s, 1.0, pa.period, 200, 2000, law.kappa);
        ok = ok && std::abs(law.lambda - expected[i]) < 1e-12 && law.kappa == 0 &&
             std::abs(fit.lambda - law.lambda) <= 0.25;
        d << cases[i].name << " " << law.label() << " fit " << fit.lambda << "; ";
    }
    const double t = seconds_since(t0);
    d << "runtime " << t << " s";
    return ok && t < 180.0;
}

bool phase_cases(std::ostringstream& d) {
    const std::vector<std::pair<std::pair<int, int>, char>> simple = {
        {{5, 6}, 'D'}, {{3, 4}, 'E'}, {{2, 7}, 'B'}, {{7, 2}, 'C'}};
    bool ok = true;
    for (const auto& [dims, want] : simple) {
        const char got = regime_case(FactorPair::from_specs(lattice(dims.first), lattice(dims.second))).case_label;
        ok = ok && got == want;
        d << "Z^" << dims.first << "*Z^" << dims.second << " " << got << "; ";
    }
    const TunedLattice a = tune_axis_weights(5, 0.5);
    const TunedLattice b = tune_axis_weights(6, 0.5);
    const FactorPair pair(make_model(a.spec), make_model(b.spec));
    const PhaseDiagram pd = sweep(pair);
    const double ac = *pd.alpha_c;
    std::size_t at_c = 0;
    bool pattern = true;
    for (const auto& p : pd.grid) {
        std::string want;
        if (p.alpha1 == ac) {
            want = "n^-3/2";
            ++at_c;
        } else {
            want = p.alpha1 < ac ? "n^-3" : "n^-5/2";
        }
        pattern = pattern && p.law.label() == want;
    }
    ok = ok && pd.case_label == 'F' && !pd.ambiguous && pattern && at_c == 1;
    d << "tuned Z^5*Z^6 " << pd.case_label << " (Upsilon_c " << pd.upsilon_c << "), three-law pattern "
      << (pattern && at_c == 1 ? "yes" : "no");
    return ok;
}

// Least-squares estimate of g1 from G(z) = g0 + g1 sqrt(rho - z) + ... on
// the real axis below rho, with the truncated tail replaced by its n^{-3/2}
// continuation.
double fitted_sqrt_coefficient(const PowerSeries& scaled, double rho, int period, double g0) {
    const std::size_t N = scaled.order();
    const double amp = scaled[N] * std::pow(static_cast<double>(N), 1.5);
    std::vector<double> etas;
    for (double e = 0.05; e >= 0.004; e *= 0.85) etas.push_back(e);
    Eigen::MatrixXd A(static_cast<Eigen::Index>(etas.size()), 3);
    Eigen::VectorXd y(static_cast<Eigen::Index>(etas.size()));
    for (std::size_t i = 0; i < etas.size(); ++i) {
        const double x = 1.0 - etas[i];
        double tail = 0.0;
        const double step = std::pow(x, period);
        double xn = std::pow(x, static_cast<double>(N));
        for (std::size_t n = N + period; n < 50 * N; n += period) {
            xn *= step;
            const double term = amp * std::pow(static_cast<double>(n), -1.5) * xn;
            tail += term;
            if (term < 1e-18) break;
        }
        const double sq = std::sqrt(rho * etas[i]);
        const auto k = static_cast<Eigen::Index>(i);
        y(k) = (g0 - (scaled.evaluate(x) + tail)) / sq;
        A(k, 0) = 1.0;
        A(k, 1) = sq;
        A(k, 2) = sq * sq;
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    return -c(0);
}

bool sqrt_coefficient_check(std::ostringstream& d) {
    const TunedLattice a = tune_axis_weights(9, 0.5);
    const TunedLattice b = tune_axis_weights(11, 0.5);
    const FactorPair pair(make_model(a.spec), make_model(b.spec));
    const PhaseDiagram pd = regime_case(pair);
    const FreeProduct fp = pair.product(*pd.alpha_c);
    const ProductAnalytics pa = analyze_product(fp);
    const SqrtCoefficient sc = sqrt_coefficient(fp);
    const PowerSeries s = product_green_series_scaled(fp, 2000, pa.radius);
    const double fit = fitted_sqrt_coefficient(s, pa.radius, pa.period, sc.g0);
    const double rel = std::abs(fit - sc.g1) / std::abs(sc.g1);
    d << "tuned Z^9*Z^11 case " << pd.case_label << ", g1 " << sc.g1 << " vs fit " << fit << " (rel " << rel << ")";
    return pd.case_label == 'F' && rel <= 0.02;
}

bool upsilon_monotone(std::ostringstream& d) {
    const std::vector<std::pair<FactorSpec, FactorSpec>> pairs = {
        {lattice(5), lattice(6)}, {lattice(3), lattice(4)}, {lattice(2), lattice(7)},
        {lattice(7), lattice(2)}, {HomTreeSpec{3}, lattice(5)}, {lattice(6), lattice(6)}};
    bool ok = true;
    for (const auto& [f, g] : pairs) {
        const FactorPair pair = FactorPair::from_specs(f, g);
        const double ac = *critical_alpha(pair);
        double prev = upsilon(pair, 0.0);
        for (int k = 1; k <= 200; ++k) {
            const double a = k / 201.0;
            const double u = upsilon(pair, a);
            // Non-increasing up to alpha_c, non-decreasing after.
            if (a <= ac) ok = ok && u <= prev + 1e-12;
            else if ((k - 1) / 201.0 >= ac) ok = ok && u >= prev - 1e-12;
            prev = u;
        }
    }
    d << "Upsilon V-shape on 6 pairs " << (ok ? "ok" : "violated") << "; ";
    return ok;
}

std::vector<FactorSpec> archetypes() {
    return {flip(), c3(), HomTreeSpec{3}, lattice(1), lattice(3), lattice(5), lattice(6)};
}

bool psi_and_phi_shape(std::ostringstream& d) {
    bool dec = true, convex = true;
    for (const auto& spec : archetypes()) {
        const GreenModelPtr m = make_model(spec);
        const ExtReal theta = m->theta();
        const double top = theta.is_finite() ? theta.value() : 50.0;
        double prev = m->psi_w(0.0);
        for (int k = 1; k <= 40; ++k) {
            const double t = top * k / 41.0;
            const double psi = m->psi_w(t);
            dec = dec && psi < prev;
            prev = psi;
            const ExtReal d2 = m->phi_w(t).d2;
            convex = convex && (d2.is_infinite() || d2.value() > 0.0);
        }
    }
    d << "Psi_i strictly decreasing " << (dec ? "ok" : "violated") << ", Phi_i convex " << (convex ? "ok" : "violated")
      << "; ";
    return dec && convex;
}

bool normal_forms(std::ostringstream& d) {
    const FreeProductSpec spec{{lattice(2), c3(), HomTreeSpec{3}, flip()}, {0.25, 0.25, 0.25, 0.25}};
    const ProductGroup pg(spec);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick_factor(0, pg.size() - 1);
    Word w;
    bool ok = true;
    std::size_t max_len = 0;
    for (int i = 0; i < 100000 && ok; ++i) {
        const std::size_t f = pick_factor(rng);
        const auto& steps = pg.group(f).steps();
        const Element& g = steps[std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng)].g;
        const Word before = w;
        pg.multiply_inplace(w, f, g);
        ok = ok && pg.is_normal_form(w);
        // Undoing the step must restore the word exactly.
        if (i % 10 == 0) ok = ok && pg.multiply(w, f, pg.group(f).inverse(g)) == before;
        // A random walk keeps returning towards short words; reset to keep it small.
        if (w.size() > 64) w.clear();
        max_len = std::max(max_len, w.size());
    }
    d << "1e5 multiplications normal form " << (ok ? "ok" : "violated") << "; ";
    return ok;
}

bool bfs_conservation(std::ostringstream& d) {
    double worst = 0.0;
    for (const auto& s : oracle_suite()) {
        const BfsProfile p = bfs_profile(s.spec, 9, {50'000'000, false});
        for (double m : p.total_mass) worst = std::max(worst, std::abs(m - 1.0));
    }
    d << "BFS max |mass - 1| " << worst << "; ";
    return worst <= 1e-12;
}

bool mc_zscores(std::ostringstream& d) {
    const std::vector<FreeProductSpec> specs = {{{flip(), flip(), flip()}, {1.0, 1.0, 1.0}},
                                                {{lattice(1), c3()}, {0.5, 0.5}}};
    double worst = 0.0;
    for (const auto& spec : specs) {
        const PowerSeries exact = product_green_series(FreeProduct::from_spec(spec), 12);
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const ReturnProfile p = simulate(spec, 12, 100000, seed);
            for (std::size_t n = 1; n <= 12; ++n) {
                const double var = exact[n] * (1.0 - exact[n]) / static_cast<double>(p.walks);
                const double z = var > 0.0 ? (p.frequency(n) - exact[n]) / std::sqrt(var)
                                           : (p.returns[n] == 0 ? 0.0 : 1e9);
                worst = std::max(worst, std::abs(z));
            }
        }
    }
    d << "MC max |z| " << worst << "; ";
    return worst <= 4.0;
}

bool same_law(const AsymptoticLaw& a, const AsymptoticLaw& b) {
    return a.kind == b.kind && a.lambda == b.lambda && a.kappa == b.kappa;
}

bool invariance(std::ostringstream& d) {
    const std::vector<FreeProductSpec> specs = {
        {{lattice(5), lattice(6)}, {0.7, 0.3}}, {{lattice(5), lattice(6)}, {0.2, 0.8}},
        {{lattice(3), flip()}, {0.5, 0.5}},     {{lattice(5), lattice(6), lattice(7)}, {0.1, 0.1, 0.8}},
        {{flip(), c3(), lattice(5)}, {0.2, 0.2, 0.6}}};
    bool ok = true;
    for (const auto& spec : specs) {
        const FreeProduct fp = FreeProduct::from_spec(spec);
        const AsymptoticLaw base = classify_multi(fp);
        std::vector<double> scaled = spec.weights;
        for (double& w : scaled) w *= 3.7;
        ok = ok && same_law(base, classify_multi(FreeProduct::from_spec({spec.factors, scaled})));
        FreeProductSpec rev{{spec.factors.rbegin(), spec.factors.rend()}, {spec.weights.rbegin(), spec.weights.rend()}};
        const AsymptoticLaw r = classify_multi(FreeProduct::from_spec(rev));
        ok = ok && same_law(base, r);
        if (base.kind == LawKind::Inherited) ok = ok && r.factor_index == spec.factors.size() - 1 - base.factor_index;
        ok = ok && same_law(base, classify_direct(fp));
    }
    d << "permutation/scaling invariance " << (ok ? "ok" : "violated");
    return ok;
}

bool properties(std::ostringstream& d) {
    bool ok = upsilon_monotone(d);
    ok = psi_and_phi_shape(d) && ok;
    ok = normal_forms(d) && ok;
    ok = bfs_conservation(d) && ok;
    ok = mc_zscores(d) && ok;
    ok = invariance(d) && ok;
    return ok;
}

// S_3 as permutations of {0,1,2} in lexicographic order, stepping by the
// two transpositions (0 1) and (1 2).
FactorSpec symmetric3() {
    std::vector<std::array<int, 3>> perms;
    std::array<int, 3> p{0, 1, 2};
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    auto index = [&](const std::array<int, 3>& q) {
        return static_cast<int>(std::find(perms.begin(), perms.end(), q) - perms.begin());
    };
    FiniteGroupSpec g;
    g.table.assign(6, std::vector<int>(6));
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 6; ++y) {
            std::array<int, 3> c{};
            for (int i = 0; i < 3; ++i) c[i] = perms[x][perms[y][i]];
            g.table[x][y] = index(c);
        }
    g.mu.assign(6, 0.0);
    g.mu[index({1, 0, 2})] = 0.5;
    g.mu[index({0, 2, 1})] = 0.5;
    g.validate();
    return g;
}

bool degenerate_coverage(std::ostringstream& d) {
    bool ok = true;
    const AsymptoticLaw dd = classify_two(FreeProduct::from_spec({{flip(), flip()}, {0.5, 0.5}}));
    ok = ok && dd.kind == LawKind::OneHalfDegenerate && dd.label() == "n^-1/2";
    d << "Z/2*Z/2 " << law_kind_name(dd.kind) << "; ";

    const FactorSpec s3 = symmetric3();
    const std::vector<FreeProductSpec> finite = {{{flip(), c3()}, {0.5, 0.5}},
                                                 {{c3(), c3()}, {0.3, 0.7}},
                                                 {{flip(), s3}, {0.6, 0.4}},
                                                 {{flip(), flip()}, {0.2, 0.8}}};
    bool fin = true;
    for (std::size_t i = 0; i + 1 < finite.size(); ++i)
        fin = fin && classify_two(FreeProduct::from_spec(finite[i])).kind == LawKind::ThreeHalves;
    // Unequal weights do not make Z/2*Z/2 transient.
    fin = fin && classify_two(FreeProduct::from_spec(finite.back())).kind == LawKind::OneHalfDegenerate;
    d << "finite*finite " << (fin ? "n^-3/2" : "wrong") << "; ";

    const std::vector<std::pair<FactorSpec, FactorSpec>> infinite = {
        {lattice(1), lattice(2)}, {lattice(3), lattice(4)}, {lattice(3), lattice(3)}, {HomTreeSpec{3}, lattice(4)},
        {HomTreeSpec{4}, HomTreeSpec{3}}};
    bool inf = true;
    for (const auto& [f, g] : infinite)
        for (double a : {0.1, 0.5, 0.9}) {
            const FreeProduct fp = FreeProduct::from_spec({{f, g}, {a, 1.0 - a}});
            const bool both = fp.factor(0).gprime_at_radius().is_infinite() && fp.factor(1).gprime_at_radius().is_infinite();
            inf = inf && both && classify_two(fp).kind == LawKind::ThreeHalves;
        }
    d << "both G' infinite " << (inf ? "n^-3/2" : "wrong");
    return ok && fin && inf;
}

}  // namespace

bool run_all(std::ostream& out) {
    Reporter r{out};
    guarded(r, 1, "Cartwright values", cartwright);
    guarded(r, 2, "composite bound at alpha_c", composite_bound);
    guarded(r, 3, "series vs BFS oracle", oracle_equivalence);
    guarded(r, 4, "radius vs coefficient growth", radius_consistency);
    guarded(r, 5, "fitted exponents", exponent_agreement);
    guarded(r, 6, "phase cases", phase_cases);
    guarded(r, 7, "square-root coefficient", sqrt_coefficient_check);
    guarded(r, 8, "property suites", properties);
    guarded(r, 9, "degenerate coverage", degenerate_coverage);
    return r.all;
}

}  // namespace fprw::selftest
