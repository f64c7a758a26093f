#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>

#include "fprw/factors.hpp"

using namespace fprw;

namespace {

double central(int n) {  // C(2n, n) / 4^n
    double c = 1.0;
    for (int k = 1; k <= n; ++k) c *= (2.0 * k - 1.0) / (2.0 * k);
    return c;
}

// Return probabilities of a lattice walk by pushing mass over explicit sites.
std::vector<double> brute_force_returns(const LatticeSpec& s, int N) {
    std::map<std::vector<int>, double> cur{{std::vector<int>(s.dim(), 0), 1.0}};
    std::vector<double> out{1.0};
    for (int n = 1; n <= N; ++n) {
        std::map<std::vector<int>, double> next;
        for (const auto& [x, m] : cur)
            for (int j = 0; j < s.dim(); ++j)
                for (int sign : {1, -1}) {
                    auto y = x;
                    y[j] += sign;
                    next[y] += m * s.beta[j] * (sign > 0 ? s.p[j] : 1.0 - s.p[j]);
                }
        cur.swap(next);
        out.push_back(cur[std::vector<int>(s.dim(), 0)]);
    }
    return out;
}

// Green function of a walk on Z/n by the discrete Fourier transform.
double cyclic_green_fourier(const std::vector<double>& mu, double z) {
    const int n = static_cast<int>(mu.size());
    std::complex<double> g = 0.0;
    for (int k = 0; k < n; ++k) {
        std::complex<double> lam = 0.0;
        for (int j = 0; j < n; ++j) lam += mu[j] * std::polar(1.0, 2.0 * M_PI * j * k / n);
        g += 1.0 / (1.0 - z * lam);
    }
    return g.real() / n;
}

}  // namespace

TEST_CASE("simple walk on Z and Z^2 returns match binomial closed forms") {
    const PowerSeries z1 = lattice_series(LatticeSpec::simple(1), 40);
    const PowerSeries z2 = lattice_series(LatticeSpec::simple(2), 40);
    for (int n = 0; n <= 20; ++n) {
        CHECK(z1[2 * n] == doctest::Approx(central(n)).epsilon(1e-13));
        CHECK(z2[2 * n] == doctest::Approx(central(n) * central(n)).epsilon(1e-13));
        if (n < 20) CHECK(z1[2 * n + 1] == 0.0);
    }
}

TEST_CASE("anisotropic lattice series agrees with explicit enumeration") {
    const LatticeSpec s{{0.5, 0.3, 0.2}, {0.7, 0.5, 0.4}};
    const PowerSeries a = lattice_series(s, 12);
    const auto b = brute_force_returns(s, 12);
    for (int n = 0; n <= 12; ++n) CHECK(a[n] == doctest::Approx(b[n]).epsilon(1e-12));
}

TEST_CASE("drifted walk on Z has G(z) = 1/sqrt(1 - 4pq z^2)") {
    const LatticeSpec s{{1.0}, {0.7}};
    const double rho = 1.0 / std::sqrt(4 * 0.7 * 0.3);
    CHECK(lattice_radius(s) == doctest::Approx(rho).epsilon(1e-14));
    for (double z : {0.3, 0.9, 1.05}) {
        const double exact = 1.0 / std::sqrt(1.0 - 4 * 0.7 * 0.3 * z * z);
        CHECK(lattice_green(s, z, 0).value() == doctest::Approx(exact).epsilon(1e-10));
    }
    CHECK(lattice_green(s, rho, 0).is_infinite());
}

TEST_CASE("Watson's value for the cubic lattice") {
    CHECK(lattice_green(LatticeSpec::simple(3), 1.0, 0).value() == doctest::Approx(1.516386059151978).epsilon(1e-11));
    CHECK(lattice_green(LatticeSpec::simple(3), 1.0, 1).is_infinite());
    CHECK(lattice_green(LatticeSpec::simple(5), 1.0, 2).is_infinite());
    CHECK(lattice_green(LatticeSpec::simple(7), 1.0, 2).is_finite());
}

TEST_CASE("lattice derivatives agree with finite differences and the series") {
    const LatticeSpec s = LatticeSpec::simple(5);
    const double z = 0.9, h = 1e-5;
    const double fd = (lattice_green(s, z + h, 0).value() - lattice_green(s, z - h, 0).value()) / (2 * h);
    CHECK(lattice_green(s, z, 1).value() == doctest::Approx(fd).epsilon(1e-7));
    const double fd2 = (lattice_green(s, z + h, 1).value() - lattice_green(s, z - h, 1).value()) / (2 * h);
    CHECK(lattice_green(s, z, 2).value() == doctest::Approx(fd2).epsilon(1e-6));
    const PowerSeries ser = lattice_series(s, 400);
    CHECK(lattice_green(s, 0.8, 0).value() == doctest::Approx(ser.evaluate(0.8)).epsilon(1e-12));
}

TEST_CASE("cyclic group resolvent matches the Fourier formula") {
    const std::vector<double> mu{0.1, 0.4, 0.0, 0.2, 0.3};
    const FiniteGroupSpec g = FiniteGroupSpec::cyclic(5, mu);
    for (double z : {0.2, 0.7, 0.95}) CHECK(finite_green(g, z, 0).value() == doctest::Approx(cyclic_green_fourier(mu, z)));
    CHECK(finite_radius(g) == 1.0);
    CHECK(finite_green(g, 1.0, 0).is_infinite());
}

TEST_CASE("finite series equals powers of the transition matrix") {
    const FiniteGroupSpec g = FiniteGroupSpec::cyclic(4, {0.0, 0.5, 0.0, 0.5});
    const auto P = g.matrix();
    std::vector<double> row(4, 0.0);
    row[0] = 1.0;
    const PowerSeries s = finite_series(g, 10);
    for (int n = 0; n <= 10; ++n) {
        CHECK(s[n] == doctest::Approx(row[0]).epsilon(1e-14));
        std::vector<double> next(4, 0.0);
        for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y) next[y] += row[x] * P[x][y];
        row = next;
    }
    CHECK(make_model(g)->period() == 2);
    CHECK(make_model(FiniteGroupSpec::cyclic(3, {0.0, 0.5, 0.5}))->period() == 1);
    CHECK(make_model(FiniteGroupSpec::flip())->period() == 2);
}

TEST_CASE("finite groups: validation and Psi at infinity") {
    FiniteGroupSpec bad = FiniteGroupSpec::cyclic(3, {0.0, 0.5, 0.5});
    bad.table[1][2] = 1;
    bad.table[1][1] = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_THROWS_AS(FiniteGroupSpec::cyclic(4, {0.0, 0.0, 1.0, 0.0}).validate(), Error);  // does not generate
    CHECK_THROWS_AS(FiniteGroupSpec::from_matrix(FiniteGroupSpec::flip().table, 0, {{0.5, 0.5}, {0.2, 0.8}}), Error);

    for (int n : {2, 3, 5}) {
        std::vector<double> mu(n, 0.0);
        mu[1] = 0.5;
        mu[n - 1] += 0.5;
        const GreenModelPtr m = make_model(FiniteGroupSpec::cyclic(n, mu));
        CHECK(m->theta().is_infinite());
        CHECK(m->psi_limit_at_radius() == doctest::Approx(1.0 / n));
        CHECK(m->psi_w(1e7) == doctest::Approx(1.0 / n).epsilon(1e-4));
        CHECK(m->finite_order().value() == n);
    }
}

TEST_CASE("tree: closed form, series and radius agree") {
    for (int q : {3, 4, 6}) {
        const HomTreeSpec t{q};
        const double rho = q / (2.0 * std::sqrt(q - 1.0));
        CHECK(tree_radius(t) == doctest::Approx(rho));
        const PowerSeries s = tree_series(t, 600);
        for (double z : {0.3, 0.8, 0.95 * rho}) {
            const double closed = 2.0 * (q - 1) / (q - 2 + std::sqrt(q * q - 4.0 * (q - 1) * z * z));
            CHECK(tree_green(t, z, 0).value() == doctest::Approx(closed).epsilon(1e-12));
            CHECK(s.evaluate(z) == doctest::Approx(closed).epsilon(1e-9));
        }
        CHECK(tree_green(t, rho, 0).value() == doctest::Approx(2.0 * (q - 1) / (q - 2)));
        CHECK(tree_green(t, rho, 1).is_infinite());
    }
    CHECK_THROWS_AS(HomTreeSpec{2}.validate(), Error);
}

TEST_CASE("explicit factor reads partial sums and refuses to extrapolate") {
    ExplicitSpec e;
    const PowerSeries z1 = lattice_series(LatticeSpec::simple(1), 200);
    e.coeffs = z1.coeffs();
    e.radius = 1.0;
    e.period = 2;
    const GreenAnalytics a = analyze_factor(e, 100);
    CHECK(a.g_at_r.is_infinite());
    CHECK(a.period == 2);
    CHECK_FALSE(a.sing.has_value());
    CHECK_THROWS_AS(make_singularity(-0.5, 0), Error);
    CHECK(a.model->green(0.5, 0).value() == doctest::Approx(1.0 / std::sqrt(0.75)).epsilon(1e-12));
    try {
        a.model->series(500);
        FAIL("expected an error");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::InsufficientData);
    }
    e.coeffs[0] = 0.5;
    CHECK_THROWS_AS(e.validate(), Error);
}

TEST_CASE("Psi decreases, Phi is convex and w inverts") {
    const std::vector<FactorSpec> specs = {FiniteGroupSpec::flip(), FiniteGroupSpec::cyclic(3, {0.0, 0.5, 0.5}),
                                           HomTreeSpec{3},          LatticeSpec::simple(1),
                                           LatticeSpec::simple(4),  LatticeSpec{{0.6, 0.4}, {0.7, 0.5}},
                                           LatticeSpec::simple(6)};
    for (const auto& spec : specs) {
        const GreenModelPtr m = make_model(spec);
        // With theta infinite, stay where rho - z is still resolvable in double.
        const double z_top = m->radius() * (1.0 - 1e-4);
        const double top = m->theta().is_finite() ? m->theta().value() : z_top * m->green(z_top, 0).value();
        double prev = m->psi_w(0.0);
        CHECK(prev == doctest::Approx(1.0));
        for (int k = 1; k < 30; ++k) {
            const double t = top * k / 30.0;
            const double psi = m->psi_w(t);
            CHECK(psi < prev);
            prev = psi;
            const PhiDerivs ph = m->phi_w(t);
            CHECK((ph.d2.is_infinite() || ph.d2.value() > 0.0));
            const double z = m->invert_w(t);
            CHECK(z * m->green(z, 0).value() == doctest::Approx(t).epsilon(1e-10));
            // Phi - t Phi' cancels heavily near a pole; compare on the scale of Phi.
            CHECK(std::abs(ph.value - t * ph.d1 - psi) <= 1e-9 * std::max(1.0, ph.value));
        }
    }
}

TEST_CASE("Cartwright values for simple walks") {
    const double expected[] = {0.691, 0.824, 0.876};
    for (int d = 5; d <= 7; ++d) {
        const GreenModelPtr m = make_model(LatticeSpec::simple(d));
        CHECK(m->psi_at(1.0) == doctest::Approx(expected[d - 5]).epsilon(0.002));
    }
}

TEST_CASE("lattice singularity descriptors follow the dimension parity") {
    CHECK(make_model(LatticeSpec::simple(5))->singularity()->lambda == 2.5);
    const auto s6 = make_model(LatticeSpec::simple(6))->singularity();
    CHECK(s6->q == 2.0);
    CHECK(s6->k == 1);
    CHECK(s6->lambda == 3.0);
    CHECK(s6->kappa == 0);
    CHECK(describe(LatticeSpec::simple(4)) == "Z^4");
}

TEST_CASE("first returns of the simple walk on Z") {
    // f_{2n} = C(2n, n) / ((2n - 1) 4^n)
    const PowerSeries u = first_return_series(lattice_series(LatticeSpec::simple(1), 40));
    CHECK(u[0] == 0.0);
    for (int n = 1; n <= 20; ++n) {
        CHECK(u[2 * n] == doctest::Approx(central(n) / (2.0 * n - 1.0)).epsilon(1e-12));
        CHECK(std::abs(u[2 * n - 1]) < 1e-15);
    }
}
