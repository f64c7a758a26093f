#include "fprw/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fprw/error.hpp"

namespace fprw {

PowerSeries::PowerSeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(0.0);
    for (std::size_t n = 0; n < c_.size(); ++n)
        if (!std::isfinite(c_[n]))
            throw Error(ErrorCode::InvalidSpec, "non-finite series coefficient at index " + std::to_string(n));
}

PowerSeries PowerSeries::constant(double c, std::size_t order) {
    PowerSeries s = zero(order);
    s[0] = c;
    return s;
}

PowerSeries PowerSeries::identity(std::size_t order) {
    PowerSeries s = zero(order);
    if (order >= 1) s[1] = 1.0;
    return s;
}

PowerSeries PowerSeries::truncated(std::size_t order) const {
    std::vector<double> c(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(std::min(order, this->order()) + 1));
    c.resize(order + 1, 0.0);
    return PowerSeries(std::move(c));
}

double PowerSeries::evaluate(double x) const {
    double acc = 0.0;
    for (std::size_t n = c_.size(); n-- > 0;) acc = acc * x + c_[n];
    return acc;
}

PowerSeries series_add(const PowerSeries& a, const PowerSeries& b) {
    const std::size_t N = std::min(a.order(), b.order());
    PowerSeries r = PowerSeries::zero(N);
    for (std::size_t n = 0; n <= N; ++n) r[n] = a[n] + b[n];
    return r;
}

PowerSeries series_sub(const PowerSeries& a, const PowerSeries& b) {
    const std::size_t N = std::min(a.order(), b.order());
    PowerSeries r = PowerSeries::zero(N);
    for (std::size_t n = 0; n <= N; ++n) r[n] = a[n] - b[n];
    return r;
}

PowerSeries series_scale(const PowerSeries& a, double s) {
    PowerSeries r = a;
    for (std::size_t n = 0; n <= r.order(); ++n) r[n] *= s;
    return r;
}

PowerSeries series_dilate(const PowerSeries& a, double s) {
    PowerSeries r = a;
    double p = 1.0;
    for (std::size_t n = 0; n <= r.order(); ++n, p *= s) r[n] *= p;
    return r;
}

PowerSeries series_mul(const PowerSeries& a, const PowerSeries& b) {
    const std::size_t N = std::min(a.order(), b.order());
    PowerSeries r = PowerSeries::zero(N);
    for (std::size_t i = 0; i <= N; ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; i + j <= N; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

PowerSeries series_reciprocal(const PowerSeries& a) {
    if (a[0] == 0.0) throw Error(ErrorCode::ZeroConstantTerm, "reciprocal of a series with zero constant term");
    const std::size_t N = a.order();
    PowerSeries r = PowerSeries::zero(N);
    r[0] = 1.0 / a[0];
    for (std::size_t n = 1; n <= N; ++n) {
        double acc = 0.0;
        for (std::size_t k = 1; k <= n; ++k) acc += a[k] * r[n - k];
        r[n] = -acc * r[0];
    }
    return r;
}

PowerSeries series_derivative(const PowerSeries& a) {
    const std::size_t N = a.order();
    if (N == 0) return PowerSeries::zero(0);
    PowerSeries r = PowerSeries::zero(N - 1);
    for (std::size_t n = 1; n <= N; ++n) r[n - 1] = static_cast<double>(n) * a[n];
    return r;
}

PowerSeries series_compose(const PowerSeries& outer, const PowerSeries& inner) {
    if (inner[0] != 0.0)
        throw Error(ErrorCode::NonzeroInnerConstant, "inner series of a composition must vanish at 0");
    const std::size_t N = std::min(outer.order(), inner.order());
    PowerTable table;
    PowerSeries r = PowerSeries::zero(N);
    r[0] = outer[0];
    table.extend(0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        table.extend(inner[n]);
        r[n] = table.contract(outer.coeffs(), n);
    }
    return r;
}

PowerSeries series_reversion(const PowerSeries& w) {
    if (w[0] != 0.0) throw Error(ErrorCode::NonzeroInnerConstant, "reversion needs w(0) = 0");
    const std::size_t N = w.order();
    if (N < 1 || w[1] == 0.0) throw Error(ErrorCode::NotInvertible, "linear coefficient is zero");
    // Coefficient fixing on w(v(z)) = z: the j >= 2 part of column n is known
    // before v_n, so v_n = (delta_{n1} - sum_{j>=2} w_j (v^j)_n) / w_1.
    PowerTable table;
    PowerSeries v = PowerSeries::zero(N);
    table.extend(0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        table.extend(0.0);
        const double higher = table.contract(w.coeffs(), n);  // head entry is 0 here
        v[n] = ((n == 1 ? 1.0 : 0.0) - higher) / w[1];
        table.set_last(v[n]);
    }
    return v;
}

PowerSeries solve_implicit_green(const PowerSeries& phi, std::size_t N) {
    if (std::abs(phi[0] - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidSpec, "implicit Green equation needs phi(0) = 1");
    // g_n = sum_k phi_k [z^n] (z g)^k and (z g)_n = g_{n-1}.
    PowerTable table;
    PowerSeries g = PowerSeries::zero(N);
    g[0] = 1.0;
    table.extend(0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        table.extend(g[n - 1]);
        g[n] = table.contract(phi.coeffs(), n);
    }
    return g;
}

std::size_t PowerTable::extend(double s_n) {
    const std::size_t n = s_.size();
    if (n == 0) {
        if (s_n != 0.0) throw Error(ErrorCode::NonzeroInnerConstant, "power table needs s_0 = 0");
        s_.push_back(0.0);
        rows_.emplace_back();  // rows_[0] unused
        return 0;
    }
    s_.push_back(s_n);
    rows_.emplace_back();  // rows_[n] starts at column n
    rows_[1].push_back(s_n);
    for (std::size_t j = 2; j <= n; ++j) {
        const std::vector<double>& prev = rows_[j - 1];
        const std::size_t L = n - j + 1;
        double acc = 0.0;
        for (std::size_t k = 1; k <= L; ++k) acc += s_[k] * prev[L - k];
        rows_[j].push_back(acc);
    }
    return n;
}

void PowerTable::set_last(double s_n) {
    const std::size_t n = s_.size() - 1;
    if (n == 0) throw Error(ErrorCode::NonzeroInnerConstant, "power table needs s_0 = 0");
    s_[n] = s_n;
    rows_[1][n - 1] = s_n;
}

double PowerTable::at(std::size_t j, std::size_t n) const {
    if (j == 0) return n == 0 ? 1.0 : 0.0;
    if (j > n || n >= s_.size()) return 0.0;
    return rows_[j][n - j];
}

double PowerTable::contract(const std::vector<double>& a, std::size_t n) const {
    const std::size_t J = std::min(n, a.empty() ? 0 : a.size() - 1);
    double acc = 0.0;
    for (std::size_t j = 1; j <= J; ++j) acc += a[j] * rows_[j][n - j];
    return acc;
}

}  // namespace fprw
