#pragma once

#include <cstddef>
#include <vector>

namespace fprw {

// Truncated power series c_0 + c_1 z + ... + c_N z^N.
class PowerSeries {
public:
    PowerSeries() : c_(1, 0.0) {}
    explicit PowerSeries(std::vector<double> coeffs);
    static PowerSeries zero(std::size_t order) { return PowerSeries(std::vector<double>(order + 1, 0.0)); }
    static PowerSeries constant(double c, std::size_t order);
    static PowerSeries identity(std::size_t order);  // the series z

    std::size_t order() const noexcept { return c_.size() - 1; }
    double operator[](std::size_t n) const { return c_[n]; }
    double& operator[](std::size_t n) { return c_[n]; }
    const std::vector<double>& coeffs() const noexcept { return c_; }

    PowerSeries truncated(std::size_t order) const;
    double evaluate(double x) const;  // Horner on the truncation

private:
    std::vector<double> c_;
};

PowerSeries series_add(const PowerSeries& a, const PowerSeries& b);
PowerSeries series_sub(const PowerSeries& a, const PowerSeries& b);
PowerSeries series_scale(const PowerSeries& a, double s);
PowerSeries series_mul(const PowerSeries& a, const PowerSeries& b);
PowerSeries series_reciprocal(const PowerSeries& a);
PowerSeries series_derivative(const PowerSeries& a);  // order drops by one (min 0)
PowerSeries series_compose(const PowerSeries& outer, const PowerSeries& inner);
PowerSeries series_reversion(const PowerSeries& w);
// a(s z) as a series in z.
PowerSeries series_dilate(const PowerSeries& a, double s);

// g = phi(z g) through order N, requires phi[0] == 1.
PowerSeries solve_implicit_green(const PowerSeries& phi, std::size_t N);

// Powers s^j of a series with s_0 = 0, grown one coefficient at a time.
// Entry (j, n) is [z^n] s^j for 1 <= j <= n. Appending s_n fills column n;
// entries with j >= 2 in that column never depend on s_n, which is what the
// online solvers rely on.
class PowerTable {
public:
    // Appends s_n where n = size(); returns n.
    std::size_t extend(double s_n);
    // Replaces the most recent head coefficient (only entry (1, n) changes).
    void set_last(double s_n);

    std::size_t size() const noexcept { return s_.size(); }
    double at(std::size_t j, std::size_t n) const;

    // sum_{j=1..n} a[j] * (s^j)[n], column n must exist; a may be shorter.
    double contract(const std::vector<double>& a, std::size_t n) const;

private:
    std::vector<double> s_;                   // s_[0] is 0
    std::vector<std::vector<double>> rows_;   // rows_[j][n - j] = (s^j)[n], j >= 1
};

}  // namespace fprw
