#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include <Eigen/Dense>

#include "fprw/factors.hpp"

namespace fprw {

FiniteGroupSpec FiniteGroupSpec::cyclic(int n, std::vector<double> mu) {
    if (n < 1) throw Error(ErrorCode::InvalidSpec, "cyclic group order must be >= 1");
    FiniteGroupSpec g;
    g.table.assign(n, std::vector<int>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) g.table[x][y] = (x + y) % n;
    g.identity = 0;
    g.mu = std::move(mu);
    g.validate();
    return g;
}

FiniteGroupSpec FiniteGroupSpec::from_matrix(std::vector<std::vector<int>> table, int identity,
                                             const std::vector<std::vector<double>>& P) {
    FiniteGroupSpec g;
    g.table = std::move(table);
    g.identity = identity;
    const int n = g.order();
    if (static_cast<int>(P.size()) != n) throw Error(ErrorCode::InvalidSpec, "transition matrix size differs from group order");
    if (identity < 0 || identity >= n) throw Error(ErrorCode::InvalidSpec, "identity index out of range");
    for (const auto& row : P)
        if (static_cast<int>(row.size()) != n) throw Error(ErrorCode::InvalidSpec, "transition matrix is not square");
    g.mu = P[identity];
    g.validate();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            const double expect = g.mu[g.table[g.inverse(x)][y]];
            if (std::abs(P[x][y] - expect) > 1e-12)
                throw Error(ErrorCode::InvalidSpec, "transition matrix is not group invariant at (" +
                                                        std::to_string(x) + "," + std::to_string(y) + ")");
        }
    return g;
}

int FiniteGroupSpec::inverse(int x) const {
    for (int y = 0; y < order(); ++y)
        if (table[x][y] == identity) return y;
    throw Error(ErrorCode::InvalidSpec, "element " + std::to_string(x) + " has no inverse");
}

std::vector<std::vector<double>> FiniteGroupSpec::matrix() const {
    const int n = order();
    std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
    for (int x = 0; x < n; ++x)
        for (int g = 0; g < n; ++g) P[x][table[x][g]] += mu[g];
    return P;
}

void FiniteGroupSpec::validate() const {
    const int n = order();
    if (n < 1) throw Error(ErrorCode::InvalidSpec, "finite group needs at least one element");
    if (identity < 0 || identity >= n) throw Error(ErrorCode::InvalidSpec, "identity index out of range");
    if (static_cast<int>(mu.size()) != n) throw Error(ErrorCode::InvalidSpec, "step law length differs from group order");
    for (int x = 0; x < n; ++x) {
        if (static_cast<int>(table[x].size()) != n) throw Error(ErrorCode::InvalidSpec, "Cayley table is not square");
        std::vector<char> seen_row(n, 0);
        for (int y = 0; y < n; ++y) {
            const int v = table[x][y];
            if (v < 0 || v >= n || seen_row[v]) throw Error(ErrorCode::InvalidSpec, "Cayley table row is not a permutation");
            seen_row[v] = 1;
        }
        if (table[identity][x] != x || table[x][identity] != x)
            throw Error(ErrorCode::InvalidSpec, "identity does not act trivially");
    }
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int w = 0; w < n; ++w)
                if (table[table[x][y]][w] != table[x][table[y][w]])
                    throw Error(ErrorCode::InvalidSpec, "Cayley table is not associative");
    double sum = 0.0;
    for (double m : mu) {
        if (!(m >= 0.0)) throw Error(ErrorCode::InvalidSpec, "step law has a negative entry");
        sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidSpec, "step law must sum to 1");
    // Support must generate the group.
    std::vector<char> reach(n, 0);
    std::queue<int> q;
    reach[identity] = 1;
    q.push(identity);
    while (!q.empty()) {
        const int x = q.front();
        q.pop();
        for (int g = 0; g < n; ++g)
            if (mu[g] > 0.0 && !reach[table[x][g]]) {
                reach[table[x][g]] = 1;
                q.push(table[x][g]);
            }
    }
    for (int x = 0; x < n; ++x)
        if (!reach[x]) throw Error(ErrorCode::InvalidSpec, "step law support does not generate the group");
}

double finite_radius(const FiniteGroupSpec& spec) {
    spec.validate();
    return 1.0;
}

namespace {

// gcd over edges x -> y of level(x) + 1 - level(y) for BFS levels.
int chain_period(const FiniteGroupSpec& g) {
    const int n = g.order();
    std::vector<int> level(n, -1);
    std::queue<int> q;
    level[g.identity] = 0;
    q.push(g.identity);
    int per = 0;
    while (!q.empty()) {
        const int x = q.front();
        q.pop();
        for (int s = 0; s < n; ++s) {
            if (g.mu[s] <= 0.0) continue;
            const int y = g.table[x][s];
            if (level[y] < 0) {
                level[y] = level[x] + 1;
                q.push(y);
            }
        }
    }
    for (int x = 0; x < n; ++x)
        for (int s = 0; s < n; ++s)
            if (g.mu[s] > 0.0) per = std::gcd(per, std::abs(level[x] + 1 - level[g.table[x][s]]));
    return per;
}

class FiniteModel final : public GreenModel {
public:
    explicit FiniteModel(FiniteGroupSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
        const int n = spec_.order();
        const auto M = spec_.matrix();
        P_.resize(n, n);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) P_(x, y) = M[x][y];
        period_ = chain_period(spec_);
    }

    double radius() const override { return 1.0; }

    ExtReal green(double z, int deriv) const override {
        if (deriv < 0 || deriv > 2) throw Error(ErrorCode::InvalidSpec, "derivative order must be 0, 1 or 2");
        z = clamp_z(z);
        if (z == 1.0) return ExtReal::infinity();
        const int n = spec_.order();
        const int id = spec_.identity;
        const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - z * P_;
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, id);
        const Eigen::VectorXd u = lu.solve(e);
        if (deriv == 0) return ExtReal(u(id));
        const Eigen::VectorXd v = lu.transpose().solve(e);
        const Eigen::VectorXd Pu = P_ * u;
        if (deriv == 1) return ExtReal(v.dot(Pu));
        const Eigen::VectorXd w = lu.solve(Pu);
        return ExtReal(2.0 * v.dot(P_ * w));
    }

    PowerSeries series(std::size_t N) const override { return finite_series(spec_, N); }
    int period() const override { return period_; }
    std::optional<Singularity> singularity() const override { return std::nullopt; }
    std::string kind() const override { return "finite_group"; }
    // Kac: U'(1) is the mean return time |Gamma|.
    double psi_limit_at_radius() const override { return 1.0 / spec_.order(); }
    std::optional<int> finite_order() const override { return spec_.order(); }

private:
    FiniteGroupSpec spec_;
    Eigen::MatrixXd P_;
    int period_ = 1;
};

}  // namespace

ExtReal finite_green(const FiniteGroupSpec& spec, double z, int deriv) { return FiniteModel(spec).green(z, deriv); }

PowerSeries finite_series(const FiniteGroupSpec& spec, std::size_t N) {
    spec.validate();
    const int n = spec.order();
    std::vector<double> dist(n, 0.0);
    std::vector<double> next(n);
    dist[spec.identity] = 1.0;
    PowerSeries s = PowerSeries::zero(N);
    s[0] = 1.0;
    for (std::size_t k = 1; k <= N; ++k) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int x = 0; x < n; ++x) {
            if (dist[x] == 0.0) continue;
            for (int g = 0; g < n; ++g) next[spec.table[x][g]] += dist[x] * spec.mu[g];
        }
        dist.swap(next);
        s[k] = dist[spec.identity];
    }
    return s;
}

GreenModelPtr make_finite_model(const FiniteGroupSpec& spec) { return std::make_shared<FiniteModel>(spec); }

}  // namespace fprw
