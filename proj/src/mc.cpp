#include "fprw/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <queue>
#include <random>
#include <thread>
#include <unordered_map>

#include "fprw/phase.hpp"

namespace fprw {

namespace {

class LatticeGroup final : public FactorGroup {
public:
    explicit LatticeGroup(const LatticeSpec& s) : d_(s.dim()) {
        s.validate();
        for (int j = 0; j < d_; ++j) {
            Element e(d_, 0);
            e[j] = 1;
            steps_.push_back({e, s.beta[j] * s.p[j]});
            e[j] = -1;
            steps_.push_back({e, s.beta[j] * (1.0 - s.p[j])});
        }
    }
    Element identity() const override { return Element(d_, 0); }
    bool is_identity(const Element& g) const override {
        return std::all_of(g.begin(), g.end(), [](std::int32_t x) { return x == 0; });
    }
    Element multiply(const Element& a, const Element& b) const override {
        Element r = a;
        multiply_inplace(r, b);
        return r;
    }
    void multiply_inplace(Element& a, const Element& b) const override {
        for (int j = 0; j < d_; ++j) a[j] += b[j];
    }
    Element inverse(const Element& g) const override {
        Element r = g;
        for (auto& x : r) x = -x;
        return r;
    }
    const std::vector<Step>& steps() const override { return steps_; }
    std::size_t distance(const Element& g) const override {
        std::size_t s = 0;
        for (auto x : g) s += static_cast<std::size_t>(std::abs(x));
        return s;
    }

private:
    int d_;
    std::vector<Step> steps_;
};

class FiniteGroup final : public FactorGroup {
public:
    explicit FiniteGroup(const FiniteGroupSpec& s) : spec_(s) {
        spec_.validate();
        const int n = spec_.order();
        for (int g = 0; g < n; ++g)
            if (spec_.mu[g] > 0.0) steps_.push_back({Element{g}, spec_.mu[g]});
        // dist_[x]: fewest steps from x to the identity (BFS on reversed edges).
        dist_.assign(n, -1);
        std::queue<int> q;
        dist_[spec_.identity] = 0;
        q.push(spec_.identity);
        while (!q.empty()) {
            const int y = q.front();
            q.pop();
            for (const auto& st : steps_) {
                const int x = spec_.table[y][spec_.inverse(st.g[0])];  // x * s = y
                if (dist_[x] < 0) {
                    dist_[x] = dist_[y] + 1;
                    q.push(x);
                }
            }
        }
    }
    Element identity() const override { return Element{spec_.identity}; }
    bool is_identity(const Element& g) const override { return g[0] == spec_.identity; }
    Element multiply(const Element& a, const Element& b) const override { return Element{spec_.table[a[0]][b[0]]}; }
    void multiply_inplace(Element& a, const Element& b) const override { a[0] = spec_.table[a[0]][b[0]]; }
    Element inverse(const Element& g) const override { return Element{spec_.inverse(g[0])}; }
    const std::vector<Step>& steps() const override { return steps_; }
    std::size_t distance(const Element& g) const override { return static_cast<std::size_t>(dist_[g[0]]); }

private:
    FiniteGroupSpec spec_;
    std::vector<Step> steps_;
    std::vector<int> dist_;
};

// Reduced words over q involutions.
class TreeGroup final : public FactorGroup {
public:
    explicit TreeGroup(const HomTreeSpec& s) : q_(s.q) {
        s.validate();
        for (int i = 0; i < q_; ++i) steps_.push_back({Element{i}, 1.0 / q_});
    }
    Element identity() const override { return {}; }
    bool is_identity(const Element& g) const override { return g.empty(); }
    Element multiply(const Element& a, const Element& b) const override {
        Element r = a;
        multiply_inplace(r, b);
        return r;
    }
    void multiply_inplace(Element& a, const Element& b) const override {
        for (auto x : b) {
            if (!a.empty() && a.back() == x) a.pop_back();
            else a.push_back(x);
        }
    }
    Element inverse(const Element& g) const override { return Element(g.rbegin(), g.rend()); }
    const std::vector<Step>& steps() const override { return steps_; }
    std::size_t distance(const Element& g) const override { return g.size(); }

private:
    int q_;
    std::vector<Step> steps_;
};

struct Sampler {
    std::vector<double> factor_cdf;
    std::vector<std::vector<double>> step_cdf;

    explicit Sampler(const ProductGroup& pg) {
        double acc = 0.0;
        for (std::size_t i = 0; i < pg.size(); ++i) {
            acc += pg.weight(i);
            factor_cdf.push_back(acc);
            std::vector<double> c;
            double s = 0.0;
            for (const auto& st : pg.group(i).steps()) c.push_back(s += st.prob);
            step_cdf.push_back(std::move(c));
        }
    }

    static std::size_t pick(const std::vector<double>& cdf, double u) {
        const double x = u * cdf.back();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    }
};

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::unique_ptr<FactorGroup> make_factor_group(const FactorSpec& spec) {
    if (const auto* l = std::get_if<LatticeSpec>(&spec)) return std::make_unique<LatticeGroup>(*l);
    if (const auto* f = std::get_if<FiniteGroupSpec>(&spec)) return std::make_unique<FiniteGroup>(*f);
    if (const auto* t = std::get_if<HomTreeSpec>(&spec)) return std::make_unique<TreeGroup>(*t);
    throw Error(ErrorCode::InvalidSpec, "explicit factors have no group structure to simulate");
}

ProductGroup::ProductGroup(const FreeProductSpec& spec) {
    if (spec.factors.size() < 2) throw Error(ErrorCode::InvalidSpec, "a free product needs at least two factors");
    if (spec.weights.size() != spec.factors.size()) throw Error(ErrorCode::InvalidSpec, "one weight per factor expected");
    double sum = 0.0;
    for (double w : spec.weights) {
        if (!(w > 0.0)) throw Error(ErrorCode::InvalidSpec, "weights must be positive");
        sum += w;
    }
    for (double w : spec.weights) alpha_.push_back(w / sum);
    for (const auto& f : spec.factors) groups_.push_back(make_factor_group(f));
}

void ProductGroup::multiply_inplace(Word& w, std::size_t factor, const Element& g) const {
    const FactorGroup& grp = *groups_[factor];
    if (grp.is_identity(g)) return;
    if (!w.empty() && w.back().factor == factor) {
        grp.multiply_inplace(w.back().g, g);
        if (grp.is_identity(w.back().g)) w.pop_back();
        return;
    }
    w.push_back(Letter{static_cast<std::uint32_t>(factor), g});
}

Word ProductGroup::multiply(Word w, std::size_t factor, const Element& g) const {
    multiply_inplace(w, factor, g);
    return w;
}

bool ProductGroup::is_normal_form(const Word& w) const {
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k].factor >= groups_.size()) return false;
        if (groups_[w[k].factor]->is_identity(w[k].g)) return false;
        if (k > 0 && w[k].factor == w[k - 1].factor) return false;
    }
    return true;
}

std::size_t ProductGroup::distance(const Word& w) const {
    std::size_t d = 0;
    for (const auto& l : w) d += groups_[l.factor]->distance(l.g);
    return d;
}

Word word_multiply(const ProductGroup& pg, const Word& w, std::size_t factor, const Element& g) {
    return pg.multiply(w, factor, g);
}

std::string encode(const Word& w) {
    std::string key;
    for (const auto& l : w) {
        const std::uint32_t head[2] = {l.factor, static_cast<std::uint32_t>(l.g.size())};
        key.append(reinterpret_cast<const char*>(head), sizeof head);
        key.append(reinterpret_cast<const char*>(l.g.data()), l.g.size() * sizeof(std::int32_t));
    }
    return key;
}

BfsProfile bfs_profile(const FreeProductSpec& spec, std::size_t N, const BfsOptions& opt) {
    const ProductGroup pg(spec);
    std::unordered_map<std::string, std::pair<Word, double>> cur;
    cur.emplace(std::string(), std::make_pair(Word{}, 1.0));
    BfsProfile out;
    out.returns.push_back(1.0);
    out.total_mass.push_back(1.0);
    out.states.push_back(1);
    for (std::size_t n = 1; n <= N; ++n) {
        std::unordered_map<std::string, std::pair<Word, double>> next;
        next.reserve(cur.size() * 4);
        for (const auto& [key, entry] : cur) {
            const auto& [w, p] = entry;
            for (std::size_t i = 0; i < pg.size(); ++i)
                for (const auto& st : pg.group(i).steps()) {
                    Word v = pg.multiply(w, i, st.g);
                    if (opt.prune && pg.distance(v) > N - n) continue;
                    std::string k = encode(v);
                    auto it = next.find(k);
                    const double mass = p * pg.weight(i) * st.prob;
                    if (it == next.end()) next.emplace(std::move(k), std::make_pair(std::move(v), mass));
                    else it->second.second += mass;
                }
            if (next.size() > opt.state_cap)
                throw Error(ErrorCode::StateExplosion, "word map exceeded " + std::to_string(opt.state_cap) +
                                                           " states at step " + std::to_string(n));
        }
        cur.swap(next);
        double total = 0.0;
        double carry = 0.0;  // Neumaier compensation
        for (const auto& kv : cur) {
            const double x = kv.second.second;
            const double t = total + x;
            carry += std::abs(total) >= std::abs(x) ? (total - t) + x : (x - t) + total;
            total = t;
        }
        total += carry;
        const auto e = cur.find(std::string());
        out.returns.push_back(e == cur.end() ? 0.0 : e->second.second);
        out.total_mass.push_back(total);
        out.states.push_back(cur.size());
    }
    return out;
}

PowerSeries bfs_convolution(const FreeProductSpec& spec, std::size_t N, const BfsOptions& opt) {
    return PowerSeries(bfs_profile(spec, N, opt).returns);
}

ReturnProfile simulate(const FreeProductSpec& spec, std::size_t steps, std::uint64_t walks, std::uint64_t seed,
                       const SimulateOptions& opt) {
    if (opt.block == 0) throw Error(ErrorCode::InvalidSpec, "simulation block size must be positive");
    const ProductGroup pg(spec);
    const Sampler sampler(pg);
    const std::uint64_t blocks = (walks + opt.block - 1) / opt.block;
    const unsigned workers =
        static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(worker_count(opt.threads), blocks)));
    std::vector<std::vector<std::uint64_t>> counts(workers, std::vector<std::uint64_t>(steps + 1, 0));
    auto work = [&](unsigned id) {
        auto& c = counts[id];
        Word w;
        for (std::uint64_t b = id; b < blocks; b += workers) {
            std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                             static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
            std::mt19937_64 rng(ss);
            const std::uint64_t n_walks = std::min(opt.block, walks - b * opt.block);
            for (std::uint64_t k = 0; k < n_walks; ++k) {
                w.clear();
                c[0] += 1;
                for (std::size_t n = 1; n <= steps; ++n) {
                    const std::size_t i = Sampler::pick(sampler.factor_cdf, unit(rng));
                    const std::size_t s = Sampler::pick(sampler.step_cdf[i], unit(rng));
                    pg.multiply_inplace(w, i, pg.group(i).steps()[s].g);
                    if (w.empty()) c[n] += 1;
                }
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work, t);
        for (auto& t : pool) t.join();
    }
    ReturnProfile out;
    out.walks = walks;
    out.returns.assign(steps + 1, 0);
    for (const auto& c : counts)
        for (std::size_t n = 0; n <= steps; ++n) out.returns[n] += c[n];
    if (steps + 1 > 0 && walks == 0) out.returns.assign(steps + 1, 0);
    return out;
}

double mc_growth_rate(const ReturnProfile& p, int period, std::size_t n_lo, std::size_t n_hi, double lambda) {
    const std::size_t d = static_cast<std::size_t>(std::max(period, 1));
    n_lo -= n_lo % d;
    n_hi -= n_hi % d;
    if (n_hi >= p.returns.size() || n_lo == 0 || n_lo >= n_hi)
        throw Error(ErrorCode::InsufficientData, "growth estimate needs 0 < n_lo < n_hi within the profile");
    if (p.returns[n_lo] == 0 || p.returns[n_hi] == 0)
        throw Error(ErrorCode::InsufficientData, "no returns observed at the chosen steps");
    const double ratio = static_cast<double>(p.returns[n_hi]) / static_cast<double>(p.returns[n_lo]);
    const double poly = std::pow(static_cast<double>(n_hi) / static_cast<double>(n_lo), lambda);
    return std::pow(ratio * poly, 1.0 / static_cast<double>(n_hi - n_lo));
}

}  // namespace fprw
