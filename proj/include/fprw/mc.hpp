#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fprw/product.hpp"

namespace fprw {

// Lattice coordinates, a finite-group index, or a reduced tree word.
using Element = std::vector<std::int32_t>;

struct Letter {
    std::uint32_t factor;
    Element g;
    friend bool operator==(const Letter&, const Letter&) = default;
};

// Normal form: no identity letters and no two neighbours from one factor.
using Word = std::vector<Letter>;

struct Step {
    Element g;
    double prob;
};

// Group structure and step law of one factor.
class FactorGroup {
public:
    virtual ~FactorGroup() = default;
    virtual Element identity() const = 0;
    virtual bool is_identity(const Element& g) const = 0;
    virtual Element multiply(const Element& a, const Element& b) const = 0;
    virtual Element inverse(const Element& g) const = 0;
    virtual const std::vector<Step>& steps() const = 0;
    // Fewest steps needed to reach the identity from g.
    virtual std::size_t distance(const Element& g) const = 0;
    // Replace a by a*b; default goes through multiply.
    virtual void multiply_inplace(Element& a, const Element& b) const { a = multiply(a, b); }
};

std::unique_ptr<FactorGroup> make_factor_group(const FactorSpec& spec);

class ProductGroup {
public:
    explicit ProductGroup(const FreeProductSpec& spec);

    std::size_t size() const noexcept { return groups_.size(); }
    const FactorGroup& group(std::size_t i) const { return *groups_[i]; }
    double weight(std::size_t i) const { return alpha_[i]; }

    // w * g with g from factor i, merged and reduced.
    Word multiply(Word w, std::size_t factor, const Element& g) const;
    void multiply_inplace(Word& w, std::size_t factor, const Element& g) const;
    bool is_normal_form(const Word& w) const;
    std::size_t distance(const Word& w) const;

private:
    std::vector<std::unique_ptr<FactorGroup>> groups_;
    std::vector<double> alpha_;
};

Word word_multiply(const ProductGroup& pg, const Word& w, std::size_t factor, const Element& g);

std::string encode(const Word& w);

struct BfsOptions {
    std::size_t state_cap = 50'000'000;
    bool prune = true;  // drop words too far from the identity to return by N
};

// Exact return probabilities by dynamic programming over words.
PowerSeries bfs_convolution(const FreeProductSpec& spec, std::size_t N, const BfsOptions& opt = {});

struct BfsProfile {
    std::vector<double> returns;     // mass at the empty word per step
    std::vector<double> total_mass;  // sum over all words per step
    std::vector<std::size_t> states;
};

BfsProfile bfs_profile(const FreeProductSpec& spec, std::size_t N, const BfsOptions& opt = {});

struct ReturnProfile {
    std::uint64_t walks = 0;
    std::vector<std::uint64_t> returns;  // returns[n] = walks at e after n steps

    double frequency(std::size_t n) const { return static_cast<double>(returns[n]) / static_cast<double>(walks); }
};

struct SimulateOptions {
    unsigned threads = 0;  // 0 = hardware concurrency, capped by FPRW_THREADS
    std::uint64_t block = 4096;
};

// Walks are split into fixed blocks; block b draws from mt19937_64 seeded
// with seed_seq{seed_lo, seed_hi, b_lo, b_hi}, so output does not depend on
// the thread count.
ReturnProfile simulate(const FreeProductSpec& spec, std::size_t steps, std::uint64_t walks, std::uint64_t seed,
                       const SimulateOptions& opt = {});

// 1/rho from Monte Carlo frequencies: the lagged ratio between steps n_hi and
// n_lo on the period lattice, corrected by the known polynomial factor n^{-lambda}.
double mc_growth_rate(const ReturnProfile& p, int period, std::size_t n_lo, std::size_t n_hi, double lambda);

}  // namespace fprw
