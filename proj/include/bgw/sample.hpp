#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "bgw/exact.hpp"
#include "bgw/family.hpp"
#include "bgw/pmf.hpp"
#include "bgw/rng.hpp"
#include "bgw/tree.hpp"

namespace bgw {

// ---------------------------------------------------------------------------
// Draws from offspring laws (atoms plus geometric tails, closed forms only).

// Inverse-CDF sampler over a weighted mixture of atoms and geometric pieces.
// Weights need not be normalized; each geometric piece {start + step*i} is
// drawn by choosing the piece and then a geometric offset i.
class PmfSampler {
public:
    explicit PmfSampler(const PmfD& p);
    PmfSampler(const std::vector<std::pair<int, double>>& atoms,
               const std::vector<GeomTail<double>>& tails);

    int operator()(RngState& rng) const;
    double total_weight() const { return total_; }

private:
    struct Piece {
        int start = 0;
        int step = 1;
        double offset_ratio = 0.0;  // ratio^step, the geometric parameter of i
    };
    std::vector<double> cum_;
    std::vector<int> atoms_;       // first atoms_.size() cumulative slots
    std::vector<Piece> pieces_;
    double total_ = 0.0;
};

// Sampler for the size-biased law k p(k); requires mean 1.  Each geometric
// piece splits into two closed-form components (constant and linear in the
// offset), the linear one drawn as 1 plus a sum of two geometric variables.
class SizeBiasedSampler {
public:
    explicit SizeBiasedSampler(const PmfD& p, double mean_tol = 1e-9);
    int operator()(RngState& rng) const;

private:
    struct Piece {
        int start = 0;
        int step = 1;
        double offset_ratio = 0.0;
        bool linear = false;  // offset ~ 1 + G1 + G2 instead of ~ G
    };
    std::vector<double> cum_;
    std::vector<int> atoms_;
    std::vector<Piece> pieces_;
    double total_ = 0.0;
};

// ---------------------------------------------------------------------------
// Unconditioned and depth-truncated generation.

// One tree of law prod_u p(k_u) in preorder; empty when the vertex budget is
// exhausted first (a value, not a fault: supercritical laws overflow often).
std::optional<OrderedTree> sample_bgw(const PmfD& p, RngState& rng,
                                      std::size_t cap = 1'000'000);

// The tree truncated at height h: vertices at depth h are recorded with
// out-degree 0.  Finite depth keeps the tree finite almost surely; the cap
// guards resource use and trips a PreconditionError, not an overflow value.
OrderedTree sample_bgw_truncated(const PmfD& p, RngState& rng, int h,
                                 std::size_t cap = 1'000'000);

// r_h of the size-biased (spine) tree of a critical law: spine vertices
// reproduce by k p(k) with a uniform child continuing the spine, all other
// vertices reproduce by p.  Rejects non-critical laws.
OrderedTree sample_kesten(const PmfD& p, RngState& rng, int h,
                          std::size_t cap = 1'000'000);

// ---------------------------------------------------------------------------
// Exact draws from the law of T_p conditioned on L_A(T_p) = n.

enum class CondStrategy {
    Rejection,   // resample until the class counts match
    DpBackward,  // preorder degree choices weighted by exact forest counts
    CycleLemma,  // J = 1 counting all of supp(p): rotate a conditioned walk
};

// Holds the count oracle and the per-state transition tables so repeated
// draws share all exact arithmetic.  Same scope as CountOracle: uncounted
// degrees only at 1 (and the cycle-lemma path needs A_1 = supp(p)).
class ConditionedSampler {
public:
    ConditionedSampler(const PmfQ& p, const SetFamily& f, std::vector<long long> n,
                       CondStrategy strategy, long long attempt_cap = 1'000'000);

    OrderedTree operator()(RngState& rng);

    const CountOracle& oracle() const { return oracle_; }

private:
    using State = std::pair<std::vector<long long>, long long>;

    OrderedTree draw_rejection(RngState& rng);
    OrderedTree draw_dp(RngState& rng);
    OrderedTree draw_cycle(RngState& rng);
    const std::vector<std::pair<int, double>>& transitions(const State& s);
    void insert_chains(const OrderedTree& reduced, RngState& rng, OrderedTree& out) const;

    CountOracle oracle_;
    PmfD pd_;                    // double image of p, for generation
    std::vector<long long> n_;
    CondStrategy strategy_;
    long long attempt_cap_;
    long long total_ = 0;        // |n|_1, the reduced tree size
    std::optional<PmfSampler> base_;    // lazily built per strategy
    std::map<State, std::vector<std::pair<int, double>>> trans_;
};

// One-shot convenience wrapper.
OrderedTree sample_conditioned(const PmfQ& p, const SetFamily& f,
                               const std::vector<long long>& n, RngState& rng,
                               CondStrategy strategy = CondStrategy::DpBackward);

// ---------------------------------------------------------------------------
// Small integer draws shared with the multi-type sampler.

// Number of successes in n Bernoulli(r) trials.
long long binomial_draw(long long n, double r, RngState& rng);

// n draws from the categorical law given by the (normalized) weights.
std::vector<long long> multinomial_draw(long long n, const std::vector<double>& weights,
                                        RngState& rng);

}  // namespace bgw
