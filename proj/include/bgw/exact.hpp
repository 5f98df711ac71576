#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bgw/family.hpp"
#include "bgw/pmf.hpp"
#include "bgw/rational.hpp"
#include "bgw/tree.hpp"

namespace bgw {

// Stable log(sum_i exp(x_i)); -infinity for an empty list.
double log_sum_exp(const std::vector<double>& xs);
// log of C(a, b) via lgamma; -infinity when b < 0 or b > a.
double log_choose(long long a, long long b);

// ---------------------------------------------------------------------------
// Exact law of the class-count vector.
//
// Scope: every degree outside {1} must belong to a counted class (A_0 inside
// {1}).  Degree-1 vertices in A_0 pass counts through unchanged, so they are
// removed by an exact chain reduction; all remaining degrees are counted and
// the total count equals the reduced tree size, which makes the recursions
// finite.  Uncounted degrees other than 1 would leave the conditioned size
// unbounded and are rejected.
//
// The production path writes the forest weight as a product over classes of
// convolution powers of the class-restricted law, times the interleaving
// multinomial, times the rotation factor width/size.  A plain memoized
// recursion over (count vector, width) is kept as a reference implementation.

class CountOracle {
public:
    CountOracle(PmfQ p, SetFamily f, long long dp_budget = 600);

    const FamilyView& view() const { return view_; }
    const PmfQ& original() const { return p_; }
    const PmfQ& reduced() const { return q_; }
    const Rat& pass_mass() const { return pass_; }
    int J() const { return view_.J; }

    // whether {L_A = n} is nonempty (degree-multiset characterization)
    bool achievable(const std::vector<long long>& n) const;
    bool forest_achievable(const std::vector<long long>& n, long long width) const;

    // P(L_A(T) = n), exact
    Rat count_prob(const std::vector<long long>& n);
    // P(a forest of `width` independent trees has total class counts n)
    Rat forest_prob(const std::vector<long long>& n, long long width);
    // reference recursion, limited to small total counts
    Rat forest_prob_dp(const std::vector<long long>& n, long long width);

    // P(root degree = . | L_A = n); degrees with zero conditional mass omitted
    std::map<int, Rat> root_law(const std::vector<long long>& n);

    // exact law of the depth-h truncation given L_A = n
    std::map<OrderedTree, Rat> truncated_law(const std::vector<long long>& n, int h,
                                             std::size_t shape_cap = 1u << 20);

private:
    // convolution powers of the class-restricted reduced law, big-integer
    // numerators over denom^steps, truncated beyond sum `cap`
    struct ClassRow {
        long long steps = 0;
        long long cap = -1;
        Int denom = 1;
        Int denom_pow = 1;
        std::vector<std::pair<int, Int>> degs;  // degree -> weight numerator
        std::vector<Int> row;
    };

    ClassRow& class_row(int j, long long steps, long long cap);
    Rat conv_forest_prob(const std::vector<long long>& n, long long width);
    Rat dp_rec(const std::vector<long long>& n, long long width);

    PmfQ p_;        // original law
    PmfQ q_;        // reduced law (degree 1 removed when it is uncounted)
    Rat pass_;      // p(1) when 1 sits in A_0, else 0
    FamilyView view_;
    long long dp_budget_;
    std::map<std::pair<std::vector<long long>, long long>, Rat> memo_;
    std::map<int, ClassRow> rows_;
};

struct ConditionalLaw {
    std::map<OrderedTree, Rat> probs;  // exact conditional probabilities
    Rat truncated_mass;                // conditional mass beyond the size budget
};

// Exact conditional law of the tree given L_A = n, enumerated over trees with
// at most size_budget vertices.  The map is complete when no uncounted
// pass-through degree exists; otherwise the tail of ever-longer chains is
// reported as truncated mass.
ConditionalLaw conditional_law(const PmfQ& p, const SetFamily& f,
                               const std::vector<long long>& n, int size_budget);

// ---------------------------------------------------------------------------
// Enumeration of small trees and truncation shapes

// Every preorder degree sequence of a tree with degrees in `degrees` and at
// most max_vertices vertices.
void for_each_tree(const IntSet& degrees, int max_vertices,
                   const std::function<void(const OrderedTree&)>& fn);
// Forest version: `roots` concatenated preorders.
void for_each_forest(int roots, const IntSet& degrees, int max_vertices,
                     const std::function<void(const std::vector<int>&)>& fn);

// Every truncation shape of depth h: vertices above depth h carry degrees
// from `degrees` (at most max_degree), vertices at depth h are stubs recorded
// as degree 0.  Calls fn(shape, stub_count); a complete tree of height < h is
// a shape with zero stubs.
void for_each_truncation_shape(const IntSet& degrees, int h, int max_degree,
                               std::size_t cap,
                               const std::function<void(const OrderedTree&, int)>& fn);

// ---------------------------------------------------------------------------
// Conditioned-law equivalence of two offspring distributions

struct OracleVerdict {
    bool equivalent = true;
    std::size_t trees = 0;
    std::size_t classes = 0;
    std::optional<OrderedTree> counterexample;
    std::string detail;
};

// Exhaustively checks, over all trees with at most `bound` vertices, that
// conditioning on any class-count vector yields the same law under p and
// under q (ratio constancy within every count class; exact arithmetic).
OracleVerdict compatibility_oracle(const PmfQ& p, const PmfQ& q, const SetFamily& f,
                                   int bound);

// ---------------------------------------------------------------------------
// Binary forest counts

// Number of planar forests of `trees` full binary trees with `leaves` leaves
// in total: (trees/leaves) C(2 leaves - trees - 1, leaves - 1).
Int full_binary_forests(long long trees, long long leaves);
// Number of unrestricted {0,2}-degree words of the same composition:
// C(2 leaves - trees, leaves) = ((2n - k)/k) full_binary_forests(k, n).
Int binary_arrangements(long long trees, long long leaves);

// ---------------------------------------------------------------------------
// Truncated law of the size-biased spine tree (critical offspring law)

std::map<OrderedTree, Rat> spine_truncated_law(const PmfQ& p, int h, int max_degree,
                                               std::size_t cap = 1u << 20);
std::map<OrderedTree, double> spine_truncated_law(const PmfD& p, int h, int max_degree,
                                                  std::size_t cap = 1u << 20);

// Total variation between two sub-normalized laws given as maps; mass either
// law carries outside its map is assumed disjoint from the other's support
// (exact for our uses, an upper bound in general).
double total_variation(const std::map<OrderedTree, double>& a,
                       const std::map<OrderedTree, double>& b);
Rat total_variation(const std::map<OrderedTree, Rat>& a,
                    const std::map<OrderedTree, Rat>& b);
double total_variation(const std::map<int, double>& a, const std::map<int, double>& b);

std::map<OrderedTree, double> to_double_law(const std::map<OrderedTree, Rat>& m);

// ---------------------------------------------------------------------------
// Condensation family: atoms at 0 and 2 plus a geometric tail on the odd
// degrees 3, 5, 7, ...; the tail coefficient is fixed by total mass 1.

struct CondensationFamily {
    double p0 = 0.0;
    double p2 = 0.0;
    double b = 0.0;   // tail ratio
    double c = 0.0;   // tail coefficient, derived
    double a = 0.0;   // sqrt(p0/p2)

    PmfD pmf() const;
    PmfQ pmf_exact() const;
    SetFamily family() const;  // ({0,2}, {3,5,7,...})
};

CondensationFamily make_condensation(double p0, double p2, double b);

struct CondensationPoint {
    long long n = 0;
    double log_b1 = 0.0;  // log of the root-heavy part of the count mass
    double log_b2 = 0.0;  // log of the full count mass P(L = (n,1))
    double ratio = 0.0;   // P(root degree >= eps n | L = (n,1))
};

// Conditional mass of a heavy root for the count vector (n, 1); n odd.
// Closed-form sums over the root degree, accumulated in log space.
CondensationPoint condensation_ratio(const CondensationFamily& fam, long long n,
                                     double eps);
// The constant r(1 - eps)/(2r - (1 + eps)) with r = (ab)^2/(1 + (ab)^2).
double condensation_c0(double ab, double eps);
// The asymptotic floor eps/(1 + 2 c0 M^2).
double condensation_floor(double ab, double eps, double big_m);

// ---------------------------------------------------------------------------
// Strong ratio series

struct RatioPoint {
    std::vector<long long> n;
    bool base_achievable = false;
    bool shifted_achievable = false;
    double ratio = 0.0;  // P(L = n + shift)/P(L = n); NaN when the base is 0
};

std::vector<RatioPoint> strong_ratio_series(const PmfQ& p, const SetFamily& f,
                                            const std::vector<std::vector<long long>>& ns,
                                            const std::vector<long long>& shift);

// ---------------------------------------------------------------------------
// Distance to the local limit

struct DistanceReport {
    double tv = 0.0;
    bool exact = true;
    double std_error = 0.0;  // Monte Carlo mode only
    std::size_t samples = 0;
};

// TV distance between the exact conditioned truncation law at depth h and
// the truncated size-biased spine law of the same (critical) offspring
// distribution.
DistanceReport local_limit_distance(const PmfQ& p_critical, const SetFamily& f,
                                    const std::vector<long long>& n, int h);

}  // namespace bgw
