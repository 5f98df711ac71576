#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bgw/family.hpp"
#include "bgw/pmf.hpp"
#include "bgw/rng.hpp"
#include "bgw/sample.hpp"
#include "bgw/tree.hpp"

namespace bgw {

// ---------------------------------------------------------------------------
// Collapse of the uncounted vertices onto a multi-type tree.
//
// Each vertex takes the type of its out-degree class (0 for uncounted).  The
// typed tree keeps exactly the vertices of positive type, re-attached in
// lexicographic order below the first positively-typed vertex of the fringe
// subtree rooted at the most recent common ancestor of consecutive entries.

struct RizzoloResult {
    TypedTree tree;           // preorder degrees of the collapsed tree + types
    std::vector<int> phi;     // original preorder slot -> collapsed slot; -1 at type 0
};

RizzoloResult rizzolo(const OrderedTree& t, const FamilyView& v);
// Resolves the family against the class union extended by the degrees of t.
RizzoloResult rizzolo(const OrderedTree& t, const SetFamily& f);

// ---------------------------------------------------------------------------
// The offspring law of the collapsed tree, driven by a critical tilted law.

// Offspring of a type-j vertex: with N geometric on {1, 2, ...} of parameter
// p_alpha(A_0 complement), Y_j sums one draw from p_alpha restricted to A_j
// with N - 1 draws of (X - 1) restricted to A_0, conditioned on the partial
// sums staying nonnegative (N <= T, the walk misses -1); the offspring count
// is then thinned by r = P(N <= T) and split across types by alpha*.
class MultiOffspring {
public:
    MultiOffspring(const PmfD& p, const SetFamily& f, const std::vector<double>& alpha);

    const PmfD& tilted() const { return p_alpha_; }
    const FamilyView& view() const { return view_; }      // positive classes only
    const std::vector<int>& classes() const { return classes_; }  // original labels
    const std::vector<double>& alpha_star() const { return alpha_star_; }
    double survival() const { return r_; }                // P(N <= T)
    bool theta_zero() const { return theta_zero_; }

    int root_type(RngState& rng) const;                   // index into classes()
    std::vector<long long> offspring_sample(int j, RngState& rng,
                                            long long retry_cap = 1'000'000,
                                            long long step_cap = 1'000'000) const;

private:
    PmfD p_alpha_;
    FamilyView view_;
    std::vector<int> classes_;
    std::vector<double> alpha_star_;
    double pass0_ = 0.0;   // p_alpha(A_0)
    double r_ = 1.0;
    bool theta_zero_ = false;
    std::vector<PmfSampler> class_draw_;     // X^j, one per kept class
    std::optional<PmfSampler> zero_draw_;    // X conditioned on A_0
};

// P(N <= T): one minus the smallest fixed point of the generating function
// of the law restricted to A_0; equals 1 exactly when 0 is not in A_0.
double survival_probability(const PmfD& p_alpha, const IntSet& a0);

// Closed-form mean matrix m_{j l} = E[Y_j] alpha_l over the kept classes.
std::vector<std::vector<double>> mean_matrix(const MultiOffspring& m);

struct OffspringReport {
    bool critical = false;        // spectral radius of the mean matrix is 1
    double spectral_radius = 0.0;
    std::vector<bool> row_zero;   // rows of the mean matrix that vanish
    bool pattern_ok = false;      // vanishing rows match the degree-0 clause
    bool aperiodic = false;       // delegated to the direction criterion
    std::string detail;
};

OffspringReport check_offspring(const PmfD& p, const SetFamily& f,
                                const std::vector<double>& alpha);

// ---------------------------------------------------------------------------
// Dropping a {0} class when every class is a singleton and A_0 is inside {1}:
// the zero count is pinned by the other counts, so the class can be folded
// into A_0 and the direction renormalized without changing the conditioning.

struct NormalizedFamily {
    SetFamily family;
    std::vector<double> alpha;
    int removed = 0;  // original label of the folded class
};

NormalizedFamily normalize_zero_singleton(const PmfD& p, const SetFamily& f,
                                          const std::vector<double>& alpha);

}  // namespace bgw
