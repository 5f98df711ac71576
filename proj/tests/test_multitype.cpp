#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "bgw/errors.hpp"
#include "bgw/exact.hpp"
#include "bgw/family.hpp"
#include "bgw/intset.hpp"
#include "bgw/multitype.hpp"
#include "bgw/pmf.hpp"
#include "bgw/rng.hpp"
#include "bgw/sample.hpp"
#include "bgw/tree.hpp"

using namespace bgw;

namespace {

PmfD uniform4() { return PmfD({{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}}); }

SetFamily fam_0_23() {
    return SetFamily{{IntSet::single(0), IntSet::finite({2, 3})}};
}

SetFamily fam_2_3() { return SetFamily{{IntSet::single(2), IntSet::single(3)}}; }

SetFamily fam_01_23() {
    return SetFamily{{IntSet::finite({0, 1}), IntSet::finite({2, 3})}};
}

void check_collapse(const OrderedTree& t, const SetFamily& f,
                    const OrderedTree& tree, const std::vector<int>& types,
                    const std::vector<int>& phi) {
    const auto r = rizzolo(t, f);
    CHECK(r.tree.tree == tree);
    CHECK(r.tree.types == types);
    CHECK(r.phi == phi);
}

// Root-type label together with the per-type counts among the root children.
using RootKey = std::pair<int, std::vector<long long>>;

std::map<RootKey, double> collapsed_root_hist(const PmfD& p, const SetFamily& f,
                                              int labels, long long draws,
                                              std::uint64_t seed) {
    std::map<RootKey, double> hist;
    RngState rng(seed);
    long long kept = 0;
    while (kept < draws) {
        const auto t = sample_bgw(p, rng, 200000);
        if (!t) continue;
        std::optional<RizzoloResult> r;
        try {
            r = rizzolo(*t, f);
        } catch (const PreconditionError&) {
            continue;  // no counted vertex at all
        }
        std::vector<long long> counts(static_cast<std::size_t>(labels), 0);
        int at = 1;
        for (int child = 0; child < r->tree.tree[0]; ++child) {
            ++counts[static_cast<std::size_t>(
                r->tree.types[static_cast<std::size_t>(at)] - 1)];
            at += subtree_extent(r->tree.tree, at);
        }
        hist[{r->tree.types[0], counts}] += 1.0 / static_cast<double>(draws);
        ++kept;
    }
    return hist;
}

std::map<RootKey, double> offspring_root_hist(const MultiOffspring& m, int labels,
                                              long long draws, std::uint64_t seed) {
    std::map<RootKey, double> hist;
    RngState rng(seed);
    for (long long i = 0; i < draws; ++i) {
        const int idx = m.root_type(rng);
        const auto per = m.offspring_sample(m.classes()[static_cast<std::size_t>(idx)], rng);
        std::vector<long long> counts(static_cast<std::size_t>(labels), 0);
        for (std::size_t l = 0; l < per.size(); ++l)
            counts[static_cast<std::size_t>(m.classes()[l] - 1)] += per[l];
        hist[{m.classes()[static_cast<std::size_t>(idx)], counts}] +=
            1.0 / static_cast<double>(draws);
    }
    return hist;
}

double hist_distance(const std::map<RootKey, double>& a,
                     const std::map<RootKey, double>& b) {
    double sum = 0.0;
    for (const auto& [key, mass] : a) {
        const auto it = b.find(key);
        sum += std::abs(mass - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [key, mass] : b)
        if (a.find(key) == a.end()) sum += mass;
    return sum / 2.0;
}

}  // namespace

TEST_CASE("collapse drops uncounted vertices and keeps preorder") {
    // A degree-1 root passes through; its counted child takes the root slot.
    check_collapse({1, 2, 0, 0}, fam_0_23(), {2, 0, 0}, {2, 1, 1}, {-1, 0, 1, 2});

    // A pass-through vertex in the middle re-attaches its child in place.
    check_collapse({2, 1, 0, 3, 0, 0, 0}, fam_0_23(), {2, 0, 3, 0, 0, 0},
                   {2, 1, 2, 1, 1, 1}, {0, -1, 1, 2, 3, 4, 5});

    // The dropped vertex's subtree slides left to fill its slot.
    check_collapse({2, 0, 1, 0}, fam_0_23(), {2, 0, 0}, {2, 1, 1}, {0, 1, -1, 2});

    // A chain of pass-through vertices above and below the counted core.
    check_collapse({1, 1, 2, 0, 1, 0}, fam_0_23(), {2, 0, 0}, {2, 1, 1},
                   {-1, -1, 0, 1, -1, 2});
}

TEST_CASE("collapse is the identity when every degree is counted") {
    const SetFamily whole{{IntSet::finite({0, 2})}};
    const OrderedTree t{2, 2, 0, 0, 2, 0, 0};
    const auto r = rizzolo(t, whole);
    CHECK(r.tree.tree == t);
    CHECK(r.tree.types == std::vector<int>(t.size(), 1));
    std::vector<int> identity(t.size());
    std::iota(identity.begin(), identity.end(), 0);
    CHECK(r.phi == identity);
}

TEST_CASE("collapse preserves per-class counts on random trees") {
    const PmfD p({{0, 0.5}, {1, 0.2}, {2, 0.2}, {3, 0.1}});
    const SetFamily f = fam_0_23();
    const FamilyView v = resolve_family(p, f);
    RngState rng(71);
    for (int rep = 0; rep < 400; ++rep) {
        const auto t = sample_bgw(p, rng, 100000);
        REQUIRE(t.has_value());
        const auto r = rizzolo(*t, f);
        require_valid_tree(r.tree.tree);
        REQUIRE(r.tree.types.size() == r.tree.tree.size());
        REQUIRE(r.phi.size() == t->size());

        const auto counts = count_classes(*t, v);
        const long long total =
            std::accumulate(counts.begin(), counts.end(), 0LL);
        CHECK(static_cast<long long>(r.tree.tree.size()) == total);
        std::vector<long long> seen(counts.size(), 0);
        for (int type : r.tree.types) {
            REQUIRE(type >= 1);
            REQUIRE(type <= static_cast<int>(counts.size()));
            ++seen[static_cast<std::size_t>(type - 1)];
        }
        CHECK(seen == counts);

        // phi restricts to an order-preserving bijection on counted slots.
        int next = 0;
        for (std::size_t i = 0; i < t->size(); ++i) {
            const int cls = class_of_degree(v, (*t)[i]);
            if (cls <= 0) {
                CHECK(r.phi[i] == -1);
            } else {
                CHECK(r.phi[i] == next);
                CHECK(r.tree.types[static_cast<std::size_t>(next)] == cls);
                ++next;
            }
        }
        CHECK(next == static_cast<int>(r.tree.tree.size()));
    }
}

TEST_CASE("collapse rejects trees without a counted vertex") {
    CHECK_THROWS_AS(rizzolo({0}, fam_2_3()), PreconditionError);
    CHECK_THROWS_AS(rizzolo({1, 0}, fam_2_3()), PreconditionError);
    CHECK_NOTHROW(rizzolo({2, 0, 0}, fam_2_3()));
}

TEST_CASE("offspring law at an interior tilt with pass-through mass") {
    const MultiOffspring m(uniform4(), fam_2_3(), {0.5, 0.5});
    CHECK(m.classes() == std::vector<int>{1, 2});
    CHECK_FALSE(m.theta_zero());
    CHECK(m.alpha_star()[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.alpha_star()[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.survival() == doctest::Approx(0.4).epsilon(1e-12));

    const PmfD& q = m.tilted();
    CHECK(q.at(0) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(q.at(1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(q.at(2) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(q.at(3) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(m.survival() ==
          doctest::Approx(survival_probability(q, m.view().a0)).epsilon(1e-12));

    const auto mm = mean_matrix(m);
    CHECK(mm[0][0] == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(mm[0][1] == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(mm[1][0] == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(mm[1][1] == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("offspring law without uncounted degrees") {
    const MultiOffspring m(uniform4(), fam_01_23(), {0.6, 0.4});
    CHECK(m.survival() == 1.0);
    CHECK(m.alpha_star()[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(m.alpha_star()[1] == doctest::Approx(0.4).epsilon(1e-12));

    const PmfD& q = m.tilted();
    CHECK(q.at(0) == doctest::Approx(0.48).epsilon(1e-12));
    CHECK(q.at(1) == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(q.at(2) == doctest::Approx(0.32).epsilon(1e-12));
    CHECK(q.at(3) == doctest::Approx(0.08).epsilon(1e-12));

    const auto mm = mean_matrix(m);
    CHECK(mm[0][0] == doctest::Approx(0.12).epsilon(1e-9));
    CHECK(mm[0][1] == doctest::Approx(0.08).epsilon(1e-9));
    CHECK(mm[1][0] == doctest::Approx(1.32).epsilon(1e-9));
    CHECK(mm[1][1] == doctest::Approx(0.88).epsilon(1e-9));
}

TEST_CASE("offspring law with a leaf-only class") {
    const MultiOffspring m(uniform4(), fam_0_23(), {0.6, 0.4});
    CHECK(m.survival() == 1.0);
    CHECK_FALSE(m.theta_zero());

    const PmfD& q = m.tilted();
    CHECK(q.at(0) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(q.at(1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(q.at(2) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(q.at(3) == doctest::Approx(0.15).epsilon(1e-12));

    const auto mm = mean_matrix(m);
    CHECK(mm[0][0] == 0.0);
    CHECK(mm[0][1] == 0.0);
    CHECK(mm[1][0] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(mm[1][1] == doctest::Approx(1.0).epsilon(1e-9));

    // Leaves never branch: their offspring vector is identically zero.
    RngState rng(301);
    for (int rep = 0; rep < 200; ++rep) {
        const auto per = m.offspring_sample(1, rng);
        CHECK(per == std::vector<long long>{0, 0});
    }
}

TEST_CASE("offspring law at the zero endpoint of the tilt") {
    const MultiOffspring m(uniform4(), fam_0_23(), {0.5, 0.5});
    CHECK(m.theta_zero());
    CHECK(m.survival() == 1.0);

    const PmfD& q = m.tilted();
    CHECK(q.at(0) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(q.at(1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(q.at(2) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(q.at(3) == 0.0);

    const auto mm = mean_matrix(m);
    CHECK(mm[0][0] == 0.0);
    CHECK(mm[0][1] == 0.0);
    CHECK(mm[1][0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mm[1][1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mean matrix is critical and rank one with eigenvector alpha") {
    const std::vector<std::pair<SetFamily, std::vector<double>>> instances{
        {fam_2_3(), {0.5, 0.5}},
        {fam_01_23(), {0.6, 0.4}},
        {fam_0_23(), {0.6, 0.4}},
        {fam_0_23(), {0.5, 0.5}},
    };
    for (const auto& [f, alpha] : instances) {
        const MultiOffspring m(uniform4(), f, alpha);
        const auto mm = mean_matrix(m);
        REQUIRE(mm.size() == 2);

        CHECK(mm[0][0] + mm[1][1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(mm[0][0] * mm[1][1] ==
              doctest::Approx(mm[0][1] * mm[1][0]).epsilon(1e-12));
        for (std::size_t l = 0; l < 2; ++l) {
            const double image = alpha[0] * mm[0][l] + alpha[1] * mm[1][l];
            CHECK(image == doctest::Approx(alpha[l]).epsilon(1e-9));
        }
        for (std::size_t l = 0; l < 2; ++l)
            CHECK(mm[0][l] + mm[1][l] > 0.0);
    }
}

TEST_CASE("offspring report flags zero rows and periodicity") {
    {
        const auto rep = check_offspring(uniform4(), fam_2_3(), {0.5, 0.5});
        CHECK(rep.critical);
        CHECK(rep.spectral_radius == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.row_zero == std::vector<bool>{false, false});
        CHECK(rep.pattern_ok);
        CHECK(rep.aperiodic);
    }
    {
        const auto rep = check_offspring(uniform4(), fam_01_23(), {0.6, 0.4});
        CHECK(rep.critical);
        CHECK(rep.row_zero == std::vector<bool>{false, false});
        CHECK(rep.pattern_ok);
        CHECK(rep.aperiodic);
    }
    {
        const auto rep = check_offspring(uniform4(), fam_0_23(), {0.6, 0.4});
        CHECK(rep.critical);
        CHECK(rep.spectral_radius == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.row_zero == std::vector<bool>{true, false});
        CHECK(rep.pattern_ok);
        CHECK(rep.aperiodic);
    }
    {
        // Zero endpoint: the leaf class still vanishes, the branching class
        // pinned at its minimum does not, and the endpoint is not aperiodic.
        const auto rep = check_offspring(uniform4(), fam_0_23(), {0.5, 0.5});
        CHECK(rep.critical);
        CHECK(rep.row_zero == std::vector<bool>{true, false});
        CHECK(rep.pattern_ok);
        CHECK_FALSE(rep.aperiodic);
    }
}

TEST_CASE("offspring law rejects directions without a critical tilt") {
    CHECK_THROWS_AS(MultiOffspring(uniform4(), fam_0_23(), {0.45, 0.55}),
                    PreconditionError);
    CHECK_THROWS_AS(MultiOffspring(uniform4(), fam_0_23(), {0.30, 0.70}),
                    PreconditionError);
}

TEST_CASE("sampled offspring match the mean matrix") {
    const std::vector<std::pair<SetFamily, std::vector<double>>> instances{
        {fam_2_3(), {0.5, 0.5}},
        {fam_01_23(), {0.6, 0.4}},
    };
    for (const auto& [f, alpha] : instances) {
        const MultiOffspring m(uniform4(), f, alpha);
        const auto mm = mean_matrix(m);
        RngState rng(1117);
        const long long draws = 20000;
        for (std::size_t j = 0; j < 2; ++j) {
            std::vector<double> sum(2, 0.0), sq(2, 0.0);
            for (long long i = 0; i < draws; ++i) {
                const auto per = m.offspring_sample(m.classes()[j], rng);
                for (std::size_t l = 0; l < 2; ++l) {
                    const double x = static_cast<double>(per[l]);
                    sum[l] += x;
                    sq[l] += x * x;
                }
            }
            for (std::size_t l = 0; l < 2; ++l) {
                const double avg = sum[l] / static_cast<double>(draws);
                const double var =
                    std::max(sq[l] / static_cast<double>(draws) - avg * avg, 1e-12);
                const double se = std::sqrt(var / static_cast<double>(draws));
                CHECK(std::abs(avg - mm[j][l]) <= 4.0 * se + 1e-9);
            }
        }
    }
}

TEST_CASE("survival probability closed forms") {
    const PmfD binary({{0, 0.25}, {1, 0.5}, {2, 0.25}});
    CHECK(survival_probability(binary, IntSet::finite({0, 1})) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(survival_probability(binary, IntSet::single(1)) == 1.0);
    CHECK(survival_probability(binary, IntSet::empty()) == 1.0);
    // At a critical law the fixed point is a tangent root, so the iteration
    // approaches zero survival only to within its step tolerance.
    CHECK(survival_probability(binary, binary.support()) < 1e-3);

    const PmfD lopsided({{0, 1.0 / 3.0}, {2, 2.0 / 3.0}});
    CHECK(survival_probability(lopsided, lopsided.support()) ==
          doctest::Approx(0.5).epsilon(1e-9));

    const PmfD subcritical({{0, 0.6}, {2, 0.4}});
    CHECK(survival_probability(subcritical, subcritical.support()) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("folding a pinned zero class renormalizes the direction") {
    const PmfD p({{0, 0.5}, {1, 0.25}, {3, 0.25}});
    const SetFamily f{{IntSet::single(0), IntSet::single(3)}};
    const auto out = normalize_zero_singleton(p, f, {2.0 / 3.0, 1.0 / 3.0});
    CHECK(out.removed == 1);
    REQUIRE(out.family.sets.size() == 1);
    CHECK(out.family.sets[0].same_set(IntSet::single(3)));
    REQUIRE(out.alpha.size() == 1);
    CHECK(out.alpha[0] == doctest::Approx(1.0).epsilon(1e-12));

    // The folded count is pinned: over every tree on these degrees the two
    // count vectors determine each other, so the conditioning events agree.
    const FamilyView before = resolve_family(p, f);
    const FamilyView after = resolve_family(p, out.family);
    int trees = 0;
    for_each_tree(p.support(), 13, [&](const OrderedTree& t) {
        ++trees;
        const auto old_counts = count_classes(t, before);
        const auto new_counts = count_classes(t, after);
        REQUIRE(old_counts.size() == 2);
        REQUIRE(new_counts.size() == 1);
        CHECK(old_counts[1] == new_counts[0]);
        CHECK(old_counts[0] == 2 * new_counts[0] + 1);
        const bool old_event = old_counts == std::vector<long long>{5, 2};
        const bool new_event = new_counts == std::vector<long long>{2};
        CHECK(old_event == new_event);
    });
    CHECK(trees > 100);
}

TEST_CASE("folding rejects families it does not cover") {
    // a branching class that is not a singleton
    CHECK_THROWS_AS(normalize_zero_singleton(uniform4(), fam_0_23(), {0.6, 0.4}),
                    PreconditionError);
    // uncounted degrees other than 1
    const PmfD p({{0, 0.5}, {1, 0.125}, {2, 0.125}, {3, 0.25}});
    const SetFamily f{{IntSet::single(0), IntSet::single(3)}};
    CHECK_THROWS_AS(normalize_zero_singleton(p, f, {0.5, 0.5}), PreconditionError);
    // no positively-weighted {0} class
    const PmfD q({{0, 0.5}, {1, 0.25}, {3, 0.25}});
    const SetFamily g{{IntSet::single(3)}};
    CHECK_THROWS_AS(normalize_zero_singleton(q, g, {1.0}), PreconditionError);
}

TEST_CASE("collapsed trees reproduce the offspring law at the root") {
    struct Instance {
        SetFamily f;
        std::vector<double> alpha;
        long long draws;
    };
    const std::vector<Instance> instances{
        {fam_2_3(), {0.5, 0.5}, 30000},
        {fam_01_23(), {0.6, 0.4}, 50000},
        {fam_0_23(), {0.6, 0.4}, 50000},
    };
    std::uint64_t seed = 9000;
    for (const auto& inst : instances) {
        const MultiOffspring m(uniform4(), inst.f, inst.alpha);
        const auto via_trees =
            collapsed_root_hist(m.tilted(), inst.f, 2, inst.draws, seed);
        const auto via_law = offspring_root_hist(m, 2, inst.draws, seed + 1);
        CHECK(hist_distance(via_trees, via_law) < 0.03);
        seed += 2;
    }
}
