#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "bgw/exact.hpp"
#include "bgw/family.hpp"
#include "bgw/intset.hpp"
#include "bgw/pmf.hpp"
#include "bgw/rational.hpp"
#include "bgw/tree.hpp"

using namespace bgw;

namespace {

PmfQ uniform4() {
    return PmfQ({{0, Rat(1, 4)}, {1, Rat(1, 4)}, {2, Rat(1, 4)}, {3, Rat(1, 4)}});
}

SetFamily fam_0_23() { return SetFamily{{IntSet::single(0), IntSet::finite({2, 3})}}; }

PmfQ binary() { return PmfQ({{0, Rat(1, 4)}, {1, Rat(1, 2)}, {2, Rat(1, 4)}}); }

SetFamily fam_02() { return SetFamily{{IntSet::finite({0, 2})}}; }

Int big_choose(long long a, long long b) {
    if (b < 0 || b > a) return Int(0);
    Int c(1);
    for (long long i = 1; i <= b; ++i) {
        c *= Int(static_cast<long>(a - b + i));
        c /= Int(static_cast<long>(i));
    }
    return c;
}

// Forests of `roots` trees over the given degree list with exactly `size`
// vertices, generated by direct recursion on the degree word.
void rec_forests(const std::vector<int>& degs, int size, OrderedTree& cur, int open,
                 const std::function<void(const OrderedTree&)>& fn) {
    const int used = static_cast<int>(cur.size());
    if (used == size) {
        if (open == 0) fn(cur);
        return;
    }
    if (open == 0 || open > size - used) return;
    for (int d : degs) {
        if (d > size - used - open) continue;
        cur.push_back(d);
        rec_forests(degs, size, cur, open - 1 + d, fn);
        cur.pop_back();
    }
}

void each_forest(const std::vector<int>& degs, int roots, int size,
                 const std::function<void(const OrderedTree&)>& fn) {
    OrderedTree cur;
    rec_forests(degs, size, cur, roots, fn);
}

// Counts of full binary forests by checking every {0,2} word of the right
// length for the forest property.
long long brute_binary_forests(int trees, int leaves) {
    const int len = 2 * leaves - trees;
    if (len < trees || leaves < trees) return 0;
    long long count = 0;
    for (long long mask = 0; mask < (1LL << len); ++mask) {
        int open = trees;
        int zeros = 0;
        bool ok = true;
        for (int i = 0; i < len; ++i) {
            if (open <= 0) {
                ok = false;
                break;
            }
            const int d = ((mask >> i) & 1) ? 2 : 0;
            if (d == 0) ++zeros;
            open += d - 1;
        }
        if (ok && open == 0 && zeros == leaves) ++count;
    }
    return count;
}

// P(forest class counts = n) by forward enumeration over reduced forests,
// with each vertex dressed by a geometric chain of pass-through vertices.
Rat enum_forest_prob(const PmfQ& p, const FamilyView& v, const std::vector<long long>& n,
                     int width) {
    long long size = 0;
    for (long long x : n) size += x;
    std::vector<int> degs;
    for (int j = 1; j <= v.J; ++j)
        for (int k : v.a(j).elements_up_to(64)) degs.push_back(k);
    Rat total(0);
    each_forest(degs, width, static_cast<int>(size), [&](const OrderedTree& w) {
        std::vector<long long> counts(static_cast<std::size_t>(v.J), 0);
        Rat weight(1);
        for (int d : w) {
            ++counts[static_cast<std::size_t>(class_of_degree(v, d) - 1)];
            weight *= p.at(d);
        }
        if (counts == n) total += weight;
    });
    if (v.a0.contains(1)) {
        const Rat dress = Rat(1) / (Rat(1) - p.at(1));
        total *= rat_pow(dress, static_cast<unsigned long>(size));
    }
    return total;
}

}  // namespace

TEST_CASE("numeric helpers") {
    CHECK(log_sum_exp({}) == -std::numeric_limits<double>::infinity());
    CHECK(log_sum_exp({0.0, 0.0}) == doctest::Approx(std::log(2.0)));
    CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_sum_exp({-1.0, -std::numeric_limits<double>::infinity()}) == doctest::Approx(-1.0));

    CHECK(log_choose(10, 3) == doctest::Approx(std::log(120.0)));
    CHECK(log_choose(5, 0) == doctest::Approx(0.0));
    CHECK(log_choose(5, -1) == -std::numeric_limits<double>::infinity());
    CHECK(log_choose(5, 6) == -std::numeric_limits<double>::infinity());
    CHECK(std::exp(log_choose(52, 5)) == doctest::Approx(2598960.0).epsilon(1e-9));
}

TEST_CASE("full binary forest counts against exhaustive enumeration") {
    for (int trees = 1; trees <= 4; ++trees) {
        for (int leaves = 1; leaves <= 10; ++leaves) {
            CAPTURE(trees);
            CAPTURE(leaves);
            CHECK(full_binary_forests(trees, leaves) ==
                  Int(static_cast<long>(brute_binary_forests(trees, leaves))));
        }
    }
    // single trees follow the Catalan numbers
    CHECK(full_binary_forests(1, 5) == Int(14));
    CHECK(full_binary_forests(1, 10) == Int(4862));
}

TEST_CASE("binary word counts: closed form, cycle factor, convolution") {
    for (long long trees = 1; trees <= 6; ++trees) {
        for (long long leaves = trees; leaves <= 50; ++leaves) {
            CAPTURE(trees);
            CAPTURE(leaves);
            CHECK(binary_arrangements(trees, leaves) == big_choose(2 * leaves - trees, leaves));
            // every word has (2 leaves - trees) rotations, trees of which are forests
            CHECK(Int(static_cast<long>(2 * leaves - trees)) * full_binary_forests(trees, leaves) ==
                  Int(static_cast<long>(trees)) * binary_arrangements(trees, leaves));
        }
    }
    // a forest of k trees splits as first tree plus a forest of k - 1
    for (int k = 2; k <= 6; ++k) {
        for (int n = k; n <= 50; ++n) {
            Int sum(0);
            for (int m = 1; m <= n - k + 1; ++m)
                sum += full_binary_forests(1, m) * full_binary_forests(k - 1, n - m);
            CHECK(full_binary_forests(k, n) == sum);
        }
    }
}

TEST_CASE("count oracle scope") {
    CHECK_NOTHROW(CountOracle(uniform4(), fam_0_23()));
    // degree 3 would be uncounted: size under the conditioning is unbounded
    CHECK_THROWS_AS(CountOracle(uniform4(), SetFamily{{IntSet::single(0), IntSet::single(2)}}),
                    PreconditionError);
    const CountOracle oracle(uniform4(), fam_0_23());
    CHECK(oracle.pass_mass() == Rat(1, 4));
    CHECK(oracle.reduced().at(0) == Rat(1, 3));
    CHECK(oracle.reduced().at(1) == Rat(0));
    CHECK(oracle.reduced().at(2) == Rat(1, 3));
    CHECK(oracle.reduced().at(3) == Rat(1, 3));
}

TEST_CASE("achievable count vectors form a window") {
    CountOracle oracle(uniform4(), fam_0_23());
    for (long long n2 = 1; n2 <= 4; ++n2) {
        for (long long n1 = 0; n1 <= 2 * n2 + 3; ++n1) {
            const bool window = n1 >= n2 + 1 && n1 <= 2 * n2 + 1;
            CHECK(oracle.achievable({n1, n2}) == window);
            if (n1 + n2 <= 10) CHECK((oracle.count_prob({n1, n2}) > 0) == window);
        }
    }
    CHECK(oracle.achievable({1, 0}));
    CHECK_FALSE(oracle.achievable({0, 1}));
    CHECK_THROWS_AS(oracle.achievable({1}), PreconditionError);
}

TEST_CASE("count probabilities against forward enumeration") {
    const PmfQ p = uniform4();
    {
        CountOracle oracle(p, fam_0_23());
        const FamilyView& v = oracle.view();
        for (long long n2 = 1; n2 <= 3; ++n2) {
            for (long long n1 = n2 + 1; n1 <= 2 * n2 + 1; ++n1) {
                CAPTURE(n1);
                CAPTURE(n2);
                CHECK(oracle.count_prob({n1, n2}) == enum_forest_prob(p, v, {n1, n2}, 1));
                for (int w = 1; w <= 3; ++w) {
                    const Rat lib = oracle.forest_prob({n1, n2}, w);
                    CHECK(lib == enum_forest_prob(p, v, {n1, n2}, w));
                }
            }
        }
        CHECK(oracle.count_prob({1, 0}) == enum_forest_prob(p, v, {1, 0}, 1));
    }
    {
        // no pass-through degree: every vertex is counted
        CountOracle oracle(p, SetFamily{{IntSet::finite({0, 1}), IntSet::finite({2, 3})}});
        const FamilyView& v = oracle.view();
        for (long long n2 = 1; n2 <= 3; ++n2) {
            for (long long n1 = 1; n1 <= 7; ++n1) {
                if (!oracle.achievable({n1, n2})) continue;
                CHECK(oracle.count_prob({n1, n2}) == enum_forest_prob(p, v, {n1, n2}, 1));
            }
        }
    }
    {
        // single class over the whole binary support
        const PmfQ b = binary();
        CountOracle oracle(b, fam_02());
        const FamilyView& v = oracle.view();
        for (long long n = 1; n <= 11; n += 2)
            CHECK(oracle.count_prob({n}) == enum_forest_prob(b, v, {n}, 1));
        CHECK(oracle.count_prob({4}) == Rat(0));
    }
}

TEST_CASE("production convolution path matches the reference recursion") {
    CountOracle oracle(uniform4(), fam_0_23());
    for (long long n2 = 0; n2 <= 4; ++n2) {
        for (long long n1 = 0; n1 <= 9; ++n1) {
            for (long long w = 1; w <= 3; ++w) {
                if (!oracle.forest_achievable({n1, n2}, w)) continue;
                CAPTURE(n1);
                CAPTURE(n2);
                CAPTURE(w);
                CHECK(oracle.forest_prob({n1, n2}, w) == oracle.forest_prob_dp({n1, n2}, w));
            }
        }
    }
    CHECK_THROWS_AS(oracle.forest_prob_dp({50, 25}, 1), PreconditionError);
}

TEST_CASE("budget guards") {
    CountOracle tight(uniform4(), fam_0_23(), 10);
    CHECK_THROWS_AS(tight.count_prob({8, 4}), PreconditionError);
    CHECK_NOTHROW(tight.count_prob({4, 2}));

    CountOracle bin(binary(), fam_02());
    CHECK_THROWS_AS(bin.count_prob({250001}), PreconditionError);

    const CondensationFamily cf = make_condensation(0.72, 0.08, 0.5);
    CountOracle cond(cf.pmf_exact(), cf.family());
    CHECK_THROWS_AS(cond.count_prob({141, 70}), PreconditionError);
}

TEST_CASE("root degree law under the conditioning") {
    const PmfQ p = uniform4();
    CountOracle oracle(p, fam_0_23());
    const FamilyView& v = oracle.view();
    const std::vector<long long> n{4, 2};

    // forward enumeration: the root cannot carry a chain above itself
    std::map<int, Rat> acc;
    Rat total(0);
    each_forest({0, 2, 3}, 1, 6, [&](const OrderedTree& t) {
        std::vector<long long> counts(2, 0);
        Rat weight(1);
        for (int d : t) {
            ++counts[static_cast<std::size_t>(class_of_degree(v, d) - 1)];
            weight *= p.at(d);
        }
        if (counts != n) return;
        acc[t[0]] += weight;
        total += weight;
    });

    const std::map<int, Rat> law = oracle.root_law(n);
    const Rat pass = p.at(1);
    REQUIRE(law.count(1) == 1);
    CHECK(law.at(1) == pass);
    Rat mass(0);
    for (const auto& [d, pr] : law) mass += pr;
    CHECK(mass == Rat(1));
    for (const auto& [d, w] : acc) {
        REQUIRE(law.count(d) == 1);
        CHECK(law.at(d) == (Rat(1) - pass) * w / total);
    }
}

TEST_CASE("truncated conditioned law against exhaustive enumeration") {
    const PmfQ p = uniform4();
    const SetFamily f{{IntSet::finite({0, 1}), IntSet::finite({2, 3})}};
    CountOracle oracle(p, f);
    const FamilyView& v = oracle.view();
    const std::vector<long long> n{4, 2};

    std::map<OrderedTree, Rat> dist[4];
    Rat total(0);
    each_forest({0, 1, 2, 3}, 1, 6, [&](const OrderedTree& t) {
        std::vector<long long> counts(2, 0);
        Rat weight(1);
        for (int d : t) {
            ++counts[static_cast<std::size_t>(class_of_degree(v, d) - 1)];
            weight *= p.at(d);
        }
        if (counts != n) return;
        total += weight;
        for (int h = 0; h <= 3; ++h) dist[h][truncate_tree(t, h)] += weight;
    });
    REQUIRE(total > 0);

    for (int h = 0; h <= 3; ++h) {
        CAPTURE(h);
        const auto lib = oracle.truncated_law(n, h);
        REQUIRE(lib.size() == dist[h].size());
        Rat mass(0);
        for (const auto& [shape, pr] : lib) {
            REQUIRE(dist[h].count(shape) == 1);
            CHECK(pr == dist[h].at(shape) / total);
            mass += pr;
        }
        CHECK(mass == Rat(1));
    }

    // with a pass-through degree the law still sums to one exactly, and its
    // depth-1 marginal is the root law
    CountOracle chain(p, fam_0_23());
    const auto t1 = chain.truncated_law({4, 2}, 1);
    Rat mass(0);
    for (const auto& [shape, pr] : t1) mass += pr;
    CHECK(mass == Rat(1));
    const auto rl = chain.root_law({4, 2});
    for (const auto& [shape, pr] : t1) {
        REQUIRE(rl.count(shape[0]) == 1);
        CHECK(pr == rl.at(shape[0]));
    }
}

TEST_CASE("conditional law over whole trees") {
    const PmfQ p = uniform4();
    {
        const SetFamily f{{IntSet::finite({0, 1}), IntSet::finite({2, 3})}};
        const ConditionalLaw law = conditional_law(p, f, {4, 2}, 12);
        CHECK(law.truncated_mass == Rat(0));
        Rat mass(0);
        CountOracle oracle(p, f);
        const Rat denom = oracle.count_prob({4, 2});
        for (const auto& [t, pr] : law.probs) {
            CHECK(t.size() == 6);
            Rat weight(1);
            for (int d : t) weight *= p.at(d);
            CHECK(pr == weight / denom);
            mass += pr;
        }
        CHECK(mass == Rat(1));
    }
    {
        // chains push some conditional mass past any finite size budget
        const ConditionalLaw small = conditional_law(p, fam_0_23(), {3, 1}, 8);
        const ConditionalLaw large = conditional_law(p, fam_0_23(), {3, 1}, 16);
        CHECK(small.truncated_mass > 0);
        CHECK(large.truncated_mass > 0);
        CHECK(large.truncated_mass < small.truncated_mass);
        CountOracle oracle(p, fam_0_23());
        const Rat denom = oracle.count_prob({3, 1});
        // the pure reduced tree [3,0,0,0] carries weight p(3) p(0)^3
        const OrderedTree reduced{3, 0, 0, 0};
        REQUIRE(large.probs.count(reduced) == 1);
        CHECK(large.probs.at(reduced) == p.at(3) * p.at(0) * p.at(0) * p.at(0) / denom);
        // one chain vertex above the root
        const OrderedTree chain{1, 3, 0, 0, 0};
        REQUIRE(large.probs.count(chain) == 1);
        CHECK(large.probs.at(chain) == p.at(1) * large.probs.at(reduced));
    }
}

TEST_CASE("enumeration helpers") {
    std::size_t trees = 0;
    for_each_tree(IntSet::finite({0, 2}), 7, [&](const OrderedTree& t) {
        CHECK(is_valid_tree(t));
        ++trees;
    });
    CHECK(trees == 9);  // sizes 1, 3, 5, 7: 1 + 1 + 2 + 5

    std::size_t forests = 0;
    for_each_forest(2, IntSet::finite({0, 2}), 6, [&](const std::vector<int>& w) {
        CHECK(w.size() % 2 == 0);
        ++forests;
    });
    std::size_t expected = 0;
    for (int size = 2; size <= 6; ++size)
        each_forest({0, 2}, 2, size, [&](const OrderedTree&) { ++expected; });
    CHECK(forests == expected);

    std::map<OrderedTree, int> shapes;
    for_each_truncation_shape(IntSet::finite({0, 1, 2}), 1, 2, 100,
                              [&](const OrderedTree& s, int stubs) { shapes[s] = stubs; });
    REQUIRE(shapes.size() == 3);
    CHECK(shapes.at({0}) == 0);
    CHECK(shapes.at({1, 0}) == 1);
    CHECK(shapes.at({2, 0, 0}) == 2);
    CHECK_THROWS_AS(
        for_each_truncation_shape(IntSet::finite({0, 1, 2}), 3, 2, 2,
                                  [](const OrderedTree&, int) {}),
        PreconditionError);
}

TEST_CASE("conditioned-law equivalence oracle") {
    const PmfQ p = uniform4();
    const FamilyView v = resolve_family(p, fam_0_23());

    // a member of the tilted family conditions identically to p
    const PmfQ tilt = dir_pmf(p, v, Theta<Rat>::finite(Rat(1, 2)),
                              {Rat(6, 11), Rat(5, 11)});
    CHECK(tilt.is_probability());
    const OracleVerdict same = compatibility_oracle(p, tilt, fam_0_23(), 9);
    CHECK(same.equivalent);
    CHECK(same.trees > 100);
    CHECK(same.classes >= 8);
    CHECK_FALSE(same.counterexample.has_value());

    // same support, valid probability law, but not a tilt
    const PmfQ off({{0, Rat(2, 5)}, {1, Rat(3, 10)}, {2, Rat(3, 20)}, {3, Rat(3, 20)}});
    REQUIRE(off.is_probability());
    const OracleVerdict diff = compatibility_oracle(p, off, fam_0_23(), 9);
    CHECK_FALSE(diff.equivalent);
    REQUIRE(diff.counterexample.has_value());
    CHECK(is_valid_tree(*diff.counterexample));
    CHECK_FALSE(diff.detail.empty());

    CHECK(compatibility_oracle(p, p, fam_0_23(), 7).equivalent);
}

TEST_CASE("size-biased spine law") {
    const PmfQ b = binary();
    const auto h1 = spine_truncated_law(b, 1, 2);
    REQUIRE(h1.size() == 2);
    CHECK(h1.at({1, 0}) == Rat(1, 2));
    CHECK(h1.at({2, 0, 0}) == Rat(1, 2));

    const auto h2 = spine_truncated_law(b, 2, 2);
    Rat mass(0);
    for (const auto& [t, pr] : h2) {
        CHECK(tree_height(t) <= 2);
        mass += pr;
    }
    CHECK(mass == Rat(1));

    // depth-1 marginal of the depth-2 law is the depth-1 law
    std::map<OrderedTree, Rat> marg;
    for (const auto& [t, pr] : h2) marg[truncate_tree(t, 1)] += pr;
    REQUIRE(marg.size() == h1.size());
    for (const auto& [t, pr] : h1) CHECK(marg.at(t) == pr);

    const PmfQ sub({{0, Rat(1, 2)}, {1, Rat(1, 2)}});
    CHECK_THROWS_AS(spine_truncated_law(sub, 1, 1), PreconditionError);
}

TEST_CASE("total variation") {
    const std::map<OrderedTree, double> a{{{0}, 0.5}, {{1, 0}, 0.5}};
    const std::map<OrderedTree, double> b{{{0}, 0.25}, {{1, 0}, 0.75}};
    CHECK(total_variation(a, b) == doctest::Approx(0.25));
    CHECK(total_variation(a, a) == doctest::Approx(0.0));

    const std::map<OrderedTree, double> c{{{2, 0, 0}, 1.0}};
    CHECK(total_variation(a, c) == doctest::Approx(1.0));

    const std::map<OrderedTree, Rat> qa{{{0}, Rat(1, 2)}, {{1, 0}, Rat(1, 2)}};
    const std::map<OrderedTree, Rat> qb{{{0}, Rat(1, 4)}, {{1, 0}, Rat(3, 4)}};
    CHECK(total_variation(qa, qb) == Rat(1, 4));

    const std::map<int, double> ia{{0, 0.5}, {2, 0.5}};
    const std::map<int, double> ib{{0, 0.4}, {1, 0.2}, {2, 0.4}};
    CHECK(total_variation(ia, ib) == doctest::Approx(0.2));
}

TEST_CASE("distance to the local limit shrinks along the schedule") {
    const PmfQ b = binary();
    {
        // conditioning on the {0,2}-count: the depth-1 law is already exact
        std::vector<double> tvs;
        for (long long n : {3, 9, 21}) {
            const DistanceReport r = local_limit_distance(b, fam_02(), {n}, 2);
            CHECK(r.exact);
            tvs.push_back(r.tv);
        }
        CHECK(tvs[1] < tvs[0]);
        CHECK(tvs[2] < tvs[1]);
        CHECK(tvs[2] < 0.1);
    }
    {
        // conditioning on the total size
        const SetFamily whole{{IntSet::finite({0, 1, 2})}};
        std::vector<double> tvs;
        for (long long n : {5, 11, 21}) {
            const DistanceReport r = local_limit_distance(b, whole, {n}, 1);
            CHECK(r.exact);
            tvs.push_back(r.tv);
        }
        CHECK(tvs[1] < tvs[0]);
        CHECK(tvs[2] < tvs[1]);
        CHECK(tvs[2] < 0.1);
    }
}

TEST_CASE("condensation family constants") {
    const CondensationFamily cf = make_condensation(0.72, 0.08, 0.5);
    CHECK(cf.a == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(cf.c == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(cf.pmf().is_probability());
    CHECK(cf.pmf_exact().total_mass() == Rat(1));
    CHECK(rat_to_double(cf.pmf_exact().mean()) ==
          doctest::Approx(67.0 / 75.0).epsilon(1e-14));  // subcritical

    const FamilyView v = resolve_family(cf.pmf_exact(), cf.family());
    CHECK(v.a0.is_empty());
    CHECK(v.a(1).same_set(IntSet::finite({0, 2})));
    CHECK_FALSE(v.a(2).is_finite());

    CHECK(condensation_c0(1.5, 0.1) == doctest::Approx(8.1 / 3.7).epsilon(1e-12));
    CHECK(condensation_floor(1.5, 0.1, 1.2) ==
          doctest::Approx(0.1 / (1.0 + 2.0 * (8.1 / 3.7) * 1.44)).epsilon(1e-12));
    CHECK_THROWS_AS(make_condensation(0.72, 0.08, 1.0), ConfigError);
    CHECK_THROWS_AS(make_condensation(0.9, 0.1, 0.5), ConfigError);  // no tail mass left
    CHECK_THROWS_AS(condensation_ratio(cf, 10, 0.1), PreconditionError);
    CHECK_THROWS_AS(condensation_ratio(cf, 9, 1.5), PreconditionError);
}

TEST_CASE("heavy-root conditional mass against the exact oracle") {
    const CondensationFamily cf = make_condensation(0.72, 0.08, 0.5);
    CountOracle oracle(cf.pmf_exact(), cf.family());
    const FamilyView& v = oracle.view();
    // under counts (n, 1) the heavy root is the unique odd-degree vertex,
    // placed at the root with degree at least eps n
    for (double eps : {0.1, 0.4}) {
        for (long long n : {5, 7, 9, 11, 13}) {
            CAPTURE(eps);
            CAPTURE(n);
            const CondensationPoint pt = condensation_ratio(cf, n, eps);
            CHECK(pt.n == n);
            CHECK(pt.ratio == doctest::Approx(std::exp(pt.log_b1 - pt.log_b2)).epsilon(1e-12));

            const auto law = oracle.root_law({n, 1});
            double heavy = 0.0;
            for (const auto& [d, pr] : law)
                if (class_of_degree(v, d) == 2 &&
                    static_cast<double>(d) >= eps * static_cast<double>(n))
                    heavy += rat_to_double(pr);
            CHECK(pt.ratio == doctest::Approx(heavy).epsilon(1e-9));

            const double full = rat_to_double(oracle.count_prob({n, 1}));
            CHECK(std::exp(pt.log_b2) == doctest::Approx(full).epsilon(1e-9));
        }
    }
}

TEST_CASE("ratio series under a count shift") {
    const PmfQ b = binary();
    CountOracle oracle(b, fam_02());
    const std::vector<std::vector<long long>> ns{{3}, {5}, {7}, {9}};
    const auto pts = strong_ratio_series(b, fam_02(), ns, {2});
    REQUIRE(pts.size() == 4);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].n == ns[i]);
        CHECK(pts[i].base_achievable);
        CHECK(pts[i].shifted_achievable);
        const double expect = rat_to_double(oracle.count_prob({ns[i][0] + 2})) /
                              rat_to_double(oracle.count_prob({ns[i][0]}));
        CHECK(pts[i].ratio == doctest::Approx(expect).epsilon(1e-12));
    }
    // ratios of a periodic instance rise toward one along the even shift
    CHECK(pts[3].ratio > pts[0].ratio);

    // an odd shift leaves the achievable lattice
    const auto odd = strong_ratio_series(b, fam_02(), {{5}}, {1});
    REQUIRE(odd.size() == 1);
    CHECK(odd[0].base_achievable);
    CHECK_FALSE(odd[0].shifted_achievable);
    CHECK(odd[0].ratio == 0.0);
}
