#include "bgw/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "bgw/errors.hpp"

namespace bgw {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

long long total_of(const std::vector<long long>& n) {
    long long s = 0;
    for (long long x : n) {
        if (x < 0) return -1;
        s += x;
    }
    return s;
}

Int multinomial(long long total, const std::vector<long long>& parts) {
    Int out = 1;
    long long rest = total;
    for (long long p : parts) {
        out *= binomial(static_cast<unsigned long>(rest), static_cast<unsigned long>(p));
        rest -= p;
    }
    return out;
}

Rat make_rat(Int num, Int den) {
    Rat r(std::move(num), std::move(den));
    r.canonicalize();
    return r;
}

}  // namespace

double log_sum_exp(const std::vector<double>& xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        const double term = std::exp(x - m) - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return m + std::log(sum);
}

double log_choose(long long a, long long b) {
    if (a < 0 || b < 0 || b > a) return kNegInf;
    return std::lgamma(static_cast<double>(a) + 1.0) -
           std::lgamma(static_cast<double>(b) + 1.0) -
           std::lgamma(static_cast<double>(a - b) + 1.0);
}

// ---------------------------------------------------------------------------
// CountOracle

CountOracle::CountOracle(PmfQ p, SetFamily f, long long dp_budget)
    : p_(std::move(p)), dp_budget_(dp_budget) {
    view_ = resolve_family(p_, f);
    if (!view_.a0.is_subset_of(IntSet::single(1)))
        throw PreconditionError(
            "exact count law needs every degree outside {1} to belong to a counted class; "
            "uncounted: " + view_.a0.minus(IntSet::single(1)).to_string());
    if (view_.a0.contains(1)) {
        pass_ = p_.at(1);
        if (!(pass_ < 1)) throw PreconditionError("pass-through degree carries all the mass");
        const Rat scale = Rat(1) / (Rat(1) - pass_);
        std::map<int, Rat> table;
        for (const auto& [k, mass] : p_.table())
            if (k != 1) table[k] = mass * scale;
        std::vector<GeomTail<Rat>> tails;
        for (const auto& t : p_.tails()) {
            GeomTail<Rat> g{t.start, t.step, t.coeff * scale, t.ratio};
            if (g.start == 1) {
                g.start += g.step;
            } else if (g.start <= 1 && (1 - g.start) % g.step == 0) {
                // start 0, step 1: peel the atom at 0, restart the tail at 2
                table[0] += g.coeff;
                g.start = 2;
            }
            tails.push_back(g);
        }
        q_ = PmfQ(std::move(table), std::move(tails));
    } else {
        pass_ = 0;
        q_ = p_;
    }
}

bool CountOracle::achievable(const std::vector<long long>& n) const {
    return forest_achievable(n, 1);
}

bool CountOracle::forest_achievable(const std::vector<long long>& n, long long width) const {
    if (static_cast<int>(n.size()) != view_.J)
        throw PreconditionError("count vector needs one entry per class");
    const long long total = total_of(n);
    if (total < 0 || width < 0) return false;
    if (total == 0) return width == 0;
    if (width == 0 || width > total) return false;
    const long long target = total - width;  // total number of children in the forest
    if (target > 1000000) throw PreconditionError("achievability budget exceeded");

    std::vector<char> reach(static_cast<std::size_t>(target) + 1, 0);
    reach[0] = 1;
    for (int j = 1; j <= view_.J; ++j) {
        const long long nj = n[static_cast<std::size_t>(j - 1)];
        if (nj == 0) continue;
        const std::vector<int> degs =
            q_.support().intersect(view_.a(j)).elements_up_to(static_cast<int>(target));
        // sums of nj degrees from this class, then fold into the running set
        std::vector<char> cls(static_cast<std::size_t>(target) + 1, 0);
        cls[0] = 1;
        for (long long t = 0; t < nj; ++t) {
            std::vector<char> next(static_cast<std::size_t>(target) + 1, 0);
            bool any = false;
            for (long long s = 0; s <= target; ++s) {
                if (!cls[static_cast<std::size_t>(s)]) continue;
                for (int d : degs) {
                    if (s + d > target) break;
                    next[static_cast<std::size_t>(s + d)] = 1;
                    any = true;
                }
            }
            if (!any) return false;
            cls.swap(next);
        }
        std::vector<char> folded(static_cast<std::size_t>(target) + 1, 0);
        bool any = false;
        for (long long s = 0; s <= target; ++s) {
            if (!reach[static_cast<std::size_t>(s)]) continue;
            for (long long t = 0; s + t <= target; ++t) {
                if (cls[static_cast<std::size_t>(t)]) {
                    folded[static_cast<std::size_t>(s + t)] = 1;
                    any = true;
                }
            }
        }
        if (!any) return false;
        reach.swap(folded);
    }
    return reach[static_cast<std::size_t>(target)] != 0;
}

CountOracle::ClassRow& CountOracle::class_row(int j, long long steps, long long cap) {
    if (cap > 200000) throw PreconditionError("class sum budget exceeded");
    ClassRow& cr = rows_[j];
    if (cap > cr.cap || steps < cr.steps) {
        cr.cap = std::max(cap, cr.cap);
        cr.steps = 0;
        cr.row.assign(1, Int(1));
        cr.denom = 1;
        cr.denom_pow = 1;
        cr.degs.clear();
        const std::vector<int> degs =
            q_.support().intersect(view_.a(j)).elements_up_to(static_cast<int>(cr.cap));
        for (int d : degs) {
            const Rat w = q_.at(d);
            Int l;
            mpz_lcm(l.get_mpz_t(), cr.denom.get_mpz_t(), w.get_den().get_mpz_t());
            cr.denom = l;
        }
        for (int d : degs) {
            const Rat w = q_.at(d);
            cr.degs.emplace_back(d, Int(w.get_num() * (cr.denom / w.get_den())));
        }
    }
    if (steps > cr.steps && !q_.support().intersect(view_.a(j)).is_finite() && steps > 64)
        throw PreconditionError("convolution budget exceeded for an unbounded class");
    while (cr.steps < steps) {
        const long long max_deg = cr.degs.empty() ? 0 : cr.degs.back().first;
        const long long new_top =
            std::min<long long>(cr.cap, static_cast<long long>(cr.row.size()) - 1 + max_deg);
        std::vector<Int> next(static_cast<std::size_t>(new_top) + 1);
        for (std::size_t s = 0; s < cr.row.size(); ++s) {
            if (cr.row[s] == 0) continue;
            for (const auto& [d, w] : cr.degs) {
                const long long t = static_cast<long long>(s) + d;
                if (t > new_top) break;
                mpz_addmul(next[static_cast<std::size_t>(t)].get_mpz_t(), cr.row[s].get_mpz_t(),
                           w.get_mpz_t());
            }
        }
        cr.row = std::move(next);
        ++cr.steps;
        cr.denom_pow *= cr.denom;
    }
    return cr;
}

Rat CountOracle::conv_forest_prob(const std::vector<long long>& n, long long width) {
    const long long total = total_of(n);
    if (total < 0 || width < 0) return 0;
    if (total == 0) return width == 0 ? Rat(1) : Rat(0);
    if (width == 0 || width > total) return 0;
    const long long target = total - width;

    std::vector<int> active;
    for (int j = 1; j <= view_.J; ++j)
        if (n[static_cast<std::size_t>(j - 1)] > 0) active.push_back(j);

    if (active.size() == 1) {
        const int j = active.front();
        const ClassRow& cr = class_row(j, n[static_cast<std::size_t>(j - 1)], target);
        if (target >= static_cast<long long>(cr.row.size())) return 0;
        return make_rat(int_of(width) * cr.row[static_cast<std::size_t>(target)],
                        int_of(total) * cr.denom_pow);
    }

    if (total > dp_budget_)
        throw PreconditionError("count budget exceeded for a mixed-class vector; raise the "
                                "oracle budget");

    std::vector<Rat> acc(static_cast<std::size_t>(target) + 1, Rat(0));
    acc[0] = 1;
    for (int j : active) {
        const ClassRow& cr = class_row(j, n[static_cast<std::size_t>(j - 1)], target);
        std::vector<Rat> fj(static_cast<std::size_t>(target) + 1, Rat(0));
        for (std::size_t s = 0; s < cr.row.size() && s <= static_cast<std::size_t>(target); ++s)
            if (cr.row[s] != 0) fj[s] = make_rat(cr.row[s], cr.denom_pow);
        std::vector<Rat> folded(static_cast<std::size_t>(target) + 1, Rat(0));
        for (std::size_t s = 0; s <= static_cast<std::size_t>(target); ++s) {
            if (acc[s] == 0) continue;
            for (std::size_t t = 0; s + t <= static_cast<std::size_t>(target); ++t) {
                if (fj[t] == 0) continue;
                folded[s + t] += acc[s] * fj[t];
            }
        }
        acc = std::move(folded);
    }
    std::vector<long long> parts;
    for (int j : active) parts.push_back(n[static_cast<std::size_t>(j - 1)]);
    return make_rat(int_of(width), int_of(total)) * Rat(multinomial(total, parts)) *
           acc[static_cast<std::size_t>(target)];
}

Rat CountOracle::forest_prob(const std::vector<long long>& n, long long width) {
    if (static_cast<int>(n.size()) != view_.J)
        throw PreconditionError("count vector needs one entry per class");
    return conv_forest_prob(n, width);
}

Rat CountOracle::count_prob(const std::vector<long long>& n) {
    return forest_prob(n, 1);
}

Rat CountOracle::dp_rec(const std::vector<long long>& n, long long width) {
    const long long total = total_of(n);
    if (total < 0 || width < 0) return 0;
    if (total == 0) return width == 0 ? Rat(1) : Rat(0);
    if (width == 0 || width > total) return 0;
    const auto key = std::make_pair(n, width);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Rat out = 0;
    for (int d : q_.support().elements_up_to(static_cast<int>(total - width))) {
        const int j = class_of_degree(view_, d);
        std::vector<long long> rest = n;
        if (--rest[static_cast<std::size_t>(j - 1)] < 0) continue;
        out += q_.at(d) * dp_rec(rest, width - 1 + d);
    }
    memo_.emplace(key, out);
    return out;
}

Rat CountOracle::forest_prob_dp(const std::vector<long long>& n, long long width) {
    if (static_cast<int>(n.size()) != view_.J)
        throw PreconditionError("count vector needs one entry per class");
    if (total_of(n) > 60)
        throw PreconditionError("reference recursion is limited to total count 60");
    return dp_rec(n, width);
}

std::map<int, Rat> CountOracle::root_law(const std::vector<long long>& n) {
    const Rat total = count_prob(n);
    if (total == 0) throw PreconditionError("conditioning event has probability zero");
    const long long size = total_of(n);
    std::map<int, Rat> law;
    if (pass_ > 0) law[1] = pass_;
    for (int d : q_.support().elements_up_to(static_cast<int>(size - 1))) {
        const int j = class_of_degree(view_, d);
        std::vector<long long> rest = n;
        if (--rest[static_cast<std::size_t>(j - 1)] < 0) continue;
        const Rat w = p_.at(d) * forest_prob(rest, d);
        if (w > 0) law[d] = w / total;
    }
    return law;
}

std::map<OrderedTree, Rat> CountOracle::truncated_law(const std::vector<long long>& n, int h,
                                                      std::size_t shape_cap) {
    if (h < 0) throw PreconditionError("truncation depth must be nonnegative");
    const Rat total = count_prob(n);
    if (total == 0) throw PreconditionError("conditioning event has probability zero");
    const long long size = total_of(n);
    // every child subtree of a kept vertex consumes at least one count
    const int max_degree = static_cast<int>(std::min<long long>(
        size, std::numeric_limits<int>::max()));

    std::map<OrderedTree, Rat> law;
    for_each_truncation_shape(
        p_.support(), h, max_degree, shape_cap, [&](const OrderedTree& shape, int stubs) {
            const std::vector<int> depths = vertex_depths(shape);
            std::vector<long long> counts(static_cast<std::size_t>(view_.J), 0);
            Rat weight = 1;
            for (std::size_t i = 0; i < shape.size(); ++i) {
                if (depths[i] == h) continue;  // stub
                weight *= p_.at(shape[i]);
                const int j = class_of_degree(view_, shape[i]);
                if (j >= 1) ++counts[static_cast<std::size_t>(j - 1)];
            }
            if (weight == 0) return;
            std::vector<long long> rest(n);
            for (std::size_t j = 0; j < rest.size(); ++j) {
                rest[j] -= counts[j];
                if (rest[j] < 0) return;
            }
            weight *= forest_prob(rest, stubs);
            if (weight > 0) law[shape] = weight / total;
        });
    return law;
}

ConditionalLaw conditional_law(const PmfQ& p, const SetFamily& f,
                               const std::vector<long long>& n, int size_budget) {
    CountOracle oracle(p, f);
    const Rat total = oracle.count_prob(n);
    if (total == 0) throw PreconditionError("conditioning event has probability zero");
    ConditionalLaw out;
    Rat seen = 0;
    for_each_tree(p.support(), size_budget, [&](const OrderedTree& t) {
        if (count_classes(t, oracle.view()) != n) return;
        Rat w = 1;
        for (int d : t) w *= p.at(d);
        seen += w;
        out.probs[t] = w / total;
    });
    out.truncated_mass = (total - seen) / total;
    return out;
}

// ---------------------------------------------------------------------------
// enumeration

namespace {

void forest_rec(const std::vector<int>& degs, int max_vertices,
                const std::function<void(const std::vector<int>&)>& fn, std::vector<int>& seq,
                int open) {
    if (open == 0) {
        fn(seq);
        return;
    }
    const int used = static_cast<int>(seq.size());
    const int dmax = max_vertices - used - open;
    for (int d : degs) {
        if (d > dmax) break;
        seq.push_back(d);
        forest_rec(degs, max_vertices, fn, seq, open - 1 + d);
        seq.pop_back();
    }
}

void shape_rec(const std::vector<int>& degs, int h, std::size_t cap,
               const std::function<void(const OrderedTree&, int)>& fn, OrderedTree& seq,
               std::vector<int>& open, int stubs, std::size_t& emitted) {
    if (open.empty()) {
        if (++emitted > cap) throw PreconditionError("truncation shape budget exceeded");
        fn(seq, stubs);
        return;
    }
    const int depth = open.back();
    open.pop_back();
    if (depth == h) {
        seq.push_back(0);
        shape_rec(degs, h, cap, fn, seq, open, stubs + 1, emitted);
        seq.pop_back();
    } else {
        for (int d : degs) {
            seq.push_back(d);
            for (int i = 0; i < d; ++i) open.push_back(depth + 1);
            shape_rec(degs, h, cap, fn, seq, open, stubs, emitted);
            for (int i = 0; i < d; ++i) open.pop_back();
            seq.pop_back();
        }
    }
    open.push_back(depth);
}

}  // namespace

void for_each_tree(const IntSet& degrees, int max_vertices,
                   const std::function<void(const OrderedTree&)>& fn) {
    for_each_forest(1, degrees, max_vertices, fn);
}

void for_each_forest(int roots, const IntSet& degrees, int max_vertices,
                     const std::function<void(const std::vector<int>&)>& fn) {
    if (roots < 0) throw PreconditionError("forest needs a nonnegative number of roots");
    const std::vector<int> degs = degrees.elements_up_to(max_vertices);
    std::vector<int> seq;
    forest_rec(degs, max_vertices, fn, seq, roots);
}

void for_each_truncation_shape(const IntSet& degrees, int h, int max_degree, std::size_t cap,
                               const std::function<void(const OrderedTree&, int)>& fn) {
    if (h < 0) throw PreconditionError("truncation depth must be nonnegative");
    const std::vector<int> degs = degrees.elements_up_to(max_degree);
    OrderedTree seq;
    std::vector<int> open{0};
    std::size_t emitted = 0;
    shape_rec(degs, h, cap, fn, seq, open, 0, emitted);
}

// ---------------------------------------------------------------------------
// compatibility

OracleVerdict compatibility_oracle(const PmfQ& p, const PmfQ& q, const SetFamily& f,
                                   int bound) {
    OracleVerdict verdict;
    if (!q.support().is_subset_of(p.support())) {
        verdict.equivalent = false;
        verdict.detail = "support of the second law leaves the support of the first";
        return verdict;
    }
    const FamilyView view = resolve_family(p, f);
    std::map<std::vector<long long>, std::pair<Rat, Rat>> anchor;
    for_each_tree(p.support(), bound, [&](const OrderedTree& t) {
        if (!verdict.equivalent) return;
        ++verdict.trees;
        Rat wp = 1;
        Rat wq = 1;
        for (int d : t) {
            wp *= p.at(d);
            wq *= q.at(d);
        }
        const auto key = count_classes(t, view);
        const auto it = anchor.find(key);
        if (it == anchor.end()) {
            anchor.emplace(key, std::make_pair(wp, wq));
            ++verdict.classes;
            return;
        }
        if (wp * it->second.second != wq * it->second.first) {
            verdict.equivalent = false;
            verdict.counterexample = t;
            verdict.detail = "conditional ratio differs within the count class of " +
                             tree_to_string(t);
        }
    });
    if (verdict.equivalent)
        verdict.detail = "all count classes are ratio-consistent (" +
                         std::to_string(verdict.trees) + " trees, " +
                         std::to_string(verdict.classes) + " classes)";
    return verdict;
}

// ---------------------------------------------------------------------------
// binary forest counts

Int full_binary_forests(long long trees, long long leaves) {
    if (trees < 0 || leaves < 0) return 0;
    if (trees == 0) return leaves == 0 ? Int(1) : Int(0);
    if (leaves < trees) return 0;
    // (trees/leaves) C(2 leaves - trees - 1, leaves - 1), always an integer
    const Rat r = Rat(binomial(static_cast<unsigned long>(2 * leaves - trees - 1),
                               static_cast<unsigned long>(leaves - 1))) *
                  make_rat(int_of(trees), int_of(leaves));
    return r.get_num();
}

Int binary_arrangements(long long trees, long long leaves) {
    if (trees < 0 || leaves < 0) return 0;
    if (trees == 0) return leaves == 0 ? Int(1) : Int(0);
    if (leaves < trees) return 0;
    return binomial(static_cast<unsigned long>(2 * leaves - trees),
                    static_cast<unsigned long>(leaves));
}

// ---------------------------------------------------------------------------
// spine truncation law

namespace {

template <class T>
std::map<OrderedTree, T> spine_law_impl(const Pmf<T>& p, int h, int max_degree,
                                        std::size_t cap) {
    using Ops = ScalarOps<T>;
    const GenVal<T> mu = p.gen_fn_deriv(IntSet::all(), Ops::from_int(1));
    if (mu.divergent) throw PreconditionError("spine law needs a finite mean");
    if constexpr (Ops::exact) {
        if (mu.value != 1) throw PreconditionError("spine law needs a critical offspring law");
    } else {
        if (std::abs(Ops::to_double(mu.value) - 1.0) > 1e-9)
            throw PreconditionError("spine law needs a critical offspring law");
    }
    std::map<OrderedTree, T> law;
    for_each_truncation_shape(p.support(), h, max_degree, cap,
                              [&](const OrderedTree& shape, int stubs) {
                                  if (stubs == 0) return;
                                  const std::vector<int> depths = vertex_depths(shape);
                                  T w = Ops::from_int(stubs);
                                  for (std::size_t i = 0; i < shape.size(); ++i) {
                                      if (depths[i] == h) continue;
                                      w = w * p.at(shape[i]);
                                  }
                                  if (w > 0) law[shape] = w;
                              });
    return law;
}

}  // namespace

std::map<OrderedTree, Rat> spine_truncated_law(const PmfQ& p, int h, int max_degree,
                                               std::size_t cap) {
    return spine_law_impl(p, h, max_degree, cap);
}

std::map<OrderedTree, double> spine_truncated_law(const PmfD& p, int h, int max_degree,
                                                  std::size_t cap) {
    return spine_law_impl(p, h, max_degree, cap);
}

// ---------------------------------------------------------------------------
// total variation

namespace {

template <class K, class V>
V tv_impl(const std::map<K, V>& a, const std::map<K, V>& b) {
    V half_diff{};
    V mass_a{};
    V mass_b{};
    for (const auto& [k, v] : a) {
        mass_a += v;
        const auto it = b.find(k);
        const V other = it == b.end() ? V{} : it->second;
        half_diff += v > other ? V(v - other) : V(other - v);
    }
    for (const auto& [k, v] : b) {
        mass_b += v;
        if (a.find(k) == a.end()) half_diff += v;
    }
    V resid_a = ScalarOps<V>::from_int(1) - mass_a;
    V resid_b = ScalarOps<V>::from_int(1) - mass_b;
    if constexpr (!ScalarOps<V>::exact) {
        resid_a = std::max(resid_a, 0.0);
        resid_b = std::max(resid_b, 0.0);
    }
    return (half_diff + resid_a + resid_b) / ScalarOps<V>::from_int(2);
}

}  // namespace

double total_variation(const std::map<OrderedTree, double>& a,
                       const std::map<OrderedTree, double>& b) {
    return tv_impl(a, b);
}

Rat total_variation(const std::map<OrderedTree, Rat>& a, const std::map<OrderedTree, Rat>& b) {
    return tv_impl(a, b);
}

double total_variation(const std::map<int, double>& a, const std::map<int, double>& b) {
    return tv_impl(a, b);
}

std::map<OrderedTree, double> to_double_law(const std::map<OrderedTree, Rat>& m) {
    std::map<OrderedTree, double> out;
    for (const auto& [k, v] : m) out[k] = rat_to_double(v);
    return out;
}

// ---------------------------------------------------------------------------
// condensation family

PmfD CondensationFamily::pmf() const {
    return PmfD({{0, p0}, {2, p2}}, {{3, 2, c, b}});
}

PmfQ CondensationFamily::pmf_exact() const {
    const Rat r0(p0);
    const Rat r2(p2);
    const Rat rb(b);
    const Rat rc = (Rat(1) - r0 - r2) * (Rat(1) - rb * rb) / (rb * rb * rb);
    return PmfQ({{0, r0}, {2, r2}}, {{3, 2, rc, rb}});
}

SetFamily CondensationFamily::family() const {
    return SetFamily{{IntSet::finite({0, 2}), IntSet::progression(3, 2)}};
}

CondensationFamily make_condensation(double p0, double p2, double b) {
    if (!(p0 > 0) || !(p2 > 0) || !(b > 0) || !(b < 1))
        throw ConfigError("condensation family needs p0, p2 > 0 and 0 < b < 1");
    const double c = (1.0 - p0 - p2) * (1.0 - b * b) / (b * b * b);
    if (!(c > 0)) throw ConfigError("condensation family has no mass left for the tail");
    CondensationFamily fam;
    fam.p0 = p0;
    fam.p2 = p2;
    fam.b = b;
    fam.c = c;
    fam.a = std::sqrt(p0 / p2);
    return fam;
}

CondensationPoint condensation_ratio(const CondensationFamily& fam, long long n, double eps) {
    if (n < 3 || n % 2 == 0)
        throw PreconditionError("the count vector (n, 1) needs odd n >= 3");
    if (!(eps > 0) || !(eps < 1)) throw PreconditionError("eps must lie in (0, 1)");
    const double lp0 = std::log(fam.p0);
    const double lp2 = std::log(fam.p2);
    const double lc = std::log(fam.c);
    const double lb = std::log(fam.b);
    std::vector<double> all;
    std::vector<double> heavy;
    for (long long k = 3; k <= n; k += 2) {
        const long long n0 = (n + k) / 2;
        const long long n2 = (n - k) / 2;
        // count mass of root degree k: share k/n of the arrangements
        const double base = log_choose(n, n0) + static_cast<double>(n0) * lp0 +
                            static_cast<double>(n2) * lp2 + lc + static_cast<double>(k) * lb;
        all.push_back(base);
        if (static_cast<double>(k) >= eps * static_cast<double>(n) - 1e-9)
            heavy.push_back(base + std::log(static_cast<double>(k) / static_cast<double>(n)));
    }
    CondensationPoint pt;
    pt.n = n;
    pt.log_b1 = log_sum_exp(heavy);
    pt.log_b2 = log_sum_exp(all);
    pt.ratio = std::exp(pt.log_b1 - pt.log_b2);
    return pt;
}

double condensation_c0(double ab, double eps) {
    const double r = ab * ab / (1.0 + ab * ab);
    const double denom = 2.0 * r - (1.0 + eps);
    if (!(denom > 0))
        throw PreconditionError("heavy-root constant undefined: ab too small for this eps");
    return r * (1.0 - eps) / denom;
}

double condensation_floor(double ab, double eps, double big_m) {
    return eps / (1.0 + 2.0 * condensation_c0(ab, eps) * big_m * big_m);
}

// ---------------------------------------------------------------------------
// strong ratio

std::vector<RatioPoint> strong_ratio_series(const PmfQ& p, const SetFamily& f,
                                            const std::vector<std::vector<long long>>& ns,
                                            const std::vector<long long>& shift) {
    CountOracle oracle(p, f);
    if (static_cast<int>(shift.size()) != oracle.J())
        throw PreconditionError("shift needs one entry per class");
    std::vector<RatioPoint> out;
    for (const auto& n : ns) {
        RatioPoint pt;
        pt.n = n;
        std::vector<long long> shifted(n);
        bool nonneg = true;
        for (std::size_t j = 0; j < shifted.size(); ++j) {
            shifted[j] += shift[j];
            nonneg = nonneg && shifted[j] >= 0;
        }
        pt.base_achievable = oracle.achievable(n);
        pt.shifted_achievable = nonneg && oracle.achievable(shifted);
        if (!pt.base_achievable) {
            pt.ratio = std::numeric_limits<double>::quiet_NaN();
        } else if (!pt.shifted_achievable) {
            pt.ratio = 0.0;
        } else {
            pt.ratio = rat_to_double(oracle.count_prob(shifted) / oracle.count_prob(n));
        }
        out.push_back(std::move(pt));
    }
    return out;
}

// ---------------------------------------------------------------------------
// local limit distance

DistanceReport local_limit_distance(const PmfQ& p_critical, const SetFamily& f,
                                    const std::vector<long long>& n, int h) {
    CountOracle oracle(p_critical, f, 2000);
    const auto cond = oracle.truncated_law(n, h);
    const long long size = total_of(n);
    const int max_degree =
        static_cast<int>(std::min<long long>(size, std::numeric_limits<int>::max()));
    const auto spine = spine_truncated_law(p_critical, h, max_degree);
    DistanceReport rep;
    rep.tv = rat_to_double(total_variation(cond, spine));
    rep.exact = true;
    return rep;
}

// ---------------------------------------------------------------------------
// admissible count-vector sequences (declared alongside the family tools)

namespace {

bool shell_search(const CountOracle& oracle, const std::vector<long long>& target,
                  const std::vector<std::size_t>& pos, int radius_max,
                  std::vector<long long>& found) {
    std::vector<long long> cand(target);
    for (int radius = 0; radius <= radius_max; ++radius) {
        // offset vectors over the positive coordinates with max-norm == radius
        std::vector<long long> off(pos.size(), -radius);
        while (true) {
            long long norm = 0;
            for (long long o : off) norm = std::max(norm, std::llabs(o));
            if (norm == radius) {
                bool ok = true;
                for (std::size_t i = 0; i < pos.size(); ++i) {
                    cand[pos[i]] = target[pos[i]] + off[i];
                    if (cand[pos[i]] < 1) ok = false;
                }
                if (ok && oracle.achievable(cand)) {
                    found = cand;
                    return true;
                }
            }
            std::size_t i = 0;
            while (i < off.size() && off[i] == radius) off[i++] = -radius;
            if (i == off.size()) break;
            ++off[i];
        }
    }
    return false;
}

}  // namespace

std::vector<std::vector<long long>> admissible_sequence(const PmfD& p, const SetFamily& f,
                                                        const std::vector<double>& alpha,
                                                        int count) {
    if (count <= 0) return {};
    std::map<int, Rat> table;
    for (const auto& [k, v] : p.table()) table[k] = Rat(v);
    std::vector<GeomTail<Rat>> tails;
    for (const auto& t : p.tails()) tails.push_back({t.start, t.step, Rat(t.coeff), Rat(t.ratio)});
    CountOracle oracle(PmfQ(std::move(table), std::move(tails)), f);

    const GenericResult gen = is_generic(p, oracle.view(), alpha);
    if (!gen.generic)
        throw PreconditionError("direction has no critical member: " + gen.witness);

    std::vector<std::size_t> pos;
    for (std::size_t j = 0; j < alpha.size(); ++j)
        if (alpha[j] > 0) pos.push_back(j);

    std::vector<std::vector<long long>> out;
    long long size = std::max<long long>(4, 2 * oracle.J());
    int grow_guard = 0;
    while (static_cast<int>(out.size()) < count) {
        std::vector<long long> target(alpha.size(), 0);
        for (std::size_t j : pos)
            target[j] = std::max<long long>(
                1, std::llround(alpha[j] * static_cast<double>(size)));
        std::vector<long long> found;
        if (shell_search(oracle, target, pos, 48, found) &&
            (out.empty() || found != out.back())) {
            out.push_back(std::move(found));
        }
        size = 2 * size + 1;
        if (++grow_guard > 64)
            throw PreconditionError("no achievable count vectors found along this direction");
    }
    return out;
}

}  // namespace bgw
