#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bgw/errors.hpp"
#include "bgw/intset.hpp"
#include "bgw/rational.hpp"

namespace bgw {

// Scalar abstraction so every distribution-level computation runs in either
// exact rational arithmetic or double precision with the same code path.
template <class T>
struct ScalarOps;

template <>
struct ScalarOps<double> {
    static constexpr bool exact = false;
    static double from_rat(const Rat& r) { return rat_to_double(r); }
    static double from_int(long long n) { return static_cast<double>(n); }
    static double pow(double b, long e) { return std::pow(b, static_cast<double>(e)); }
    static double to_double(double x) { return x; }
    // Divergence guard for geometric series at the radius: r*b rounding can
    // land an ulp below 1, which would turn a divergent series into a huge
    // finite number.
    static bool at_least_one(double x) { return x >= 1.0 - 1e-12; }
};

template <>
struct ScalarOps<Rat> {
    static constexpr bool exact = true;
    static Rat from_rat(const Rat& r) { return r; }
    static Rat from_int(long long n) { return Rat(static_cast<long>(n)); }
    static Rat pow(const Rat& b, long e) { return rat_pow(b, static_cast<unsigned long>(e)); }
    static double to_double(const Rat& x) { return rat_to_double(x); }
    static bool at_least_one(const Rat& x) { return x >= 1; }
};

// Value of a series that may diverge; `divergent` true means +infinity.
template <class T>
struct GenVal {
    T value{};
    bool divergent = false;
};

// One geometric piece: mass coeff * ratio^k on {start, start+step, ...}.
template <class T>
struct GeomTail {
    int start = 0;
    int step = 1;
    T coeff{};
    T ratio{};

    IntSet progression() const { return IntSet::progression(start, step); }
};

// Offspring distribution on the nonnegative integers: a finite table of
// atoms plus optionally geometric tails on disjoint arithmetic progressions.
// T is double or Rat; all series the class exposes have closed forms.
template <class T>
class Pmf {
public:
    using Ops = ScalarOps<T>;

    Pmf() = default;
    explicit Pmf(std::map<int, T> table) : Pmf(std::move(table), {}) {}
    Pmf(std::map<int, T> table, std::vector<GeomTail<T>> tails)
        : table_(std::move(table)), tails_(std::move(tails)) {
        validate();
    }

    const std::map<int, T>& table() const { return table_; }
    const std::vector<GeomTail<T>>& tails() const { return tails_; }

    T at(int k) const {
        if (k < 0) return T{};
        if (auto it = table_.find(k); it != table_.end()) return it->second;
        for (const auto& t : tails_) {
            if (k >= t.start && (k - t.start) % t.step == 0)
                return t.coeff * Ops::pow(t.ratio, k);
        }
        return T{};
    }

    IntSet support() const {
        std::vector<int> keys;
        for (const auto& [k, v] : table_) keys.push_back(k);
        IntSet s = IntSet::finite(keys);
        for (const auto& t : tails_) s = s.unite(t.progression());
        return s;
    }

    bool has_tail() const { return !tails_.empty(); }

    T mass(const IntSet& a) const { return gen_fn(a, Ops::from_int(1)).value; }
    T total_mass() const { return mass(IntSet::all()); }

    bool is_probability(double tol = 1e-9) const {
        if constexpr (Ops::exact) {
            return total_mass() == 1;
        } else {
            return std::abs(Ops::to_double(total_mass()) - 1.0) <= tol;
        }
    }

    // Offspring law that is neither empty-by-default nor a deterministic
    // chain: positive chance of no child, positive chance of two or more.
    bool is_nontrivial() const {
        const T p0 = at(0);
        const T p1 = at(1);
        return p0 > 0 && p0 + p1 < 1;
    }

    // Sum over A of p(k) r^k. Diverges only through a tail whose effective
    // ratio r*b reaches 1 on an infinite part of A.
    GenVal<T> gen_fn(const IntSet& a, const T& r) const {
        GenVal<T> out;
        for (const auto& [k, v] : table_) {
            if (a.contains(k)) out.value += v * Ops::pow(r, k);
        }
        for (const auto& t : tails_) {
            const IntSet s = a.intersect(t.progression());
            if (s.is_empty()) continue;
            const T x = r * t.ratio;
            const GenVal<T> g = geom_sum(s, x, /*weight_by_k=*/false);
            if (g.divergent) return {T{}, true};
            out.value += t.coeff * g.value;
        }
        return out;
    }

    // Sum over A of k p(k) r^(k-1), the derivative of gen_fn in r.
    GenVal<T> gen_fn_deriv(const IntSet& a, const T& r) const {
        if (r == T{}) {
            // only the k = 1 term survives at r = 0
            return {a.contains(1) ? at(1) : T{}, false};
        }
        GenVal<T> out;
        for (const auto& [k, v] : table_) {
            if (a.contains(k) && k > 0)
                out.value += Ops::from_int(k) * v * Ops::pow(r, k - 1);
        }
        for (const auto& t : tails_) {
            const IntSet s = a.intersect(t.progression());
            if (s.is_empty()) continue;
            const T x = r * t.ratio;
            const GenVal<T> g = geom_sum(s, x, /*weight_by_k=*/true);
            if (g.divergent) return {T{}, true};
            out.value += t.coeff * g.value / r;
        }
        return out;
    }

    // Mean of k over A (gen_fn_deriv at r = 1); finite for every
    // representable pmf since tail ratios are below one.
    T mean_restricted(const IntSet& a) const { return gen_fn_deriv(a, Ops::from_int(1)).value; }
    T mean() const { return mean_restricted(IntSet::all()); }

    // Radius of convergence of gen_fn(A, .): 1/ratio for the smallest-ratio
    // tail meeting A infinitely often, +infinity otherwise.
    double radius(const IntSet& a) const {
        double rho = std::numeric_limits<double>::infinity();
        for (const auto& t : tails_) {
            if (!a.intersect(t.progression()).is_empty())
                rho = std::min(rho, 1.0 / Ops::to_double(t.ratio));
        }
        return rho;
    }

    // Size-biased law p*(k) = k p(k); requires mean one, and a finite table
    // (k * ratio^k tails are not geometric, hence not representable here).
    Pmf<T> size_biased() const {
        if (has_tail())
            throw PreconditionError("size_biased: geometric tails are not closed under "
                                    "size-biasing; use the dedicated sampler");
        const double mu = Ops::to_double(mean());
        if (std::abs(mu - 1.0) > 1e-9)
            throw PreconditionError("size_biased: defined for critical laws (mean 1), got mean " +
                                    std::to_string(mu));
        std::map<int, T> t;
        for (const auto& [k, v] : table_) {
            if (k > 0) t[k] = Ops::from_int(k) * v;
        }
        return Pmf<T>(std::move(t), {});
    }

    Pmf<double> to_double_pmf() const {
        std::map<int, double> t;
        for (const auto& [k, v] : table_) t[k] = Ops::to_double(v);
        std::vector<GeomTail<double>> ts;
        for (const auto& g : tails_)
            ts.push_back({g.start, g.step, Ops::to_double(g.coeff), Ops::to_double(g.ratio)});
        return Pmf<double>(std::move(t), std::move(ts));
    }

    // Atoms and geometric pieces of the restriction of this pmf to A, with
    // each surviving tail re-anchored so its progression lies inside A.
    struct Decomposition {
        std::vector<std::pair<int, T>> atoms;
        std::vector<GeomTail<T>> tails;
    };
    Decomposition restrict_to(const IntSet& a) const {
        Decomposition d;
        for (const auto& [k, v] : table_)
            if (a.contains(k)) d.atoms.emplace_back(k, v);
        for (const auto& t : tails_) {
            const IntSet s = a.intersect(t.progression());
            if (s.is_empty()) continue;
            const int head = s.head_len();
            const int period = s.period();
            for (int k : s.elements_up_to(head - 1))
                d.atoms.emplace_back(k, t.coeff * Ops::pow(t.ratio, k));
            if (!s.is_finite()) {
                for (int r = 0; r < period; ++r) {
                    const int rep = head + r;
                    if (s.contains(rep)) d.tails.push_back({rep, period, t.coeff, t.ratio});
                }
            }
        }
        return d;
    }

private:
    void validate() const {
        for (const auto& [k, v] : table_) {
            if (k < 0) throw ConfigError("pmf atom at negative value");
            if (!(v > 0)) throw ConfigError("pmf atoms must be positive");
        }
        IntSet seen = IntSet::empty();
        {
            std::vector<int> keys;
            for (const auto& [k, v] : table_) keys.push_back(k);
            seen = IntSet::finite(keys);
        }
        for (const auto& t : tails_) {
            if (t.start < 0 || t.step < 1) throw ConfigError("pmf tail needs start >= 0, step >= 1");
            if (!(t.coeff > 0)) throw ConfigError("pmf tail coefficient must be positive");
            if (!(t.ratio > 0) || !(t.ratio < 1))
                throw ConfigError("pmf tail ratio must lie in (0,1)");
            const IntSet prog = t.progression();
            if (seen.intersects(prog))
                throw ConfigError("pmf tail progression overlaps earlier atoms");
            seen = seen.unite(prog);
        }
    }

    // Sum over S of x^k (or k x^k). S is eventually periodic; the periodic
    // part contributes closed-form geometric blocks per residue class.
    static GenVal<T> geom_sum(const IntSet& s, const T& x, bool weight_by_k) {
        GenVal<T> out;
        const int head = s.head_len();
        for (int k : s.elements_up_to(head - 1)) {
            T term = Ops::pow(x, k);
            if (weight_by_k) term *= Ops::from_int(k);
            out.value += term;
        }
        if (s.is_finite()) {
            // finite remainder beyond head is impossible: periodic part empty
            return out;
        }
        if (Ops::at_least_one(x)) return {T{}, true};
        const int period = s.period();
        const T xp = Ops::pow(x, period);
        const T denom = Ops::from_int(1) - xp;
        for (int r = 0; r < period; ++r) {
            const int f = head + ((r - head) % period + period) % period;
            if (!s.contains(f)) continue;
            const T xf = Ops::pow(x, f);
            if (weight_by_k) {
                // sum_j (f + jP) x^(f+jP) = f x^f / (1-x^P) + P x^(f+P) / (1-x^P)^2
                out.value += Ops::from_int(f) * xf / denom +
                             Ops::from_int(period) * xf * xp / (denom * denom);
            } else {
                out.value += xf / denom;
            }
        }
        return out;
    }

    std::map<int, T> table_;
    std::vector<GeomTail<T>> tails_;
};

using PmfD = Pmf<double>;
using PmfQ = Pmf<Rat>;

}  // namespace bgw
