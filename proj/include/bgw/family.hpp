#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bgw/errors.hpp"
#include "bgw/intset.hpp"
#include "bgw/pmf.hpp"
#include "bgw/tree.hpp"

namespace bgw {

// The classes A_1..A_J used to count vertices by out-degree: pairwise
// disjoint nonempty subsets of the offspring support. A_0 is derived as the
// rest of the support and is the "uncounted" class.
struct SetFamily {
    std::vector<IntSet> sets;  // sets[j-1] = A_j

    int J() const { return static_cast<int>(sets.size()); }

    IntSet union_all() const {
        IntSet u = IntSet::empty();
        for (const auto& s : sets) u = u.unite(s);
        return u;
    }
};

// A_0 plus the classes, resolved against a concrete support.
struct FamilyView {
    IntSet supp;
    IntSet a0;                  // supp minus all classes
    std::vector<IntSet> cls;    // cls[0] = a0, cls[j] = A_j (within the naturals)
    int J = 0;

    const IntSet& a(int j) const { return cls[static_cast<std::size_t>(j)]; }
};

inline FamilyView resolve_family(const IntSet& supp, const SetFamily& f) {
    FamilyView v;
    v.supp = supp;
    v.J = f.J();
    if (v.J == 0) throw ConfigError("set family needs at least one class");
    IntSet seen = IntSet::empty();
    for (int j = 1; j <= v.J; ++j) {
        const IntSet& a = f.sets[static_cast<std::size_t>(j - 1)];
        if (a.is_empty()) throw ConfigError("class " + std::to_string(j) + " is empty");
        if (!a.is_subset_of(supp))
            throw ConfigError("class " + std::to_string(j) + " leaves the support: " +
                              a.minus(supp).to_string());
        if (seen.intersects(a))
            throw ConfigError("class " + std::to_string(j) + " overlaps an earlier class");
        seen = seen.unite(a);
    }
    v.a0 = supp.minus(seen);
    v.cls.push_back(v.a0);
    for (const auto& s : f.sets) v.cls.push_back(s);
    return v;
}

template <class T>
FamilyView resolve_family(const Pmf<T>& p, const SetFamily& f) {
    return resolve_family(p.support(), f);
}

// ---------------------------------------------------------------------------
// Tilt parameters (theta, beta)

enum class ThetaKind { Zero, Finite, Inf };

template <class T>
struct Theta {
    ThetaKind kind = ThetaKind::Finite;
    T value{};

    static Theta zero() { return {ThetaKind::Zero, T{}}; }
    static Theta inf() { return {ThetaKind::Inf, T{}}; }
    static Theta finite(T v) { return {ThetaKind::Finite, std::move(v)}; }

    bool is_finite_positive() const { return kind == ThetaKind::Finite; }
};

template <class T>
struct TiltParam {
    Theta<T> theta;
    std::vector<T> beta;  // beta_1..beta_J, nonnegative
};

struct Check {
    bool ok = true;
    std::string reason;

    static Check fail(std::string r) { return {false, std::move(r)}; }
    static Check pass() { return {}; }
};

// beta_0 is not free: theta^{-1} for finite theta, p(1) 1{1 in A_0} at the
// degenerate endpoints.
template <class T>
T derived_beta0(const Pmf<T>& p, const FamilyView& v, const Theta<T>& theta) {
    if (theta.kind == ThetaKind::Finite) {
        if (!(theta.value > 0)) throw PreconditionError("finite theta must be positive");
        return ScalarOps<T>::from_int(1) / theta.value;
    }
    return v.a0.contains(1) ? p.at(1) : T{};
}

// Membership of (theta, beta) in the admissible tilt-parameter set: the
// normalization identity for finite theta, the simplex identity plus the
// structural support conditions at the endpoints.
template <class T>
Check tilt_param_valid(const Pmf<T>& p, const FamilyView& v, const TiltParam<T>& par) {
    using Ops = ScalarOps<T>;
    if (static_cast<int>(par.beta.size()) != v.J)
        return Check::fail("beta needs one entry per class");
    for (const auto& b : par.beta)
        if (b < 0) return Check::fail("beta entries must be nonnegative");

    const auto close_to_one = [](const T& x) {
        if constexpr (Ops::exact)
            return x == 1;
        else
            return std::abs(Ops::to_double(x) - 1.0) <= 1e-9;
    };

    switch (par.theta.kind) {
        case ThetaKind::Finite: {
            if (!(par.theta.value > 0)) return Check::fail("finite theta must be positive");
            T lhs = T{};
            if (!v.a0.is_empty()) {
                const auto g0 = p.gen_fn(v.a0, par.theta.value);
                if (g0.divergent) return Check::fail("series over A_0 diverges at theta");
                lhs += g0.value / par.theta.value;
            }
            for (int j = 1; j <= v.J; ++j) {
                const T& bj = par.beta[static_cast<std::size_t>(j - 1)];
                if (bj == 0) continue;
                const auto gj = p.gen_fn(v.a(j), par.theta.value);
                if (gj.divergent)
                    return Check::fail("series over class " + std::to_string(j) +
                                       " diverges at theta");
                lhs += bj * gj.value;
            }
            if (!close_to_one(lhs))
                return Check::fail("normalization sum is " + std::to_string(Ops::to_double(lhs)) +
                                   ", expected 1");
            return Check::pass();
        }
        case ThetaKind::Zero: {
            if (v.a0.contains(0)) return Check::fail("theta = 0 needs 0 outside A_0");
            T lhs = derived_beta0(p, v, par.theta);
            for (const auto& b : par.beta) lhs += b;
            if (!close_to_one(lhs)) return Check::fail("endpoint weights must sum to 1");
            return Check::pass();
        }
        case ThetaKind::Inf: {
            if (!v.a0.is_subset_of(IntSet::finite({0, 1})))
                return Check::fail("theta = infinity needs A_0 inside {0,1}");
            for (int j = 1; j <= v.J; ++j) {
                if (par.beta[static_cast<std::size_t>(j - 1)] > 0 && !v.a(j).is_finite())
                    return Check::fail("theta = infinity needs bounded classes with weight");
            }
            T lhs = derived_beta0(p, v, par.theta);
            for (const auto& b : par.beta) lhs += b;
            if (!close_to_one(lhs)) return Check::fail("endpoint weights must sum to 1");
            return Check::pass();
        }
    }
    return Check::fail("unreachable");
}

// The conditioning event {L_A = n} can carry positive probability for
// arbitrarily large |n| only if the tilted law can actually produce both
// leaves and branching. These are the support-level conditions for that.
template <class T>
Check is_compatible_param(const Pmf<T>& p, const FamilyView& v, const TiltParam<T>& par) {
    const Check basic = tilt_param_valid(p, v, par);
    if (!basic.ok) return basic;

    IntSet weighted = v.a0;  // classes that the tilt keeps alive
    for (int j = 1; j <= v.J; ++j)
        if (par.beta[static_cast<std::size_t>(j - 1)] > 0) weighted = weighted.unite(v.a(j));

    switch (par.theta.kind) {
        case ThetaKind::Finite: {
            if (!weighted.contains(0))
                return Check::fail("no leaf degree carries weight: trees cannot terminate");
            const IntSet branching = weighted.minus(IntSet::finite({0, 1}));
            if (!(p.mass(branching) > 0))
                return Check::fail("no branching degree carries weight: trees are chains");
            return Check::pass();
        }
        case ThetaKind::Zero: {
            bool zero_in_weighted_class = false;
            int max_min = -1;
            for (int j = 1; j <= v.J; ++j) {
                if (par.beta[static_cast<std::size_t>(j - 1)] == 0) continue;
                const auto mn = v.a(j).min_element();
                if (mn == 0) zero_in_weighted_class = true;
                max_min = std::max(max_min, *mn);
            }
            if (!zero_in_weighted_class)
                return Check::fail("theta = 0 needs a weighted class containing 0");
            if (max_min <= 1)
                return Check::fail("theta = 0 needs a weighted class with minimum above 1");
            return Check::pass();
        }
        case ThetaKind::Inf: {
            bool zero_singleton = false;
            int max_max = -1;
            for (int j = 1; j <= v.J; ++j) {
                if (par.beta[static_cast<std::size_t>(j - 1)] == 0) continue;
                if (v.a(j).same_set(IntSet::single(0))) zero_singleton = true;
                const auto mx = v.a(j).max_element();
                if (!mx) return Check::fail("theta = infinity needs bounded weighted classes");
                max_max = std::max(max_max, *mx);
            }
            if (!v.a0.is_subset_of(IntSet::single(1)))
                return Check::fail("theta = infinity needs A_0 inside {1}");
            if (!zero_singleton)
                return Check::fail("theta = infinity needs the weighted class {0}");
            if (max_max <= 1)
                return Check::fail("theta = infinity needs a weighted class with maximum above 1");
            return Check::pass();
        }
    }
    return Check::fail("unreachable");
}

// The tilted offspring law. Finite theta scales class j by beta_j theta^k;
// the endpoints concentrate each weighted class on its extreme degree.
template <class T>
Pmf<T> tilt_pmf(const Pmf<T>& p, const FamilyView& v, const TiltParam<T>& par) {
    using Ops = ScalarOps<T>;
    if (const Check c = tilt_param_valid(p, v, par); !c.ok)
        throw PreconditionError("tilt parameter rejected: " + c.reason);

    std::map<int, T> table;
    std::vector<GeomTail<T>> tails;
    const auto add_class = [&](const IntSet& a, const T& weight, const Theta<T>& theta) {
        if (weight == 0 || a.is_empty()) return;
        switch (theta.kind) {
            case ThetaKind::Finite: {
                const auto d = p.restrict_to(a);
                for (const auto& [k, mass] : d.atoms) {
                    const T val = weight * Ops::pow(theta.value, k) * mass;
                    if (val > 0) table[k] += val;
                }
                for (const auto& t : d.tails)
                    tails.push_back({t.start, t.step, weight * t.coeff, theta.value * t.ratio});
                break;
            }
            case ThetaKind::Zero:
                table[*a.min_element()] += weight;
                break;
            case ThetaKind::Inf:
                table[*a.max_element()] += weight;
                break;
        }
    };

    add_class(v.a0, derived_beta0(p, v, par.theta), par.theta);
    for (int j = 1; j <= v.J; ++j)
        add_class(v.a(j), par.beta[static_cast<std::size_t>(j - 1)], par.theta);
    return Pmf<T>(std::move(table), std::move(tails));
}

// ---------------------------------------------------------------------------
// Directions

// Class-mass direction of a law q: alpha_j = q(A_j) / (1 - q(A_0)).
template <class T>
std::vector<T> direction_of(const Pmf<T>& q, const FamilyView& v) {
    const T m0 = q.mass(v.a0);
    const T denom = ScalarOps<T>::from_int(1) - m0;
    if (!(denom > 0))
        throw PreconditionError("direction undefined: all mass sits in the uncounted class");
    std::vector<T> alpha;
    for (int j = 1; j <= v.J; ++j) alpha.push_back(q.mass(v.a(j)) / denom);
    return alpha;
}

// A direction is usable when it is a point of the simplex that is not
// structurally broken: a weightless class holding the only leaves, or a
// full-weight class that together with A_0 cannot branch.
Check is_possible_direction(const FamilyView& v, const std::vector<double>& alpha);

// Indices with positive direction weight.
std::vector<int> positive_classes(const std::vector<double>& alpha);

// Whether distinct theta give distinct tilted laws (equivalently, the mean
// actually varies): A_0 has a degree other than 1, or a weighted class has
// two or more degrees.
bool theta_identifiable(const FamilyView& v, const std::vector<double>& alpha);

// ---------------------------------------------------------------------------
// The one-parameter family along a fixed direction

// q1 = 1 - p(1) 1{1 in A_0}: mass left after the pass-through degree.
template <class T>
T passthrough_complement(const Pmf<T>& p, const FamilyView& v) {
    T q1 = ScalarOps<T>::from_int(1);
    if (v.a0.contains(1)) q1 -= p.at(1);
    return q1;
}

// p_{theta,alpha}: the tilted law with class weights chosen so that the
// counted-class mass splits as alpha. Throws when theta is outside the
// compatible range for this direction.
template <class T>
Pmf<T> dir_pmf(const Pmf<T>& p, const FamilyView& v, const Theta<T>& theta,
               const std::vector<T>& alpha) {
    using Ops = ScalarOps<T>;
    if (static_cast<int>(alpha.size()) != v.J)
        throw PreconditionError("alpha needs one entry per class");
    std::map<int, T> table;
    std::vector<GeomTail<T>> tails;

    switch (theta.kind) {
        case ThetaKind::Finite: {
            const T& th = theta.value;
            if (!(th > 0)) throw PreconditionError("finite theta must be positive");
            const auto g0 = p.gen_fn(v.a0, th);
            if (g0.divergent || !(g0.value < th))
                throw PreconditionError("theta outside the compatible range: series over A_0 "
                                        "reaches theta");
            const T spare = th - g0.value;
            // untilted-class part: theta^(k-1) p(k) on A_0
            {
                const auto d = p.restrict_to(v.a0);
                for (const auto& [k, mass] : d.atoms) {
                    const T val = (k == 0) ? T(mass / th) : T(Ops::pow(th, k - 1) * mass);
                    if (val > 0) table[k] += val;
                }
                for (const auto& t : d.tails)
                    tails.push_back({t.start, t.step, t.coeff / th, th * t.ratio});
            }
            for (int j = 1; j <= v.J; ++j) {
                const T& aj = alpha[static_cast<std::size_t>(j - 1)];
                if (aj == 0) continue;
                const auto gj = p.gen_fn(v.a(j), th);
                if (gj.divergent || !(gj.value > 0))
                    throw PreconditionError("theta outside the compatible range for class " +
                                            std::to_string(j));
                const T scale = aj * spare / gj.value;
                const auto d = p.restrict_to(v.a(j));
                for (const auto& [k, mass] : d.atoms) {
                    const T val =
                        (k == 0) ? T(scale * mass / th) : T(scale * Ops::pow(th, k - 1) * mass);
                    if (val > 0) table[k] += val;
                }
                for (const auto& t : d.tails)
                    tails.push_back({t.start, t.step, scale * t.coeff / th, th * t.ratio});
            }
            break;
        }
        case ThetaKind::Zero: {
            if (v.a0.contains(0))
                throw PreconditionError("theta = 0 incompatible: 0 sits in A_0");
            int max_min = -1;
            for (int j = 1; j <= v.J; ++j)
                if (alpha[static_cast<std::size_t>(j - 1)] > 0)
                    max_min = std::max(max_min, *v.a(j).min_element());
            if (max_min <= 1)
                throw PreconditionError("theta = 0 incompatible: no weighted class has its "
                                        "minimum above 1");
            const T q1 = passthrough_complement(p, v);
            if (v.a0.contains(1)) table[1] += p.at(1);
            for (int j = 1; j <= v.J; ++j) {
                const T& aj = alpha[static_cast<std::size_t>(j - 1)];
                if (aj > 0) table[*v.a(j).min_element()] += aj * q1;
            }
            break;
        }
        case ThetaKind::Inf: {
            if (!v.a0.is_subset_of(IntSet::single(1)))
                throw PreconditionError("theta = infinity incompatible: A_0 not inside {1}");
            bool zero_singleton = false;
            int max_max = -1;
            for (int j = 1; j <= v.J; ++j) {
                if (alpha[static_cast<std::size_t>(j - 1)] == 0) continue;
                if (!v.a(j).is_finite())
                    throw PreconditionError("theta = infinity incompatible: weighted class "
                                            "unbounded");
                if (v.a(j).same_set(IntSet::single(0))) zero_singleton = true;
                max_max = std::max(max_max, *v.a(j).max_element());
            }
            if (!zero_singleton || max_max <= 1)
                throw PreconditionError("theta = infinity incompatible: needs the weighted "
                                        "class {0} and a weighted maximum above 1");
            const T q1 = passthrough_complement(p, v);
            if (v.a0.contains(1)) table[1] += p.at(1);
            for (int j = 1; j <= v.J; ++j) {
                const T& aj = alpha[static_cast<std::size_t>(j - 1)];
                if (aj > 0) table[*v.a(j).max_element()] += aj * q1;
            }
            break;
        }
    }
    return Pmf<T>(std::move(table), std::move(tails));
}

// Class weights matching dir_pmf: beta_j = alpha_j (theta - g_{A_0}(theta)) /
// (theta g_{A_j}(theta)).
template <class T>
std::vector<T> beta_of_direction(const Pmf<T>& p, const FamilyView& v, const T& theta,
                                 const std::vector<T>& alpha) {
    const auto g0 = p.gen_fn(v.a0, theta);
    if (g0.divergent || !(g0.value < theta))
        throw PreconditionError("theta outside the compatible range");
    std::vector<T> beta(alpha.size(), T{});
    for (int j = 1; j <= v.J; ++j) {
        const T& aj = alpha[static_cast<std::size_t>(j - 1)];
        if (aj == 0) continue;
        const auto gj = p.gen_fn(v.a(j), theta);
        if (gj.divergent) throw PreconditionError("class series diverges at theta");
        beta[static_cast<std::size_t>(j - 1)] = aj * (theta - g0.value) / (theta * gj.value);
    }
    return beta;
}

// ---------------------------------------------------------------------------
// Mean along the family and the critical parameter (double mode)

// h_j(theta) = theta g'_{A_j}(theta) / g_{A_j}(theta); +infinity past the
// radius. h_j(0) = min A_j.
double class_log_derivative(const PmfD& p, const IntSet& a, double theta);

// Mean of p_{theta,alpha}; +infinity when a needed series diverges or theta
// lies outside the compatible range.
double mean_dir(const PmfD& p, const FamilyView& v, const Theta<double>& theta,
                const std::vector<double>& alpha);

// Smallest root of g_{A_0}(theta) = theta in [0, 1); zero iff 0 is not in A_0.
double theta_min(const PmfD& p, const FamilyView& v);

struct ThetaMax {
    bool finite = true;
    double value = 0.0;
};
// Supremum of the compatible range along direction alpha.
ThetaMax theta_max(const PmfD& p, const FamilyView& v, const std::vector<double>& alpha);

// Whether the degenerate endpoints belong to the compatible range.
bool zero_in_range(const PmfD& p, const FamilyView& v, const std::vector<double>& alpha);
bool inf_in_range(const PmfD& p, const FamilyView& v, const std::vector<double>& alpha);

struct CriticalResult {
    bool generic = false;       // a critical member of the family exists
    bool has_theta = false;
    Theta<double> theta;        // set when generic
    bool constant_mean = false; // family does not vary with theta
    double mean_value = std::numeric_limits<double>::quiet_NaN();
    int fail_clause = 0;        // 1, 2 or 3: which non-genericity clause fired
    std::string detail;
};

// Locates the unique theta with mean 1 along the direction (bisection over
// the monotone sub-critical stretch), recognizing the degenerate endpoints
// and the constant-mean family.
CriticalResult critical_theta(const PmfD& p, const FamilyView& v,
                              const std::vector<double>& alpha, double tol = 1e-12);

struct GenericResult {
    bool generic = false;
    bool constant_mean = false;
    int clause = 0;  // non-genericity clause that fired (1, 2 or 3)
    std::string witness;
};

// Decision procedure for the existence of a critical member, by the closed
// trichotomy (no root finding).
GenericResult is_generic(const PmfD& p, const FamilyView& v, const std::vector<double>& alpha);

struct AperiodicResult {
    bool aperiodic = false;
    long long gcd = 0;        // of the degree-shift lattice generators
    bool theta_ok = false;    // critical parameter exists, finite and positive
    std::string detail;
};

// Aperiodicity of the family in this direction: finite positive critical
// parameter plus the lattice generated by (A_0 - 1) and the within-class
// differences being all of the integers.
AperiodicResult is_aperiodic(const PmfD& p, const FamilyView& v,
                             const std::vector<double>& alpha);

// gcd of the generators of that lattice (0 when the generator set is empty).
long long direction_lattice_gcd(const FamilyView& v, const std::vector<double>& alpha);

// Count vectors n with P(L_A = n) > 0, growing in size, with n/|n| tending
// to alpha and zero entries where alpha vanishes. Deterministic.
std::vector<std::vector<long long>> admissible_sequence(const PmfD& p, const SetFamily& f,
                                                        const std::vector<double>& alpha,
                                                        int count);

// Convenience: the critical tilted law p_alpha for a generic direction.
PmfD critical_pmf(const PmfD& p, const FamilyView& v, const std::vector<double>& alpha);

// Class counts of a tree: (L_{A_1}, ..., L_{A_J}).
std::vector<long long> count_classes(const OrderedTree& t, const FamilyView& v);
// Index of the class containing degree k (0 for A_0); -1 if k is outside
// the support partition entirely.
int class_of_degree(const FamilyView& v, int k);

}  // namespace bgw
