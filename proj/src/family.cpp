// Direction eligibility, the mean along a tilted family, the critical
// parameter solver and the genericity / aperiodicity decision procedures.

#include "bgw/family.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace bgw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEndpointTol = 1e-12;

bool alpha_is_zero(const std::vector<double>& alpha, int j) {
    return !(alpha[static_cast<std::size_t>(j - 1)] > 0.0);
}

std::string format_double(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

Check is_possible_direction(const FamilyView& v, const std::vector<double>& alpha) {
    if (static_cast<int>(alpha.size()) != v.J)
        return Check::fail("alpha needs one entry per class");
    double sum = 0.0;
    for (double a : alpha) {
        if (a < 0.0) return Check::fail("alpha entries must be nonnegative");
        sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-9) return Check::fail("alpha must sum to 1");
    for (int j = 1; j <= v.J; ++j) {
        const bool zero = alpha_is_zero(alpha, j);
        bool others_zero = true;
        for (int l = 1; l <= v.J; ++l)
            if (l != j && !alpha_is_zero(alpha, l)) others_zero = false;
        if (zero && v.a(j).contains(0))
            return Check::fail("class " + std::to_string(j) +
                               " holds the leaf degree but carries no weight");
        if (!zero && others_zero &&
            v.a0.unite(v.a(j)).is_subset_of(IntSet::finite({0, 1})))
            return Check::fail("all weight on class " + std::to_string(j) +
                               " leaves no branching degree");
    }
    return Check::pass();
}

std::vector<int> positive_classes(const std::vector<double>& alpha) {
    std::vector<int> out;
    for (int j = 1; j <= static_cast<int>(alpha.size()); ++j)
        if (!alpha_is_zero(alpha, j)) out.push_back(j);
    return out;
}

bool theta_identifiable(const FamilyView& v, const std::vector<double>& alpha) {
    if (!v.a0.is_subset_of(IntSet::single(1))) return true;
    for (int j = 1; j <= v.J; ++j) {
        if (alpha_is_zero(alpha, j)) continue;
        const IntSet& a = v.a(j);
        if (!a.is_finite() || *a.min_element() != *a.max_element()) return true;
    }
    return false;
}

double class_log_derivative(const PmfD& p, const IntSet& a, double theta) {
    if (theta == 0.0) {
        const auto mn = a.min_element();
        return mn ? static_cast<double>(*mn) : 0.0;
    }
    const auto g = p.gen_fn(a, theta);
    const auto gd = p.gen_fn_deriv(a, theta);
    if (g.divergent || gd.divergent) return kInf;
    if (!(g.value > 0.0)) return 0.0;
    return theta * gd.value / g.value;
}

double mean_dir(const PmfD& p, const FamilyView& v, const Theta<double>& theta,
                const std::vector<double>& alpha) {
    const double q1 = passthrough_complement(p, v);
    switch (theta.kind) {
        case ThetaKind::Zero: {
            double s = 0.0;
            for (int j = 1; j <= v.J; ++j) {
                if (alpha_is_zero(alpha, j)) continue;
                s += alpha[static_cast<std::size_t>(j - 1)] *
                     static_cast<double>(*v.a(j).min_element());
            }
            return (1.0 - q1) + q1 * s;
        }
        case ThetaKind::Inf: {
            double s = 0.0;
            for (int j = 1; j <= v.J; ++j) {
                if (alpha_is_zero(alpha, j)) continue;
                const auto mx = v.a(j).max_element();
                if (!mx) return kInf;
                s += alpha[static_cast<std::size_t>(j - 1)] * static_cast<double>(*mx);
            }
            return (1.0 - q1) + q1 * s;
        }
        case ThetaKind::Finite: {
            const double th = theta.value;
            if (!(th > 0.0)) return kInf;
            const auto g0 = p.gen_fn(v.a0, th);
            if (g0.divergent || !(g0.value < th)) return kInf;
            const auto gd0 = p.gen_fn_deriv(v.a0, th);
            if (gd0.divergent) return kInf;
            double h = 0.0;
            for (int j = 1; j <= v.J; ++j) {
                if (alpha_is_zero(alpha, j)) continue;
                const double hj = class_log_derivative(p, v.a(j), th);
                if (std::isinf(hj)) return kInf;
                h += alpha[static_cast<std::size_t>(j - 1)] * hj;
            }
            return gd0.value + (th - g0.value) / th * h;
        }
    }
    return kInf;
}

double theta_min(const PmfD& p, const FamilyView& v) {
    if (v.a0.is_empty() || !v.a0.contains(0)) return 0.0;
    // g_{A_0} is convex, exceeds theta at 0 and sits below it at 1, so the
    // smallest root lies in (0, 1) and bisection on the sign works.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto g = p.gen_fn(v.a0, mid);
        const double val = g.divergent ? kInf : g.value;
        if (val > mid)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Supremum of {theta >= 1 : g_{A_0}(theta) < theta}; +infinity if the series
// never catches up with the identity.
double a0_crossing(const PmfD& p, const IntSet& a0) {
    if (a0.is_empty()) return kInf;
    const auto above = [&](double th) {
        const auto g = p.gen_fn(a0, th);
        return g.divergent || g.value >= th;
    };
    double hi;
    const double rho0 = p.radius(a0);
    if (std::isinf(rho0)) {
        const auto mx = a0.max_element();
        if (!mx || *mx <= 1) return kInf;  // at most linear growth
        hi = 2.0;
        int guard = 0;
        while (!above(hi) && ++guard < 2000) hi *= 2.0;
        if (guard >= 2000) return kInf;
    } else {
        hi = rho0;
        if (!above(hi)) return rho0;
    }
    double lo = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (above(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ThetaMax theta_max(const PmfD& p, const FamilyView& v, const std::vector<double>& alpha) {
    double rho_star = kInf;
    for (int j = 1; j <= v.J; ++j)
        if (!alpha_is_zero(alpha, j)) rho_star = std::min(rho_star, p.radius(v.a(j)));
    const double s0 = a0_crossing(p, v.a0);
    const double value = std::min(rho_star, s0);
    if (std::isinf(value)) return {false, 0.0};
    return {true, value};
}

bool zero_in_range(const PmfD& p, const FamilyView& v, const std::vector<double>& alpha) {
    (void)p;
    if (v.a0.contains(0)) return false;
    bool zero_weighted = false;
    int max_min = -1;
    for (int j = 1; j <= v.J; ++j) {
        if (alpha_is_zero(alpha, j)) continue;
        const int mn = *v.a(j).min_element();
        if (mn == 0) zero_weighted = true;
        max_min = std::max(max_min, mn);
    }
    return zero_weighted && max_min > 1;
}

bool inf_in_range(const PmfD& p, const FamilyView& v, const std::vector<double>& alpha) {
    (void)p;
    if (!v.a0.is_subset_of(IntSet::single(1))) return false;
    bool zero_singleton = false;
    int max_max = -1;
    for (int j = 1; j <= v.J; ++j) {
        if (alpha_is_zero(alpha, j)) continue;
        if (!v.a(j).is_finite()) return false;
        if (v.a(j).same_set(IntSet::single(0))) zero_singleton = true;
        max_max = std::max(max_max, *v.a(j).max_element());
    }
    return zero_singleton && max_max > 1;
}

GenericResult is_generic(const PmfD& p, const FamilyView& v, const std::vector<double>& alpha) {
    if (const Check c = is_possible_direction(v, alpha); !c.ok)
        throw PreconditionError("direction rejected: " + c.reason);

    GenericResult r;
    if (!theta_identifiable(v, alpha)) {
        r.constant_mean = true;
        const double mu = mean_dir(p, v, Theta<double>::zero(), alpha);
        r.generic = std::abs(mu - 1.0) <= kEndpointTol;
        r.witness = "family is constant in theta with mean " + format_double(mu);
        return r;
    }

    // Smallest radius among the class series that enter the mean.
    double rho = p.radius(v.a0);
    for (int j = 1; j <= v.J; ++j)
        if (!alpha_is_zero(alpha, j)) rho = std::min(rho, p.radius(v.a(j)));

    // Clause 1: the mean stays below 1 all the way to a finite radius.
    if (!std::isinf(rho)) {
        const auto g0 = p.gen_fn(v.a0, rho);
        const auto gd0 = p.gen_fn_deriv(v.a0, rho);
        bool holds = !g0.divergent && !gd0.divergent && gd0.value <= 1.0 &&
                     g0.value < rho;
        double h = 0.0;
        if (holds) {
            for (int j = 1; j <= v.J; ++j) {
                if (alpha_is_zero(alpha, j)) continue;
                const double hj = class_log_derivative(p, v.a(j), rho);
                if (std::isinf(hj)) {
                    holds = false;
                    break;
                }
                h += alpha[static_cast<std::size_t>(j - 1)] * hj;
            }
        }
        if (holds && h < rho * (1.0 - gd0.value) / (rho - g0.value)) {
            r.generic = false;
            r.clause = 1;
            r.witness = "mean stays below 1 up to the joint radius " + format_double(rho);
            return r;
        }
    }

    // Clause 2: already supercritical at theta = 0.
    if (!v.a0.contains(0)) {
        double s = 0.0;
        for (int j = 1; j <= v.J; ++j) {
            if (alpha_is_zero(alpha, j)) continue;
            s += alpha[static_cast<std::size_t>(j - 1)] *
                 static_cast<double>(*v.a(j).min_element());
        }
        if (s > 1.0 + kEndpointTol) {
            r.generic = false;
            r.clause = 2;
            r.witness = "weighted minimum degree " + format_double(s) + " exceeds 1";
            return r;
        }
    }

    // Clause 3: still subcritical in the theta -> infinity limit.
    if (v.a0.is_subset_of(IntSet::single(1)) && std::isinf(rho)) {
        double s = 0.0;
        bool bounded = true;
        for (int j = 1; j <= v.J; ++j) {
            if (alpha_is_zero(alpha, j)) continue;
            const auto mx = v.a(j).max_element();
            if (!mx) {
                bounded = false;
                break;
            }
            s += alpha[static_cast<std::size_t>(j - 1)] * static_cast<double>(*mx);
        }
        if (bounded && s < 1.0 - kEndpointTol) {
            r.generic = false;
            r.clause = 3;
            r.witness = "weighted maximum degree " + format_double(s) + " stays below 1";
            return r;
        }
    }

    r.generic = true;
    return r;
}

CriticalResult critical_theta(const PmfD& p, const FamilyView& v,
                              const std::vector<double>& alpha, double tol) {
    if (const Check c = is_possible_direction(v, alpha); !c.ok)
        throw PreconditionError("direction rejected: " + c.reason);

    CriticalResult r;
    if (!theta_identifiable(v, alpha)) {
        r.constant_mean = true;
        r.mean_value = mean_dir(p, v, Theta<double>::zero(), alpha);
        r.generic = std::abs(r.mean_value - 1.0) <= kEndpointTol;
        if (r.generic) {
            r.has_theta = true;
            r.theta = Theta<double>::finite(1.0);
            r.detail = "family is constant in theta; every member is critical";
        } else {
            r.detail = "family is constant in theta with mean " + format_double(r.mean_value);
        }
        return r;
    }

    const auto fail_with_clause = [&](const std::string& how) {
        const GenericResult g = is_generic(p, v, alpha);
        r.generic = false;
        r.fail_clause = g.clause;
        r.detail = how;
        if (!g.witness.empty()) r.detail += "; " + g.witness;
        if (g.generic) r.detail += "; warning: decision procedure disagrees";
        return r;
    };

    const double lo = theta_min(p, v);

    if (zero_in_range(p, v, alpha)) {
        const double mu0 = mean_dir(p, v, Theta<double>::zero(), alpha);
        if (std::abs(mu0 - 1.0) <= kEndpointTol) {
            r.generic = true;
            r.has_theta = true;
            r.theta = Theta<double>::zero();
            r.mean_value = mu0;
            r.detail = "critical at the theta = 0 endpoint";
            return r;
        }
        if (mu0 > 1.0) return fail_with_clause("mean exceeds 1 already at theta = 0");
    }

    const ThetaMax tm = theta_max(p, v, alpha);
    const auto mu_at = [&](double th) {
        return mean_dir(p, v, Theta<double>::finite(th), alpha);
    };

    double bracket_lo = lo, bracket_hi = 0.0;
    bool have_bracket = false;

    if (tm.finite) {
        const double hi = tm.value;
        const int kGrid = 256;
        double prev = lo;
        for (int i = 1; i <= kGrid && !have_bracket; ++i) {
            const double frac = (i == kGrid) ? 1.0 - 1e-13 : static_cast<double>(i) / kGrid;
            const double th = lo + (hi - lo) * frac;
            if (mu_at(th) >= 1.0) {
                bracket_lo = prev;
                bracket_hi = th;
                have_bracket = true;
            }
            prev = th;
        }
        if (!have_bracket)
            return fail_with_clause("mean stays below 1 on the whole compatible range");
    } else {
        const double mu_inf = mean_dir(p, v, Theta<double>::inf(), alpha);
        if (std::abs(mu_inf - 1.0) <= kEndpointTol) {
            if (inf_in_range(p, v, alpha)) {
                r.generic = true;
                r.has_theta = true;
                r.theta = Theta<double>::inf();
                r.mean_value = mu_inf;
                r.detail = "critical at the theta = infinity endpoint";
                return r;
            }
            return fail_with_clause("limit mean 1 is not attained at a compatible parameter");
        }
        if (mu_inf < 1.0)
            return fail_with_clause("mean stays below 1 in the theta -> infinity limit");
        double hi = std::max(1.0, 2.0 * std::max(lo, 0.5));
        int guard = 0;
        while (mu_at(hi) < 1.0 && ++guard < 2000) {
            bracket_lo = hi;
            hi *= 2.0;
        }
        if (guard >= 2000)
            return fail_with_clause("mean fails to reach 1 within the search range");
        bracket_hi = hi;
        have_bracket = true;
    }

    // The mean is strictly increasing wherever it is at most 1, so the
    // bracket pins the unique crossing.
    double a = bracket_lo, b = bracket_hi;
    for (int it = 0; it < 300 && b - a > tol * std::max(1.0, a); ++it) {
        const double mid = 0.5 * (a + b);
        if (mu_at(mid) >= 1.0)
            b = mid;
        else
            a = mid;
    }
    const double root = 0.5 * (a + b);
    r.generic = true;
    r.has_theta = true;
    r.theta = Theta<double>::finite(root);
    r.mean_value = mu_at(root);
    r.detail = "mean 1 at theta = " + format_double(root);
    return r;
}

long long direction_lattice_gcd(const FamilyView& v, const std::vector<double>& alpha) {
    long long g = v.a0.is_empty() ? 0 : v.a0.shift_gcd(1);
    for (int j = 1; j <= v.J; ++j) {
        if (alpha_is_zero(alpha, j)) continue;
        g = std::gcd(g, v.a(j).diff_gcd());
    }
    return g;
}

AperiodicResult is_aperiodic(const PmfD& p, const FamilyView& v,
                             const std::vector<double>& alpha) {
    AperiodicResult r;
    const CriticalResult c = critical_theta(p, v, alpha);
    if (!c.generic) {
        r.detail = "no critical parameter: " + c.detail;
        return r;
    }
    if (c.constant_mean) {
        r.theta_ok = true;  // the whole positive axis is compatible
    } else if (c.theta.kind == ThetaKind::Finite && c.theta.value > 0.0) {
        r.theta_ok = true;
    } else {
        r.detail = "critical parameter sits at a degenerate endpoint";
        return r;
    }
    r.gcd = direction_lattice_gcd(v, alpha);
    r.aperiodic = (r.gcd == 1);
    if (!r.aperiodic)
        r.detail = "degree lattice has span " + std::to_string(r.gcd);
    return r;
}

PmfD critical_pmf(const PmfD& p, const FamilyView& v, const std::vector<double>& alpha) {
    const CriticalResult c = critical_theta(p, v, alpha);
    if (!c.generic)
        throw PreconditionError("direction is not generic: " + c.detail);
    return dir_pmf<double>(p, v, c.theta, alpha);
}

std::vector<long long> count_classes(const OrderedTree& t, const FamilyView& v) {
    std::vector<long long> n(static_cast<std::size_t>(v.J), 0);
    for (int deg : t) {
        for (int j = 1; j <= v.J; ++j) {
            if (v.a(j).contains(deg)) {
                ++n[static_cast<std::size_t>(j - 1)];
                break;
            }
        }
    }
    return n;
}

int class_of_degree(const FamilyView& v, int k) {
    for (int j = 1; j <= v.J; ++j)
        if (v.a(j).contains(k)) return j;
    if (v.a0.contains(k)) return 0;
    return -1;
}

}  // namespace bgw
