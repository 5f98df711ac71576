#include "bgw/multitype.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "bgw/errors.hpp"

namespace bgw {

// ---------------------------------------------------------------------------
// Collapse onto the positively-typed vertices

namespace {

int mrca(const std::vector<int>& parent, const std::vector<int>& depth, int a, int b) {
    while (depth[static_cast<std::size_t>(a)] > depth[static_cast<std::size_t>(b)])
        a = parent[static_cast<std::size_t>(a)];
    while (depth[static_cast<std::size_t>(b)] > depth[static_cast<std::size_t>(a)])
        b = parent[static_cast<std::size_t>(b)];
    while (a != b) {
        a = parent[static_cast<std::size_t>(a)];
        b = parent[static_cast<std::size_t>(b)];
    }
    return a;
}

}  // namespace

RizzoloResult rizzolo(const OrderedTree& t, const FamilyView& v) {
    require_valid_tree(t);
    const std::size_t m = t.size();
    std::vector<int> type(m);
    std::vector<std::size_t> listed;  // positively-typed vertices, preorder = lex order
    for (std::size_t i = 0; i < m; ++i) {
        type[i] = class_of_degree(v, t[i]);
        if (type[i] < 0)
            throw ConfigError("degree " + std::to_string(t[i]) +
                              " is outside the family's universe");
        if (type[i] > 0) listed.push_back(i);
    }
    if (listed.empty())
        throw PreconditionError("every vertex is uncounted; nothing to collapse");

    const std::vector<int> parent = parent_indices(t);
    const std::vector<int> depth = vertex_depths(t);
    // next_pos[i]: first vertex at or after i with positive type (m if none).
    std::vector<std::size_t> next_pos(m + 1, m);
    for (std::size_t i = m; i-- > 0;)
        next_pos[i] = type[i] > 0 ? i : next_pos[i + 1];

    const std::size_t n = listed.size();
    std::vector<std::vector<std::size_t>> children(n);
    std::vector<std::size_t> host(m, n);  // original index -> collapsed creation slot
    host[listed[0]] = 0;
    for (std::size_t k = 1; k < n; ++k) {
        const int anc = mrca(parent, depth, static_cast<int>(listed[k - 1]),
                             static_cast<int>(listed[k]));
        const std::size_t attach = next_pos[static_cast<std::size_t>(anc)];
        children[host[attach]].push_back(k);
        host[listed[k]] = k;
    }

    RizzoloResult out;
    out.phi.assign(m, -1);
    out.tree.tree.reserve(n);
    out.tree.types.reserve(n);
    std::vector<std::size_t> stack = {0};
    while (!stack.empty()) {
        const std::size_t c = stack.back();
        stack.pop_back();
        out.phi[listed[c]] = static_cast<int>(out.tree.tree.size());
        out.tree.tree.push_back(static_cast<int>(children[c].size()));
        out.tree.types.push_back(type[listed[c]]);
        for (std::size_t i = children[c].size(); i-- > 0;) stack.push_back(children[c][i]);
    }
    return out;
}

RizzoloResult rizzolo(const OrderedTree& t, const SetFamily& f) {
    require_valid_tree(t);
    IntSet supp = f.union_all();
    supp = supp.unite(IntSet::finite(std::vector<int>(t.begin(), t.end())));
    return rizzolo(t, resolve_family(supp, f));
}

// ---------------------------------------------------------------------------
// MultiOffspring

double survival_probability(const PmfD& p_alpha, const IntSet& a0) {
    if (!a0.contains(0) || !(p_alpha.mass(a0) > 0)) return 1.0;
    // Smallest fixed point of the generating function restricted to A_0,
    // reached by monotone iteration from zero.
    double x = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double nx = p_alpha.gen_fn(a0, x).value;
        if (std::abs(nx - x) <= 1e-15) return 1.0 - nx;
        x = nx;
    }
    return 1.0 - x;
}

MultiOffspring::MultiOffspring(const PmfD& p, const SetFamily& f,
                               const std::vector<double>& alpha) {
    const FamilyView full = resolve_family(p, f);
    if (static_cast<int>(alpha.size()) != full.J)
        throw ConfigError("direction length does not match the class count");
    const CriticalResult c = critical_theta(p, full, alpha);
    if (!c.generic)
        throw PreconditionError("direction is not generic: " + c.detail);
    theta_zero_ = c.theta.kind == ThetaKind::Zero;
    p_alpha_ = dir_pmf<double>(p, full, c.theta, alpha);

    SetFamily kept;
    for (int j = 1; j <= full.J; ++j) {
        if (!(alpha[static_cast<std::size_t>(j - 1)] > 0)) continue;
        kept.sets.push_back(full.a(j).intersect(p_alpha_.support()));
        classes_.push_back(j);
        alpha_star_.push_back(alpha[static_cast<std::size_t>(j - 1)]);
    }
    if (kept.sets.empty()) throw ConfigError("direction has no positive entry");
    view_ = resolve_family(p_alpha_, kept);

    pass0_ = view_.a0.is_empty() ? 0.0 : p_alpha_.mass(view_.a0);
    r_ = survival_probability(p_alpha_, view_.a0);
    for (int j = 1; j <= view_.J; ++j) {
        const auto part = p_alpha_.restrict_to(view_.a(j));
        class_draw_.emplace_back(part.atoms, part.tails);
    }
    if (pass0_ > 0) {
        const auto part = p_alpha_.restrict_to(view_.a0);
        zero_draw_.emplace(part.atoms, part.tails);
    }
}

int MultiOffspring::root_type(RngState& rng) const {
    const double u = rng.next_double();
    double cum = 0.0;
    for (std::size_t j = 0; j + 1 < alpha_star_.size(); ++j) {
        cum += alpha_star_[j];
        if (u < cum) return static_cast<int>(j);
    }
    return static_cast<int>(alpha_star_.size()) - 1;
}

std::vector<long long> MultiOffspring::offspring_sample(int j, RngState& rng,
                                                        long long retry_cap,
                                                        long long step_cap) const {
    const auto it = std::find(classes_.begin(), classes_.end(), j);
    if (it == classes_.end())
        throw PreconditionError("type " + std::to_string(j) +
                                " has zero weight in this direction");
    const std::size_t jj = static_cast<std::size_t>(it - classes_.begin());

    for (long long attempt = 0; attempt < retry_cap; ++attempt) {
        long long carried = 0;
        if (pass0_ > 0) {
            // N - 1 uncounted draws; reject once the walk of (X - 1) dips
            // below zero, which is the event {N > T}.
            const long long steps = static_cast<long long>(rng.geometric_failures(pass0_));
            if (steps > step_cap) continue;
            long long sum = 0;
            bool dipped = false;
            for (long long i = 0; i < steps; ++i) {
                sum += (*zero_draw_)(rng) - 1;
                if (sum < 0) {
                    dipped = true;
                    break;
                }
            }
            if (dipped) continue;
            carried = sum;
        }
        const long long y = class_draw_[jj](rng) + carried;
        const long long z = binomial_draw(y, r_, rng);
        return multinomial_draw(z, alpha_star_, rng);
    }
    throw PreconditionError("offspring sampling exhausted its retry budget");
}

// ---------------------------------------------------------------------------
// Mean matrix and its checks

std::vector<std::vector<double>> mean_matrix(const MultiOffspring& m) {
    const PmfD& p = m.tilted();
    const FamilyView& v = m.view();
    const std::size_t js = m.classes().size();
    const double q0 = v.a0.is_empty() ? 0.0 : p.mass(v.a0);
    const double m0 = v.a0.is_empty() ? 0.0 : p.mean_restricted(v.a0);
    std::vector<std::vector<double>> out(js, std::vector<double>(js, 0.0));
    for (std::size_t j = 0; j < js; ++j) {
        const IntSet& a = v.a(static_cast<int>(j) + 1);
        const double ey = 1.0 + m.survival() * (p.mean_restricted(a) / p.mass(a) +
                                                (m0 - 1.0) / (1.0 - q0));
        for (std::size_t l = 0; l < js; ++l) out[j][l] = ey * m.alpha_star()[l];
    }
    return out;
}

OffspringReport check_offspring(const PmfD& p, const SetFamily& f,
                                const std::vector<double>& alpha) {
    const MultiOffspring m(p, f, alpha);
    const auto mat = mean_matrix(m);
    OffspringReport rep;
    double trace = 0.0;
    for (std::size_t j = 0; j < mat.size(); ++j) trace += mat[j][j];
    // The matrix has rank one, so the trace is its only nonzero eigenvalue.
    rep.spectral_radius = trace;
    rep.critical = std::abs(trace - 1.0) <= 1e-9;
    rep.row_zero.resize(mat.size());
    rep.pattern_ok = true;
    const bool a0_passthrough = m.view().a0.is_subset_of(IntSet::single(1));
    for (std::size_t j = 0; j < mat.size(); ++j) {
        bool zero = true;
        for (double x : mat[j]) zero = zero && std::abs(x) <= 1e-12;
        rep.row_zero[j] = zero;
        const IntSet& a = m.view().a(static_cast<int>(j) + 1);
        // At the zero endpoint every class is pinned at its minimum and the
        // pass-through walk attaches nothing, so only a minimum of 0 stalls.
        const bool expect = m.theta_zero()
                                ? *a.min_element() == 0
                                : a.same_set(IntSet::single(0)) && a0_passthrough;
        if (zero != expect) rep.pattern_ok = false;
    }
    const AperiodicResult ap = is_aperiodic(p, resolve_family(p, f), alpha);
    rep.aperiodic = ap.aperiodic;
    rep.detail = ap.detail;
    return rep;
}

// ---------------------------------------------------------------------------
// Folding a {0} singleton class into the uncounted set

NormalizedFamily normalize_zero_singleton(const PmfD& p, const SetFamily& f,
                                          const std::vector<double>& alpha) {
    const FamilyView v = resolve_family(p, f);
    if (static_cast<int>(alpha.size()) != v.J)
        throw ConfigError("direction length does not match the class count");
    if (!v.a0.is_subset_of(IntSet::single(1)))
        throw PreconditionError("uncounted degrees other than 1 block the folding");
    int folded = 0;
    for (int j = 1; j <= v.J; ++j) {
        const double aj = alpha[static_cast<std::size_t>(j - 1)];
        if (!(aj > 0)) continue;
        const auto lone = v.a(j).min_element();
        if (!lone || !v.a(j).same_set(IntSet::single(*lone)))
            throw PreconditionError("class " + std::to_string(j) + " is not a singleton");
        if (*lone == 0) folded = j;
    }
    if (folded == 0)
        throw PreconditionError("no positively-weighted class holds degree 0 alone");
    const double share = alpha[static_cast<std::size_t>(folded - 1)];
    if (!(share < 1))
        throw PreconditionError("the degree-0 class carries the whole direction");

    NormalizedFamily out;
    out.removed = folded;
    for (int j = 1; j <= v.J; ++j) {
        if (j == folded) continue;
        out.family.sets.push_back(f.sets[static_cast<std::size_t>(j - 1)]);
        out.alpha.push_back(alpha[static_cast<std::size_t>(j - 1)] / (1.0 - share));
    }
    if (out.family.sets.empty())
        throw PreconditionError("folding needs another counted class");
    return out;
}

}  // namespace bgw
