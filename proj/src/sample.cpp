#include "bgw/sample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bgw/errors.hpp"

namespace bgw {

// ---------------------------------------------------------------------------
// PmfSampler

PmfSampler::PmfSampler(const PmfD& p) {
    std::vector<std::pair<int, double>> atoms(p.table().begin(), p.table().end());
    *this = PmfSampler(atoms, p.tails());
}

PmfSampler::PmfSampler(const std::vector<std::pair<int, double>>& atoms,
                       const std::vector<GeomTail<double>>& tails) {
    for (const auto& [k, w] : atoms) {
        if (!(w > 0)) continue;
        atoms_.push_back(k);
        total_ += w;
        cum_.push_back(total_);
    }
    for (const auto& t : tails) {
        const double q = std::pow(t.ratio, t.step);
        if (!(q < 1.0)) throw ConfigError("geometric piece does not sum");
        const double w = t.coeff * std::pow(t.ratio, t.start) / (1.0 - q);
        if (!(w > 0)) continue;
        pieces_.push_back({t.start, t.step, q});
        total_ += w;
        cum_.push_back(total_);
    }
    if (cum_.empty()) throw ConfigError("sampler needs positive mass");
}

int PmfSampler::operator()(RngState& rng) const {
    const double u = rng.next_double() * total_;
    const std::size_t i = static_cast<std::size_t>(
        std::upper_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
    const std::size_t slot = std::min(i, cum_.size() - 1);
    if (slot < atoms_.size()) return atoms_[slot];
    const Piece& pc = pieces_[slot - atoms_.size()];
    const long long offset = static_cast<long long>(rng.geometric_failures(pc.offset_ratio));
    return pc.start + pc.step * static_cast<int>(offset);
}

// ---------------------------------------------------------------------------
// SizeBiasedSampler

SizeBiasedSampler::SizeBiasedSampler(const PmfD& p, double mean_tol) {
    const double mu = p.mean();
    if (std::abs(mu - 1.0) > mean_tol)
        throw PreconditionError("size-biased sampling needs a critical law, got mean " +
                                std::to_string(mu));
    for (const auto& [k, w] : p.table()) {
        if (k == 0) continue;
        atoms_.push_back(k);
        total_ += static_cast<double>(k) * w;
        cum_.push_back(total_);
    }
    for (const auto& t : p.tails()) {
        const double q = std::pow(t.ratio, t.step);
        const double base = t.coeff * std::pow(t.ratio, t.start);
        // sum_i (start + step i) q^i splits into a constant-offset component
        // of weight start/(1-q) and a linear one of weight step q/(1-q)^2.
        if (t.start > 0) {
            pieces_.push_back({t.start, t.step, q, false});
            total_ += base * t.start / (1.0 - q);
            cum_.push_back(total_);
        }
        pieces_.push_back({t.start, t.step, q, true});
        total_ += base * t.step * q / ((1.0 - q) * (1.0 - q));
        cum_.push_back(total_);
    }
    if (cum_.empty()) throw PreconditionError("size-biased sampling needs mass off zero");
}

int SizeBiasedSampler::operator()(RngState& rng) const {
    const double u = rng.next_double() * total_;
    const std::size_t i = static_cast<std::size_t>(
        std::upper_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
    const std::size_t slot = std::min(i, cum_.size() - 1);
    if (slot < atoms_.size()) return atoms_[slot];
    const Piece& pc = pieces_[slot - atoms_.size()];
    long long offset = static_cast<long long>(rng.geometric_failures(pc.offset_ratio));
    if (pc.linear)
        offset += 1 + static_cast<long long>(rng.geometric_failures(pc.offset_ratio));
    return pc.start + pc.step * static_cast<int>(offset);
}

// ---------------------------------------------------------------------------
// Unconditioned generation

std::optional<OrderedTree> sample_bgw(const PmfD& p, RngState& rng, std::size_t cap) {
    if (!p.is_nontrivial())
        throw PreconditionError("generation needs a non-trivial offspring law");
    const PmfSampler draw(p);
    OrderedTree t;
    long long open = 1;
    while (open > 0) {
        if (t.size() >= cap) return std::nullopt;
        const int d = draw(rng);
        t.push_back(d);
        open += d - 1;
    }
    return t;
}

namespace {

void grow_truncated(const PmfSampler& draw, RngState& rng, int depth, int h,
                    std::size_t cap, OrderedTree& out) {
    if (out.size() >= cap)
        throw PreconditionError("depth-truncated generation exceeded the vertex budget");
    if (depth == h) {
        out.push_back(0);
        return;
    }
    const int d = draw(rng);
    out.push_back(d);
    for (int i = 0; i < d; ++i) grow_truncated(draw, rng, depth + 1, h, cap, out);
}

void grow_spine(const PmfSampler& draw, const SizeBiasedSampler& spine_draw, RngState& rng,
                int depth, int h, std::size_t cap, OrderedTree& out) {
    if (out.size() >= cap)
        throw PreconditionError("spine generation exceeded the vertex budget");
    if (depth == h) {
        out.push_back(0);
        return;
    }
    const int d = spine_draw(rng);
    out.push_back(d);
    const int heir = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    for (int i = 0; i < d; ++i) {
        if (i == heir)
            grow_spine(draw, spine_draw, rng, depth + 1, h, cap, out);
        else
            grow_truncated(draw, rng, depth + 1, h, cap, out);
    }
}

}  // namespace

OrderedTree sample_bgw_truncated(const PmfD& p, RngState& rng, int h, std::size_t cap) {
    if (!p.is_nontrivial())
        throw PreconditionError("generation needs a non-trivial offspring law");
    if (h < 0) throw ConfigError("truncation depth must be nonnegative");
    const PmfSampler draw(p);
    OrderedTree out;
    grow_truncated(draw, rng, 0, h, cap, out);
    return out;
}

OrderedTree sample_kesten(const PmfD& p, RngState& rng, int h, std::size_t cap) {
    if (h < 0) throw ConfigError("truncation depth must be nonnegative");
    const SizeBiasedSampler spine_draw(p);  // rejects non-critical laws
    const PmfSampler draw(p);
    OrderedTree out;
    grow_spine(draw, spine_draw, rng, 0, h, cap, out);
    return out;
}

// ---------------------------------------------------------------------------
// ConditionedSampler

ConditionedSampler::ConditionedSampler(const PmfQ& p, const SetFamily& f,
                                       std::vector<long long> n, CondStrategy strategy,
                                       long long attempt_cap)
    : oracle_(p, f),
      pd_(p.to_double_pmf()),
      n_(std::move(n)),
      strategy_(strategy),
      attempt_cap_(attempt_cap) {
    if (!oracle_.achievable(n_))
        throw PreconditionError("count vector is not achievable under this law");
    for (long long c : n_) total_ += c;
    if (strategy_ == CondStrategy::CycleLemma) {
        if (oracle_.view().J != 1 || !oracle_.view().a(1).same_set(pd_.support()))
            throw PreconditionError(
                "the rotation strategy needs a single class counting the whole support");
        base_.emplace(pd_);
    } else if (strategy_ == CondStrategy::Rejection) {
        base_.emplace(pd_);
    }
}

OrderedTree ConditionedSampler::operator()(RngState& rng) {
    switch (strategy_) {
        case CondStrategy::Rejection: return draw_rejection(rng);
        case CondStrategy::DpBackward: return draw_dp(rng);
        case CondStrategy::CycleLemma: return draw_cycle(rng);
    }
    throw ConfigError("unknown strategy");
}

OrderedTree ConditionedSampler::draw_rejection(RngState& rng) {
    const FamilyView& v = oracle_.view();
    const std::size_t cap = 1'000'000;
    for (long long attempt = 0; attempt < attempt_cap_; ++attempt) {
        OrderedTree t;
        std::vector<long long> counts(static_cast<std::size_t>(v.J), 0);
        long long open = 1;
        bool bad = false;
        while (open > 0) {
            if (t.size() >= cap) {
                bad = true;
                break;
            }
            const int d = (*base_)(rng);
            t.push_back(d);
            open += d - 1;
            const int j = class_of_degree(v, d);
            if (j > 0 && ++counts[static_cast<std::size_t>(j - 1)] >
                             n_[static_cast<std::size_t>(j - 1)]) {
                bad = true;
                break;
            }
        }
        if (!bad && counts == n_) return t;
    }
    throw PreconditionError("rejection sampling exhausted its attempt budget");
}

const std::vector<std::pair<int, double>>& ConditionedSampler::transitions(const State& s) {
    auto it = trans_.find(s);
    if (it != trans_.end()) return it->second;

    const auto& [m, w] = s;
    long long rest = 0;
    for (long long c : m) rest += c;
    const Rat here = oracle_.forest_prob(m, w);
    std::vector<std::pair<int, double>> cdf;
    Rat seen = 0;
    for (int d : oracle_.reduced().support().elements_up_to(static_cast<int>(rest - w))) {
        const int j = class_of_degree(oracle_.view(), d);
        if (j <= 0 || m[static_cast<std::size_t>(j - 1)] == 0) continue;
        std::vector<long long> next = m;
        --next[static_cast<std::size_t>(j - 1)];
        const Rat part = oracle_.reduced().at(d) * oracle_.forest_prob(next, w - 1 + d);
        if (part == 0) continue;
        seen += part;
        cdf.emplace_back(d, Rat(seen / here).get_d());
    }
    if (cdf.empty()) throw PreconditionError("conditioned state has no continuation");
    cdf.back().second = 1.0;  // the branch weights sum to the state weight exactly
    return trans_.emplace(s, std::move(cdf)).first->second;
}

void ConditionedSampler::insert_chains(const OrderedTree& reduced, RngState& rng,
                                       OrderedTree& out) const {
    const double pass = oracle_.pass_mass().get_d();
    out.clear();
    out.reserve(reduced.size());
    for (int d : reduced) {
        if (pass > 0) {
            const long long run = static_cast<long long>(rng.geometric_failures(pass));
            out.insert(out.end(), static_cast<std::size_t>(run), 1);
        }
        out.push_back(d);
    }
}

OrderedTree ConditionedSampler::draw_dp(RngState& rng) {
    std::vector<long long> m = n_;
    long long w = 1;
    OrderedTree reduced;
    reduced.reserve(static_cast<std::size_t>(total_));
    while (w > 0) {
        const auto& cdf = transitions({m, w});
        const double u = rng.next_double();
        int d = cdf.back().first;
        for (const auto& [deg, cum] : cdf) {
            if (u < cum) {
                d = deg;
                break;
            }
        }
        reduced.push_back(d);
        const int j = class_of_degree(oracle_.view(), d);
        --m[static_cast<std::size_t>(j - 1)];
        w += d - 1;
    }
    OrderedTree out;
    insert_chains(reduced, rng, out);
    return out;
}

OrderedTree ConditionedSampler::draw_cycle(RngState& rng) {
    const long long size = total_;
    for (long long attempt = 0; attempt < attempt_cap_; ++attempt) {
        OrderedTree degs(static_cast<std::size_t>(size));
        long long sum = 0;
        for (auto& d : degs) {
            d = (*base_)(rng);
            sum += d;
        }
        if (sum != size - 1) continue;
        // Exactly one rotation is a preorder tree: start right after the
        // first position where the prefix sum of (d - 1) is minimal.
        long long run = 0, best = 0;
        std::size_t cut = 0;
        for (std::size_t i = 0; i < degs.size(); ++i) {
            run += degs[i] - 1;
            if (run < best) {
                best = run;
                cut = i + 1;
            }
        }
        OrderedTree t(degs.begin() + static_cast<std::ptrdiff_t>(cut % degs.size()), degs.end());
        t.insert(t.end(), degs.begin(), degs.begin() + static_cast<std::ptrdiff_t>(cut % degs.size()));
        return t;
    }
    throw PreconditionError("rotation sampling exhausted its attempt budget");
}

OrderedTree sample_conditioned(const PmfQ& p, const SetFamily& f,
                               const std::vector<long long>& n, RngState& rng,
                               CondStrategy strategy) {
    ConditionedSampler s(p, f, n, strategy);
    return s(rng);
}

// ---------------------------------------------------------------------------
// Shared integer draws

long long binomial_draw(long long n, double r, RngState& rng) {
    if (r <= 0.0) return 0;
    if (r >= 1.0) return n;
    long long hits = 0;
    for (long long i = 0; i < n; ++i)
        if (rng.next_double() < r) ++hits;
    return hits;
}

std::vector<long long> multinomial_draw(long long n, const std::vector<double>& weights,
                                        RngState& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0)) throw ConfigError("multinomial needs positive weights");
    std::vector<long long> counts(weights.size(), 0);
    for (long long i = 0; i < n; ++i) {
        const double u = rng.next_double() * total;
        double cum = 0.0;
        std::size_t pick = weights.size() - 1;
        for (std::size_t j = 0; j < weights.size(); ++j) {
            cum += weights[j];
            if (u < cum) {
                pick = j;
                break;
            }
        }
        ++counts[pick];
    }
    return counts;
}

}  // namespace bgw
