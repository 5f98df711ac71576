#include "bgw/intset.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "bgw/errors.hpp"

namespace bgw {

IntSet IntSet::all() {
    IntSet s;
    s.residues_.assign(1, 1);
    return s;
}

IntSet IntSet::finite(std::vector<int> xs) {
    IntSet s;
    if (xs.empty()) return s;
    for (int x : xs) {
        if (x < 0) throw ConfigError("integer sets hold nonnegative values only");
    }
    const int m = *std::max_element(xs.begin(), xs.end());
    s.head_len_ = m + 1;
    s.head_.assign(static_cast<std::size_t>(m + 1), 0);
    for (int x : xs) s.head_[static_cast<std::size_t>(x)] = 1;
    return s;
}

IntSet IntSet::progression(int start, int step) {
    if (start < 0 || step < 1) throw ConfigError("progression needs start >= 0, step >= 1");
    IntSet s;
    s.head_len_ = start;
    s.head_.assign(static_cast<std::size_t>(start), 0);
    s.period_ = step;
    s.residues_.assign(static_cast<std::size_t>(step), 0);
    s.residues_[static_cast<std::size_t>(start % step)] = 1;
    return s;
}

IntSet IntSet::resized(int head_len, int period) const {
    IntSet out;
    out.head_len_ = head_len;
    out.head_.resize(static_cast<std::size_t>(head_len));
    for (int k = 0; k < head_len; ++k) out.head_[static_cast<std::size_t>(k)] = contains(k) ? 1 : 0;
    out.period_ = period;
    out.residues_.assign(static_cast<std::size_t>(period), 0);
    for (int r = 0; r < period; ++r) {
        // head_len + r is a representative of the class r + head_len mod period
        out.residues_[static_cast<std::size_t>((head_len + r) % period)] =
            contains(head_len + r) ? 1 : 0;
    }
    return out;
}

void IntSet::align(const IntSet& a, const IntSet& b, IntSet& a2, IntSet& b2) {
    const int head = std::max(a.head_len_, b.head_len_);
    const int period = static_cast<int>(std::lcm(a.period_, b.period_));
    a2 = a.resized(head, period);
    b2 = b.resized(head, period);
}

IntSet IntSet::unite(const IntSet& other) const {
    IntSet a, b;
    align(*this, other, a, b);
    for (std::size_t i = 0; i < a.head_.size(); ++i) a.head_[i] |= b.head_[i];
    for (std::size_t i = 0; i < a.residues_.size(); ++i) a.residues_[i] |= b.residues_[i];
    return a;
}

IntSet IntSet::intersect(const IntSet& other) const {
    IntSet a, b;
    align(*this, other, a, b);
    for (std::size_t i = 0; i < a.head_.size(); ++i) a.head_[i] &= b.head_[i];
    for (std::size_t i = 0; i < a.residues_.size(); ++i) a.residues_[i] &= b.residues_[i];
    return a;
}

IntSet IntSet::complement() const {
    IntSet out = *this;
    for (auto& c : out.head_) c ^= 1;
    for (auto& c : out.residues_) c ^= 1;
    return out;
}

bool IntSet::is_empty() const {
    for (char c : head_)
        if (c) return false;
    for (char c : residues_)
        if (c) return false;
    return true;
}

bool IntSet::is_finite() const {
    for (char c : residues_)
        if (c) return false;
    return true;
}

std::optional<int> IntSet::min_element() const {
    for (int k = 0; k < head_len_; ++k)
        if (head_[static_cast<std::size_t>(k)]) return k;
    for (int k = head_len_; k < head_len_ + period_; ++k)
        if (residues_[static_cast<std::size_t>(k % period_)]) return k;
    return std::nullopt;
}

std::optional<int> IntSet::max_element() const {
    if (!is_finite()) return std::nullopt;
    for (int k = head_len_ - 1; k >= 0; --k)
        if (head_[static_cast<std::size_t>(k)]) return k;
    return std::nullopt;
}

bool IntSet::same_set(const IntSet& other) const {
    IntSet a, b;
    align(*this, other, a, b);
    return a.head_ == b.head_ && a.residues_ == b.residues_;
}

std::vector<int> IntSet::elements_up_to(int n) const {
    std::vector<int> out;
    for (int k = 0; k <= n; ++k)
        if (contains(k)) out.push_back(k);
    return out;
}

long long IntSet::count_up_to(int n) const {
    long long c = 0;
    const int head_top = std::min(n + 1, head_len_);
    for (int k = 0; k < head_top; ++k) c += head_[static_cast<std::size_t>(k)] ? 1 : 0;
    if (n + 1 <= head_len_) return c;
    // one full-period block count, then whole blocks plus the remainder
    long long per_block = 0;
    for (char r : residues_) per_block += r ? 1 : 0;
    const long long span = static_cast<long long>(n) + 1 - head_len_;
    c += (span / period_) * per_block;
    for (long long k = head_len_ + (span / period_) * period_; k <= n; ++k)
        c += residues_[static_cast<std::size_t>(k % period_)] ? 1 : 0;
    return c;
}

long long IntSet::diff_gcd() const {
    const std::vector<int> xs = elements_up_to(gcd_window());
    long long g = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        g = std::gcd(g, static_cast<long long>(xs[i] - xs[i - 1]));
    if (!is_finite()) g = std::gcd(g, static_cast<long long>(period_));
    return g;
}

long long IntSet::shift_gcd(int c) const {
    const std::vector<int> xs = elements_up_to(gcd_window());
    long long g = 0;
    for (int x : xs) g = std::gcd(g, static_cast<long long>(std::abs(x - c)));
    if (!is_finite()) g = std::gcd(g, static_cast<long long>(period_));
    return g;
}

std::string IntSet::to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (int x : elements_up_to(head_len_ + 2 * period_)) {
        if (x >= head_len_ && !is_finite()) break;
        if (!first) os << ',';
        os << x;
        first = false;
    }
    if (!is_finite()) {
        for (int k = head_len_; k < head_len_ + period_; ++k) {
            if (residues_[static_cast<std::size_t>(k % period_)]) {
                if (!first) os << ',';
                os << k << "+" << period_ << "N";
                first = false;
            }
        }
    }
    os << '}';
    return os.str();
}

}  // namespace bgw
