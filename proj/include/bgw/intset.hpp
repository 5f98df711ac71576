#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bgw {

// A subset of the nonnegative integers in eventually periodic normal form:
// membership of k is head_[k] for k < head_len_, and residues_[k % period_]
// for k >= head_len_. Finite sets, arithmetic progressions {s, s+d, ...},
// unions, intersections and complements all stay inside this class, which
// keeps every query (min, sup, subset, difference-set gcd, ...) decidable.
class IntSet {
public:
    IntSet() : head_len_(0), period_(1), residues_(1, 0) {}

    static IntSet empty() { return IntSet(); }
    static IntSet all();
    static IntSet finite(std::vector<int> xs);
    static IntSet single(int x) { return finite({x}); }
    // {start, start+step, start+2*step, ...}
    static IntSet progression(int start, int step);

    bool contains(int k) const {
        if (k < 0) return false;
        if (k < head_len_) return head_[static_cast<std::size_t>(k)] != 0;
        return residues_[static_cast<std::size_t>(k % period_)] != 0;
    }

    bool is_empty() const;
    bool is_finite() const;
    // Smallest element; nullopt when empty.
    std::optional<int> min_element() const;
    // Largest element of a finite set; nullopt when empty or infinite.
    std::optional<int> max_element() const;

    IntSet unite(const IntSet& other) const;
    IntSet intersect(const IntSet& other) const;
    IntSet complement() const;  // within the nonnegative integers
    IntSet minus(const IntSet& other) const { return intersect(other.complement()); }

    bool is_subset_of(const IntSet& other) const { return minus(other).is_empty(); }
    bool intersects(const IntSet& other) const { return !intersect(other).is_empty(); }
    bool same_set(const IntSet& other) const;

    // All elements <= n, ascending.
    std::vector<int> elements_up_to(int n) const;
    long long count_up_to(int n) const;

    // gcd{ |a - b| : a, b in the set }; 0 when fewer than two elements.
    // For infinite sets the generated subgroup stabilizes within two periods
    // past the head, so a bounded window is exact.
    long long diff_gcd() const;
    // gcd{ |a - c| : a in the set }; 0 when the set is empty or equals {c}.
    long long shift_gcd(int c) const;

    int head_len() const { return head_len_; }
    int period() const { return period_; }

    std::string to_string() const;

private:
    // Exact window guaranteeing that elements beyond it only repeat existing
    // differences / shifted values modulo period_.
    int gcd_window() const { return head_len_ + 2 * period_ + 1; }
    static void align(const IntSet& a, const IntSet& b, IntSet& a2, IntSet& b2);
    IntSet resized(int head_len, int period) const;

    int head_len_;
    std::vector<char> head_;      // size head_len_
    int period_;
    std::vector<char> residues_;  // size period_
};

}  // namespace bgw
