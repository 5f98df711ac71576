#include "bgw/tree.hpp"

#include <charconv>

#include "bgw/errors.hpp"

namespace bgw {

bool is_valid_tree(const OrderedTree& t) {
    if (t.empty()) return false;
    long long open = 1;  // vertices still awaited
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < 0) return false;
        open += t[i] - 1;
        if (open <= 0 && i + 1 < t.size()) return false;
    }
    return open == 0;
}

void require_valid_tree(const OrderedTree& t) {
    if (!is_valid_tree(t))
        throw PreconditionError("not a valid preorder out-degree sequence: " + tree_to_string(t));
}

OrderedTree parse_tree(const std::string& text) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw ConfigError("tree literal must look like [2,0,0]");
    OrderedTree t;
    const char* p = text.data() + 1;
    const char* end = text.data() + text.size() - 1;
    while (p < end) {
        int v = 0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc() || v < 0) throw ConfigError("bad degree in tree literal: " + text);
        t.push_back(v);
        p = next;
        if (p < end) {
            if (*p != ',') throw ConfigError("expected ',' in tree literal: " + text);
            ++p;
        }
    }
    if (t.empty()) throw ConfigError("empty tree literal");
    return t;
}

std::string tree_to_string(const OrderedTree& t) {
    std::string s = "[";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(t[i]);
    }
    s += ']';
    return s;
}

std::vector<int> vertex_depths(const OrderedTree& t) {
    const std::vector<int> parent = parent_indices(t);
    std::vector<int> depth(t.size(), 0);
    for (std::size_t i = 1; i < t.size(); ++i)
        depth[i] = depth[static_cast<std::size_t>(parent[i])] + 1;
    return depth;
}

int tree_height(const OrderedTree& t) {
    int h = 0;
    for (int d : vertex_depths(t)) h = std::max(h, d);
    return h;
}

std::vector<int> parent_indices(const OrderedTree& t) {
    std::vector<int> parent(t.size(), -1);
    std::vector<std::pair<int, int>> stack;  // (vertex, remaining children)
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!stack.empty()) {
            parent[i] = stack.back().first;
            if (--stack.back().second == 0) stack.pop_back();
        }
        if (t[i] > 0) stack.emplace_back(static_cast<int>(i), t[i]);
    }
    return parent;
}

int subtree_extent(const OrderedTree& t, int pos) {
    long long open = 1;
    int i = pos;
    while (open > 0) {
        if (i >= static_cast<int>(t.size()))
            throw PreconditionError("subtree extends past the encoding");
        open += t[static_cast<std::size_t>(i)] - 1;
        ++i;
    }
    return i - pos;
}

OrderedTree truncate_tree(const OrderedTree& t, int h) {
    require_valid_tree(t);
    if (h < 0) throw PreconditionError("truncation depth must be nonnegative");
    const std::vector<int> depth = vertex_depths(t);
    OrderedTree out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (depth[i] < h)
            out.push_back(t[i]);
        else if (depth[i] == h)
            out.push_back(0);
    }
    return out;
}

OrderedTree graft(const OrderedTree& t, int leaf_pos, const OrderedTree& sub) {
    require_valid_tree(t);
    require_valid_tree(sub);
    if (leaf_pos < 0 || leaf_pos >= static_cast<int>(t.size()) ||
        t[static_cast<std::size_t>(leaf_pos)] != 0)
        throw PreconditionError("graft position must be a leaf of the host tree");
    OrderedTree out;
    out.reserve(t.size() - 1 + sub.size());
    out.insert(out.end(), t.begin(), t.begin() + leaf_pos);
    out.insert(out.end(), sub.begin(), sub.end());
    out.insert(out.end(), t.begin() + leaf_pos + 1, t.end());
    return out;
}

bool in_graft_class(const OrderedTree& s, const OrderedTree& t, int leaf_pos) {
    require_valid_tree(s);
    require_valid_tree(t);
    if (leaf_pos < 0 || leaf_pos >= static_cast<int>(t.size()) ||
        t[static_cast<std::size_t>(leaf_pos)] != 0)
        throw PreconditionError("graft position must be a leaf of the host tree");
    if (static_cast<int>(s.size()) < leaf_pos + 1) return false;
    for (int i = 0; i < leaf_pos; ++i)
        if (s[static_cast<std::size_t>(i)] != t[static_cast<std::size_t>(i)]) return false;
    const int ext = subtree_extent(s, leaf_pos);
    const std::size_t tail_len = t.size() - static_cast<std::size_t>(leaf_pos) - 1;
    if (s.size() != static_cast<std::size_t>(leaf_pos + ext) + tail_len) return false;
    for (std::size_t i = 0; i < tail_len; ++i) {
        if (s[static_cast<std::size_t>(leaf_pos + ext) + i] !=
            t[static_cast<std::size_t>(leaf_pos) + 1 + i])
            return false;
    }
    return true;
}

std::vector<int> leaf_positions(const OrderedTree& t) {
    std::vector<int> out;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] == 0) out.push_back(static_cast<int>(i));
    return out;
}

}  // namespace bgw
