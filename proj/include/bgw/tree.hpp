#pragma once

#include <string>
#include <vector>

namespace bgw {

// A finite rooted ordered tree encoded as the sequence of vertex
// out-degrees in preorder (root first). The encoding is valid iff the
// running sum of (degree - 1) stays nonnegative before the last entry and
// ends at -1.
using OrderedTree = std::vector<int>;

bool is_valid_tree(const OrderedTree& t);
void require_valid_tree(const OrderedTree& t);

// "[2,0,3,0,0,0]" (no spaces accepted or produced; bit-exact round trips).
OrderedTree parse_tree(const std::string& text);
std::string tree_to_string(const OrderedTree& t);

// Depth of every vertex in preorder; the root has depth 0.
std::vector<int> vertex_depths(const OrderedTree& t);
int tree_height(const OrderedTree& t);

// Parent preorder index of every vertex (-1 for the root).
std::vector<int> parent_indices(const OrderedTree& t);

// Number of entries of the subtree rooted at preorder position pos.
int subtree_extent(const OrderedTree& t, int pos);

// Vertices at depth <= h, with the out-degrees of depth-h vertices
// recorded as 0 (their children are cut).
OrderedTree truncate_tree(const OrderedTree& t, int h);

// Replace the leaf at preorder position leaf_pos by the tree sub.
OrderedTree graft(const OrderedTree& t, int leaf_pos, const OrderedTree& sub);

// Whether s = graft(t, leaf_pos, sub) for some tree sub, i.e. s agrees
// with t outside the subtree sprouting at that leaf.
bool in_graft_class(const OrderedTree& s, const OrderedTree& t, int leaf_pos);

// Preorder positions of the leaves.
std::vector<int> leaf_positions(const OrderedTree& t);

// A tree with vertex types attached (same preorder indexing).
struct TypedTree {
    OrderedTree tree;
    std::vector<int> types;

    bool operator==(const TypedTree&) const = default;
};

}  // namespace bgw
