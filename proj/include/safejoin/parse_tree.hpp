#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safejoin/schema.hpp"

namespace safejoin {

struct TreeStructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when GYO reduction stalls; carries the irreducible residual.
struct CyclicJoinError : std::runtime_error {
    Hypergraph residual;
    explicit CyclicJoinError(Hypergraph residual_);
};

struct PathConditionError : std::runtime_error {
    std::size_t offending_index;  // first i with parent(a1) ∩ a_i ≠ parent(a1) ∩ a1
    PathConditionError(const std::string &what, std::size_t index);
};

struct ChangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rooted tree over relation names. Immutable once built; every
/// transformation returns a new tree.
class ParseTree {
  public:
    ParseTree() = default;
    static ParseTree from_edges(const std::string &root,
                                const std::vector<std::pair<std::string, std::string>> &parent_child);
    static ParseTree single_node(const std::string &root);

    const std::string &root() const { return root_; }
    std::size_t size() const { return depth_.size(); }
    bool has_node(const std::string &name) const { return depth_.count(name) > 0; }
    std::vector<std::string> nodes() const;

    /// Parent of a node; nullopt for the root.
    std::optional<std::string> parent_of(const std::string &node) const;
    const std::vector<std::string> &children_of(const std::string &node) const;
    int depth_of(const std::string &node) const;

    std::string lca(const std::string &a, const std::string &b) const;
    /// Unique tree path from a to b, inclusive of both endpoints.
    std::vector<std::string> path_between(const std::string &a, const std::string &b) const;

    /// Edges as (parent, child), sorted by child name.
    std::vector<std::pair<std::string, std::string>> edges() const;

    bool operator==(const ParseTree &other) const;

  private:
    std::string root_;
    std::map<std::string, std::string> parent_;                 // child → parent
    std::map<std::string, std::vector<std::string>> children_;  // sorted child lists
    std::map<std::string, int> depth_;

    void index();  // rebuild children_/depth_ from root_/parent_
    friend ParseTree rebuild_rooted(const std::string &root,
                                    const std::vector<std::pair<std::string, std::string>> &undirected);
};

/// Roots an undirected edge list at the given node. Throws
/// TreeStructureError when the edges do not form a tree.
ParseTree rebuild_rooted(const std::string &root,
                         const std::vector<std::pair<std::string, std::string>> &undirected);

struct TreeBuildOptions {
    // When set, GYO tie-breaking picks a seeded-random ear/witness instead
    // of the lexicographically smallest.
    std::optional<uint64_t> tie_seed;
};

/// GYO-style ear removal. Throws CyclicJoinError when no parse tree exists.
ParseTree build_parse_tree(const JoinSchema &schema, const TreeBuildOptions &opts = {});

bool is_acyclic_join(const JoinSchema &schema);

/// True iff every attribute's node set induces a connected subtree.
/// Throws TreeStructureError when the tree does not span exactly the
/// relations of the schema.
bool validate_parse_tree(const JoinSchema &schema, const ParseTree &tree);

/// Same undirected tree, parents reoriented toward new_root.
ParseTree reroot(const ParseTree &tree, const std::string &new_root);

struct MaximalSubtree {
    std::string root;             // minimum-depth node of the part
    std::set<std::string> nodes;  // induces a connected partial subtree
};

struct MaximalSubtreeSet {
    std::vector<MaximalSubtree> subtrees;  // sorted by root name

    std::size_t count() const { return subtrees.size(); }
    /// Index of the subtree containing node, or npos.
    std::size_t subtree_of(const std::string &node) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

MaximalSubtreeSet maximal_subtrees(const ParseTree &tree, const SubjoinSpec &subjoin);

/// True iff no node of the subtree has a descendant that is a root of
/// another maximal subtree.
bool is_lowest_subtree(const ParseTree &tree, const MaximalSubtreeSet &set, std::size_t index);

struct Stem {
    std::vector<std::string> nodes;               // from subtree root up to the tip, inclusive
    bool dependant = false;                       // tip is a node of another maximal subtree
    std::optional<std::string> tip_subtree_root;  // set when dependant
    const std::string &tip() const { return nodes.back(); }
};

/// Stem of a lowest maximal subtree: the path from its root up to the
/// deepest ancestor that is an LCA with a node of another maximal subtree.
/// Throws std::invalid_argument when chosen is not lowest.
Stem stem_of(const ParseTree &tree, const MaximalSubtreeSet &set, const MaximalSubtree &chosen);

struct BreakPoint {
    std::string lower;  // closer to the start of the supplied path
    std::string upper;  // its successor along the path
};

/// Shared set S = attributes common to all nodes of the path. Returns the
/// first consecutive pair (scanning from the path start) whose attribute
/// sets are disjoint after deleting S, or nullopt when the partial path is
/// connected. Paths shorter than two nodes never break.
std::optional<BreakPoint> detect_break(const JoinSchema &schema, const ParseTree &tree,
                                       const std::vector<std::string> &path);

/// Reverse path transformation. path = a1..an top-down (a_i the parent of
/// a_{i+1}); requires parent(a1) to exist and parent(a1) ∩ a_i constant
/// along the path (else PathConditionError with the first offending
/// index). The result reverses the segment and hangs a_n under
/// parent(a1), every hanging subtree keeping its root.
ParseTree reverse_path_transform(const JoinSchema &schema, const ParseTree &tree,
                                 const std::vector<std::string> &path);

struct Change {
    std::pair<std::string, std::string> del;  // tree arc to delete
    std::pair<std::string, std::string> add;  // arc to add

    bool operator==(const Change &other) const { return del == other.del && add == other.add; }
};

/// Applies the arc swap as an undirected edge exchange, keeps the root,
/// and validates the result. Throws ChangeError when the swap does not
/// yield a spanning tree or the result violates attribute connectivity.
ParseTree apply_change(const JoinSchema &schema, const ParseTree &tree, const Change &change);

}  // namespace safejoin
