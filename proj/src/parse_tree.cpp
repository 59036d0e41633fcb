#include "safejoin/parse_tree.hpp"

#include <algorithm>
#include <random>

namespace safejoin {

CyclicJoinError::CyclicJoinError(Hypergraph residual_)
    : std::runtime_error("join is cyclic: GYO reduction stalled with " +
                         std::to_string(residual_.edges.size()) + " relations left"),
      residual(std::move(residual_)) {}

PathConditionError::PathConditionError(const std::string &what, std::size_t index)
    : std::runtime_error(what), offending_index(index) {}

// ---------------------------------------------------------------------------
// ParseTree

void ParseTree::index() {
    children_.clear();
    depth_.clear();
    children_[root_];
    for (const auto &[child, parent] : parent_) {
        children_[parent].push_back(child);
        children_[child];
    }
    for (auto &[node, kids] : children_) std::sort(kids.begin(), kids.end());

    // BFS from the root; a node left without depth means a broken parent map.
    std::vector<std::string> frontier{root_};
    depth_[root_] = 0;
    while (!frontier.empty()) {
        std::vector<std::string> next;
        for (const auto &node : frontier) {
            for (const auto &child : children_.at(node)) {
                depth_[child] = depth_.at(node) + 1;
                next.push_back(child);
            }
        }
        frontier = std::move(next);
    }
    if (depth_.size() != children_.size())
        throw TreeStructureError("parent map does not form a tree rooted at " + root_);
}

ParseTree ParseTree::from_edges(const std::string &root,
                                const std::vector<std::pair<std::string, std::string>> &parent_child) {
    ParseTree tree;
    tree.root_ = root;
    for (const auto &[parent, child] : parent_child) {
        if (child == root) throw TreeStructureError("root cannot have a parent");
        if (!tree.parent_.emplace(child, parent).second)
            throw TreeStructureError("node " + child + " has two parents");
    }
    tree.index();
    return tree;
}

ParseTree ParseTree::single_node(const std::string &root) {
    return from_edges(root, {});
}

std::vector<std::string> ParseTree::nodes() const {
    std::vector<std::string> names;
    names.reserve(depth_.size());
    for (const auto &[node, d] : depth_) names.push_back(node);
    return names;
}

std::optional<std::string> ParseTree::parent_of(const std::string &node) const {
    auto it = parent_.find(node);
    if (it == parent_.end()) {
        if (node != root_) throw TreeStructureError("unknown node: " + node);
        return std::nullopt;
    }
    return it->second;
}

const std::vector<std::string> &ParseTree::children_of(const std::string &node) const {
    auto it = children_.find(node);
    if (it == children_.end()) throw TreeStructureError("unknown node: " + node);
    return it->second;
}

int ParseTree::depth_of(const std::string &node) const {
    auto it = depth_.find(node);
    if (it == depth_.end()) throw TreeStructureError("unknown node: " + node);
    return it->second;
}

std::string ParseTree::lca(const std::string &a, const std::string &b) const {
    std::string x = a;
    std::string y = b;
    int dx = depth_of(x);
    int dy = depth_of(y);
    while (dx > dy) x = *parent_of(x), --dx;
    while (dy > dx) y = *parent_of(y), --dy;
    while (x != y) {
        x = *parent_of(x);
        y = *parent_of(y);
    }
    return x;
}

std::vector<std::string> ParseTree::path_between(const std::string &a, const std::string &b) const {
    std::string meet = lca(a, b);
    std::vector<std::string> up;
    for (std::string x = a; x != meet; x = *parent_of(x)) up.push_back(x);
    up.push_back(meet);
    std::vector<std::string> down;
    for (std::string y = b; y != meet; y = *parent_of(y)) down.push_back(y);
    up.insert(up.end(), down.rbegin(), down.rend());
    return up;
}

std::vector<std::pair<std::string, std::string>> ParseTree::edges() const {
    std::vector<std::pair<std::string, std::string>> result;
    result.reserve(parent_.size());
    for (const auto &[child, parent] : parent_) result.emplace_back(parent, child);
    return result;  // parent_ is keyed by child, so this is already child-sorted
}

bool ParseTree::operator==(const ParseTree &other) const {
    return root_ == other.root_ && parent_ == other.parent_;
}

// Re-roots an undirected edge list at the given node.
ParseTree rebuild_rooted(const std::string &root,
                         const std::vector<std::pair<std::string, std::string>> &undirected) {
    std::map<std::string, std::vector<std::string>> adj;
    adj[root];
    for (const auto &[a, b] : undirected) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    ParseTree tree;
    tree.root_ = root;
    std::vector<std::string> frontier{root};
    std::set<std::string> seen{root};
    while (!frontier.empty()) {
        std::vector<std::string> next;
        for (const auto &node : frontier) {
            for (const auto &nb : adj.at(node)) {
                if (seen.insert(nb).second) {
                    tree.parent_.emplace(nb, node);
                    next.push_back(nb);
                }
            }
        }
        frontier = std::move(next);
    }
    if (seen.size() != adj.size())
        throw TreeStructureError("edge list is not connected");
    tree.index();
    return tree;
}

// ---------------------------------------------------------------------------
// GYO construction

namespace {

// r is an ear among alive iff the attributes r shares with the other alive
// relations are all contained in one witness relation.
std::vector<std::string> ear_witnesses(const JoinSchema &schema,
                                       const std::set<std::string> &alive, const std::string &r) {
    const AttrSet &mine = schema.relation(r).attrs;
    AttrSet shared;
    for (const auto &other : alive) {
        if (other == r) continue;
        for (const auto &a : schema.relation(other).attrs)
            if (mine.count(a)) shared.insert(a);
    }
    std::vector<std::string> witnesses;
    for (const auto &other : alive) {
        if (other == r) continue;
        const AttrSet &theirs = schema.relation(other).attrs;
        if (std::includes(theirs.begin(), theirs.end(), shared.begin(), shared.end()))
            witnesses.push_back(other);
    }
    return witnesses;  // sorted: alive is an ordered set
}

}  // namespace

ParseTree build_parse_tree(const JoinSchema &schema, const TreeBuildOptions &opts) {
    std::set<std::string> alive = schema.relation_names();
    std::optional<std::mt19937_64> rng;
    if (opts.tie_seed) rng.emplace(*opts.tie_seed);

    std::vector<std::pair<std::string, std::string>> arcs;  // (parent, child)
    while (alive.size() > 1) {
        std::vector<std::pair<std::string, std::vector<std::string>>> ears;
        std::vector<std::string> order(alive.begin(), alive.end());
        // Narrow relations leave first; this keeps the widest relation at
        // the root when containment makes both directions reducible.
        std::stable_sort(order.begin(), order.end(), [&](const auto &a, const auto &b) {
            return schema.relation(a).attrs.size() < schema.relation(b).attrs.size();
        });
        for (const auto &r : order) {
            auto witnesses = ear_witnesses(schema, alive, r);
            if (!witnesses.empty()) ears.emplace_back(r, std::move(witnesses));
        }
        if (ears.empty()) {
            Hypergraph residual;
            for (const auto &r : alive)
                residual.edges.push_back({r, schema.relation(r).attrs});
            throw CyclicJoinError(std::move(residual));
        }
        std::size_t ei = rng ? (*rng)() % ears.size() : 0;
        const auto &[ear, witnesses] = ears[ei];
        std::size_t wi = rng ? (*rng)() % witnesses.size() : 0;
        arcs.emplace_back(witnesses[wi], ear);
        alive.erase(ear);
    }
    return ParseTree::from_edges(*alive.begin(), arcs);
}

bool is_acyclic_join(const JoinSchema &schema) {
    try {
        build_parse_tree(schema);
        return true;
    } catch (const CyclicJoinError &) {
        return false;
    }
}

// ---------------------------------------------------------------------------
// Validation, rerooting

bool validate_parse_tree(const JoinSchema &schema, const ParseTree &tree) {
    auto names = schema.relation_names();
    auto nodes = tree.nodes();
    if (names.size() != nodes.size() ||
        !std::equal(nodes.begin(), nodes.end(), names.begin()))
        throw TreeStructureError("tree does not span exactly the relations of the join");

    // An attribute's node set (size k, an induced forest) is connected iff
    // exactly k-1 tree edges have the attribute on both ends.
    std::map<std::string, int> occurrences;
    std::map<std::string, int> covered_edges;
    for (const auto &r : schema.relations)
        for (const auto &a : r.attrs) ++occurrences[a];
    for (const auto &[parent, child] : tree.edges()) {
        const AttrSet &pa = schema.relation(parent).attrs;
        for (const auto &a : schema.relation(child).attrs)
            if (pa.count(a)) ++covered_edges[a];
    }
    for (const auto &[attr, k] : occurrences)
        if (covered_edges[attr] != k - 1) return false;
    return true;
}

ParseTree reroot(const ParseTree &tree, const std::string &new_root) {
    if (!tree.has_node(new_root)) throw TreeStructureError("unknown node: " + new_root);
    if (new_root == tree.root()) return tree;
    return rebuild_rooted(new_root, tree.edges());
}

// ---------------------------------------------------------------------------
// Maximal subtrees

std::size_t MaximalSubtreeSet::subtree_of(const std::string &node) const {
    for (std::size_t i = 0; i < subtrees.size(); ++i)
        if (subtrees[i].nodes.count(node)) return i;
    return npos;
}

MaximalSubtreeSet maximal_subtrees(const ParseTree &tree, const SubjoinSpec &subjoin) {
    // Components of the forest induced by the subjoin nodes: a member joins
    // its parent's component exactly when the parent is a member too.
    std::map<std::string, std::string> comp;  // member → component root
    std::vector<std::string> by_depth(subjoin.members.begin(), subjoin.members.end());
    std::sort(by_depth.begin(), by_depth.end(), [&](const auto &a, const auto &b) {
        int da = tree.depth_of(a), db = tree.depth_of(b);
        return da != db ? da < db : a < b;
    });
    for (const auto &node : by_depth) {
        auto parent = tree.parent_of(node);
        if (parent && subjoin.contains(*parent))
            comp[node] = comp.at(*parent);  // parent is shallower, already assigned
        else
            comp[node] = node;
    }

    std::map<std::string, MaximalSubtree> parts;
    for (const auto &[node, root] : comp) {
        auto &part = parts[root];
        part.root = root;
        part.nodes.insert(node);
    }
    MaximalSubtreeSet set;
    for (auto &[root, part] : parts) set.subtrees.push_back(std::move(part));
    return set;  // parts is keyed by root, so subtrees are root-sorted
}

bool is_lowest_subtree(const ParseTree &tree, const MaximalSubtreeSet &set, std::size_t index) {
    const auto &mine = set.subtrees[index];
    for (std::size_t j = 0; j < set.subtrees.size(); ++j) {
        if (j == index) continue;
        // Another root strictly below a node of mine?
        std::string walk = set.subtrees[j].root;
        while (auto parent = tree.parent_of(walk)) {
            if (mine.nodes.count(*parent)) return false;
            walk = *parent;
        }
    }
    return true;
}

Stem stem_of(const ParseTree &tree, const MaximalSubtreeSet &set, const MaximalSubtree &chosen) {
    std::size_t index = MaximalSubtreeSet::npos;
    for (std::size_t i = 0; i < set.subtrees.size(); ++i)
        if (set.subtrees[i].root == chosen.root) index = i;
    if (index == MaximalSubtreeSet::npos)
        throw std::invalid_argument("chosen subtree is not in the set");
    if (set.subtrees.size() < 2)
        throw std::invalid_argument("stem needs at least two maximal subtrees");
    if (!is_lowest_subtree(tree, set, index))
        throw std::invalid_argument("chosen subtree is not a lowest maximal subtree");

    // The tip is the deepest LCA of the chosen root with a node of another
    // maximal subtree.
    const std::string &r1 = chosen.root;
    std::string tip;
    int best = -1;
    for (std::size_t j = 0; j < set.subtrees.size(); ++j) {
        if (j == index) continue;
        for (const auto &node : set.subtrees[j].nodes) {
            std::string meet = tree.lca(r1, node);
            int d = tree.depth_of(meet);
            if (d > best) {
                best = d;
                tip = meet;
            }
        }
    }

    Stem stem;
    for (std::string x = r1; x != tip; x = *tree.parent_of(x)) stem.nodes.push_back(x);
    stem.nodes.push_back(tip);
    std::size_t owner = set.subtree_of(tip);
    if (owner != MaximalSubtreeSet::npos) {
        stem.dependant = true;
        stem.tip_subtree_root = set.subtrees[owner].root;
    }
    return stem;
}

// ---------------------------------------------------------------------------
// Breaks and transformations

std::optional<BreakPoint> detect_break(const JoinSchema &schema, const ParseTree &tree,
                                       const std::vector<std::string> &path) {
    if (path.size() < 2) return std::nullopt;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto p = tree.parent_of(path[i]);
        auto q = tree.parent_of(path[i + 1]);
        bool adjacent = (p && *p == path[i + 1]) || (q && *q == path[i]);
        if (!adjacent) throw TreeStructureError("node sequence is not a tree path");
    }

    AttrSet shared = schema.relation(path.front()).attrs;
    for (const auto &node : path) {
        const AttrSet &attrs = schema.relation(node).attrs;
        AttrSet next;
        for (const auto &a : shared)
            if (attrs.count(a)) next.insert(a);
        shared = std::move(next);
    }

    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const AttrSet &a = schema.relation(path[i]).attrs;
        const AttrSet &b = schema.relation(path[i + 1]).attrs;
        bool touches = false;
        for (const auto &x : a)
            if (b.count(x) && !shared.count(x)) {
                touches = true;
                break;
            }
        if (!touches) return BreakPoint{path[i], path[i + 1]};
    }
    return std::nullopt;
}

ParseTree reverse_path_transform(const JoinSchema &schema, const ParseTree &tree,
                                 const std::vector<std::string> &path) {
    if (path.empty()) throw PathConditionError("path must be nonempty", 0);
    auto p1 = tree.parent_of(path.front());
    if (!p1) throw PathConditionError("first path node must not be the root", 0);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto parent = tree.parent_of(path[i + 1]);
        if (!parent || *parent != path[i])
            throw PathConditionError("node " + path[i + 1] + " is not a child of " + path[i], i + 1);
    }

    const AttrSet &top = schema.relation(*p1).attrs;
    auto cut = [&](const std::string &node) {
        AttrSet result;
        for (const auto &a : schema.relation(node).attrs)
            if (top.count(a)) result.insert(a);
        return result;
    };
    AttrSet expected = cut(path.front());
    for (std::size_t i = 1; i < path.size(); ++i)
        if (cut(path[i]) != expected)
            throw PathConditionError("shared-attributes condition fails at path node " + path[i], i);

    if (path.size() == 1) return tree;  // delete and re-add the same arc

    auto undirected = tree.edges();
    std::erase_if(undirected, [&](const auto &e) {
        return e == std::make_pair(*p1, path.front());
    });
    // The reversed segment is implied by re-rooting: swapping the single
    // arc (P1,a1) for (P1,an) reverses parent pointers along the path.
    undirected.emplace_back(*p1, path.back());
    return rebuild_rooted(tree.root(), undirected);
}

ParseTree apply_change(const JoinSchema &schema, const ParseTree &tree, const Change &change) {
    auto matches = [](const std::pair<std::string, std::string> &e,
                      const std::pair<std::string, std::string> &arc) {
        return e == arc || (e.first == arc.second && e.second == arc.first);
    };
    auto undirected = tree.edges();
    auto it = std::find_if(undirected.begin(), undirected.end(),
                           [&](const auto &e) { return matches(e, change.del); });
    if (it == undirected.end())
        throw ChangeError("deleted arc is not in the tree");
    if (!tree.has_node(change.add.first) || !tree.has_node(change.add.second))
        throw ChangeError("added arc endpoint is not a tree node");
    undirected.erase(it);
    undirected.push_back(change.add);

    ParseTree next;
    try {
        next = rebuild_rooted(tree.root(), undirected);
    } catch (const TreeStructureError &) {
        throw ChangeError("change does not yield a spanning tree");
    }
    if (!validate_parse_tree(schema, next))
        throw ChangeError("change breaks attribute connectivity");
    return next;
}

}  // namespace safejoin
