#include "safejoin/optimal_tree.hpp"

#include <algorithm>
#include <map>

namespace safejoin {

namespace {

AttrSet path_shared_attrs(const JoinSchema &schema, const std::vector<std::string> &path) {
    AttrSet shared = schema.relation(path.front()).attrs;
    for (const auto &node : path) {
        const AttrSet &attrs = schema.relation(node).attrs;
        AttrSet next;
        for (const auto &a : shared)
            if (attrs.count(a)) next.insert(a);
        shared = std::move(next);
    }
    return shared;
}

/// Tree path from subtree i to subtree j whose endpoints lie in the two
/// subtrees and whose interior nodes are all external. nullopt when the
/// connecting path crosses a third maximal subtree.
std::optional<std::vector<std::string>> inter_subtree_path(const ParseTree &tree,
                                                           const MaximalSubtreeSet &set,
                                                           std::size_t i, std::size_t j) {
    auto base = tree.path_between(set.subtrees[i].root, set.subtrees[j].root);

    std::size_t start = 0;
    for (std::size_t k = 0; k < base.size(); ++k)
        if (set.subtrees[i].nodes.count(base[k])) start = k;
    std::size_t stop = base.size();
    for (std::size_t k = start + 1; k < base.size(); ++k) {
        if (set.subtrees[j].nodes.count(base[k])) {
            stop = k;
            break;
        }
    }
    if (stop == base.size()) return std::nullopt;  // overlapping shapes; skip the pair

    std::vector<std::string> path(base.begin() + static_cast<std::ptrdiff_t>(start),
                                  base.begin() + static_cast<std::ptrdiff_t>(stop) + 1);
    for (std::size_t k = 1; k + 1 < path.size(); ++k)
        if (set.subtree_of(path[k]) != MaximalSubtreeSet::npos) return std::nullopt;
    return path;
}

}  // namespace

std::optional<GeneralBreak> find_general_break(const JoinSchema &schema, const ParseTree &tree,
                                               const MaximalSubtreeSet &set) {
    // Pairs ordered by the depth of the deeper root (deepest first), then
    // names; within a pair the deeper-rooted subtree is the one whose root
    // gets re-hung.
    struct Pair {
        std::size_t t1, t2;
        int depth;
    };
    std::vector<Pair> pairs;
    for (std::size_t a = 0; a < set.subtrees.size(); ++a) {
        for (std::size_t b = a + 1; b < set.subtrees.size(); ++b) {
            int da = tree.depth_of(set.subtrees[a].root);
            int db = tree.depth_of(set.subtrees[b].root);
            Pair p{a, b, std::max(da, db)};
            if (db > da) std::swap(p.t1, p.t2);
            pairs.push_back(p);
        }
    }
    std::sort(pairs.begin(), pairs.end(), [&](const Pair &x, const Pair &y) {
        if (x.depth != y.depth) return x.depth > y.depth;
        const auto &xr = set.subtrees[x.t1].root, &yr = set.subtrees[y.t1].root;
        if (xr != yr) return xr < yr;
        return set.subtrees[x.t2].root < set.subtrees[y.t2].root;
    });

    for (const auto &pair : pairs) {
        auto path = inter_subtree_path(tree, set, pair.t1, pair.t2);
        if (!path) continue;
        auto point = detect_break(schema, tree, *path);
        if (!point) continue;

        AttrSet shared = path_shared_attrs(schema, *path);
        // Re-hang target: the node of T2 containing the path's shared set
        // that is closest to T2's root; ties by name.
        std::optional<std::string> target;
        for (const auto &node : set.subtrees[pair.t2].nodes) {
            const AttrSet &attrs = schema.relation(node).attrs;
            if (!std::includes(attrs.begin(), attrs.end(), shared.begin(), shared.end()))
                continue;
            if (!target || tree.depth_of(node) < tree.depth_of(*target)) target = node;
        }

        GeneralBreak result;
        result.t1_root = set.subtrees[pair.t1].root;
        result.t2_root = set.subtrees[pair.t2].root;
        result.path = *path;
        result.point = *point;
        result.change = Change{{point->lower, point->upper}, {*target, result.t1_root}};
        return result;
    }
    return std::nullopt;
}

MinimizeResult minimize_maximal_subtrees(const JoinSchema &schema, const SubjoinSpec &subjoin,
                                         const ParseTree &t0) {
    if (!validate_parse_tree(schema, t0))
        throw std::invalid_argument("starting tree is not a parse tree of the join");

    MinimizeResult result;
    result.tree = t0;
    for (std::size_t round = 0; round <= schema.relations.size(); ++round) {
        MaximalSubtreeSet set = maximal_subtrees(result.tree, subjoin);
        auto general = find_general_break(schema, result.tree, set);
        if (!general) return result;

        ParseTree next = apply_change(schema, result.tree, general->change);
        std::size_t after = maximal_subtrees(next, subjoin).count();
        if (after >= set.count())
            throw std::logic_error("general-break rewrite did not reduce the subtree count");
        result.trace.push_back({general->change, set.count(), after});
        result.tree = std::move(next);
    }
    throw std::logic_error("minimization loop exceeded the relation count");
}

namespace {

// Labeled trees on n nodes decoded from Prüfer sequences, n^(n-2) in all.
std::vector<std::pair<std::size_t, std::size_t>> decode_pruefer(const std::vector<std::size_t> &seq,
                                                                std::size_t n) {
    std::vector<std::size_t> degree(n, 1);
    for (auto s : seq) ++degree[s];

    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<bool> used(n, false);
    for (auto s : seq) {
        std::size_t leaf = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!used[i] && degree[i] == 1) {
                leaf = i;
                break;
            }
        }
        edges.emplace_back(leaf, s);
        used[leaf] = true;
        --degree[s];
    }
    std::size_t u = n, v = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (!used[i] && degree[i] == 1) {
            if (u == n)
                u = i;
            else
                v = i;
        }
    }
    edges.emplace_back(u, v);
    return edges;
}

}  // namespace

std::vector<ParseTree> enumerate_parse_trees(const JoinSchema &schema, std::size_t bound) {
    std::size_t n = schema.relations.size();
    if (n > bound)
        throw EnumerationBoundError("join has " + std::to_string(n) +
                                    " relations, enumeration bound is " + std::to_string(bound));
    auto name_set = schema.relation_names();
    std::vector<std::string> names(name_set.begin(), name_set.end());

    std::vector<ParseTree> trees;
    if (n == 1) {
        trees.push_back(ParseTree::single_node(names[0]));
        return trees;
    }

    std::vector<std::size_t> seq(n - 2, 0);
    for (;;) {
        auto edges = decode_pruefer(seq, n);
        std::vector<std::pair<std::string, std::string>> named;
        named.reserve(edges.size());
        for (const auto &[a, b] : edges) named.emplace_back(names[a], names[b]);
        ParseTree tree = rebuild_rooted(names[0], named);
        if (validate_parse_tree(schema, tree)) trees.push_back(std::move(tree));

        // next sequence, lexicographic
        std::size_t k = seq.size();
        while (k > 0 && seq[k - 1] == n - 1) seq[--k] = 0;
        if (k == 0) break;
        ++seq[k - 1];
    }
    return trees;
}

}  // namespace safejoin
