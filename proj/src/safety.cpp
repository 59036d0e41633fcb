#include "safejoin/safety.hpp"

#include <algorithm>

#include "safejoin/optimal_tree.hpp"

namespace safejoin {

std::set<std::string> associated_nodes(const JoinSchema &schema, const SubjoinSpec &subjoin,
                                       const std::string &external) {
    if (subjoin.contains(external))
        throw SubjoinError(external + " is a subjoin relation, not an external one");
    AttrSet a_s = subjoin_attributes(schema, subjoin);
    AttrSet needed;  // subjoin attributes contained in the external relation
    for (const auto &a : schema.relation(external).attrs)
        if (a_s.count(a)) needed.insert(a);

    std::set<std::string> result;
    for (const auto &name : subjoin.members) {
        const AttrSet &attrs = schema.relation(name).attrs;
        if (std::includes(attrs.begin(), attrs.end(), needed.begin(), needed.end()))
            result.insert(name);
    }
    return result;
}

namespace {

AttrSet attrs_of_nodes(const JoinSchema &schema, const std::set<std::string> &nodes) {
    AttrSet attrs;
    for (const auto &n : nodes) {
        const AttrSet &a = schema.relation(n).attrs;
        attrs.insert(a.begin(), a.end());
    }
    return attrs;
}

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

AttrSet minus(const AttrSet &a, const AttrSet &b) {
    AttrSet out;
    for (const auto &x : a)
        if (!b.count(x)) out.insert(x);
    return out;
}

/// The maximal subtree with the deepest root; ties by smallest root name.
std::size_t pick_lowest(const ParseTree &tree, const MaximalSubtreeSet &set) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < set.subtrees.size(); ++i) {
        int di = tree.depth_of(set.subtrees[i].root);
        int db = tree.depth_of(set.subtrees[best].root);
        if (di > db) best = i;  // equal depth keeps the earlier (lex smaller) root
    }
    return best;
}

/// Another lowest subtree whose stem ends on the same tip; deepest root
/// first, ties by name.
std::optional<std::size_t> find_sibling(const ParseTree &tree, const MaximalSubtreeSet &set,
                                        std::size_t chosen, const std::string &tip) {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < set.subtrees.size(); ++j) {
        if (j == chosen || !is_lowest_subtree(tree, set, j)) continue;
        Stem stem = stem_of(tree, set, set.subtrees[j]);
        if (stem.tip() != tip) continue;
        if (!best || tree.depth_of(set.subtrees[j].root) > tree.depth_of(set.subtrees[*best].root))
            best = j;
    }
    return best;
}

/// Stems of two sibling subtrees concatenated through their shared tip.
std::vector<std::string> sibling_path(const Stem &one, const Stem &other) {
    std::vector<std::string> path = one.nodes;
    path.insert(path.end(), other.nodes.rbegin() + 1, other.nodes.rend());
    return path;
}

std::vector<AttrSet> nset_candidates(const JoinSchema &schema, const SubjoinSpec &subjoin,
                                     const MaximalSubtreeSet &set, const MaximalSubtree &chosen,
                                     const MaximalSubtree &other,
                                     const std::vector<std::string> &path) {
    AttrSet mine = attrs_of_nodes(schema, chosen.nodes);
    AttrSet theirs = attrs_of_nodes(schema, other.nodes);
    AttrSet both;
    for (const auto &a : mine)
        if (theirs.count(a)) both.insert(a);

    AttrSet on_path;
    for (const auto &node : path) {
        const AttrSet &attrs = schema.relation(node).attrs;
        on_path.insert(attrs.begin(), attrs.end());
    }
    AttrSet path_shared = path_shared_attrs(schema, path);

    // Attributes shared by at least two maximal subtrees of the subjoin.
    AttrSet multi_shared;
    {
        std::map<std::string, int> seen;
        for (const auto &part : set.subtrees)
            for (const auto &a : attrs_of_nodes(schema, part.nodes)) ++seen[a];
        for (const auto &[a, k] : seen)
            if (k >= 2) multi_shared.insert(a);
    }

    AttrSet subjoin_attrs = subjoin_attributes(schema, subjoin);

    std::vector<AttrSet> candidates;
    auto push = [&](AttrSet c) {
        if (c.empty()) return;
        if (std::find(candidates.begin(), candidates.end(), c) == candidates.end())
            candidates.push_back(std::move(c));
    };
    AttrSet pair_union = mine;
    pair_union.insert(theirs.begin(), theirs.end());
    push(minus(pair_union, both));           // the two subtrees' symmetric difference
    push(minus(on_path, path_shared));       // stem/path attributes minus the shared set
    {
        AttrSet wide = pair_union;
        wide.insert(on_path.begin(), on_path.end());
        push(minus(wide, path_shared));
    }
    push(minus(subjoin_attrs, multi_shared));
    return candidates;
}

}  // namespace

std::optional<NSet> find_n_set(const JoinSchema &schema, const ParseTree &tree,
                               const SubjoinSpec &subjoin, const MaximalSubtreeSet &set,
                               const MaximalSubtree &chosen) {
    if (set.count() < 2) return std::nullopt;

    std::size_t chosen_index = MaximalSubtreeSet::npos;
    for (std::size_t i = 0; i < set.subtrees.size(); ++i)
        if (set.subtrees[i].root == chosen.root) chosen_index = i;
    if (chosen_index == MaximalSubtreeSet::npos)
        throw std::invalid_argument("chosen subtree is not in the set");

    Stem stem = stem_of(tree, set, chosen);

    // Partner subtrees, best match first: the tip's subtree when the stem
    // is dependant, a sibling when not, then the remaining subtrees.
    std::vector<std::size_t> partners;
    auto add_partner = [&](std::size_t j) {
        if (j != chosen_index &&
            std::find(partners.begin(), partners.end(), j) == partners.end())
            partners.push_back(j);
    };
    if (stem.dependant) {
        add_partner(set.subtree_of(stem.tip()));
    } else if (auto sibling = find_sibling(tree, set, chosen_index, stem.tip())) {
        add_partner(*sibling);
    }
    for (std::size_t j = 0; j < set.subtrees.size(); ++j) add_partner(j);

    for (auto j : partners) {
        const MaximalSubtree &other = set.subtrees[j];
        std::vector<std::string> path;
        if (stem.dependant && set.subtree_of(stem.tip()) == j) {
            path = stem.nodes;
        } else if (!stem.dependant) {
            if (auto sib = find_sibling(tree, set, chosen_index, stem.tip()); sib && *sib == j) {
                Stem other_stem = stem_of(tree, set, other);
                path = sibling_path(stem, other_stem);
            }
        }
        if (path.empty()) path = tree.path_between(chosen.root, other.root);

        for (auto &candidate : nset_candidates(schema, subjoin, set, chosen, other, path)) {
            if (verify_n_set(schema, subjoin, candidate, chosen.nodes))
                return NSet{std::move(candidate), chosen.root, chosen.nodes};
        }
    }
    return std::nullopt;
}

ReduceOutcome reduce_step(const JoinSchema &schema, const ParseTree &tree,
                          const SubjoinSpec &subjoin) {
    MaximalSubtreeSet set = maximal_subtrees(tree, subjoin);
    if (set.count() < 2)
        throw std::invalid_argument("reduce_step needs at least two maximal subtrees");

    std::size_t chosen_index = pick_lowest(tree, set);
    const MaximalSubtree &chosen = set.subtrees[chosen_index];
    Stem stem = stem_of(tree, set, chosen);

    // Path joining the chosen subtree with its counterpart: the stem when
    // the subtree hangs from another one, both stems glued at the tip when
    // it has a sibling.
    std::optional<std::vector<std::string>> path;
    if (stem.dependant) {
        path = stem.nodes;
    } else if (auto sibling = find_sibling(tree, set, chosen_index, stem.tip())) {
        Stem other = stem_of(tree, set, set.subtrees[*sibling]);
        path = sibling_path(stem, other);
    }

    if (path) {
        if (auto point = detect_break(schema, tree, *path)) {
            Change change{{point->lower, point->upper}, {path->front(), path->back()}};
            ParseTree next = apply_change(schema, tree, change);
            if (maximal_subtrees(next, subjoin).count() >= set.count())
                throw SafetyInternalError("break rewrite did not reduce the subtree count");
            return ReduceOutcome{std::move(next), std::nullopt};
        }
    }

    // A break anywhere else still counts as progress and is preferred over
    // declaring the subjoin unsafe.
    if (auto general = find_general_break(schema, tree, set)) {
        ParseTree next = apply_change(schema, tree, general->change);
        if (maximal_subtrees(next, subjoin).count() >= set.count())
            throw SafetyInternalError("general-break rewrite did not reduce the subtree count");
        return ReduceOutcome{std::move(next), std::nullopt};
    }

    if (auto nset = find_n_set(schema, tree, subjoin, set, chosen))
        return ReduceOutcome{std::nullopt, std::move(nset)};
    for (std::size_t i = 0; i < set.subtrees.size(); ++i) {
        if (!is_lowest_subtree(tree, set, i)) continue;
        if (auto nset = find_n_set(schema, tree, subjoin, set, set.subtrees[i]))
            return ReduceOutcome{std::nullopt, std::move(nset)};
    }
    throw SafetyInternalError("no reduction and no verified n-set; tree is stuck");
}

std::string SafetyVerdict::cause_string() const {
    if (safe) {
        if (safe_cause == SafeCause::WholeJoin) return "whole-join";
        return "single-subtree";
    }
    if (unsafe_cause == UnsafeCause::NoAssociatedNode)
        return "no-associated-node:" + offending_external.value_or("?");
    std::string attrs;
    if (n_set) {
        for (const auto &a : n_set->attributes) {
            if (!attrs.empty()) attrs += ",";
            attrs += a;
        }
    }
    return "n-set:" + attrs;
}

namespace {

void attach_witness(const JoinSchema &schema, const SubjoinSpec &subjoin, SafetyVerdict &verdict,
                    DatabaseInstance db) {
    JoinResult mine = eval_subjoin(schema, db, subjoin);
    JoinResult theirs = eval_complement(schema, db, subjoin);
    auto dangling = dangling_tuples(mine, theirs);
    if (dangling.empty())
        throw SafetyInternalError("verified witness lost its dangling tuple");
    verdict.dangling_columns = mine.columns;
    verdict.dangling_exhibit = *dangling.begin();
    verdict.witness = std::move(db);
}

}  // namespace

SafetyVerdict decide_safe(const JoinSchema &schema, const SubjoinSpec &subjoin,
                          const TreeBuildOptions &opts) {
    make_subjoin(schema, subjoin.members);  // revalidate against this schema
    ParseTree tree = build_parse_tree(schema, opts);

    SafetyVerdict verdict;
    if (subjoin.members.size() == schema.relations.size()) {
        verdict.safe = true;
        verdict.safe_cause = SafeCause::WholeJoin;
        verdict.certificate = std::move(tree);
        return verdict;
    }

    // An external relation with no associated node makes the subjoin
    // unsafe outright; the chase produces the witness.
    for (const auto &r : schema.relations) {
        if (subjoin.contains(r.name)) continue;
        if (!associated_nodes(schema, subjoin, r.name).empty()) continue;
        DatabaseInstance db = chase_witness(schema, tree, subjoin);
        if (!verify_witness(schema, subjoin, db))
            throw SafetyInternalError("chase witness failed verification for " + r.name);
        verdict.safe = false;
        verdict.unsafe_cause = UnsafeCause::NoAssociatedNode;
        verdict.offending_external = r.name;
        attach_witness(schema, subjoin, verdict, std::move(db));
        return verdict;
    }

    // Every external relation has an associated node: shrink the number of
    // maximal subtrees until a single partial subtree or an n-set remains.
    for (std::size_t round = 0; round <= schema.relations.size(); ++round) {
        MaximalSubtreeSet set = maximal_subtrees(tree, subjoin);
        if (set.count() == 1) {
            if (!validate_parse_tree(schema, tree))
                throw SafetyInternalError("certificate tree fails validation");
            verdict.safe = true;
            verdict.safe_cause = SafeCause::SingleSubtree;
            verdict.certificate = std::move(tree);
            return verdict;
        }
        ReduceOutcome outcome = reduce_step(schema, tree, subjoin);
        if (outcome.fewer_tree) {
            tree = std::move(*outcome.fewer_tree);
            continue;
        }
        DatabaseInstance db = nset_witness(schema, *outcome.n_set);
        if (!verify_witness(schema, subjoin, db))
            throw SafetyInternalError("n-set witness failed verification");
        verdict.safe = false;
        verdict.unsafe_cause = UnsafeCause::NSetFound;
        verdict.n_set = std::move(outcome.n_set);
        attach_witness(schema, subjoin, verdict, std::move(db));
        return verdict;
    }
    throw SafetyInternalError("reduction loop exceeded the relation count");
}

}  // namespace safejoin
