#pragma once

#include <optional>
#include <string>
#include <vector>

#include "safejoin/database.hpp"
#include "safejoin/parse_tree.hpp"
#include "safejoin/schema.hpp"

namespace safejoin {

/// Constants used in counterexample databases. Seed values are one
/// lowercase symbol per subjoin attribute; fresh values carry a numeric
/// suffix per attribute; bits appear only in n-set witnesses. Symbolic
/// and bit values never mix inside one database.
struct Value {
    enum class Kind { Seed, Fresh, Bit };
    Kind kind;
    std::string text;

    static Value seed(const std::string &attribute);
    static Value fresh(const std::string &attribute, int index);
    static Value bit(int b);
};

/// Child-to-parent or parent-to-child tuple generating dependency along a
/// parse-tree arc. The frontier is shared between both sides; the
/// existential attributes appear only on the right.
struct Tgd {
    std::string lhs;
    std::string rhs;
    AttrSet frontier;
    AttrSet existential;

    bool operator==(const Tgd &other) const = default;
};

/// One tgd per direction per tree arc: 2(n-1) in total. The set depends
/// on the parse tree, not just the join. Sorted by (lhs, rhs).
std::vector<Tgd> build_tgds(const JoinSchema &schema, const ParseTree &tree);

/// True iff every tgd holds on the instance: each lhs tuple has an rhs
/// tuple agreeing on the frontier.
bool tgds_satisfied(const std::vector<Tgd> &tgds, const DatabaseInstance &db);

/// Counterexample database for a subjoin with an external relation that
/// has no associated node. Seeds every subjoin relation with the
/// projection of one subjoin seed tuple, then chases: one pass of
/// child-to-parent steps bottom-up, one pass of parent-to-child steps
/// top-down. Terminates with all tgds satisfied and the result fully
/// reduced.
DatabaseInstance chase_witness(const JoinSchema &schema, const ParseTree &tree,
                               const SubjoinSpec &subjoin);

/// Attribute set certifying unsafety: its partial edges leave the join
/// connected while splitting one maximal subtree from the rest of the
/// subjoin.
struct NSet {
    AttrSet attributes;
    std::string isolated_root;             // root of the maximal subtree it was derived from
    std::set<std::string> isolated_nodes;  // that subtree's nodes
};

/// Checks both conditions of the n-set definition for candidate against
/// the subjoin split (isolated nodes vs. the rest of the members).
bool verify_n_set(const JoinSchema &schema, const SubjoinSpec &subjoin, const AttrSet &candidate,
                  const std::set<std::string> &isolated_nodes);

/// Two-tuple counterexample: an imaginary relation over all attributes
/// holding the all-0 tuple and the tuple with 1 exactly on the n-set,
/// projected onto every relation.
DatabaseInstance nset_witness(const JoinSchema &schema, const NSet &nset);

}  // namespace safejoin
