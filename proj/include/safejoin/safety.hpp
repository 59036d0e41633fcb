#pragma once

#include <optional>
#include <string>
#include <vector>

#include "safejoin/database.hpp"
#include "safejoin/exec.hpp"
#include "safejoin/parse_tree.hpp"
#include "safejoin/schema.hpp"
#include "safejoin/witness.hpp"

namespace safejoin {

struct SafetyInternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Subjoin relations containing every subjoin attribute of the external
/// relation. Throws SubjoinError when external is a member.
std::set<std::string> associated_nodes(const JoinSchema &schema, const SubjoinSpec &subjoin,
                                       const std::string &external);

/// N-set search for a chosen lowest maximal subtree, following the
/// dependant / sibling case split. Every candidate is verified against
/// both n-set conditions before being returned.
std::optional<NSet> find_n_set(const JoinSchema &schema, const ParseTree &tree,
                               const SubjoinSpec &subjoin, const MaximalSubtreeSet &set,
                               const MaximalSubtree &chosen);

/// One iteration of the reduction: either a parse tree with strictly
/// fewer maximal subtrees, or a verified n-set.
struct ReduceOutcome {
    std::optional<ParseTree> fewer_tree;
    std::optional<NSet> n_set;
};

/// Requires at least two maximal subtrees and that every external
/// relation has an associated node.
ReduceOutcome reduce_step(const JoinSchema &schema, const ParseTree &tree,
                          const SubjoinSpec &subjoin);

enum class SafeCause {
    SingleSubtree,     // certificate tree where the subjoin is one partial subtree
    WholeJoin,         // S covers every relation; no complement exists
};

enum class UnsafeCause {
    NoAssociatedNode,  // some external relation has no associated node
    NSetFound,         // an n-set isolates one maximal subtree
};

struct SafetyVerdict {
    bool safe = false;

    // Safe side
    std::optional<ParseTree> certificate;
    std::optional<SafeCause> safe_cause;

    // Unsafe side
    std::optional<UnsafeCause> unsafe_cause;
    std::optional<std::string> offending_external;  // NoAssociatedNode
    std::optional<NSet> n_set;                      // NSetFound
    std::optional<DatabaseInstance> witness;
    std::vector<std::string> dangling_columns;
    std::optional<Row> dangling_exhibit;

    std::string cause_string() const;
};

/// Full decision procedure. Safe verdicts carry a certificate tree whose
/// subjoin forms a single maximal subtree; unsafe verdicts carry a fully
/// reduced witness database that has been re-checked with verify_witness,
/// plus one dangling subjoin tuple. Throws CyclicJoinError for cyclic
/// joins.
SafetyVerdict decide_safe(const JoinSchema &schema, const SubjoinSpec &subjoin,
                          const TreeBuildOptions &opts = {});

}  // namespace safejoin
