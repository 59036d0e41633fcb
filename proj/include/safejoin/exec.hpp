#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "safejoin/database.hpp"
#include "safejoin/parse_tree.hpp"
#include "safejoin/schema.hpp"

namespace safejoin {

/// Join output: tuples over a sorted column list, set semantics.
struct JoinResult {
    std::vector<std::string> columns;
    std::set<Row> rows;

    bool operator==(const JoinResult &other) const = default;
};

/// Natural join of the named relations followed by projection onto out.
/// Left-deep pairwise hash join in the given order; correctness, not
/// performance, is the contract. An empty relation list yields the
/// neutral result (one empty tuple).
JoinResult eval_join(const JoinSchema &schema, const DatabaseInstance &db,
                     const std::vector<std::string> &relation_names, const AttrSet &out);

/// Full join in schema declaration order with the schema's output attributes.
JoinResult eval_full_join(const JoinSchema &schema, const DatabaseInstance &db);

/// Subjoin output with the attributes prescribed for subjoins:
/// (output ∩ A_S) ∪ boundary.
JoinResult eval_subjoin(const JoinSchema &schema, const DatabaseInstance &db,
                        const SubjoinSpec &subjoin);

/// Complement subjoin output, same attribute rule applied to the complement.
JoinResult eval_complement(const JoinSchema &schema, const DatabaseInstance &db,
                           const SubjoinSpec &subjoin);

/// Tuples of r that join with at least one tuple of s on the shared
/// attributes. With no shared attributes this keeps r exactly when s is
/// nonempty.
RelationInstance semijoin(const RelationInstance &r, const RelationInstance &s);

/// Procedure Semijoin: 2n-2 statements, leaf-to-root then root-to-leaf.
/// The output is consistent and join-equivalent to the input.
DatabaseInstance full_reduce(const JoinSchema &schema, const ParseTree &tree,
                             const DatabaseInstance &db);

bool is_fully_reduced(const JoinSchema &schema, const ParseTree &tree, const DatabaseInstance &db);

/// Tuples of r joining with no tuple of s on the shared columns.
std::set<Row> dangling_tuples(const JoinResult &r, const JoinResult &s);

/// True iff db is fully reduced and the subjoin output has at least one
/// dangling tuple with respect to the complement output. This is the
/// gate every emitted unsafety witness must pass.
bool verify_witness(const JoinSchema &schema, const SubjoinSpec &subjoin,
                    const DatabaseInstance &db);

/// k tuples over all attributes from a seeded generator, projected onto
/// every relation. Consistent (hence fully reduced) by construction.
/// Values are integers 0..domain-1 rendered as strings.
DatabaseInstance random_reduced_database(const JoinSchema &schema, uint64_t seed, int tuples,
                                         int domain = 3);

}  // namespace safejoin
