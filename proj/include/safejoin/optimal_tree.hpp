#pragma once

#include <optional>
#include <string>
#include <vector>

#include "safejoin/parse_tree.hpp"
#include "safejoin/schema.hpp"

namespace safejoin {

struct EnumerationBoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A break on the path joining two maximal subtrees whose interior nodes
/// are all external.
struct GeneralBreak {
    std::string t1_root;  // subtree whose root gets re-hung (deeper root)
    std::string t2_root;
    std::vector<std::string> path;  // from a node of T1 to a node of T2
    BreakPoint point;
    Change change;  // the one-change rewrite merging T1 into T2
};

/// Scans subtree pairs by (depth of deeper root desc, names) and returns
/// the first pair whose connecting path is all-external inside and breaks.
std::optional<GeneralBreak> find_general_break(const JoinSchema &schema, const ParseTree &tree,
                                               const MaximalSubtreeSet &set);

struct MinimizeStep {
    Change change;
    std::size_t subtrees_before = 0;
    std::size_t subtrees_after = 0;
};

struct MinimizeResult {
    ParseTree tree;
    std::vector<MinimizeStep> trace;
};

/// Repeats the one-change general-break rewrite until no general break
/// remains. The fixed point attains the minimum number of maximal
/// subtrees over all parse trees of the join.
MinimizeResult minimize_maximal_subtrees(const JoinSchema &schema, const SubjoinSpec &subjoin,
                                         const ParseTree &t0);

/// All parse trees of the join, one per underlying labeled tree, rooted
/// at the lexicographically smallest relation. Verification oracle;
/// throws EnumerationBoundError past the bound.
std::vector<ParseTree> enumerate_parse_trees(const JoinSchema &schema, std::size_t bound = 6);

}  // namespace safejoin
