#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "safejoin/schema.hpp"

namespace safejoin {

using Row = std::vector<std::string>;

/// Set of tuples over one relation schema. Column order matches the
/// schema declaration order; rows are kept sorted (set semantics).
struct RelationInstance {
    std::vector<std::string> columns;
    std::set<Row> rows;

    bool operator==(const RelationInstance &other) const = default;
};

struct DatabaseInstance {
    std::map<std::string, RelationInstance> relations;

    bool operator==(const DatabaseInstance &other) const = default;
};

/// Empty instance with one (empty) RelationInstance per schema relation.
DatabaseInstance instance_for(const JoinSchema &schema);

}  // namespace safejoin
