#pragma once

#include <string>

#include "json.hpp"
#include "safejoin/database.hpp"
#include "safejoin/exec.hpp"
#include "safejoin/parse_tree.hpp"
#include "safejoin/safety.hpp"
#include "safejoin/schema.hpp"

namespace safejoin {

// Serialization formats, all byte-stable for fixed inputs:
//   tree:     {"root":"r0","edges":[["r0","r1"],...]}       parent first, sorted by child
//   database: {"relations":{"r0":{"columns":[...],"rows":[[...],...]}}}
//             column order = declaration order, rows sorted lexicographically
//   verdict:  {"safe":bool,"certificate":tree|null,"witness":db|null,
//              "cause":string,"dangling":tuple|null}
//   result:   {"columns":[...],"rows":[[...],...]}

nlohmann::json tree_to_json(const ParseTree &tree);
ParseTree tree_from_json(const nlohmann::json &j);

nlohmann::json database_to_json(const DatabaseInstance &db);
DatabaseInstance database_from_json(const nlohmann::json &j, const JoinSchema &schema);

nlohmann::json join_result_to_json(const JoinResult &result);

nlohmann::json verdict_to_json(const SafetyVerdict &verdict);

}  // namespace safejoin
