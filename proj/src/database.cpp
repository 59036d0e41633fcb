#include "safejoin/database.hpp"

namespace safejoin {

DatabaseInstance instance_for(const JoinSchema &schema) {
    DatabaseInstance db;
    for (const auto &r : schema.relations) db.relations[r.name] = RelationInstance{r.columns, {}};
    return db;
}

}  // namespace safejoin
