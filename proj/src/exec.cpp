#include "safejoin/exec.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace safejoin {

namespace {

std::vector<std::size_t> positions_of(const std::vector<std::string> &columns,
                                      const std::vector<std::string> &wanted) {
    std::vector<std::size_t> at;
    at.reserve(wanted.size());
    for (const auto &w : wanted) {
        auto it = std::find(columns.begin(), columns.end(), w);
        at.push_back(static_cast<std::size_t>(it - columns.begin()));
    }
    return at;
}

Row take(const Row &row, const std::vector<std::size_t> &at) {
    Row out;
    out.reserve(at.size());
    for (auto i : at) out.push_back(row[i]);
    return out;
}

std::vector<std::string> shared_columns(const std::vector<std::string> &a,
                                        const std::vector<std::string> &b) {
    std::vector<std::string> shared;
    for (const auto &x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) shared.push_back(x);
    return shared;
}

const RelationInstance &instance_of(const DatabaseInstance &db, const std::string &name) {
    auto it = db.relations.find(name);
    if (it == db.relations.end()) throw SchemaError("database has no relation " + name);
    return it->second;
}

}  // namespace

JoinResult eval_join(const JoinSchema &schema, const DatabaseInstance &db,
                     const std::vector<std::string> &relation_names, const AttrSet &out) {
    // Running result starts as the neutral element: one empty tuple.
    std::vector<std::string> columns;
    std::set<Row> rows{Row{}};

    for (const auto &name : relation_names) {
        const RelationSchema &rel = schema.relation(name);
        const RelationInstance &inst = instance_of(db, name);
        if (inst.columns != rel.columns)
            throw SchemaError("instance of " + name + " does not match its schema");

        auto shared = shared_columns(columns, rel.columns);
        auto left_at = positions_of(columns, shared);
        auto right_at = positions_of(rel.columns, shared);
        std::vector<std::size_t> right_new;  // columns of rel not already present
        std::vector<std::string> new_names;
        for (std::size_t i = 0; i < rel.columns.size(); ++i) {
            if (std::find(columns.begin(), columns.end(), rel.columns[i]) == columns.end()) {
                right_new.push_back(i);
                new_names.push_back(rel.columns[i]);
            }
        }

        std::map<Row, std::vector<Row>> buckets;
        for (const auto &row : inst.rows) buckets[take(row, right_at)].push_back(take(row, right_new));

        std::set<Row> next;
        for (const auto &row : rows) {
            auto it = buckets.find(take(row, left_at));
            if (it == buckets.end()) continue;
            for (const auto &extension : it->second) {
                Row combined = row;
                combined.insert(combined.end(), extension.begin(), extension.end());
                next.insert(std::move(combined));
            }
        }
        rows = std::move(next);
        columns.insert(columns.end(), new_names.begin(), new_names.end());
    }

    JoinResult result;
    result.columns.assign(out.begin(), out.end());
    auto at = positions_of(columns, result.columns);
    for (auto i : at)
        if (i >= columns.size()) throw SchemaError("output attribute not produced by the join");
    for (const auto &row : rows) result.rows.insert(take(row, at));
    return result;
}

JoinResult eval_full_join(const JoinSchema &schema, const DatabaseInstance &db) {
    std::vector<std::string> names;
    for (const auto &r : schema.relations) names.push_back(r.name);
    return eval_join(schema, db, names, schema.output_attributes);
}

namespace {

JoinResult eval_member_join(const JoinSchema &schema, const DatabaseInstance &db,
                            const SubjoinSpec &members, const AttrSet &out) {
    std::vector<std::string> names;
    for (const auto &r : schema.relations)
        if (members.contains(r.name)) names.push_back(r.name);
    return eval_join(schema, db, names, out);
}

}  // namespace

JoinResult eval_subjoin(const JoinSchema &schema, const DatabaseInstance &db,
                        const SubjoinSpec &subjoin) {
    return eval_member_join(schema, db, subjoin, subjoin_output_attributes(schema, subjoin));
}

JoinResult eval_complement(const JoinSchema &schema, const DatabaseInstance &db,
                           const SubjoinSpec &subjoin) {
    SubjoinSpec rest = complement(schema, subjoin);
    return eval_member_join(schema, db, rest, subjoin_output_attributes(schema, rest));
}

RelationInstance semijoin(const RelationInstance &r, const RelationInstance &s) {
    auto shared = shared_columns(r.columns, s.columns);
    auto left_at = positions_of(r.columns, shared);
    auto right_at = positions_of(s.columns, shared);

    std::set<Row> keys;
    for (const auto &row : s.rows) keys.insert(take(row, right_at));

    RelationInstance out{r.columns, {}};
    for (const auto &row : r.rows)
        if (keys.count(take(row, left_at))) out.rows.insert(row);
    return out;
}

DatabaseInstance full_reduce(const JoinSchema &schema, const ParseTree &tree,
                             const DatabaseInstance &db) {
    for (const auto &r : schema.relations)
        if (instance_of(db, r.name).columns != r.columns)
            throw SchemaError("instance of " + r.name + " does not match its schema");

    auto nodes = tree.nodes();
    std::sort(nodes.begin(), nodes.end(), [&](const auto &a, const auto &b) {
        int da = tree.depth_of(a), db_ = tree.depth_of(b);
        return da != db_ ? da < db_ : a < b;
    });

    DatabaseInstance out = db;
    // Upward: r' := r' ⋉ r for each node r from the leaves in.
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        auto parent = tree.parent_of(*it);
        if (!parent) continue;
        out.relations[*parent] = semijoin(out.relations.at(*parent), out.relations.at(*it));
    }
    // Downward: r := r ⋉ r' from the root out.
    for (const auto &node : nodes) {
        auto parent = tree.parent_of(node);
        if (!parent) continue;
        out.relations[node] = semijoin(out.relations.at(node), out.relations.at(*parent));
    }
    return out;
}

bool is_fully_reduced(const JoinSchema &schema, const ParseTree &tree, const DatabaseInstance &db) {
    return full_reduce(schema, tree, db) == db;
}

std::set<Row> dangling_tuples(const JoinResult &r, const JoinResult &s) {
    auto shared = shared_columns(r.columns, s.columns);
    auto left_at = positions_of(r.columns, shared);
    auto right_at = positions_of(s.columns, shared);

    std::set<Row> keys;
    for (const auto &row : s.rows) keys.insert(take(row, right_at));

    std::set<Row> dangling;
    for (const auto &row : r.rows)
        if (!keys.count(take(row, left_at))) dangling.insert(row);
    return dangling;
}

bool verify_witness(const JoinSchema &schema, const SubjoinSpec &subjoin,
                    const DatabaseInstance &db) {
    BoundaryResult boundary = boundary_attributes(schema, subjoin);
    if (boundary.whole_join) return false;  // no complement, nothing can dangle

    ParseTree tree = build_parse_tree(schema);
    if (!is_fully_reduced(schema, tree, db)) return false;

    JoinResult mine = eval_subjoin(schema, db, subjoin);
    JoinResult theirs = eval_complement(schema, db, subjoin);
    return !dangling_tuples(mine, theirs).empty();
}

DatabaseInstance random_reduced_database(const JoinSchema &schema, uint64_t seed, int tuples,
                                         int domain) {
    if (tuples < 1) throw std::invalid_argument("tuple count must be at least 1");
    if (domain < 1) throw std::invalid_argument("domain must be at least 1");
    std::mt19937_64 rng(seed);

    AttrSet all = schema.all_attributes();
    DatabaseInstance db = instance_for(schema);
    for (int i = 0; i < tuples; ++i) {
        std::map<std::string, std::string> wide;
        for (const auto &a : all) wide[a] = std::to_string(rng() % static_cast<uint64_t>(domain));
        for (const auto &r : schema.relations) {
            Row row;
            row.reserve(r.columns.size());
            for (const auto &c : r.columns) row.push_back(wide.at(c));
            db.relations[r.name].rows.insert(std::move(row));
        }
    }
    return db;
}

}  // namespace safejoin
