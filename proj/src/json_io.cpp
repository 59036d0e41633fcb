#include "safejoin/json_io.hpp"

namespace safejoin {

using nlohmann::json;

json tree_to_json(const ParseTree &tree) {
    json j;
    j["root"] = tree.root();
    j["edges"] = json::array();
    for (const auto &[parent, child] : tree.edges()) j["edges"].push_back({parent, child});
    return j;
}

ParseTree tree_from_json(const json &j) {
    if (!j.is_object() || !j.contains("root") || !j.contains("edges"))
        throw TreeStructureError("tree document needs \"root\" and \"edges\"");
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto &e : j["edges"]) {
        if (!e.is_array() || e.size() != 2)
            throw TreeStructureError("tree edge must be a [parent, child] pair");
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return ParseTree::from_edges(j["root"].get<std::string>(), edges);
}

json database_to_json(const DatabaseInstance &db) {
    json relations = json::object();
    for (const auto &[name, inst] : db.relations) {
        json r;
        r["columns"] = inst.columns;
        r["rows"] = json::array();
        for (const auto &row : inst.rows) r["rows"].push_back(row);
        relations[name] = std::move(r);
    }
    return json{{"relations", relations}};
}

DatabaseInstance database_from_json(const json &j, const JoinSchema &schema) {
    if (!j.is_object() || !j.contains("relations") || !j["relations"].is_object())
        throw SchemaError("database document needs a \"relations\" object");
    DatabaseInstance db = instance_for(schema);
    for (const auto &[name, r] : j["relations"].items()) {
        if (!schema.has_relation(name)) throw SchemaError("database names unknown relation " + name);
        const RelationSchema &rel = schema.relation(name);
        if (!r.contains("columns") || r["columns"].get<std::vector<std::string>>() != rel.columns)
            throw SchemaError("columns of " + name + " must match the schema declaration order");
        auto &inst = db.relations.at(name);
        for (const auto &row : r["rows"]) {
            Row values = row.get<Row>();
            if (values.size() != rel.columns.size())
                throw SchemaError("row width mismatch in relation " + name);
            inst.rows.insert(std::move(values));
        }
    }
    return db;
}

json join_result_to_json(const JoinResult &result) {
    json j;
    j["columns"] = result.columns;
    j["rows"] = json::array();
    for (const auto &row : result.rows) j["rows"].push_back(row);
    return j;
}

json verdict_to_json(const SafetyVerdict &verdict) {
    json j;
    j["safe"] = verdict.safe;
    j["certificate"] = verdict.certificate ? tree_to_json(*verdict.certificate) : json(nullptr);
    j["witness"] = verdict.witness ? database_to_json(*verdict.witness) : json(nullptr);
    j["cause"] = verdict.cause_string();
    j["dangling"] = verdict.dangling_exhibit ? json(*verdict.dangling_exhibit) : json(nullptr);
    return j;
}

}  // namespace safejoin
