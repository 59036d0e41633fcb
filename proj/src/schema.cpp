#include "safejoin/schema.hpp"

#include <algorithm>
#include <map>

#include "json.hpp"

namespace safejoin {

RelationSchema::RelationSchema(std::string name_, std::vector<std::string> columns_)
    : name(std::move(name_)), columns(std::move(columns_)) {
    attrs.insert(columns.begin(), columns.end());
}

const RelationSchema &JoinSchema::relation(const std::string &name) const {
    for (const auto &r : relations)
        if (r.name == name) return r;
    throw SchemaError("unknown relation: " + name);
}

bool JoinSchema::has_relation(const std::string &name) const {
    return std::any_of(relations.begin(), relations.end(),
                       [&](const RelationSchema &r) { return r.name == name; });
}

AttrSet JoinSchema::all_attributes() const {
    AttrSet all;
    for (const auto &r : relations) all.insert(r.attrs.begin(), r.attrs.end());
    return all;
}

std::set<std::string> JoinSchema::relation_names() const {
    std::set<std::string> names;
    for (const auto &r : relations) names.insert(r.name);
    return names;
}

JoinSchema parse_schema(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw SchemaError(std::string("schema document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("relations") || !doc["relations"].is_array())
        throw SchemaError("schema document must be an object with a \"relations\" array");

    JoinSchema schema;
    for (const auto &rel : doc["relations"]) {
        if (!rel.is_object() || !rel.contains("name") || !rel.contains("attributes"))
            throw SchemaError("each relation needs \"name\" and \"attributes\"");
        std::string name = rel["name"].get<std::string>();
        if (name.empty()) throw SchemaError("relation name must be nonempty");
        if (schema.has_relation(name)) throw SchemaError("duplicate relation name: " + name);

        std::vector<std::string> columns;
        AttrSet seen;
        for (const auto &a : rel["attributes"]) {
            std::string attr = a.get<std::string>();
            if (attr.empty()) throw SchemaError("attribute name must be nonempty (relation " + name + ")");
            if (!seen.insert(attr).second)
                throw SchemaError("attribute " + attr + " repeated in relation " + name);
            columns.push_back(attr);
        }
        if (columns.empty()) throw SchemaError("relation " + name + " has no attributes");
        schema.relations.emplace_back(name, std::move(columns));
    }
    if (schema.relations.empty()) throw SchemaError("schema needs at least one relation");

    AttrSet all = schema.all_attributes();
    if (doc.contains("output")) {
        for (const auto &a : doc["output"]) {
            std::string attr = a.get<std::string>();
            if (all.count(attr) == 0)
                throw SchemaError("output attribute " + attr + " appears in no relation");
            schema.output_attributes.insert(attr);
        }
    } else {
        schema.output_attributes = all;
    }
    return schema;
}

SubjoinSpec make_subjoin(const JoinSchema &schema, const std::set<std::string> &names) {
    if (names.empty()) throw SubjoinError("subjoin must name at least one relation");
    for (const auto &n : names)
        if (!schema.has_relation(n)) throw SubjoinError("subjoin names unknown relation: " + n);
    return SubjoinSpec{names};
}

SubjoinSpec parse_subjoin_doc(const std::string &text, const JoinSchema &schema) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw SubjoinError(std::string("subjoin document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("subjoin") || !doc["subjoin"].is_array())
        throw SubjoinError("subjoin document must be an object with a \"subjoin\" array");
    std::set<std::string> names;
    for (const auto &n : doc["subjoin"]) names.insert(n.get<std::string>());
    return make_subjoin(schema, names);
}

AttrSet subjoin_attributes(const JoinSchema &schema, const SubjoinSpec &subjoin) {
    AttrSet attrs;
    for (const auto &name : subjoin.members) {
        const auto &r = schema.relation(name);
        attrs.insert(r.attrs.begin(), r.attrs.end());
    }
    return attrs;
}

BoundaryResult boundary_attributes(const JoinSchema &schema, const SubjoinSpec &subjoin) {
    BoundaryResult result;
    AttrSet inside;
    AttrSet outside;
    bool any_outside = false;
    for (const auto &r : schema.relations) {
        if (subjoin.contains(r.name)) {
            inside.insert(r.attrs.begin(), r.attrs.end());
        } else {
            outside.insert(r.attrs.begin(), r.attrs.end());
            any_outside = true;
        }
    }
    if (!any_outside) {
        result.whole_join = true;
        return result;
    }
    for (const auto &a : inside)
        if (outside.count(a)) result.attributes.insert(a);
    return result;
}

AttrSet subjoin_output_attributes(const JoinSchema &schema, const SubjoinSpec &subjoin) {
    AttrSet a_s = subjoin_attributes(schema, subjoin);
    AttrSet out;
    for (const auto &a : schema.output_attributes)
        if (a_s.count(a)) out.insert(a);
    BoundaryResult boundary = boundary_attributes(schema, subjoin);
    out.insert(boundary.attributes.begin(), boundary.attributes.end());
    return out;
}

SubjoinSpec complement(const JoinSchema &schema, const SubjoinSpec &subjoin) {
    std::set<std::string> rest;
    for (const auto &r : schema.relations)
        if (!subjoin.contains(r.name)) rest.insert(r.name);
    if (rest.empty()) throw SubjoinError("complement of the whole join is empty");
    return SubjoinSpec{rest};
}

Hypergraph partial_edges(const JoinSchema &schema, const AttrSet &n1) {
    Hypergraph graph;
    for (const auto &r : schema.relations) {
        AttrSet cut;
        for (const auto &a : r.attrs)
            if (n1.count(a)) cut.insert(a);
        graph.edges.push_back({r.name, std::move(cut)});
    }
    return graph;
}

std::vector<std::vector<std::string>> connected_components(const Hypergraph &graph) {
    // Union-find over nonempty edges, merging through shared attributes.
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < graph.edges.size(); ++i)
        if (!graph.edges[i].attrs.empty()) live.push_back(i);

    std::map<std::size_t, std::size_t> up;
    for (auto i : live) up[i] = i;
    auto find = [&](std::size_t x) {
        while (up[x] != x) x = up[x] = up[up[x]];
        return x;
    };

    std::map<std::string, std::size_t> owner;  // attribute → first edge seen with it
    for (auto i : live) {
        for (const auto &a : graph.edges[i].attrs) {
            auto [it, inserted] = owner.emplace(a, i);
            if (!inserted) up[find(i)] = find(it->second);
        }
    }

    std::map<std::size_t, std::vector<std::string>> groups;
    for (auto i : live) groups[find(i)].push_back(graph.edges[i].origin);

    std::vector<std::vector<std::string>> components;
    for (auto &[root, names] : groups) {
        std::sort(names.begin(), names.end());
        components.push_back(std::move(names));
    }
    std::sort(components.begin(), components.end());
    return components;
}

}  // namespace safejoin
