#pragma once

// Shared joins, databases, generators and the brute-force join oracle
// used across the test suites.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "safejoin/database.hpp"
#include "safejoin/exec.hpp"
#include "safejoin/parse_tree.hpp"
#include "safejoin/schema.hpp"

namespace fixtures {

using namespace safejoin;

/// Schema from (name, attribute-letters) pairs, e.g. {"r0", "ABC"}.
inline JoinSchema schema_of(const std::vector<std::pair<std::string, std::string>> &rels) {
    JoinSchema schema;
    for (const auto &[name, letters] : rels) {
        std::vector<std::string> columns;
        for (char c : letters) columns.emplace_back(1, c);
        schema.relations.emplace_back(name, columns);
    }
    schema.output_attributes = schema.all_attributes();
    return schema;
}

inline SubjoinSpec subjoin_of(const JoinSchema &schema, const std::vector<std::string> &names) {
    return make_subjoin(schema, {names.begin(), names.end()});
}

inline DatabaseInstance db_of(const JoinSchema &schema,
                              const std::map<std::string, std::vector<Row>> &data) {
    DatabaseInstance db = instance_for(schema);
    for (const auto &[name, rows] : data)
        for (const auto &row : rows) db.relations.at(name).rows.insert(row);
    return db;
}

// ---------------------------------------------------------------------------
// Worked examples

/// J = ABC ⋈ AB ⋈ AC ⋈ BC.
inline JoinSchema abc_join() {
    return schema_of({{"r0", "ABC"}, {"r1", "AB"}, {"r2", "AC"}, {"r3", "BC"}});
}

/// The fully reduced database exhibiting the dangling subjoin tuple.
inline DatabaseInstance abc_database() {
    return db_of(abc_join(), {
        {"r0", {{"a", "b", "c1"}, {"a", "b1", "c"}, {"a1", "b", "c"}}},
        {"r1", {{"a", "b"}, {"a", "b1"}, {"a1", "b"}}},
        {"r2", {{"a", "c"}, {"a", "c1"}, {"a1", "c"}}},
        {"r3", {{"b", "c"}, {"b", "c1"}, {"b1", "c"}}},
    });
}

/// J = ABCDE ⋈ ACBE ⋈ ADE ⋈ AB ⋈ AE, relations named by their attributes.
inline JoinSchema five_relation_join() {
    return schema_of({{"ABCDE", "ABCDE"}, {"ACBE", "ACBE"}, {"ADE", "ADE"}, {"AB", "AB"},
                      {"AE", "AE"}});
}

/// Six-relation join whose five-relation subjoin is acyclic yet unsafe.
inline JoinSchema six_relation_join() {
    return schema_of({{"ABCDE", "ABCDE"}, {"ACBE", "ACBE"}, {"ADE", "ADE"}, {"AB", "AB"},
                      {"AEF", "AEF"}, {"ABCDEF", "ABCDEF"}});
}

/// Star join R1(A,B1) ⋈ ... ⋈ Rn(A,Bn).
inline JoinSchema star_join(int n) {
    JoinSchema schema;
    for (int i = 1; i <= n; ++i)
        schema.relations.emplace_back("R" + std::to_string(i),
                                      std::vector<std::string>{"A", "B" + std::to_string(i)});
    schema.output_attributes = schema.all_attributes();
    return schema;
}

inline JoinSchema triangle_join() {
    return schema_of({{"r0", "AB"}, {"r1", "BC"}, {"r2", "CA"}});
}

/// Three-node chains illustrating breaks: (a) has none, (b) breaks at ABE.
inline JoinSchema break_case_a() {
    return schema_of({{"ABCD", "ABCD"}, {"ABCE", "ABCE"}, {"ABE", "ABE"}});
}

inline JoinSchema break_case_b() {
    return schema_of({{"ABCD", "ABCD"}, {"ABE", "ABE"}, {"ABEF", "ABEF"}});
}

/// Synthetic reproduction of the six-subtree stem illustration: a tree
/// whose subjoin has maximal subtrees T1={5}, T2={6}, T3={7,11},
/// T4={15,20}, T5={8,12,13}, T6={22,26,27}. Every edge carries one shared
/// attribute and every node one private attribute, so the fixed tree is a
/// parse tree of the join.
struct StemFixture {
    JoinSchema schema;
    ParseTree tree;
    SubjoinSpec subjoin;
};

inline StemFixture stem_fixture() {
    const std::vector<std::pair<std::string, std::string>> arcs = {
        {"n01", "n02"}, {"n01", "n03"}, {"n02", "n04"}, {"n02", "n05"}, {"n03", "n06"},
        {"n03", "n07"}, {"n04", "n08"}, {"n04", "n09"}, {"n07", "n11"}, {"n08", "n12"},
        {"n08", "n13"}, {"n09", "n15"}, {"n11", "n17"}, {"n15", "n20"}, {"n17", "n22"},
        {"n22", "n26"}, {"n22", "n27"},
    };
    std::map<std::string, std::vector<std::string>> columns;
    for (const auto &[parent, child] : arcs) {
        std::string shared = "x" + child.substr(1);
        columns[parent].push_back(shared);
        columns[child].push_back(shared);
    }
    JoinSchema schema;
    std::vector<std::string> names;
    for (const auto &[parent, child] : arcs) {
        names.push_back(parent);
        names.push_back(child);
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    for (const auto &name : names) {
        auto cols = columns[name];
        cols.push_back("p" + name.substr(1));  // private attribute
        schema.relations.emplace_back(name, cols);
    }
    schema.output_attributes = schema.all_attributes();

    StemFixture fixture{std::move(schema), ParseTree::from_edges("n01", arcs), {}};
    fixture.subjoin = subjoin_of(fixture.schema, {"n05", "n06", "n07", "n11", "n15", "n20",
                                                  "n08", "n12", "n13", "n22", "n26", "n27"});
    return fixture;
}

// ---------------------------------------------------------------------------
// Random generation (seeded, deterministic)

struct GeneratedJoin {
    JoinSchema schema;
    ParseTree tree;  // the generating tree; always a valid parse tree
};

/// Random acyclic join: a random tree over the relations, each attribute
/// placed on a random connected subtree of it. Empty relations are patched
/// by extending a neighbor's attribute (which preserves connectivity).
/// locality caps the subtree size an attribute may span; small values give
/// narrowly shared attributes and more unsafe subjoins.
inline GeneratedJoin random_acyclic_join(std::mt19937_64 &rng, int max_rel = 6, int max_attr = 8,
                                         int locality = 0) {
    int n = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_rel));
    std::vector<int> parent(n, -1);
    for (int i = 1; i < n; ++i) parent[i] = static_cast<int>(rng() % static_cast<uint64_t>(i));

    std::vector<std::vector<int>> adjacent(n);
    for (int i = 1; i < n; ++i) {
        adjacent[i].push_back(parent[i]);
        adjacent[parent[i]].push_back(i);
    }

    int attr_count = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_attr));
    std::vector<AttrSet> node_attrs(n);
    for (int j = 0; j < attr_count; ++j) {
        std::string attr(1, static_cast<char>('A' + j));
        std::vector<int> members{static_cast<int>(rng() % static_cast<uint64_t>(n))};
        std::set<int> in_subtree(members.begin(), members.end());
        int span = locality > 0 ? std::min(locality, n) : n;
        int target = 1 + static_cast<int>(rng() % static_cast<uint64_t>(span));
        while (static_cast<int>(members.size()) < target) {
            std::vector<int> frontier;
            for (int m : members)
                for (int nb : adjacent[m])
                    if (!in_subtree.count(nb)) frontier.push_back(nb);
            if (frontier.empty()) break;
            int pick = frontier[rng() % frontier.size()];
            members.push_back(pick);
            in_subtree.insert(pick);
        }
        for (int m : members) node_attrs[m].insert(attr);
    }

    // Patch empty relations from an attributed neighbor.
    for (bool dirty = true; dirty;) {
        dirty = false;
        bool any_nonempty = false;
        for (int i = 0; i < n; ++i) any_nonempty |= !node_attrs[i].empty();
        if (!any_nonempty) {
            node_attrs[0].insert("A");
            any_nonempty = true;
        }
        for (int i = 0; i < n; ++i) {
            if (!node_attrs[i].empty()) continue;
            for (int nb : adjacent[i]) {
                if (!node_attrs[nb].empty()) {
                    node_attrs[i].insert(*node_attrs[nb].begin());
                    break;
                }
            }
            dirty |= node_attrs[i].empty();
        }
    }

    GeneratedJoin result;
    std::vector<std::pair<std::string, std::string>> arcs;
    for (int i = 0; i < n; ++i) {
        std::string name = "r" + std::to_string(i);
        result.schema.relations.emplace_back(
            name, std::vector<std::string>(node_attrs[i].begin(), node_attrs[i].end()));
        if (i > 0) arcs.emplace_back("r" + std::to_string(parent[i]), name);
    }
    AttrSet all = result.schema.all_attributes();
    if (rng() % 4 == 0) {
        for (const auto &a : all)
            if (rng() % 2) result.schema.output_attributes.insert(a);
        if (result.schema.output_attributes.empty())
            result.schema.output_attributes.insert(*all.begin());
    } else {
        result.schema.output_attributes = all;
    }
    result.tree = ParseTree::from_edges("r0", arcs);
    return result;
}

inline SubjoinSpec random_subjoin(std::mt19937_64 &rng, const JoinSchema &schema) {
    auto names = schema.relation_names();
    std::vector<std::string> pool(names.begin(), names.end());
    std::size_t k = 1 + rng() % pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i)
        std::swap(pool[i], pool[i + rng() % (pool.size() - i)]);
    return make_subjoin(schema, {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)});
}

/// Random, possibly inconsistent database: every relation gets its own
/// independent tuples (occasionally none).
inline DatabaseInstance random_database(std::mt19937_64 &rng, const JoinSchema &schema,
                                        int max_rows, int domain) {
    DatabaseInstance db = instance_for(schema);
    for (const auto &r : schema.relations) {
        std::size_t rows = rng() % static_cast<uint64_t>(max_rows + 1);
        for (std::size_t k = 0; k < rows; ++k) {
            Row row;
            for (std::size_t c = 0; c < r.columns.size(); ++c)
                row.push_back(std::to_string(rng() % static_cast<uint64_t>(domain)));
            db.relations.at(r.name).rows.insert(std::move(row));
        }
    }
    return db;
}

// ---------------------------------------------------------------------------
// Brute-force join oracle, independent of the hash-join path: assign
// values to attributes from the active domains and keep assignments whose
// projections all exist.

inline JoinResult naive_join(const JoinSchema &schema, const DatabaseInstance &db,
                             const std::vector<std::string> &relation_names, const AttrSet &out) {
    std::vector<std::string> attrs;
    {
        AttrSet seen;
        for (const auto &name : relation_names) {
            const AttrSet &a = schema.relation(name).attrs;
            seen.insert(a.begin(), a.end());
        }
        attrs.assign(seen.begin(), seen.end());
    }

    std::map<std::string, std::set<std::string>> domain;
    for (const auto &name : relation_names) {
        const auto &rel = schema.relation(name);
        const auto &inst = db.relations.at(name);
        for (const auto &row : inst.rows)
            for (std::size_t c = 0; c < rel.columns.size(); ++c) domain[rel.columns[c]].insert(row[c]);
    }

    // Relations become checkable once all their attributes are assigned.
    std::vector<std::vector<std::string>> check_after(attrs.size() + 1);
    for (const auto &name : relation_names) {
        std::size_t last = 0;
        for (const auto &a : schema.relation(name).attrs) {
            auto pos = static_cast<std::size_t>(
                std::find(attrs.begin(), attrs.end(), a) - attrs.begin());
            last = std::max(last, pos + 1);
        }
        check_after[last].push_back(name);
    }

    JoinResult result;
    result.columns.assign(out.begin(), out.end());

    std::map<std::string, std::string> binding;
    auto fits = [&](const std::string &name) {
        const auto &rel = schema.relation(name);
        Row row;
        for (const auto &c : rel.columns) row.push_back(binding.at(c));
        return db.relations.at(name).rows.count(row) > 0;
    };
    std::function<void(std::size_t)> assign = [&](std::size_t i) {
        for (const auto &name : check_after[i])
            if (!fits(name)) return;
        if (i == attrs.size()) {
            Row row;
            for (const auto &c : result.columns) row.push_back(binding.at(c));
            result.rows.insert(std::move(row));
            return;
        }
        for (const auto &value : domain[attrs[i]]) {
            binding[attrs[i]] = value;
            assign(i + 1);
        }
        binding.erase(attrs[i]);
    };
    assign(0);
    return result;
}

}  // namespace fixtures
