#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace safejoin {

using AttrSet = std::set<std::string>;

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SubjoinError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One relation: a name plus its attributes in declaration order.
/// Declaration order is only used for tuple serialization; all set
/// reasoning goes through attrs.
struct RelationSchema {
    std::string name;
    std::vector<std::string> columns;
    AttrSet attrs;

    RelationSchema() = default;
    RelationSchema(std::string name, std::vector<std::string> columns);
};

/// A join: an ordered list of relation schemas plus the attributes
/// projected in the output (defaults to all attributes).
struct JoinSchema {
    std::vector<RelationSchema> relations;
    AttrSet output_attributes;

    const RelationSchema &relation(const std::string &name) const;
    bool has_relation(const std::string &name) const;
    AttrSet all_attributes() const;
    std::set<std::string> relation_names() const;
};

/// A nonempty subset of the relation names of some JoinSchema.
struct SubjoinSpec {
    std::set<std::string> members;

    bool contains(const std::string &name) const { return members.count(name) > 0; }
};

/// Partial edges of the join hypergraph. Empty attribute sets are kept;
/// consumers that need only nonempty edges filter them out.
struct Hypergraph {
    struct Edge {
        std::string origin;
        AttrSet attrs;
    };
    std::vector<Edge> edges;
};

struct BoundaryResult {
    AttrSet attributes;
    bool whole_join = false;  // set when S covers every relation (boundary undefined)
};

JoinSchema parse_schema(const std::string &text);
SubjoinSpec parse_subjoin_doc(const std::string &text, const JoinSchema &schema);
SubjoinSpec make_subjoin(const JoinSchema &schema, const std::set<std::string> &names);

/// A_S: union of the member relations' attributes.
AttrSet subjoin_attributes(const JoinSchema &schema, const SubjoinSpec &subjoin);

/// Attributes appearing in at least one member and at least one non-member.
BoundaryResult boundary_attributes(const JoinSchema &schema, const SubjoinSpec &subjoin);

/// Output attributes of the subjoin: (output(J) ∩ A_S) ∪ boundary.
AttrSet subjoin_output_attributes(const JoinSchema &schema, const SubjoinSpec &subjoin);

/// Relations of J not in S. Throws SubjoinError when S covers all of J.
SubjoinSpec complement(const JoinSchema &schema, const SubjoinSpec &subjoin);

/// Every relation intersected with n1. Empty intersections are kept.
Hypergraph partial_edges(const JoinSchema &schema, const AttrSet &n1);

/// Maximal connected sets of the nonempty edges; two edges are connected
/// when a chain of pairwise-intersecting edges joins them. Each component
/// is a sorted list of edge origins; components sorted by first origin.
std::vector<std::vector<std::string>> connected_components(const Hypergraph &graph);

}  // namespace safejoin
