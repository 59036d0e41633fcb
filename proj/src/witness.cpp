#include "safejoin/witness.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace safejoin {

namespace {

std::string lowercase(const std::string &s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Value Value::seed(const std::string &attribute) {
    return Value{Kind::Seed, lowercase(attribute)};
}

Value Value::fresh(const std::string &attribute, int index) {
    return Value{Kind::Fresh, lowercase(attribute) + std::to_string(index)};
}

Value Value::bit(int b) {
    return Value{Kind::Bit, b ? "1" : "0"};
}

std::vector<Tgd> build_tgds(const JoinSchema &schema, const ParseTree &tree) {
    std::vector<Tgd> tgds;
    auto make = [&](const std::string &lhs, const std::string &rhs) {
        Tgd tgd;
        tgd.lhs = lhs;
        tgd.rhs = rhs;
        const AttrSet &l = schema.relation(lhs).attrs;
        for (const auto &a : schema.relation(rhs).attrs) {
            if (l.count(a))
                tgd.frontier.insert(a);
            else
                tgd.existential.insert(a);
        }
        return tgd;
    };
    for (const auto &[parent, child] : tree.edges()) {
        tgds.push_back(make(child, parent));
        tgds.push_back(make(parent, child));
    }
    std::sort(tgds.begin(), tgds.end(), [](const Tgd &a, const Tgd &b) {
        return std::tie(a.lhs, a.rhs) < std::tie(b.lhs, b.rhs);
    });
    return tgds;
}

namespace {

// Positions follow the iteration order of wanted (sorted attribute
// names), so keys built from different column layouts line up.
std::vector<std::size_t> positions_of(const std::vector<std::string> &columns,
                                      const AttrSet &wanted) {
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

}  // namespace

bool tgds_satisfied(const std::vector<Tgd> &tgds, const DatabaseInstance &db) {
    for (const auto &tgd : tgds) {
        const RelationInstance &lhs = db.relations.at(tgd.lhs);
        const RelationInstance &rhs = db.relations.at(tgd.rhs);
        auto lhs_at = positions_of(lhs.columns, tgd.frontier);
        auto rhs_at = positions_of(rhs.columns, tgd.frontier);
        std::set<Row> present;
        for (const auto &row : rhs.rows) present.insert(take(row, rhs_at));
        for (const auto &row : lhs.rows)
            if (!present.count(take(row, lhs_at))) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Chase

namespace {

/// Mints fresh constants, one counter per attribute, skipping anything
/// already used in the database.
class FreshSource {
  public:
    explicit FreshSource(std::set<std::string> used) : used_(std::move(used)) {}

    std::string mint(const std::string &attribute) {
        int &n = counter_[attribute];
        for (;;) {
            Value v = Value::fresh(attribute, ++n);
            if (used_.insert(v.text).second) return v.text;
        }
    }

  private:
    std::set<std::string> used_;
    std::map<std::string, int> counter_;
};

// One chase pass over the arc lhs → rhs: every lhs tuple lacking a
// frontier match in rhs adds one rhs tuple with fresh existential values.
void chase_arc(const JoinSchema &schema, const Tgd &tgd, DatabaseInstance &db,
               FreshSource &fresh) {
    const RelationSchema &rhs_schema = schema.relation(tgd.rhs);
    RelationInstance &rhs = db.relations.at(tgd.rhs);
    const RelationInstance &lhs = db.relations.at(tgd.lhs);

    auto lhs_at = positions_of(lhs.columns, tgd.frontier);
    auto rhs_at = positions_of(rhs.columns, tgd.frontier);
    std::set<Row> present;
    for (const auto &row : rhs.rows) present.insert(take(row, rhs_at));

    for (const auto &row : lhs.rows) {
        Row key = take(row, lhs_at);
        if (present.count(key)) continue;
        std::map<std::string, std::string> binding;
        {
            std::size_t k = 0;
            for (const auto &a : tgd.frontier) binding[a] = key[k++];
        }
        Row fresh_row;
        fresh_row.reserve(rhs_schema.columns.size());
        for (const auto &c : rhs_schema.columns) {
            auto it = binding.find(c);
            fresh_row.push_back(it != binding.end() ? it->second : fresh.mint(c));
        }
        rhs.rows.insert(std::move(fresh_row));
        present.insert(std::move(key));
    }
}

}  // namespace

DatabaseInstance chase_witness(const JoinSchema &schema, const ParseTree &tree,
                               const SubjoinSpec &subjoin) {
    AttrSet a_s = subjoin_attributes(schema, subjoin);

    // Subjoin seed tuple: one symbolic constant per subjoin attribute.
    std::map<std::string, std::string> seed;
    std::set<std::string> used;
    for (const auto &a : a_s) {
        Value v = Value::seed(a);
        seed[a] = v.text;
        used.insert(v.text);
    }

    DatabaseInstance db = instance_for(schema);
    for (const auto &name : subjoin.members) {
        const RelationSchema &r = schema.relation(name);
        Row row;
        row.reserve(r.columns.size());
        for (const auto &c : r.columns) row.push_back(seed.at(c));
        db.relations[name].rows.insert(std::move(row));
    }

    FreshSource fresh(std::move(used));

    auto nodes = tree.nodes();
    std::sort(nodes.begin(), nodes.end(), [&](const auto &a, const auto &b) {
        int da = tree.depth_of(a), db_ = tree.depth_of(b);
        return da != db_ ? da < db_ : a < b;
    });

    // Upward phase: child-to-parent steps, deepest children first.
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        auto parent = tree.parent_of(*it);
        if (!parent) continue;
        Tgd up;
        up.lhs = *it;
        up.rhs = *parent;
        const AttrSet &pa = schema.relation(*parent).attrs;
        for (const auto &a : pa) {
            if (schema.relation(*it).attrs.count(a))
                up.frontier.insert(a);
            else
                up.existential.insert(a);
        }
        chase_arc(schema, up, db, fresh);
    }

    // Downward phase: parent-to-child steps from the root out.
    for (const auto &node : nodes) {
        auto parent = tree.parent_of(node);
        if (!parent) continue;
        Tgd down;
        down.lhs = *parent;
        down.rhs = node;
        const AttrSet &ca = schema.relation(node).attrs;
        for (const auto &a : ca) {
            if (schema.relation(*parent).attrs.count(a))
                down.frontier.insert(a);
            else
                down.existential.insert(a);
        }
        chase_arc(schema, down, db, fresh);
    }
    return db;
}

// ---------------------------------------------------------------------------
// N-sets

bool verify_n_set(const JoinSchema &schema, const SubjoinSpec &subjoin, const AttrSet &candidate,
                  const std::set<std::string> &isolated_nodes) {
    if (candidate.empty()) return false;

    Hypergraph partial = partial_edges(schema, candidate);
    auto join_components = connected_components(partial);
    if (join_components.size() != 1) return false;  // partial join must be connected

    Hypergraph partial_subjoin;
    for (const auto &edge : partial.edges)
        if (subjoin.contains(edge.origin)) partial_subjoin.edges.push_back(edge);
    auto sub_components = connected_components(partial_subjoin);

    // The isolated subtree must be split from the rest of the subjoin, and
    // both sides must actually touch the candidate attributes.
    bool isolated_seen = false;
    bool rest_seen = false;
    for (const auto &component : sub_components) {
        bool any_isolated = false;
        bool any_rest = false;
        for (const auto &origin : component) {
            if (isolated_nodes.count(origin))
                any_isolated = true;
            else
                any_rest = true;
        }
        if (any_isolated && any_rest) return false;
        isolated_seen |= any_isolated;
        rest_seen |= any_rest;
    }
    return isolated_seen && rest_seen;
}

DatabaseInstance nset_witness(const JoinSchema &schema, const NSet &nset) {
    if (nset.attributes.empty()) throw std::invalid_argument("n-set must be nonempty");

    DatabaseInstance db = instance_for(schema);
    for (const auto &r : schema.relations) {
        Row zeros, marked;
        zeros.reserve(r.columns.size());
        marked.reserve(r.columns.size());
        for (const auto &c : r.columns) {
            zeros.push_back(Value::bit(0).text);
            marked.push_back(Value::bit(nset.attributes.count(c) ? 1 : 0).text);
        }
        auto &rows = db.relations[r.name].rows;
        rows.insert(std::move(zeros));
        rows.insert(std::move(marked));  // equal for relations untouched by the n-set
    }
    return db;
}

}  // namespace safejoin
