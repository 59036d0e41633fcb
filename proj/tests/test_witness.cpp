#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "safejoin/exec.hpp"
#include "safejoin/json_io.hpp"
#include "safejoin/witness.hpp"

using namespace safejoin;
using fixtures::abc_join;
using fixtures::abc_database;
using fixtures::subjoin_of;

TEST_CASE("values carry the naming convention") {
    CHECK(Value::seed("A").text == "a");
    CHECK(Value::fresh("C", 1).text == "c1");
    CHECK(Value::fresh("B", 12).text == "b12");
    CHECK(Value::bit(0).text == "0");
    CHECK(Value::bit(1).text == "1");
}

TEST_CASE("the example tree yields the six tgds") {
    JoinSchema schema = abc_join();
    ParseTree tree = build_parse_tree(schema);
    auto tgds = build_tgds(schema, tree);
    REQUIRE(tgds.size() == 6);

    auto find = [&](const std::string &lhs, const std::string &rhs) -> const Tgd & {
        for (const auto &tgd : tgds)
            if (tgd.lhs == lhs && tgd.rhs == rhs) return tgd;
        REQUIRE(false);
        return tgds[0];
    };
    // d1: r1(x,y) -> r0(x,y,z)
    CHECK(find("r1", "r0").frontier == AttrSet{"A", "B"});
    CHECK(find("r1", "r0").existential == AttrSet{"C"});
    // d2: r2(x,z) -> r0(x,y,z)
    CHECK(find("r2", "r0").frontier == AttrSet{"A", "C"});
    CHECK(find("r2", "r0").existential == AttrSet{"B"});
    // d3: r3(y,z) -> r0(x,y,z)
    CHECK(find("r3", "r0").frontier == AttrSet{"B", "C"});
    CHECK(find("r3", "r0").existential == AttrSet{"A"});
    // d4..d6 go the other way with no existentials
    CHECK(find("r0", "r1").frontier == AttrSet{"A", "B"});
    CHECK(find("r0", "r1").existential.empty());
    CHECK(find("r0", "r2").existential.empty());
    CHECK(find("r0", "r3").existential.empty());
}

TEST_CASE("tgd counts follow the tree size") {
    JoinSchema single = fixtures::schema_of({{"r", "A"}});
    CHECK(build_tgds(single, build_parse_tree(single)).empty());

    JoinSchema chain = fixtures::schema_of({{"r0", "AB"}, {"r1", "ABC"}, {"r2", "AC"}});
    ParseTree tree = ParseTree::from_edges("r0", {{"r0", "r1"}, {"r1", "r2"}});
    CHECK(build_tgds(chain, tree).size() == 4);
}

TEST_CASE("tgds_satisfied detects a violation") {
    JoinSchema schema = abc_join();
    ParseTree tree = build_parse_tree(schema);
    auto tgds = build_tgds(schema, tree);
    CHECK(tgds_satisfied(tgds, abc_database()));

    DatabaseInstance broken = abc_database();
    broken.relations.at("r1").rows.insert({"a7", "b7"});
    CHECK_FALSE(tgds_satisfied(tgds, broken));
}

TEST_CASE("the chase reproduces the worked counterexample database") {
    JoinSchema schema = abc_join();
    ParseTree tree = build_parse_tree(schema);
    SubjoinSpec subjoin = subjoin_of(schema, {"r1", "r2", "r3"});

    DatabaseInstance chased = chase_witness(schema, tree, subjoin);
    CHECK(chased == abc_database());

    // byte-exact under the serialization format
    CHECK(database_to_json(chased).dump(2) == database_to_json(abc_database()).dump(2));

    // r0 gains exactly the three completed tuples
    CHECK(chased.relations.at("r0").rows ==
          std::set<Row>{{"a", "b", "c1"}, {"a", "b1", "c"}, {"a1", "b", "c"}});

    // three distinct fresh constants: a1, b1, c1
    std::set<std::string> values;
    for (const auto &[name, inst] : chased.relations)
        for (const auto &row : inst.rows) values.insert(row.begin(), row.end());
    std::set<std::string> fresh;
    for (const auto &v : values)
        if (v.size() > 1) fresh.insert(v);
    CHECK(fresh == std::set<std::string>{"a1", "b1", "c1"});
}

TEST_CASE("chase output satisfies every tgd and is fully reduced") {
    std::mt19937_64 rng(41);
    int rounds = 0;
    while (rounds < 60) {
        auto gen = fixtures::random_acyclic_join(rng);
        if (gen.schema.relations.size() < 2) continue;
        SubjoinSpec subjoin = fixtures::random_subjoin(rng, gen.schema);

        DatabaseInstance chased = chase_witness(gen.schema, gen.tree, subjoin);
        CHECK(tgds_satisfied(build_tgds(gen.schema, gen.tree), chased));
        CHECK(is_fully_reduced(gen.schema, gen.tree, chased));
        ++rounds;
    }
}

TEST_CASE("the chase keeps the seed tuple and denies it to the complement") {
    JoinSchema schema = abc_join();
    ParseTree tree = build_parse_tree(schema);
    SubjoinSpec subjoin = subjoin_of(schema, {"r1", "r2", "r3"});
    DatabaseInstance chased = chase_witness(schema, tree, subjoin);

    JoinResult sub = eval_subjoin(schema, chased, subjoin);
    REQUIRE(sub.columns == std::vector<std::string>{"A", "B", "C"});
    CHECK(sub.rows.count({"a", "b", "c"}) == 1);

    JoinResult rest = eval_complement(schema, chased, subjoin);
    CHECK(rest.rows.count({"a", "b", "c"}) == 0);
    CHECK(!dangling_tuples(sub, rest).empty());
}

TEST_CASE("n-set verification enforces both conditions") {
    JoinSchema schema = fixtures::five_relation_join();
    SubjoinSpec subjoin = subjoin_of(schema, {"AB", "AE"});

    CHECK(verify_n_set(schema, subjoin, {"B", "E"}, {"AB"}));
    CHECK_FALSE(verify_n_set(schema, subjoin, {}, {"AB"}));              // nonempty required
    CHECK_FALSE(verify_n_set(schema, subjoin, {"B"}, {"AB"}));           // AE side untouched
    CHECK_FALSE(verify_n_set(schema, subjoin, {"A", "B", "E"}, {"AB"})); // A reconnects them

    // safe pair: every candidate keeping the join connected links the two
    SubjoinSpec safe_pair = subjoin_of(schema, {"ADE", "AE"});
    CHECK_FALSE(verify_n_set(schema, safe_pair, {"D"}, {"ADE"}));        // AE side untouched
    CHECK_FALSE(verify_n_set(schema, safe_pair, {"D", "E"}, {"ADE"}));   // E links them
}

TEST_CASE("the imaginary relation projects to the worked witnesses") {
    JoinSchema schema = fixtures::five_relation_join();

    // B_S = {B, E}: tuples (00000) and (01001)
    DatabaseInstance be = nset_witness(schema, NSet{{"B", "E"}, "AB", {"AB"}});
    CHECK(be.relations.at("ABCDE").rows ==
          std::set<Row>{{"0", "0", "0", "0", "0"}, {"0", "1", "0", "0", "1"}});
    CHECK(be.relations.at("AB").rows == std::set<Row>{{"0", "0"}, {"0", "1"}});
    CHECK(be.relations.at("AE").rows == std::set<Row>{{"0", "0"}, {"0", "1"}});
    SubjoinSpec subjoin = subjoin_of(schema, {"AB", "AE"});
    CHECK(eval_subjoin(schema, be, subjoin).rows.size() == 4);
    CHECK(verify_witness(schema, subjoin, be));

    // B_S = {B, D, E}: tuples (00000) and (01011)
    DatabaseInstance bde = nset_witness(schema, NSet{{"B", "D", "E"}, "AB", {"AB"}});
    CHECK(bde.relations.at("ABCDE").rows ==
          std::set<Row>{{"0", "0", "0", "0", "0"}, {"0", "1", "0", "1", "1"}});
    CHECK(verify_witness(schema, subjoin_of(schema, {"AB", "ADE"}), bde));
}

TEST_CASE("an empty n-set is rejected") {
    JoinSchema schema = fixtures::five_relation_join();
    CHECK_THROWS_AS(nset_witness(schema, NSet{{}, "AB", {"AB"}}), std::invalid_argument);
}

TEST_CASE("relations untouched by the n-set keep a single all-zero tuple") {
    JoinSchema schema = fixtures::schema_of({{"r0", "AB"}, {"r1", "BC"}, {"r2", "CD"}});
    DatabaseInstance db = nset_witness(schema, NSet{{"D"}, "r2", {"r2"}});
    CHECK(db.relations.at("r0").rows == std::set<Row>{{"0", "0"}});
    CHECK(db.relations.at("r1").rows == std::set<Row>{{"0", "0"}});
    CHECK(db.relations.at("r2").rows == std::set<Row>{{"0", "0"}, {"0", "1"}});
}

TEST_CASE("partial tuples lift to witness tuples by appending zeros") {
    // On the witness database, a tuple is in the partial subjoin over the
    // restricted schema iff its zero-extension is in the subjoin output.
    JoinSchema schema = fixtures::five_relation_join();
    NSet nset{{"B", "E"}, "AB", {"AB"}};
    DatabaseInstance db = nset_witness(schema, nset);
    SubjoinSpec subjoin = subjoin_of(schema, {"AB", "AE"});

    JoinResult sub = eval_subjoin(schema, db, subjoin);  // columns A, B, E
    REQUIRE(sub.columns == std::vector<std::string>{"A", "B", "E"});
    std::set<Row> lifted;
    for (const auto &row : sub.rows) lifted.insert({row[1], row[2]});  // drop A (not in B_S)

    // partial subjoin: AB and AE restricted to B_S
    JoinSchema restricted;
    restricted.relations.emplace_back("pAB", std::vector<std::string>{"B"});
    restricted.relations.emplace_back("pAE", std::vector<std::string>{"E"});
    restricted.output_attributes = {"B", "E"};
    DatabaseInstance partial = instance_for(restricted);
    for (const auto &row : db.relations.at("AB").rows)
        partial.relations.at("pAB").rows.insert({row[1]});
    for (const auto &row : db.relations.at("AE").rows)
        partial.relations.at("pAE").rows.insert({row[1]});
    JoinResult partial_out = eval_join(restricted, partial, {"pAB", "pAE"}, {"B", "E"});

    CHECK(partial_out.rows == lifted);
}

TEST_CASE("complement output never mixes marks on the n-set") {
    JoinSchema schema = fixtures::five_relation_join();
    NSet nset{{"B", "E"}, "AB", {"AB"}};
    DatabaseInstance db = nset_witness(schema, nset);
    SubjoinSpec subjoin = subjoin_of(schema, {"AB", "AE"});
    JoinResult rest = eval_complement(schema, db, subjoin);
    for (const auto &row : rest.rows) {
        std::set<std::string> marks;
        for (std::size_t i = 0; i < rest.columns.size(); ++i)
            if (nset.attributes.count(rest.columns[i])) marks.insert(row[i]);
        CHECK(marks.size() <= 1);  // all 0s or all 1s on B_S
    }
}
