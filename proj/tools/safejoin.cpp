// safejoin: decide whether a subjoin of an acyclic join can produce
// dangling tuples on fully reduced databases, with machine-checkable
// certificates either way. See README.md for the file formats.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "safejoin/exec.hpp"
#include "safejoin/json_io.hpp"
#include "safejoin/optimal_tree.hpp"
#include "safejoin/safety.hpp"

namespace {

using nlohmann::json;
using namespace safejoin;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;  // unsafe / cyclic: a valid answer
constexpr int kExitInputError = 2;

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void emit(const json &j) { std::cout << j.dump(2) << "\n"; }

TreeBuildOptions tree_options() {
    TreeBuildOptions opts;
    if (const char *seed = std::getenv("SAFEJOIN_TREE_SEED"))
        opts.tie_seed = std::strtoull(seed, nullptr, 10);
    return opts;
}

SubjoinSpec subjoin_from_flags(const JoinSchema &schema, const std::string &names_csv,
                               const std::string &file) {
    if (!file.empty()) return parse_subjoin_doc(slurp(file), schema);
    std::set<std::string> names;
    std::stringstream ss(names_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) names.insert(item);
    }
    return make_subjoin(schema, names);
}

json cyclic_to_json(const CyclicJoinError &e) {
    json residual = json::array();
    for (const auto &edge : e.residual.edges)
        residual.push_back({{"name", edge.origin},
                            {"attributes", std::vector<std::string>(edge.attrs.begin(),
                                                                    edge.attrs.end())}});
    return json{{"acyclic", false}, {"residual", residual}};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"safe-subjoin analysis for acyclic joins"};
    app.require_subcommand(1);

    std::string schema_path, db_path, subjoin_csv, subjoin_file, witness_path;
    uint64_t seed = 0;
    int tuples = 1;
    int domain = 3;

    auto *check = app.add_subcommand("check-acyclic", "test whether the join admits a parse tree");
    check->add_option("schema", schema_path)->required();

    auto *tree_cmd = app.add_subcommand("tree", "print the canonical parse tree");
    tree_cmd->add_option("schema", schema_path)->required();

    auto *decide = app.add_subcommand("decide", "decide subjoin safety with a certificate");
    decide->add_option("schema", schema_path)->required();
    decide->add_option("--subjoin", subjoin_csv, "comma-separated relation names");
    decide->add_option("--subjoin-file", subjoin_file, "subjoin document path");
    decide->add_option("--witness", witness_path, "write the witness database here when unsafe");

    auto *eval = app.add_subcommand("eval", "evaluate the join (or a subjoin) on a database");
    eval->add_option("schema", schema_path)->required();
    eval->add_option("database", db_path)->required();
    eval->add_option("--subjoin", subjoin_csv, "comma-separated relation names");
    eval->add_option("--subjoin-file", subjoin_file, "subjoin document path");

    auto *reduce = app.add_subcommand("reduce", "fully reduce a database with the semijoin program");
    reduce->add_option("schema", schema_path)->required();
    reduce->add_option("database", db_path)->required();

    auto *mintree = app.add_subcommand("min-tree",
                                       "parse tree minimizing the subjoin's maximal subtrees");
    mintree->add_option("schema", schema_path)->required();
    mintree->add_option("--subjoin", subjoin_csv, "comma-separated relation names");
    mintree->add_option("--subjoin-file", subjoin_file, "subjoin document path");

    auto *gendb = app.add_subcommand("gen-db", "generate a random fully reduced database");
    gendb->add_option("schema", schema_path)->required();
    gendb->add_option("--seed", seed);
    gendb->add_option("--tuples", tuples);
    gendb->add_option("--domain", domain);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);  // --help is a success
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        JoinSchema schema = parse_schema(slurp(schema_path));

        if (check->parsed()) {
            try {
                ParseTree tree = build_parse_tree(schema, tree_options());
                emit(json{{"acyclic", true}, {"tree", tree_to_json(tree)}});
                return kExitOk;
            } catch (const CyclicJoinError &e) {
                emit(cyclic_to_json(e));
                return kExitNegative;
            }
        }

        if (tree_cmd->parsed()) {
            try {
                emit(tree_to_json(build_parse_tree(schema, tree_options())));
                return kExitOk;
            } catch (const CyclicJoinError &e) {
                emit(cyclic_to_json(e));
                return kExitNegative;
            }
        }

        if (decide->parsed()) {
            SubjoinSpec subjoin = subjoin_from_flags(schema, subjoin_csv, subjoin_file);
            try {
                SafetyVerdict verdict = decide_safe(schema, subjoin, tree_options());
                emit(verdict_to_json(verdict));
                if (!verdict.safe && !witness_path.empty()) {
                    std::ofstream out(witness_path);
                    if (!out) throw SchemaError("cannot write witness file: " + witness_path);
                    out << database_to_json(*verdict.witness).dump(2) << "\n";
                }
                return verdict.safe ? kExitOk : kExitNegative;
            } catch (const CyclicJoinError &e) {
                emit(cyclic_to_json(e));
                return kExitNegative;
            }
        }

        if (eval->parsed()) {
            DatabaseInstance db = database_from_json(json::parse(slurp(db_path)), schema);
            JoinResult result;
            if (subjoin_csv.empty() && subjoin_file.empty()) {
                result = eval_full_join(schema, db);
            } else {
                SubjoinSpec subjoin = subjoin_from_flags(schema, subjoin_csv, subjoin_file);
                result = eval_subjoin(schema, db, subjoin);
            }
            emit(join_result_to_json(result));
            return kExitOk;
        }

        if (reduce->parsed()) {
            DatabaseInstance db = database_from_json(json::parse(slurp(db_path)), schema);
            try {
                ParseTree tree = build_parse_tree(schema, tree_options());
                emit(database_to_json(full_reduce(schema, tree, db)));
                return kExitOk;
            } catch (const CyclicJoinError &e) {
                emit(cyclic_to_json(e));
                return kExitNegative;
            }
        }

        if (mintree->parsed()) {
            SubjoinSpec subjoin = subjoin_from_flags(schema, subjoin_csv, subjoin_file);
            try {
                ParseTree t0 = build_parse_tree(schema, tree_options());
                MinimizeResult result = minimize_maximal_subtrees(schema, subjoin, t0);
                json trace = json::array();
                for (const auto &step : result.trace) {
                    trace.push_back({{"change",
                                      {{"delete", {step.change.del.first, step.change.del.second}},
                                       {"add", {step.change.add.first, step.change.add.second}}}},
                                     {"subtrees_before", step.subtrees_before},
                                     {"subtrees_after", step.subtrees_after}});
                }
                emit(json{{"tree", tree_to_json(result.tree)}, {"trace", trace}});
                return kExitOk;
            } catch (const CyclicJoinError &e) {
                emit(cyclic_to_json(e));
                return kExitNegative;
            }
        }

        if (gendb->parsed()) {
            emit(database_to_json(random_reduced_database(schema, seed, tuples, domain)));
            return kExitOk;
        }
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "error: invalid JSON input: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
