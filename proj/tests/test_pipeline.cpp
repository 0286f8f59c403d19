#include <atomic>
#include <cstdlib>
#include <sstream>

#include "doctest.h"

#include "tabkg/errors.hpp"
#include "tabkg/pipeline.hpp"
#include "workspace.hpp"

using namespace tabkg;
using workspace::read_file;
using workspace::TempDir;
namespace fs = std::filesystem;

namespace {

int cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(TABKG_CLI_PATH) + " " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
    return WEXITSTATUS(status);
#else
    return status;
#endif
}

Json load_json(const fs::path& p) { return Json::parse(read_file(p)); }

}  // namespace

TEST_CASE("full pipeline on MiniMovies") {
    TempDir out("pipeline");
    std::ostringstream log;
    REQUIRE(run(Command::pipeline, workspace::minimovies_config(out.path()), log) == 0);

    for (auto name : {artifact::index, artifact::model, artifact::training, artifact::summary, artifact::triples,
                      artifact::triples_sidecar, artifact::report, artifact::curves, artifact::manifest})
        CHECK_MESSAGE(fs::exists(out.path() / name), name);

    const auto interp = interpretation_from_json(load_json(out.path() / "interpretations" / "T1.json"));
    CHECK(interp.table_id == "T1");
    CHECK(interp.row(0)->entity == fixture::E1);
    CHECK(interp.row(1)->entity == fixture::E3);

    const auto sidecar = load_json(out.path() / artifact::triples_sidecar);
    CHECK(sidecar["triples"].size() == 4);
    CHECK(sidecar["unfilled"].empty());
    const auto nt = read_file(out.path() / artifact::triples);
    CHECK(std::count(nt.begin(), nt.end(), '\n') == 4);

    const auto report = load_json(out.path() / artifact::report);
    CHECK(report["assignments"]["best"]["f1"].get<double>() == 1.0);
    CHECK(report["triples"]["counts"]["predicted_redundant"].get<int>() == 4);
    CHECK(report["triples"]["counts"]["predicted_novel"].get<int>() == 0);

    const auto manifest = load_json(out.path() / artifact::manifest);
    CHECK(manifest["command"] == "pipeline");
    CHECK(manifest["version"] == std::string(kVersion));
    CHECK(manifest["config_hash"] == workspace::minimovies_config(out.path()).hash());

    const auto curves = read_file(out.path() / artifact::curves);
    CHECK(curves.rfind("series,threshold,precision,recall,f1,predicted,correct,gold\n", 0) == 0);
}

TEST_CASE("single-worker runs are byte-identical") {
    TempDir a("det-a"), b("det-b");
    std::ostringstream log;
    REQUIRE(run(Command::pipeline, workspace::minimovies_config(a.path()), log) == 0);
    REQUIRE(run(Command::pipeline, workspace::minimovies_config(b.path()), log) == 0);
    for (auto name : {std::string("interpretations/T1.json"), std::string(artifact::triples),
                      std::string(artifact::triples_sidecar), std::string(artifact::report),
                      std::string(artifact::curves), std::string(artifact::model), std::string(artifact::summary)})
        CHECK_MESSAGE(read_file(a / name) == read_file(b / name), name);
}

TEST_CASE("stages can run one at a time") {
    TempDir out("stages");
    std::ostringstream log;
    auto c = workspace::minimovies_config(out.path());
    REQUIRE(run(Command::build_index, c, log) == 0);
    REQUIRE(run(Command::train_embeddings, c, log) == 0);
    REQUIRE(run(Command::interpret, c, log) == 0);
    REQUIRE(run(Command::slotfill, c, log) == 0);
    REQUIRE(run(Command::evaluate, c, log) == 0);
    CHECK(load_json(out / std::string(artifact::report))["triples"]["counts"]["predicted_redundant"] == 4);

    // Binary models load back for slot filling.
    c.model_format = ModelFormat::binary;
    REQUIRE(run(Command::train_embeddings, c, log) == 0);
    REQUIRE(run(Command::slotfill, c, log) == 0);
    CHECK(load_json(out / std::string(artifact::triples_sidecar))["triples"].size() == 4);
}

TEST_CASE("slot filling without a model falls back to index ranking") {
    TempDir out("nomodel");
    std::ostringstream log;
    auto c = workspace::minimovies_config(out.path());
    REQUIRE(run(Command::interpret, c, log) == 0);
    REQUIRE(run(Command::slotfill, c, log) == 0);
    const auto sidecar = load_json(out / std::string(artifact::triples_sidecar));
    REQUIRE(sidecar["triples"].size() == 4);
    for (const auto& t : sidecar["triples"])
        CHECK(t["method"] != "embedding-rerank");
    CHECK(log.str().find("model") != std::string::npos);
}

TEST_CASE("empty and malformed table directories") {
    TempDir out("empty"), tables("tables");
    std::ostringstream log;
    auto c = workspace::minimovies_config(out.path());
    c.tables_dir = tables.path();
    c.gold_dir.clear();
    REQUIRE(run(Command::interpret, c, log) == 0);
    CHECK(load_json(out / std::string(artifact::summary))["tables"] == 0);

    workspace::write_file(tables / "good.csv", "title,year\nMASH,1970\n");
    workspace::write_file(tables / "bad.csv", "title,year\n\"unterminated\n");
    workspace::write_file(tables / "bad.json", "{not json");
    workspace::write_file(tables / "notes.txt", "ignored");
    REQUIRE(run(Command::interpret, c, log) == 0);
    const auto summary = load_json(out / std::string(artifact::summary));
    CHECK(summary["tables"] == 3);
    CHECK(summary["interpreted"] == 1);
    CHECK(summary["skipped"] == 2);
    CHECK(summary["errors"].size() == 2);
    CHECK(fs::exists(out / "interpretations/good.json"));
}

TEST_CASE("configuration errors are reported, not thrown") {
    TempDir out("config");
    std::ostringstream log;
    auto c = workspace::minimovies_config(out.path());
    c.kg_path = out / "missing.nt";
    CHECK(run(Command::pipeline, c, log) == 2);
    CHECK(log.str().find("missing.nt") != std::string::npos);

    c = workspace::minimovies_config(out.path());
    c.tau = 1.5;
    CHECK_THROWS_AS(c.validate(Command::slotfill), ConfigError);
    CHECK(run(Command::slotfill, c, log) == 2);

    c = workspace::minimovies_config(out.path());
    c.retrieval.gap_ratio = 0.5;
    CHECK_THROWS_AS(c.validate(Command::interpret), ConfigError);

    c = workspace::minimovies_config(out.path());
    c.gold_dir = out / "nogold";
    CHECK(run(Command::evaluate, c, log) == 2);
}

TEST_CASE("config hash tracks every option") {
    const auto base = workspace::minimovies_config("/tmp/x");
    CHECK(base.hash() == workspace::minimovies_config("/tmp/x").hash());
    CHECK(base.hash().size() == 16);
    auto other = base;
    other.seed = 2;
    CHECK(other.hash() != base.hash());
    other = base;
    other.train.margin = 2.0;
    CHECK(other.hash() != base.hash());
    other = base;
    other.lbp.normalize_rows = false;
    CHECK(other.hash() != base.hash());
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("command names round-trip") {
    for (auto c : {Command::build_index, Command::train_embeddings, Command::interpret, Command::slotfill,
                   Command::evaluate, Command::pipeline})
        CHECK(parse_command(to_string(c)) == c);
    CHECK(to_string(Command::build_index) == "build-index");
}

TEST_CASE("parallel_for visits every index once") {
    for (std::size_t workers : {1, 2, 4}) {
        std::vector<std::atomic<int>> hits(37);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("command line front end") {
    TempDir out("cli");
    const auto log = out / "log.txt";
    const auto dir = fixture::minimovies_dir();
    CHECK(cli("--version", log) == 0);
    CHECK(read_file(log).find(std::string(kVersion)) != std::string::npos);

    const std::string base = "pipeline --kg \"" + (dir / "kg.nt").string() + "\" --tables \"" +
                             (dir / "tables").string() + "\" --gold \"" + (dir / "gold").string() +
                             "\" --epochs 20 --dimension 8 --out \"" + (out / "run").string() + "\"";
    CHECK(cli(base, log) == 0);
    CHECK(fs::exists(out / "run" / std::string(artifact::report)));

    CHECK(cli("interpret --kg \"" + (out / "none.nt").string() + "\" --tables x --out \"" +
                  (out / "bad").string() + "\"",
              log) == 2);
    CHECK(read_file(log).find("none.nt") != std::string::npos);
    CHECK(cli("slotfill --tau 3 --kg \"" + (dir / "kg.nt").string() + "\" --tables x --out y", log) != 0);
    CHECK(cli("frobnicate", log) != 0);
}
