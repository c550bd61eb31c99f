#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "aide/cli.hpp"
#include "aide/emolex.hpp"
#include "aide/events.hpp"
#include "aide/meddomain.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "aide");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = aide::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "aide_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string config_path() { return testpaths::data("config/default.json").string(); }

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"simulate"}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"eval", "--config", config_path()}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("input errors exit 2") {
    CHECK(run({"--config", config_path(), "simulate", "--persona", "/nonexistent/persona.json"}).code == 2);
    CHECK(run({"--config", "/nonexistent/config.json", "plan"}).code == 2);
    CHECK(run({"--config", config_path(), "replay", "--log", "/nonexistent/log.jsonl"}).code == 2);
    CHECK(run({"train-emotion", "--corpus", "/nonexistent/c.tsv", "--model", scratch("m.json").string()}).code == 2);
}

TEST_CASE("simulate the confused persona") {
    const auto out = scratch("confused.jsonl");
    const auto r = run({"--config", config_path(), "simulate", "--persona", "confused", "--out", out.string()});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("persona confused") != std::string::npos);
    std::ifstream in(out);
    const auto log = aide::SessionLog::from_jsonl(in);
    int max_level = -1;
    for (const auto& e : log.entries) {
        if (e.type == aide::EntryType::Assistance) max_level = std::max(max_level, e.body["level"].get<int>());
    }
    CHECK(max_level >= 2);
}

TEST_CASE("simulate writes to stdout without --out") {
    const auto r = run({"--config", config_path(), "simulate", "--persona", "competent"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    CHECK_FALSE(aide::SessionLog::from_jsonl(in).entries.empty());
}

TEST_CASE("replay reproduces a simulated log and catches tampering") {
    const auto out = scratch("divergent.jsonl");
    REQUIRE(run({"--config", config_path(), "simulate", "--persona", "divergent", "--out", out.string()}).code == 0);
    const auto r = run({"--config", config_path(), "replay", "--log", out.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("replay identical") == 0);

    std::ifstream in(out);
    auto log = aide::SessionLog::from_jsonl(in);
    for (auto& e : log.entries) {
        if (e.type == aide::EntryType::Assistance) {
            e.body["utterance"] = "something else";
            break;
        }
    }
    const auto tampered = scratch("tampered.jsonl");
    std::ofstream(tampered) << log.to_jsonl();
    const auto t = run({"--config", config_path(), "replay", "--log", tampered.string()});
    CHECK(t.code == 3);
    CHECK(t.out.find("differs") != std::string::npos);
}

TEST_CASE("eval on the shipped personas") {
    const auto r = run({"--config", config_path(), "eval", "--persona", "competent", "--persona", "confused",
                        "--persona", "divergent", "--persona", "disengaged"});
    CHECK(r.code == 0);
    CHECK(r.out.find("assistance/need match rate  1.000") != std::string::npos);
    CHECK(r.out.find("MISS") == std::string::npos);
}

TEST_CASE("eval scores a recorded log") {
    const auto out = scratch("confused_eval.jsonl");
    REQUIRE(run({"--config", config_path(), "simulate", "--persona", "confused", "--out", out.string()}).code == 0);
    const auto r = run({"--config", config_path(), "eval", "--log", out.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find(out.string()) != std::string::npos);
}

TEST_CASE("train-emotion writes the oracle's model") {
    const auto model_path = scratch("model.json");
    const auto corpus = testpaths::data("corpus/toy.tsv");
    const auto r = run({"train-emotion", "--corpus", corpus.string(), "--model", model_path.string(), "--alpha", "0.5"});
    REQUIRE(r.code == 0);
    const auto model = aide::EmotionModel::from_json(testpaths::read_json(model_path));
    const auto data = aide::load_corpus_file(corpus);
    const oracle::NBOracle nb(data, 0.5);
    CHECK(model.smoothing_alpha() == 0.5);
    CHECK(model.vocabulary() == nb.vocab);
    for (const auto& [label, table] : model.token_log_likelihoods()) {
        for (const auto& token : nb.vocab) {
            CHECK(table.at(token) == doctest::Approx(nb.log_likelihood(label, token)).epsilon(1e-12));
        }
    }
}

TEST_CASE("plan prints one justified step per line") {
    const auto r = run({"--config", config_path(), "plan"});
    REQUIRE(r.code == 0);
    const auto sc = aide::load_scenario_file(testpaths::data("scenarios/default.json"));
    std::istringstream in(r.out);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        const auto step = json::parse(line);
        CHECK(step.contains("action"));
        CHECK(step["justification"].size() == 2);
        ++n;
    }
    CHECK(n == oracle::cell_diff(sc.initial_grid, sc.schedule()));
}
