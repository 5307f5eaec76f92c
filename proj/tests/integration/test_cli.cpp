#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>
#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>

#include <json.hpp>

#include "biascheck/gateway.hpp"
#include "biascheck/hashing.hpp"
#include "biascheck/mock_provider.hpp"
#include "support/test_support.hpp"

using testing_support::data_dir;
using testing_support::read_file;

namespace {

int run_cli(const std::string& args, const std::filesystem::path& log) {
    const std::string command =
        std::string(BIASCHECK_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& path) { return "'" + path.string() + "'"; }

}  // namespace

TEST_CASE("ingest summarizes the fixture corpus") {
    testing_support::TempDir tmp("cli-ingest");
    const auto log = tmp.path() / "out.txt";
    const int rc = run_cli("ingest --claims " + q(data_dir() / "e2e" / "claims_10.jsonl") +
                               " --store-root " + q(data_dir() / "e2e" / "store"),
                           log);
    CHECK(rc == 0);
    const auto out = read_file(log);
    CHECK(out.find("claims: 10") != std::string::npos);
    CHECK(out.find("knowledge stores: 10/10") != std::string::npos);

    // Fully labeled corpus satisfies --expect-gold; a partially labeled one fails.
    CHECK(run_cli("ingest --expect-gold --claims " + q(data_dir() / "e2e" / "claims_10.jsonl"),
                  log) == 0);
    CHECK(run_cli("ingest --expect-gold --claims " +
                      q(data_dir() / "corpus" / "claims_two.jsonl"),
                  log) != 0);
}

TEST_CASE("ingest materializes the train split") {
    testing_support::TempDir tmp("cli-split");
    const auto log = tmp.path() / "out.txt";
    const auto head = tmp.path() / "train_train.jsonl";
    const auto tail = tmp.path() / "train_reference.jsonl";
    const int rc = run_cli("ingest --claims " + q(data_dir() / "e2e" / "claims_10.jsonl") +
                               " --split-n 4 --split-head " + q(head) + " --split-tail " +
                               q(tail),
                           log);
    REQUIRE(rc == 0);
    // The written splits reload cleanly and concatenate to the input.
    std::size_t head_lines = 0;
    std::size_t tail_lines = 0;
    for (const auto c : read_file(head)) head_lines += c == '\n';
    for (const auto c : read_file(tail)) tail_lines += c == '\n';
    CHECK(head_lines == 4);
    CHECK(tail_lines == 6);
}

TEST_CASE("config validation failures exit with code 2 and list every problem") {
    testing_support::TempDir tmp("cli-validate");
    const auto log = tmp.path() / "out.txt";
    // conditions mode without store root or fewshot: both reported at once.
    const int rc = run_cli("run --mode conditions --provider mock --claims " +
                               q(data_dir() / "e2e" / "claims_10.jsonl") + " --out " +
                               q(tmp.path() / "runs"),
                           log);
    CHECK(rc == 2);
    const auto out = read_file(log);
    CHECK(out.find("store") != std::string::npos);
    CHECK(out.find("few-shot") != std::string::npos);
}

TEST_CASE("direct run, conditions run, eval, compare, report") {
    testing_support::TempDir tmp("cli-e2e");
    const auto runs = tmp.path() / "runs";
    const auto reports = tmp.path() / "reports";
    const auto log = tmp.path() / "out.txt";

    const std::string common = " --claims " + q(data_dir() / "e2e" / "claims_10.jsonl") +
                               " --out " + q(runs) + " --provider mock --seed 11";

    SUBCASE("full flow") {
        REQUIRE(run_cli("run --mode direct --run-id probe" + common, log) == 0);
        REQUIRE(std::filesystem::exists(runs / "probe" / "direct" / "verdicts.jsonl"));
        REQUIRE(std::filesystem::exists(runs / "probe" / "manifest.json"));

        const auto manifest =
            nlohmann::json::parse(read_file(runs / "probe" / "manifest.json"));
        CHECK(manifest.at("run_id") == "probe");
        CHECK(manifest.at("mode") == "direct");
        CHECK(manifest.at("seed") == 11);
        CHECK(manifest.contains("created_at"));
        CHECK(manifest.contains("finished_at"));
        CHECK(manifest.at("prompt_hashes").size() == 9);
        CHECK(manifest.at("model_ids").contains("llm"));
        CHECK(manifest.at("config").at("k") == 5000);
        CHECK(manifest.at("claims").at("direct").size() == 10);

        REQUIRE(run_cli("run --mode conditions --run-id cond --m 2 --n 3 --k 50" + common +
                            " --store-root " + q(data_dir() / "e2e" / "store") +
                            " --fewshot " + q(data_dir() / "e2e" / "train_reference.jsonl"),
                        log) == 0);
        for (const auto* condition : {"baseline", "positive", "negative", "objective"}) {
            CHECK(std::filesystem::exists(runs / "cond" / condition / "hyde.jsonl"));
            CHECK(std::filesystem::exists(runs / "cond" / condition / "retrieval.jsonl"));
            CHECK(std::filesystem::exists(runs / "cond" / condition / "verdicts.jsonl"));
        }

        // Rerunning the same id without --resume is a collision.
        CHECK(run_cli("run --mode direct --run-id probe" + common, log) == 2);
        CHECK(run_cli("run --mode direct --run-id probe --resume" + common, log) == 0);

        // Resuming a complete conditions run reuses its artifacts unchanged.
        const auto baseline_verdicts =
            read_file(runs / "cond" / "baseline" / "verdicts.jsonl");
        REQUIRE(run_cli("run --mode conditions --run-id cond --resume --m 2 --n 3 --k 50" +
                            common + " --store-root " + q(data_dir() / "e2e" / "store") +
                            " --fewshot " + q(data_dir() / "e2e" / "train_reference.jsonl"),
                        log) == 0);
        CHECK(read_file(runs / "cond" / "baseline" / "verdicts.jsonl") == baseline_verdicts);

        // Concurrent conditions produce the same artifacts as sequential ones.
        REQUIRE(run_cli("run --mode conditions --run-id cond-par --parallel-conditions"
                        " --m 2 --n 3 --k 50" + common +
                            " --store-root " + q(data_dir() / "e2e" / "store") +
                            " --fewshot " + q(data_dir() / "e2e" / "train_reference.jsonl"),
                        log) == 0);
        for (const auto* condition : {"baseline", "positive", "negative", "objective"}) {
            CHECK(read_file(runs / "cond-par" / condition / "verdicts.jsonl") ==
                  read_file(runs / "cond" / condition / "verdicts.jsonl"));
            CHECK(read_file(runs / "cond-par" / condition / "hyde.jsonl") ==
                  read_file(runs / "cond" / condition / "hyde.jsonl"));
        }

        // Evaluation never mutates run artifacts.
        const auto hyde_before =
            biascheck::hashing::digest_hex(read_file(runs / "cond" / "positive" / "hyde.jsonl"));
        REQUIRE(run_cli("eval --runs probe,cond --out " + q(runs) + " --reports " + q(reports) +
                            " --gold " + q(data_dir() / "e2e" / "claims_10.jsonl") +
                            " --name audit",
                        log) == 0);
        CHECK(biascheck::hashing::digest_hex(
                  read_file(runs / "cond" / "positive" / "hyde.jsonl")) == hyde_before);

        REQUIRE(std::filesystem::exists(reports / "audit.json"));
        REQUIRE(std::filesystem::exists(reports / "audit.md"));
        const auto report_json = nlohmann::json::parse(read_file(reports / "audit.json"));
        CHECK(report_json.at("distributions").contains("direct"));
        CHECK(report_json.at("distributions").contains("baseline"));
        // C(4,2) = 6 condition pairs in the overlap block.
        CHECK(report_json.at("overlap").at("jaccard_evidence").size() == 6);
        CHECK(report_json.at("averitec").contains("baseline"));

        // Comparing a system against itself: zero shifts, full agreement.
        REQUIRE(run_cli("compare cond:baseline cond:baseline --out " + q(runs), log) == 0);
        const auto comparison = nlohmann::json::parse(read_file(log));
        CHECK(comparison.at("agreement").at("overall") == 1.0);
        for (const auto& [label, value] : comparison.at("shift").items()) {
            CHECK(value.get<double>() == 0.0);
        }

        // Render the stored report as csv.
        REQUIRE(run_cli("report --input " + q(reports / "audit.json") +
                            " --format csv --write " + q(reports / "audit.csv"),
                        log) == 0);
        const auto csv = read_file(reports / "audit.csv");
        CHECK(csv.find("section,system,label,count,percentage") != std::string::npos);

        // Unknown format is a config error.
        CHECK(run_cli("report --input " + q(reports / "audit.json") + " --format pdf", log) ==
              2);
    }
}

TEST_CASE("the pipeline over HTTP matches the in-process mock byte for byte") {
    // Loopback inference server: serves the deterministic mock over the
    // chat-completions wire format.
    biascheck::gateway::MockProvider mock;
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                            httplib::Response& res) {
        ++hits;
        const auto body = nlohmann::json::parse(req.body);
        biascheck::gateway::PromptRequest request;
        for (const auto& message : body.at("messages")) {
            if (message.at("role") == "system") {
                request.system_text = message.at("content").get<std::string>();
            } else {
                request.user_text = message.at("content").get<std::string>();
            }
        }
        request.max_tokens = body.value("max_tokens", 512);
        request.temperature = body.value("temperature", 0.0);
        if (body.contains("seed")) request.seed = body.at("seed").get<std::int64_t>();
        request.model_id = body.value("model", std::string{});
        res.set_content(
            nlohmann::json{{"choices",
                            {{{"message",
                               {{"role", "assistant"},
                                {"content", mock.complete(request)}}}}}}}
                .dump(),
            "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const std::string url = "http://127.0.0.1:" + std::to_string(port);

    testing_support::TempDir tmp("cli-http");
    const auto runs = tmp.path() / "runs";
    const auto cache = tmp.path() / "cache";
    const auto log = tmp.path() / "out.txt";
    const std::string claims = " --claims " + q(data_dir() / "e2e" / "claims_10.jsonl") +
                               " --out " + q(runs) + " --seed 11";

    REQUIRE(run_cli("run --mode direct --run-id mock-probe --provider mock" + claims, log) == 0);
    REQUIRE(run_cli("run --mode direct --run-id http-probe --provider " + url +
                        " --cache-dir " + q(cache) + claims,
                    log) == 0);
    CHECK(read_file(runs / "http-probe" / "direct" / "verdicts.jsonl") ==
          read_file(runs / "mock-probe" / "direct" / "verdicts.jsonl"));
    CHECK(hits.load() == 10);

    // Replaying against the populated cache performs zero remote calls.
    REQUIRE(run_cli("run --mode direct --run-id http-replay --provider " + url +
                        " --cache-dir " + q(cache) + claims,
                    log) == 0);
    CHECK(hits.load() == 10);
    CHECK(read_file(runs / "http-replay" / "direct" / "verdicts.jsonl") ==
          read_file(runs / "mock-probe" / "direct" / "verdicts.jsonl"));

    server.stop();
    server_thread.join();
}

TEST_CASE("eval on missing runs exits with code 4") {
    testing_support::TempDir tmp("cli-missing");
    const auto log = tmp.path() / "out.txt";
    CHECK(run_cli("eval --runs nonexistent --out " + q(tmp.path() / "runs"), log) == 4);
}

TEST_CASE("failure budget breaches exit with code 3") {
    testing_support::TempDir tmp("cli-budget");
    const auto log = tmp.path() / "out.txt";
    // Point at an empty store root: every claim fails retrieval.
    const auto empty_store = tmp.path() / "store";
    std::filesystem::create_directories(empty_store);
    const int rc = run_cli(
        "run --mode conditions --run-id broken --provider mock --conditions baseline --claims " +
            q(data_dir() / "e2e" / "claims_10.jsonl") + " --store-root " + q(empty_store) +
            " --fewshot " + q(data_dir() / "e2e" / "train_reference.jsonl") + " --out " +
            q(tmp.path() / "runs"),
        log);
    CHECK(rc == 3);
}
