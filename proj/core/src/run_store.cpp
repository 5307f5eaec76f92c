#include "biascheck/run_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <ctime>

#include "biascheck/errors.hpp"
#include "biascheck/hashing.hpp"
#include "biascheck/jsonl.hpp"

namespace biascheck::run_store {

RunLock::RunLock(const std::filesystem::path& run_dir) : lock_path_(run_dir / ".lock") {
    std::filesystem::create_directories(run_dir);
    fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
        throw ConfigError("run directory is locked by another process: " + run_dir.string());
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto written = ::write(fd_, pid.data(), pid.size());
}

RunLock::~RunLock() {
    if (fd_ >= 0) {
        ::close(fd_);
        std::error_code ec;
        std::filesystem::remove(lock_path_, ec);
    }
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string generate_run_id(std::int64_t seed) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
    const auto nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(
                           now.time_since_epoch())
                           .count();
    const auto salt = hashing::to_hex(
        hashing::combine(static_cast<std::uint64_t>(nanos), static_cast<std::uint64_t>(seed)));
    return std::string(buf) + "-" + salt.substr(10);
}

RunStore::RunStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path RunStore::run_dir(const std::string& run_id) const {
    return root_ / run_id;
}

bool RunStore::exists(const std::string& run_id) const {
    return std::filesystem::is_directory(run_dir(run_id));
}

std::filesystem::path RunStore::create(const std::string& run_id, bool resume) const {
    const auto dir = run_dir(run_id);
    if (std::filesystem::exists(dir) && !resume) {
        throw ConfigError("run id '" + run_id + "' already exists (use --resume to continue)");
    }
    std::filesystem::create_directories(dir);
    return dir;
}

void RunStore::write_manifest(const std::string& run_id, const nlohmann::json& manifest) const {
    const auto path = run_dir(run_id) / "manifest.json";
    const auto tmp = run_dir(run_id) / "manifest.json.tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw DataError("cannot write manifest: " + path.string());
        }
        out << manifest.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

nlohmann::json RunStore::read_manifest(const std::string& run_id) const {
    const auto path = run_dir(run_id) / "manifest.json";
    std::ifstream in(path);
    if (!in) {
        throw MissingArtifactsError("manifest not found: " + path.string());
    }
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("corrupt manifest " + path.string() + ": " + e.what());
    }
    return manifest;
}

nlohmann::json verdict_to_json(const pipeline::VerdictRecord& record) {
    nlohmann::json qa = nlohmann::json::array();
    for (const auto& entry : record.qa) {
        nlohmann::json item{{"question", entry.question}, {"answer", entry.answer}};
        if (entry.source_url) item["source_url"] = *entry.source_url;
        qa.push_back(std::move(item));
    }
    nlohmann::json j{
        {"claim_id", record.claim_id},
        {"condition", pipeline::system_name(record.condition)},
        {"label", corpus::to_string(record.label)},
        {"justification", record.justification},
        {"qa", qa},
    };
    if (!record.annotations.empty()) {
        j["annotations"] = record.annotations;
    }
    return j;
}

pipeline::VerdictRecord verdict_from_json(const nlohmann::json& j) {
    pipeline::VerdictRecord record;
    record.claim_id = j.at("claim_id").get<std::string>();
    const std::string condition = j.value("condition", std::string("direct"));
    if (condition != "direct") {
        auto parsed = hyde::parse_condition(condition);
        if (!parsed) {
            throw DataError("verdict record with unknown condition '" + condition + "'");
        }
        record.condition = *parsed;
    }
    const std::string label = j.at("label").get<std::string>();
    auto parsed_label = corpus::parse_label(label);
    if (!parsed_label) {
        throw DataError("verdict record with unknown label '" + label + "'");
    }
    record.label = *parsed_label;
    record.justification = j.value("justification", std::string{});
    for (const auto& item : j.value("qa", nlohmann::json::array())) {
        pipeline::EvidenceQA qa;
        qa.question = item.value("question", std::string{});
        qa.answer = item.value("answer", std::string{});
        if (item.contains("source_url")) {
            qa.source_url = item.at("source_url").get<std::string>();
        }
        record.qa.push_back(std::move(qa));
    }
    for (const auto& note : j.value("annotations", nlohmann::json::array())) {
        record.annotations.push_back(note.get<std::string>());
    }
    return record;
}

void RunStore::write_verdicts(const std::string& run_id, const std::string& system,
                              const std::vector<pipeline::VerdictRecord>& records) const {
    const auto dir = run_dir(run_id) / system;
    std::filesystem::create_directories(dir);
    jsonl::Writer out(dir / "verdicts.jsonl");
    for (const auto& record : records) {
        out.write(verdict_to_json(record));
    }
}

std::vector<pipeline::VerdictRecord> RunStore::read_verdicts(const std::string& run_id,
                                                             const std::string& system) const {
    const auto path = run_dir(run_id) / system / "verdicts.jsonl";
    if (!std::filesystem::exists(path)) {
        throw MissingArtifactsError("verdicts not found: " + path.string());
    }
    std::vector<pipeline::VerdictRecord> records;
    jsonl::for_each_record(path, [&](std::size_t, const nlohmann::json& j) {
        records.push_back(verdict_from_json(j));
    });
    return records;
}

void RunStore::write_condition_artifacts(
    const std::string& run_id, hyde::BiasCondition condition,
    const std::vector<pipeline::ClaimArtifacts>& claims) const {
    const auto dir = run_dir(run_id) / hyde::to_string(condition);
    std::filesystem::create_directories(dir);

    jsonl::Writer hyde_out(dir / "hyde.jsonl");
    jsonl::Writer retrieval_out(dir / "retrieval.jsonl");
    jsonl::Writer verdicts_out(dir / "verdicts.jsonl");
    for (const auto& claim : claims) {
        for (const auto& doc : claim.docs) {
            hyde_out.write(nlohmann::json{
                {"claim_id", doc.claim_id},
                {"index", doc.index},
                {"text", doc.text},
                {"refusal", doc.refusal},
            });
        }
        nlohmann::json ranked = nlohmann::json::array();
        for (const auto& entry : claim.ranked.entries) {
            ranked.push_back({{"item_id", entry.item_id}, {"score", entry.score}});
        }
        nlohmann::json evidence = nlohmann::json::array();
        for (const auto& entry : claim.evidence.entries) {
            evidence.push_back({{"item_id", entry.item_id},
                                {"text", entry.text},
                                {"url", entry.url},
                                {"score", entry.score}});
        }
        retrieval_out.write(nlohmann::json{
            {"claim_id", claim.claim_id},
            {"ranked", ranked},
            {"evidence", evidence},
        });
        verdicts_out.write(verdict_to_json(claim.verdict));
    }
}

std::vector<pipeline::ClaimArtifacts> RunStore::read_condition_artifacts(
    const std::string& run_id, hyde::BiasCondition condition) const {
    const auto dir = run_dir(run_id) / hyde::to_string(condition);
    const auto verdicts_path = dir / "verdicts.jsonl";
    if (!std::filesystem::exists(verdicts_path)) {
        throw MissingArtifactsError("condition artifacts not found under " + dir.string());
    }

    std::vector<pipeline::ClaimArtifacts> claims;
    std::map<std::string, std::size_t> index_of;
    jsonl::for_each_record(verdicts_path, [&](std::size_t, const nlohmann::json& j) {
        pipeline::ClaimArtifacts art;
        art.verdict = verdict_from_json(j);
        art.claim_id = art.verdict.claim_id;
        index_of[art.claim_id] = claims.size();
        claims.push_back(std::move(art));
    });

    // hyde/retrieval files are absent in verdicts-only runs.
    if (std::filesystem::exists(dir / "hyde.jsonl")) {
        jsonl::for_each_record(dir / "hyde.jsonl", [&](std::size_t, const nlohmann::json& j) {
            const auto it = index_of.find(j.at("claim_id").get<std::string>());
            if (it == index_of.end()) return;
            hyde::HypotheticalDocument doc;
            doc.claim_id = j.at("claim_id").get<std::string>();
            doc.condition = condition;
            doc.index = j.at("index").get<int>();
            doc.text = j.at("text").get<std::string>();
            doc.refusal = j.at("refusal").get<bool>();
            claims[it->second].docs.push_back(std::move(doc));
        });
    }

    if (std::filesystem::exists(dir / "retrieval.jsonl")) {
        jsonl::for_each_record(dir / "retrieval.jsonl", [&](std::size_t, const nlohmann::json& j) {
            const auto it = index_of.find(j.at("claim_id").get<std::string>());
            if (it == index_of.end()) return;
            auto& art = claims[it->second];
            for (const auto& entry : j.value("ranked", nlohmann::json::array())) {
                art.ranked.entries.push_back({entry.at("item_id").get<std::string>(),
                                              entry.at("score").get<double>()});
            }
            for (const auto& entry : j.value("evidence", nlohmann::json::array())) {
                art.evidence.entries.push_back({entry.at("item_id").get<std::string>(),
                                                entry.at("text").get<std::string>(),
                                                entry.value("url", std::string{}),
                                                entry.at("score").get<double>()});
            }
        });
    }
    return claims;
}

pipeline::ConditionRun RunStore::load_condition_run(const std::string& run_id,
                                                    hyde::BiasCondition condition) const {
    pipeline::ConditionRun run;
    run.run_id = run_id;
    run.condition = condition;
    run.claims = read_condition_artifacts(run_id, condition);
    try {
        run.config_snapshot = read_manifest(run_id).value("config", nlohmann::json::object());
    } catch (const MissingArtifactsError&) {
        run.config_snapshot = nlohmann::json::object();
    }
    return run;
}

bool RunStore::has_stage_artifacts(const std::string& run_id,
                                   hyde::BiasCondition condition) const {
    const auto dir = run_dir(run_id) / hyde::to_string(condition);
    return std::filesystem::exists(dir / "hyde.jsonl") ||
           std::filesystem::exists(dir / "retrieval.jsonl");
}

std::vector<std::string> RunStore::systems(const std::string& run_id) const {
    const auto dir = run_dir(run_id);
    if (!std::filesystem::is_directory(dir)) {
        throw MissingArtifactsError("run not found: " + dir.string());
    }
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_directory()) continue;
        const auto name = entry.path().filename().string();
        if (name == "direct" || hyde::parse_condition(name)) {
            if (std::filesystem::exists(entry.path() / "verdicts.jsonl")) {
                out.push_back(name);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace biascheck::run_store
