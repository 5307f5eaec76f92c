#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biascheck/hyde.hpp"
#include "biascheck/pipeline.hpp"

namespace biascheck::run_store {

// Exclusive ownership of one run directory while a process writes to it.
// Creating the lock fails if another process holds it.
class RunLock {
public:
    explicit RunLock(const std::filesystem::path& run_dir);
    ~RunLock();

    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    std::filesystem::path lock_path_;
    int fd_ = -1;
};

std::string generate_run_id(std::int64_t seed);
std::string iso_timestamp();

// Layout: <root>/<run_id>/manifest.json plus one subdirectory per system
// ("direct" or a condition name) holding hyde.jsonl / retrieval.jsonl /
// verdicts.jsonl as applicable.
class RunStore {
public:
    explicit RunStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path run_dir(const std::string& run_id) const;
    bool exists(const std::string& run_id) const;

    // Creates the run directory. Throws ConfigError if the id already exists
    // and resume is false.
    std::filesystem::path create(const std::string& run_id, bool resume) const;

    void write_manifest(const std::string& run_id, const nlohmann::json& manifest) const;
    nlohmann::json read_manifest(const std::string& run_id) const;

    void write_verdicts(const std::string& run_id, const std::string& system,
                        const std::vector<pipeline::VerdictRecord>& records) const;
    std::vector<pipeline::VerdictRecord> read_verdicts(const std::string& run_id,
                                                       const std::string& system) const;

    void write_condition_artifacts(const std::string& run_id, hyde::BiasCondition condition,
                                   const std::vector<pipeline::ClaimArtifacts>& claims) const;
    // Reassembles per-claim artifacts from hyde/retrieval/verdicts files.
    std::vector<pipeline::ClaimArtifacts> read_condition_artifacts(
        const std::string& run_id, hyde::BiasCondition condition) const;

    pipeline::ConditionRun load_condition_run(const std::string& run_id,
                                              hyde::BiasCondition condition) const;

    // Systems present in a run directory ("direct", condition names).
    std::vector<std::string> systems(const std::string& run_id) const;

    // True when the condition carries per-stage artifacts (hyde/retrieval)
    // beyond the verdicts file.
    bool has_stage_artifacts(const std::string& run_id, hyde::BiasCondition condition) const;

private:
    std::filesystem::path root_;
};

nlohmann::json verdict_to_json(const pipeline::VerdictRecord& record);
pipeline::VerdictRecord verdict_from_json(const nlohmann::json& j);

}  // namespace biascheck::run_store
