#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "biascheck/errors.hpp"

namespace biascheck::jsonl {

// Calls fn(line_number, record) for every non-blank line. Line numbers are 1-based.
inline void for_each_record(const std::filesystem::path& path,
                            const std::function<void(std::size_t, const nlohmann::json&)>& fn) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open file: " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": malformed record: " + e.what());
        }
        fn(line_no, record);
    }
}

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
        if (!out_) {
            throw DataError("cannot open file for writing: " + path.string());
        }
    }

    void write(const nlohmann::json& record) { out_ << record.dump() << '\n'; }

private:
    std::ofstream out_;
};

}  // namespace biascheck::jsonl
