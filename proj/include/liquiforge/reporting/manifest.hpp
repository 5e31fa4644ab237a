#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <boost/crc.hpp>
#include <nlohmann/json.hpp>

#include "liquiforge/core/error.hpp"
#include "liquiforge/reporting/emit.hpp"

#ifndef LIQUIFORGE_VERSION
#define LIQUIFORGE_VERSION "1.0.0"
#endif

namespace liquiforge {

inline std::string crc32_hex(const std::string& bytes) {
    boost::crc_32_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
    return buf;
}

enum class ReportFormat { CSV, JSON };

struct ManifestEntry {
    std::string file;
    std::size_t rows = 0;
    std::string checksum;
};

struct ReportManifest {
    std::string config_hash;
    std::string tool_version = LIQUIFORGE_VERSION;
    std::vector<ManifestEntry> entries;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["config_hash"] = config_hash;
        j["tool_version"] = tool_version;
        j["reports"] = nlohmann::ordered_json::array();
        for (const auto& e : entries) j["reports"].push_back({{"file", e.file}, {"rows", e.rows}, {"checksum", e.checksum}});
        return j;
    }
};

// Writes report files into one directory and records each in the manifest. An empty
// directory keeps everything in memory.
class ReportWriter {
public:
    ReportWriter(std::filesystem::path dir, std::vector<ReportFormat> formats, std::string config_hash = {})
        : dir_(std::move(dir)), formats_(std::move(formats)) {
        manifest_.config_hash = std::move(config_hash);
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    void write(const Table& t) {
        for (auto f : formats_) {
            if (f == ReportFormat::CSV) emit(t.name + ".csv", to_csv(t), t.size());
            else emit(t.name + ".json", json_text(liquiforge::to_json(t)), t.size());
        }
    }

    void write_json(const std::string& name, const nlohmann::ordered_json& j, std::size_t rows) {
        emit(name + ".json", json_text(j), rows);
    }

    const ReportManifest& manifest() const { return manifest_; }
    const std::vector<std::pair<std::string, std::string>>& contents() const { return contents_; }

    std::string finish() {
        const std::string text = json_text(manifest_.to_json());
        if (!dir_.empty()) save("manifest.json", text);
        return text;
    }

private:
    void emit(const std::string& file, const std::string& text, std::size_t rows) {
        manifest_.entries.push_back({file, rows, crc32_hex(text)});
        contents_.emplace_back(file, text);
        if (!dir_.empty()) save(file, text);
    }

    void save(const std::string& file, const std::string& text) const {
        std::ofstream out(dir_ / file, std::ios::binary);
        if (!out) fail(ErrorCode::InvalidSpec, "cannot write " + (dir_ / file).string());
        out << text;
    }

    std::filesystem::path dir_;
    std::vector<ReportFormat> formats_;
    ReportManifest manifest_;
    std::vector<std::pair<std::string, std::string>> contents_;
};

} // namespace liquiforge
