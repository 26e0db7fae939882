#pragma once

#include "spinshot/records.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace spinshot {

// 12 significant digits, the precision of every numeric output file.
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string str() const;
};

enum class OutputFormat { csv, report };

OutputFormat output_format_from_string(const std::string& s);

struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::uint64_t seed = 0;
    std::string version;
    std::string started_utc;
    std::string finished_utc;
    std::vector<std::string> outputs;

    std::string to_json() const;
};

// Writes run artifacts into one directory and records them in manifest.json.
class OutputWriter {
public:
    OutputWriter(std::string out_dir, OutputFormat format, RunManifest manifest);

    void write_csv(const std::string& name, const CsvTable& table);
    void write_records(const std::string& name, const std::vector<PhotonRecord>& records);
    // Written only in report format.
    void write_report(const std::string& text);
    // Writes manifest.json and returns the manifest.
    RunManifest finish();

    const std::string& out_dir() const { return out_dir_; }

private:
    void write_file(const std::string& name, const std::string& content);

    std::string out_dir_;
    OutputFormat format_;
    RunManifest manifest_;
};

std::string utc_timestamp();

}  // namespace spinshot
