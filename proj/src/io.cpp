#include "spinshot/io.hpp"

#include "spinshot/errors.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace spinshot {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string CsvTable::str() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    emit(header);
    for (const auto& r : rows) emit(r);
    return out;
}

OutputFormat output_format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "report") return OutputFormat::report;
    throw InvalidInput("unknown output format '" + s + "' (expected csv or report)");
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["tool_version"] = version;
    j["seed"] = seed;
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

OutputWriter::OutputWriter(std::string out_dir, OutputFormat format, RunManifest manifest)
    : out_dir_(std::move(out_dir)), format_(format), manifest_(std::move(manifest)) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir_, ec);
    if (ec || !std::filesystem::is_directory(out_dir_))
        throw IoError("cannot create output directory " + out_dir_ + ": " + ec.message());
}

void OutputWriter::write_file(const std::string& name, const std::string& content) {
    const std::string path = (std::filesystem::path(out_dir_) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed for " + path);
    manifest_.outputs.push_back(name);
}

void OutputWriter::write_csv(const std::string& name, const CsvTable& table) { write_file(name, table.str()); }

void OutputWriter::write_records(const std::string& name, const std::vector<PhotonRecord>& records) {
    std::ostringstream ss;
    spinshot::write_records(ss, records);
    write_file(name, ss.str());
}

void OutputWriter::write_report(const std::string& text) {
    if (format_ == OutputFormat::report) write_file("report.txt", text);
}

RunManifest OutputWriter::finish() {
    manifest_.finished_utc = utc_timestamp();
    manifest_.outputs.push_back("manifest.json");
    const std::string path = (std::filesystem::path(out_dir_) / "manifest.json").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << manifest_.to_json();
    if (!out) throw IoError("write failed for " + path);
    return manifest_;
}

}  // namespace spinshot
