#pragma once

#include "spinshot/cli.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace spinshot::testing {

namespace fs = std::filesystem;

inline std::string source_path(const std::string& rel) { return std::string(SPINSHOT_SOURCE_DIR) + "/" + rel; }

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliRun run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = dispatch(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Every file in a directory except the manifest, keyed by name.
inline std::map<std::string, std::string> output_files(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename() != "manifest.json") files[e.path().filename().string()] = slurp(e.path());
    return files;
}

class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        path_ = fs::temp_directory_path() / ("spinshot_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const fs::path& path() const { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

// One invocation per subcommand, small enough for a unit-test budget. Inputs
// for fit and g2 are written into `scratch` first.
inline std::vector<std::pair<std::string, std::vector<std::string>>> subcommand_cases(const ScratchDir& scratch) {
    {
        std::ofstream csv(scratch / "echo.csv");
        csv << "x,y\n";
        for (int i = 0; i <= 30; ++i) {
            const double x = 5.0 * i;
            csv << x << "," << 3.0 * std::exp(-(x / 48.0) * (x / 48.0)) + 0.01 * std::sin(1.7 * i) << "\n";
        }
        std::ofstream rec(scratch / "records.txt");
        rec << "# shot pulse time origin\n";
        for (int s = 0; s < 50; ++s)
            for (int k = s % 3; k < 40; k += 3) rec << s << " " << k << " " << k * 10.0 + 0.5 << " emitter\n";
        rec << "7 4 40.9 dark\n";
    }
    const std::string cfg = source_path("paper.cfg");
    return {
        {"levels", {"levels", "--config", cfg}},
        {"readout-optimize", {"readout-optimize", "--config", cfg}},
        {"simulate-readout", {"simulate", "--readout", "--config", cfg, "--shots", "3000"}},
        {"simulate-sequence", {"simulate", source_path("sequences/readout.seq"), "--config", cfg, "--shots", "2000"}},
        {"simulate-protocol", {"simulate", "--protocol", "rabi", "--sweep", "0:10:21", "--config", cfg, "--shots", "2000"}},
        {"fit", {"fit", scratch / "echo.csv", "--model", "gaussian_echo", "--config", cfg}},
        {"g2", {"g2", scratch / "records.txt", "--config", cfg}},
        {"area-sweep", {"area-sweep", "--config", cfg, "--shots", "1000"}},
        {"calibrate", {"calibrate", "--config", cfg}},
    };
}

inline void set_threads(const char* value) {
    if (value)
        ::setenv("SPINSHOT_THREADS", value, 1);
    else
        ::unsetenv("SPINSHOT_THREADS");
}

}  // namespace spinshot::testing
