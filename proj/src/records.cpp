#include "spinshot/records.hpp"

#include "spinshot/errors.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace spinshot {

std::string_view to_string(PhotonOrigin o) { return o == PhotonOrigin::emitter ? "emitter" : "dark"; }

void write_records(std::ostream& out, const std::vector<PhotonRecord>& records) {
    out << "# shot_id pulse_index timestamp_us origin\n";
    out << std::setprecision(12);
    for (const auto& r : records)
        for (const auto& e : r.events)
            out << r.shot_id << ' ' << e.pulse_index << ' ' << e.timestamp_us << ' '
                << to_string(e.origin) << '\n';
}

std::vector<PhotonRecord> read_records(std::istream& in, int n_pulses_hint,
                                       std::string_view source) {
    std::map<std::uint64_t, PhotonRecord> by_shot;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::uint64_t shot = 0;
        PhotonEvent e;
        std::string origin;
        if (!(ls >> shot >> e.pulse_index >> e.timestamp_us >> origin))
            throw ParseError(std::string(source), lineno, 0,
                             "expected 'shot_id pulse_index timestamp_us origin'");
        std::string extra;
        if (ls >> extra) throw ParseError(std::string(source), lineno, 0, "trailing field '" + extra + "'");
        if (origin == "emitter") e.origin = PhotonOrigin::emitter;
        else if (origin == "dark") e.origin = PhotonOrigin::dark;
        else throw ParseError(std::string(source), lineno, 0, "unknown origin '" + origin + "'");
        if (e.pulse_index < 0) throw ParseError(std::string(source), lineno, 0, "negative pulse index");
        auto& r = by_shot[shot];
        r.shot_id = shot;
        r.events.push_back(e);
    }
    std::vector<PhotonRecord> out;
    for (auto& [id, r] : by_shot) {
        int span = 0;
        for (const auto& e : r.events) span = std::max(span, e.pulse_index + 1);
        r.n_pulses = n_pulses_hint > 0 ? n_pulses_hint : span;
        std::stable_sort(r.events.begin(), r.events.end(),
                         [](const PhotonEvent& a, const PhotonEvent& b) {
                             return a.timestamp_us < b.timestamp_us;
                         });
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace spinshot
