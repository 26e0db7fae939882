#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace spinshot {

enum class PhotonOrigin { emitter, dark };

struct PhotonEvent {
    double timestamp_us = 0.0;  // from sequence start
    int pulse_index = 0;
    PhotonOrigin origin = PhotonOrigin::emitter;
};

// Photon detections of one shot.
struct PhotonRecord {
    std::uint64_t shot_id = 0;
    int n_pulses = 0;  // pulse slots covered by this record
    std::vector<PhotonEvent> events;
};

std::string_view to_string(PhotonOrigin o);

// Line-based event file: "shot_id pulse_index timestamp_us origin" per
// detection, '#' comments allowed. Records without events are not written.
void write_records(std::ostream& out, const std::vector<PhotonRecord>& records);
// Records are regrouped by shot id; n_pulses is set to the largest pulse index
// seen + 1 unless n_pulses_hint > 0.
std::vector<PhotonRecord> read_records(std::istream& in, int n_pulses_hint = 0,
                                       std::string_view source = "<records>");

}  // namespace spinshot
