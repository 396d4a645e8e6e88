#include "bms/mocap/marker_frame.hpp"

#include "bms/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace bms {

std::string_view to_string(Handedness h) {
    return h == Handedness::Left ? "left" : "right";
}

Handedness parse_handedness(std::string_view s) {
    if (s == "left" || s == "Left" || s == "L") return Handedness::Left;
    if (s == "right" || s == "Right" || s == "R") return Handedness::Right;
    throw ParseError(0, "unknown handedness '" + std::string(s) + "'");
}

namespace markers {

const std::vector<std::string>& required_labels() {
    static const std::vector<std::string> labels = {
        std::string(kLeftShoulder), std::string(kRightShoulder), std::string(kLeftElbow),
        std::string(kRightElbow),   std::string(kLeftWristA),    std::string(kLeftWristB),
        std::string(kRightWristA),  std::string(kRightWristB),   std::string(kLeftFinger),
        std::string(kRightFinger),  std::string(kRacketTop),     std::string(kRacketBottom),
        std::string(kRacketSide),   std::string(kRacketMiddle),
    };
    return labels;
}

bool is_known_label(std::string_view label) {
    // Plug-in-Gait style full-body set.
    static constexpr std::array<std::string_view, 43> kFullBody = {
        "LFHD", "RFHD", "LBHD", "RBHD", "C7",   "T10",  "CLAV", "STRN", "RBAK",
        "LSHO", "LUPA", "LELB", "LFRM", "LWRA", "LWRB", "LFIN", "RSHO", "RUPA",
        "RELB", "RFRM", "RWRA", "RWRB", "RFIN", "LASI", "RASI", "LPSI", "RPSI",
        "LTHI", "LKNE", "LTIB", "LANK", "LHEE", "LTOE", "RTHI", "RKNE", "RTIB",
        "RANK", "RHEE", "RTOE", "RKTTOP", "RKTBOT", "RKTSIDE", "RKTMID",
    };
    return std::find(kFullBody.begin(), kFullBody.end(), label) != kFullBody.end();
}

}  // namespace markers

std::optional<std::size_t> Recording::index_of(std::string_view label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels.begin());
}

void validate(const Recording& rec) {
    if (!(rec.rate_hz > 0.0) || !std::isfinite(rec.rate_hz)) {
        throw ParseError(0, "rate_hz must be positive");
    }
    std::set<std::string> seen;
    for (const auto& l : rec.labels) {
        if (!markers::is_known_label(l)) throw ParseError(0, "unknown marker label '" + l + "'");
        if (!seen.insert(l).second) throw ParseError(0, "duplicate marker label '" + l + "'");
    }
    for (std::size_t i = 0; i < rec.frames.size(); ++i) {
        const auto& f = rec.frames[i];
        if (f.positions.size() != rec.labels.size() || f.valid.size() != rec.labels.size()) {
            throw ParseError(0, "frame " + std::to_string(i) + " has a different marker set");
        }
        if (!std::isfinite(f.timestamp)) {
            throw ParseError(0, "frame " + std::to_string(i) + " has a non-finite timestamp");
        }
        if (i > 0 && !(f.timestamp > rec.frames[i - 1].timestamp)) {
            throw ParseError(0, "frame " + std::to_string(i) + " timestamp does not increase");
        }
        for (std::size_t m = 0; m < f.positions.size(); ++m) {
            if (f.valid[m] && !f.positions[m].allFinite()) {
                throw ParseError(0, "frame " + std::to_string(i) + " marker " + rec.labels[m] +
                                        " is not finite");
            }
        }
    }
}

}  // namespace bms
