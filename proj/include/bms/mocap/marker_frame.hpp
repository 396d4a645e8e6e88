#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bms {

/// Meters, right-handed, Y up, Z = body forward at calibration.
using Vec3 = Eigen::Vector3d;

enum class Handedness { Left, Right };

std::string_view to_string(Handedness h);
Handedness parse_handedness(std::string_view s);

namespace markers {

// Conventional full-body arm labels used by the relabeler.
inline constexpr std::string_view kLeftShoulder = "LSHO";
inline constexpr std::string_view kRightShoulder = "RSHO";
inline constexpr std::string_view kLeftElbow = "LELB";
inline constexpr std::string_view kRightElbow = "RELB";
inline constexpr std::string_view kLeftWristA = "LWRA";
inline constexpr std::string_view kLeftWristB = "LWRB";
inline constexpr std::string_view kRightWristA = "RWRA";
inline constexpr std::string_view kRightWristB = "RWRB";
inline constexpr std::string_view kLeftFinger = "LFIN";
inline constexpr std::string_view kRightFinger = "RFIN";

// Racket markers.
inline constexpr std::string_view kRacketTop = "RKTTOP";
inline constexpr std::string_view kRacketBottom = "RKTBOT";
inline constexpr std::string_view kRacketSide = "RKTSIDE";
inline constexpr std::string_view kRacketMiddle = "RKTMID";

/// The fourteen labels relabel() needs.
const std::vector<std::string>& required_labels();

/// Every label a recording may carry: the conventional full-body set plus the racket.
bool is_known_label(std::string_view label);

}  // namespace markers

/// One capture instant. Positions are indexed like the owning recording's label list.
struct MarkerFrame {
    double timestamp = 0.0;
    std::vector<Vec3> positions;
    std::vector<bool> valid;

    bool operator==(const MarkerFrame&) const = default;
};

/// A ground-truth record written by the synthesizer for each serve it generates.
struct ServeTruth {
    std::size_t k_back = 0;
    std::size_t k_fwd = 0;
    std::size_t k_contact = 0;
    double pitch_deg = 0.0;
    double speed_mps = 0.0;
    double height_diff_m = 0.0;
    double wrist_change_deg = 0.0;
    double elbow_change_deg = 0.0;
    double shoulder_change_deg = 0.0;
    double backswing_end_racket_shuttle_deg = 0.0;
    bool lost_tracking = false;

    bool operator==(const ServeTruth&) const = default;
};

struct Recording {
    std::vector<std::string> labels;
    std::vector<MarkerFrame> frames;
    double rate_hz = 120.0;
    Handedness handedness = Handedness::Right;
    std::map<std::string, std::string> metadata;
    std::vector<ServeTruth> truth;

    std::optional<std::size_t> index_of(std::string_view label) const;

    bool operator==(const Recording&) const = default;
};

/// Throws ParseError if the recording breaks any structural invariant.
void validate(const Recording& rec);

/// Relabeled dominant/non-dominant view of one instant.
struct SkeletonFrame {
    double timestamp = 0.0;
    Handedness handedness = Handedness::Right;
    Vec3 hand = Vec3::Zero();
    Vec3 wrist = Vec3::Zero();
    Vec3 elbow = Vec3::Zero();
    Vec3 shoulder = Vec3::Zero();
    Vec3 shuttle_hand = Vec3::Zero();
    Vec3 shuttle_shoulder = Vec3::Zero();
    Vec3 racket_top = Vec3::Zero();
    Vec3 racket_bottom = Vec3::Zero();
    Vec3 racket_side = Vec3::Zero();
    Vec3 racket_middle = Vec3::Zero();
    bool complete = false;

    bool operator==(const SkeletonFrame&) const = default;
};

}  // namespace bms
