#pragma once

#include "bms/kinetics/kinetics.hpp"
#include "bms/model/expert_model.hpp"

#include <string_view>
#include <vector>

namespace bms::feedback {

/// Guidance geometry defaults. Every value is configurable.
struct GuidanceConfig {
    double shuttle_height_m = 1.05;  // keeps the whole shuttle under the 1.15 m service limit
    double forward_fraction = 0.35;  // of the shoulder-elbow-wrist chain length
    double racket_gap_m = 0.12;
    double halo_green_m = 0.03;
    double halo_yellow_m = 0.08;
    double sweep_back_rad = 0.35;
    double sweep_forward_rad = 0.45;
};

struct ReadyTargets {
    Vec3 shuttle_target = Vec3::Zero();
    Vec3 racket_target = Vec3::Zero();
    Vec3 sagittal_axis = Vec3::UnitZ();  // unit, horizontal, body forward
};

enum class Halo { Green, Yellow, Red };

struct SwingTrackSpec {
    Vec3 center = Vec3::Zero();  // wrist at ready
    double plane_height_m = 0.0;
    double radius_m = 0.0;
    double target_angular_speed = 0.0;  // rad/s
    double angular_acceleration = 0.0;  // rad/s^2
    double sweep_back_rad = 0.0;
    double sweep_forward_rad = 0.0;
};

enum class Status { Pass, Fail };
enum class Direction { Increase, Decrease, None };

struct JudgedValue {
    double value = 0.0;
    double target_mean = 0.0;
    double target_sd = 0.0;
    Status status = Status::Pass;
    Direction direction = Direction::None;

    bool operator==(const JudgedValue&) const = default;
};

struct JudgedHeightPoint {
    double t = 0.0;
    double delta_m = 0.0;
    bool within = true;

    bool operator==(const JudgedHeightPoint&) const = default;
};

struct FeedbackReport {
    JudgedValue pitch;
    JudgedValue speed;
    JudgedValue height;  // max |delta h| over the forward swing
    std::vector<JudgedHeightPoint> height_trace;
    double height_threshold_m = 0.0;
    JudgedValue wrist;
    JudgedValue elbow;
    JudgedValue shoulder;
    double wrist_upper_bound_deg = 0.0;

    bool operator==(const FeedbackReport&) const = default;
};

std::string_view to_string(Halo h);
std::string_view to_string(Status s);
std::string_view to_string(Direction d);

/// Horizontal body-forward unit vector from the shoulder line. Throws GeometryError when the
/// shoulders coincide in the transverse plane.
Vec3 sagittal_axis(const SkeletonFrame& frame);

/// Unit horizontal vector from the non-dominant toward the dominant shoulder.
Vec3 dominant_side_axis(const SkeletonFrame& frame);

/// Shuttle target sits at the configured height below/in front of the dominant shoulder,
/// forward_fraction x arm length along the sagittal axis; the racket target is racket_gap
/// further toward the dominant side.
ReadyTargets ready_targets(const SkeletonFrame& frame, const GuidanceConfig& cfg);

/// Green/Yellow/Red by the distance from target projected on `axis`. Bands must satisfy
/// 0 < green < yellow (ParameterError otherwise).
Halo halo_state(const Vec3& actual, const Vec3& target, const Vec3& axis, double green_m,
                double yellow_m);

/// Circle centered on the wrist; radius = |wrist - racket_top| at ready. Angular acceleration is
/// chosen so that sweeping back and forward from rest ends at model speed / radius.
SwingTrackSpec swing_track(const SkeletonFrame& ready, const model::ExpertModel& model,
                           const GuidanceConfig& cfg);

/// Post-shot judgment against a wrist-only model. Boundaries are closed at one SD.
/// Throws JudgmentError for a non-finite summary or a model of another pattern.
FeedbackReport judge_shot(const kinetics::ServiceSummary& summary, const model::ExpertModel& model);

}  // namespace bms::feedback
