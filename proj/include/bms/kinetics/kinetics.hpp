#pragma once

#include "bms/mocap/marker_frame.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace bms::kinetics {

/// Racket frame from its four markers.
struct RacketAxes {
    Vec3 major;   // bottom -> top
    Vec3 side;    // middle -> side of head
    Vec3 normal;  // major x side
};

struct JointAngles {
    double wrist_deg = 0.0;
    double elbow_deg = 0.0;
    double shoulder_deg = 0.0;
};

/// Per-frame kinetic variables.
struct KineticSample {
    double timestamp = 0.0;
    double pitch_deg = 0.0;
    double height_m = 0.0;  // racket_top Y
    double speed_mps = 0.0;
    double wrist_deg = 0.0;
    double elbow_deg = 0.0;
    double shoulder_deg = 0.0;
    /// Angle between the racket major and racket_bottom -> shuttle_hand.
    double racket_shuttle_deg = 0.0;
    bool complete = false;
};

struct Keyframes {
    std::size_t k_back = 0;
    std::size_t k_fwd = 0;
    std::size_t k_contact = 0;

    bool operator==(const Keyframes&) const = default;
};

struct HeightPoint {
    double t = 0.0;
    double delta_m = 0.0;
};

/// Per-serve aggregates used for judgment.
struct ServiceSummary {
    double pitch_at_contact_deg = 0.0;
    double speed_at_contact_mps = 0.0;
    std::vector<HeightPoint> height_trace;  // forward swing, relative to backswing-start height
    double max_abs_height_delta_m = 0.0;
    double wrist_change_deg = 0.0;
    double elbow_change_deg = 0.0;
    double shoulder_change_deg = 0.0;
    double backswing_end_racket_shuttle_angle_deg = 0.0;
};

/// Unsigned angle between two vectors in degrees; the cosine is clamped to [-1, 1].
/// Throws GeometryError for a zero-length input.
double angle_between_deg(const Vec3& a, const Vec3& b);

/// Throws GeometryError if the frame is incomplete or any axis degenerates.
RacketAxes racket_axes(const SkeletonFrame& frame);

/// Signed elevation of the racket normal above the transverse (XZ) plane, in [-90, 90].
double pitch_angle(const Vec3& normal);

/// wrist = angle(forearm, racket major), elbow = angle(forearm, -upper arm),
/// shoulder = angle(upper arm, (0,-1,0)).
JointAngles joint_angles(const SkeletonFrame& frame);

/// Angle between the racket major and the direction from racket_bottom to the shuttle hand.
double racket_shuttle_angle(const SkeletonFrame& frame);

/// racket_top speed at frames[at]: 3-point moving average of positions, then a centered
/// difference across at-2 .. at+2. Needs three complete frames on each side of `at`;
/// throws WindowError otherwise.
double racket_speed(std::span<const SkeletonFrame> frames, std::size_t at);

/// Same, locating `at` by exact timestamp.
double racket_speed(std::span<const SkeletonFrame> frames, double at);

/// Rotary racket-top speed for the same force and exertion time as a translation at v_t:
/// v_t * r_top / r_c. Throws ParameterError unless r_c > 0, r_top >= r_c and v_t >= 0.
double rotary_speed(double v_t, double r_top, double r_c);

/// One sample per frame. Incomplete frames yield complete=false samples with zeroed values.
/// Speed near the ends of the sequence, where the smoothed window does not fit, falls back to
/// a plain difference of the nearest complete neighbours.
std::vector<KineticSample> kinetic_series(std::span<const SkeletonFrame> frames);

/// Contact pitch and speed at k_contact; height trace over [k_fwd, k_contact] relative to the
/// height at k_back; joint changes as max - min over [k_back, k_contact].
/// Throws SegmentationError for out-of-order or out-of-range keyframes.
ServiceSummary summarize_swing(std::span<const KineticSample> samples, const Keyframes& keys);

}  // namespace bms::kinetics
