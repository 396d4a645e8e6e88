#pragma once

#include "bms/mocap/marker_frame.hpp"
#include "bms/mocap/synthesize.hpp"

#include <random>

namespace bms::test {

/// Pose built from chosen angles so each kinetic variable has a closed-form value.
struct AnalyticPose {
    SkeletonFrame frame;
    double wrist_deg = 0.0;
    double elbow_deg = 0.0;
    double shoulder_deg = 0.0;
    double pitch_deg = 0.0;
    double racket_shuttle_deg = 0.0;
    Vec3 major = Vec3::Zero();
    Vec3 side = Vec3::Zero();
};

Vec3 random_unit(std::mt19937_64& rng);
/// Unit vector orthogonal to `v`.
Vec3 random_perpendicular(const Vec3& v, std::mt19937_64& rng);

AnalyticPose random_pose(std::mt19937_64& rng);

/// Complete frame with every marker at a fixed plausible place and the racket top at `top`.
SkeletonFrame frame_with_top(double t, const Vec3& top);

/// `serves` identical serves at the reference values.
SynthesisParams clean_params(int serves, Handedness h = Handedness::Right);

}  // namespace bms::test
