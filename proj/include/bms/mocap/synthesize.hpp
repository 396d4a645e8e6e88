#pragma once

#include "bms/feedback/feedback.hpp"
#include "bms/mocap/marker_frame.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bms {

/// Body dimensions of the synthetic trainee, standing at the origin facing +Z.
struct BodyParams {
    double shoulder_height_m = 1.40;
    double shoulder_half_width_m = 0.20;
    double upper_arm_m = 0.30;
    double forearm_m = 0.26;
    double hand_m = 0.08;
    double wrist_marker_half_width_m = 0.025;
};

struct RacketParams {
    double middle_to_top_m = 0.12;
    double middle_to_bottom_m = 0.545;
    double head_half_width_m = 0.10;
    /// Angle between the racket major and straight down. Must exceed every serve's pitch.
    double major_from_down_deg = 50.0;
};

/// Marks one marker lost for `count` frames starting `offset` frames after backswing start.
struct Dropout {
    std::string label;
    int offset = 0;
    int count = 1;
};

/// One serve. Ground-truth variables are exact by construction:
/// the racket head travels on a straight line, resting at the ready point, easing back by
/// L = contact_speed * forward_swing_s / 2 (dropping height_drop_m), then accelerating uniformly
/// back through the ready point, which is the contact and the racket-to-shuttle-hand minimum.
/// Joint angles rise by their change during the backswing and return before contact.
struct ServeParams {
    double pitch_deg = 21.60;
    double height_drop_m = 0.11;
    double contact_speed_mps = 5.41;
    double forward_swing_s = 0.20;
    double backswing_s = 0.50;
    double wrist_change_deg = 9.96;
    double elbow_change_deg = 4.97;
    double shoulder_change_deg = 1.48;
    /// Sinusoid added to the wrist angle across the swing.
    double wrist_oscillation_deg = 0.0;
    int wrist_oscillation_cycles = 0;
    std::optional<Dropout> dropout;

    double approach_s = 1.0;
    double creep_s = 0.6;  // final 10 cm into the ready pose, below the motion threshold
    double hold_s = 0.5;
    double follow_s = 0.3;
    double rest_s = 2.5;

    /// No motion at all: the serve contributes a stationary stretch.
    bool zero_amplitude() const;
};

struct SynthesisParams {
    double rate_hz = 120.0;
    Handedness handedness = Handedness::Right;
    BodyParams body;
    RacketParams racket;
    feedback::GuidanceConfig guidance;
    std::vector<ServeParams> serves;
    double lead_s = 0.5;
    double noise_sd_m = 0.0;
    std::uint64_t seed = 1;

    double wrist_base_deg = 60.0;
    double elbow_base_deg = 100.0;
    double shoulder_base_deg = 20.0;
    double forearm_from_down_deg = 90.0;
};

/// Builds a recording plus per-serve ground truth (Recording::truth). Frame indices in the truth
/// are recording frame indices. Throws ParameterError for non-physical parameters.
Recording synthesize_service(const SynthesisParams& params);

}  // namespace bms
