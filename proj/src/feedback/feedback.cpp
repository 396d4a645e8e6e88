#include "bms/feedback/feedback.hpp"

#include "bms/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bms::feedback {

std::string_view to_string(Halo h) {
    switch (h) {
        case Halo::Green: return "green";
        case Halo::Yellow: return "yellow";
        case Halo::Red: return "red";
    }
    return "red";
}

std::string_view to_string(Status s) { return s == Status::Pass ? "pass" : "fail"; }

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::Increase: return "increase";
        case Direction::Decrease: return "decrease";
        case Direction::None: return "none";
    }
    return "none";
}

Vec3 dominant_side_axis(const SkeletonFrame& frame) {
    Vec3 d = frame.shoulder - frame.shuttle_shoulder;
    d.y() = 0.0;
    const double n = d.norm();
    if (!(n > 0.0)) throw GeometryError("shoulders coincide in the transverse plane");
    return d / n;
}

Vec3 sagittal_axis(const SkeletonFrame& frame) {
    // Y x (right shoulder - left shoulder) points forward for an upright body.
    const Vec3 side = dominant_side_axis(frame);
    const Vec3 right = frame.handedness == Handedness::Right ? side : Vec3(-side);
    return Vec3::UnitY().cross(right);
}

ReadyTargets ready_targets(const SkeletonFrame& frame, const GuidanceConfig& cfg) {
    if (!frame.complete) throw GeometryError("frame has lost markers");
    ReadyTargets t;
    t.sagittal_axis = sagittal_axis(frame);
    const Vec3 side = dominant_side_axis(frame);
    const double arm = (frame.elbow - frame.shoulder).norm() + (frame.wrist - frame.elbow).norm();
    Vec3 base = frame.shoulder;
    base.y() = cfg.shuttle_height_m;
    t.shuttle_target = base + cfg.forward_fraction * arm * t.sagittal_axis;
    t.racket_target = t.shuttle_target + cfg.racket_gap_m * side;
    return t;
}

Halo halo_state(const Vec3& actual, const Vec3& target, const Vec3& axis, double green_m,
                double yellow_m) {
    if (!(green_m > 0.0 && green_m < yellow_m)) throw ParameterError("halo bands need 0 < green < yellow");
    const double d = std::abs((actual - target).dot(axis));
    if (d <= green_m) return Halo::Green;
    if (d <= yellow_m) return Halo::Yellow;
    return Halo::Red;
}

SwingTrackSpec swing_track(const SkeletonFrame& ready, const model::ExpertModel& model,
                           const GuidanceConfig& cfg) {
    if (!ready.complete) throw GeometryError("frame has lost markers");
    if (!(model.speed.mean > 0.0)) throw ParameterError("model speed must be positive");
    const double sweep = cfg.sweep_back_rad + cfg.sweep_forward_rad;
    if (!(cfg.sweep_back_rad >= 0.0 && cfg.sweep_forward_rad >= 0.0 && sweep > 0.0)) {
        throw ParameterError("sweeps must be non-negative with a positive total");
    }
    SwingTrackSpec s;
    s.center = ready.wrist;
    s.plane_height_m = ready.shuttle_hand.y();
    s.radius_m = (ready.wrist - ready.racket_top).norm();
    if (!(s.radius_m > 0.0)) throw GeometryError("zero swing radius");
    s.target_angular_speed = model.speed.mean / s.radius_m;
    s.angular_acceleration = s.target_angular_speed * s.target_angular_speed / (2.0 * sweep);
    s.sweep_back_rad = cfg.sweep_back_rad;
    s.sweep_forward_rad = cfg.sweep_forward_rad;
    return s;
}

namespace {

// Closed interval [mean - sd, mean + sd], compared against the computed bounds so that a value
// built as mean +/- sd lands exactly on the boundary.
JudgedValue within_one_sd(double value, const model::VariableStats& s) {
    JudgedValue j{value, s.mean, s.sd, Status::Pass, Direction::None};
    if (value < s.mean - s.sd || value > s.mean + s.sd) j.status = Status::Fail;
    return j;
}

}  // namespace

FeedbackReport judge_shot(const kinetics::ServiceSummary& summary, const model::ExpertModel& model) {
    if (model.pattern != model::ExertionPattern::WristOnly) {
        throw JudgmentError("judgment targets the wrist-only exertion pattern");
    }
    const double contact[] = {summary.pitch_at_contact_deg, summary.speed_at_contact_mps,
                              summary.wrist_change_deg, summary.elbow_change_deg,
                              summary.shoulder_change_deg, summary.max_abs_height_delta_m,
                              summary.backswing_end_racket_shuttle_angle_deg};
    if (!std::all_of(std::begin(contact), std::end(contact), [](double v) { return std::isfinite(v); })) {
        throw JudgmentError("summary is missing contact values");
    }

    FeedbackReport r;
    r.pitch = within_one_sd(summary.pitch_at_contact_deg, model.pitch);
    if (r.pitch.status == Status::Fail) {
        r.pitch.direction = summary.pitch_at_contact_deg > model.pitch.mean ? Direction::Decrease
                                                                            : Direction::Increase;
    }
    r.speed = within_one_sd(summary.speed_at_contact_mps, model.speed);

    r.height_threshold_m = model.height_diff.mean + model.height_diff.sd;
    r.height = {summary.max_abs_height_delta_m, model.height_diff.mean, model.height_diff.sd,
                Status::Pass, Direction::None};
    for (const auto& p : summary.height_trace) {
        const bool within = std::abs(p.delta_m) <= r.height_threshold_m;
        r.height_trace.push_back({p.t, p.delta_m, within});
        if (!within) r.height.status = Status::Fail;
    }
    if (summary.max_abs_height_delta_m > r.height_threshold_m) r.height.status = Status::Fail;

    // The wrist should move as much as possible; the lower bound is relaxed when the racket starts
    // the forward swing closer to the shuttle than the model's average wrist change.
    r.wrist_upper_bound_deg =
        std::min(model.wrist_change.mean, summary.backswing_end_racket_shuttle_angle_deg);
    const double wrist_floor =
        std::min(model.wrist_change.mean - model.wrist_change.sd, r.wrist_upper_bound_deg);
    r.wrist = {summary.wrist_change_deg, model.wrist_change.mean, model.wrist_change.sd,
               summary.wrist_change_deg >= wrist_floor ? Status::Pass : Status::Fail, Direction::None};
    r.elbow = {summary.elbow_change_deg, model.elbow_change.mean, model.elbow_change.sd,
               summary.elbow_change_deg <= model.elbow_change.mean + model.elbow_change.sd
                   ? Status::Pass
                   : Status::Fail,
               Direction::None};
    r.shoulder = {summary.shoulder_change_deg, model.shoulder_change.mean, model.shoulder_change.sd,
                  summary.shoulder_change_deg <= model.shoulder_change.mean + model.shoulder_change.sd
                      ? Status::Pass
                      : Status::Fail,
                  Direction::None};
    return r;
}

}  // namespace bms::feedback
