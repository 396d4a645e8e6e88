#include "bms/kinetics/kinetics.hpp"

#include "bms/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bms::kinetics {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void require_complete(const SkeletonFrame& f) {
    if (!f.complete) throw GeometryError("frame has lost markers");
}

Vec3 smoothed_top(std::span<const SkeletonFrame> frames, std::size_t i) {
    return (frames[i - 1].racket_top + frames[i].racket_top + frames[i + 1].racket_top) / 3.0;
}

}  // namespace

double angle_between_deg(const Vec3& a, const Vec3& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw GeometryError("zero-length vector in angle");
    const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
    return std::acos(c) * kRadToDeg;
}

RacketAxes racket_axes(const SkeletonFrame& frame) {
    require_complete(frame);
    RacketAxes ax;
    ax.major = frame.racket_top - frame.racket_bottom;
    ax.side = frame.racket_side - frame.racket_middle;
    ax.normal = ax.major.cross(ax.side);
    if (ax.major.squaredNorm() == 0.0 || ax.side.squaredNorm() == 0.0 ||
        ax.normal.squaredNorm() == 0.0) {
        throw GeometryError("degenerate racket markers");
    }
    return ax;
}

double pitch_angle(const Vec3& normal) {
    const double n = normal.norm();
    if (!(n > 0.0)) throw GeometryError("zero racket normal");
    return std::asin(std::clamp(normal.y() / n, -1.0, 1.0)) * kRadToDeg;
}

JointAngles joint_angles(const SkeletonFrame& frame) {
    require_complete(frame);
    const Vec3 forearm = frame.wrist - frame.elbow;
    const Vec3 upper_arm = frame.elbow - frame.shoulder;
    const Vec3 major = frame.racket_top - frame.racket_bottom;
    if (forearm.squaredNorm() == 0.0) throw GeometryError("zero-length forearm");
    if (upper_arm.squaredNorm() == 0.0) throw GeometryError("zero-length upper arm");
    JointAngles j;
    j.wrist_deg = angle_between_deg(forearm, major);
    j.elbow_deg = angle_between_deg(forearm, -upper_arm);
    j.shoulder_deg = angle_between_deg(upper_arm, Vec3(0.0, -1.0, 0.0));
    return j;
}

double racket_shuttle_angle(const SkeletonFrame& frame) {
    require_complete(frame);
    return angle_between_deg(frame.racket_top - frame.racket_bottom,
                             frame.shuttle_hand - frame.racket_bottom);
}

double racket_speed(std::span<const SkeletonFrame> frames, std::size_t at) {
    if (at < 3 || at + 3 >= frames.size()) {
        throw WindowError("racket speed needs three frames on each side");
    }
    for (std::size_t i = at - 3; i <= at + 3; ++i) {
        if (!frames[i].complete) throw WindowError("racket speed window has lost markers");
    }
    const double dt = frames[at + 2].timestamp - frames[at - 2].timestamp;
    if (!(dt > 0.0)) throw WindowError("racket speed window has no time extent");
    return (smoothed_top(frames, at + 2) - smoothed_top(frames, at - 2)).norm() / dt;
}

double racket_speed(std::span<const SkeletonFrame> frames, double at) {
    auto it = std::find_if(frames.begin(), frames.end(),
                           [&](const SkeletonFrame& f) { return f.timestamp == at; });
    if (it == frames.end()) throw WindowError("no frame at the requested timestamp");
    return racket_speed(frames, static_cast<std::size_t>(it - frames.begin()));
}

double rotary_speed(double v_t, double r_top, double r_c) {
    if (!(r_c > 0.0)) throw ParameterError("r_c must be positive");
    if (!(r_top >= r_c)) throw ParameterError("r_top must be at least r_c");
    if (!(v_t >= 0.0)) throw ParameterError("v_t must be non-negative");
    return v_t * (r_top / r_c);
}

std::vector<KineticSample> kinetic_series(std::span<const SkeletonFrame> frames) {
    std::vector<KineticSample> out(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& f = frames[i];
        auto& s = out[i];
        s.timestamp = f.timestamp;
        if (!f.complete) continue;
        try {
            const auto ax = racket_axes(f);
            const auto j = joint_angles(f);
            s.pitch_deg = pitch_angle(ax.normal);
            s.wrist_deg = j.wrist_deg;
            s.elbow_deg = j.elbow_deg;
            s.shoulder_deg = j.shoulder_deg;
            s.racket_shuttle_deg = racket_shuttle_angle(f);
        } catch (const GeometryError&) {
            continue;
        }
        s.height_m = f.racket_top.y();
        s.complete = true;
        try {
            s.speed_mps = racket_speed(frames, i);
        } catch (const WindowError&) {
            std::size_t lo = i;
            std::size_t hi = i;
            if (i > 0 && frames[i - 1].complete) lo = i - 1;
            if (i + 1 < frames.size() && frames[i + 1].complete) hi = i + 1;
            if (hi > lo) {
                s.speed_mps = (frames[hi].racket_top - frames[lo].racket_top).norm() /
                              (frames[hi].timestamp - frames[lo].timestamp);
            }
        }
    }
    return out;
}

ServiceSummary summarize_swing(std::span<const KineticSample> samples, const Keyframes& keys) {
    if (!(keys.k_back <= keys.k_fwd && keys.k_fwd <= keys.k_contact)) {
        throw SegmentationError("keyframes out of order");
    }
    if (keys.k_contact >= samples.size()) throw SegmentationError("keyframes outside the samples");
    for (std::size_t i = keys.k_back; i <= keys.k_contact; ++i) {
        if (!samples[i].complete) throw SegmentationError("swing contains incomplete samples");
    }
    ServiceSummary s;
    const auto& contact = samples[keys.k_contact];
    s.pitch_at_contact_deg = contact.pitch_deg;
    s.speed_at_contact_mps = contact.speed_mps;

    const double base = samples[keys.k_back].height_m;
    for (std::size_t i = keys.k_fwd; i <= keys.k_contact; ++i) {
        const double d = samples[i].height_m - base;
        s.height_trace.push_back({samples[i].timestamp, d});
        s.max_abs_height_delta_m = std::max(s.max_abs_height_delta_m, std::abs(d));
    }

    auto change = [&](double KineticSample::*field) {
        auto first = samples.begin() + static_cast<std::ptrdiff_t>(keys.k_back);
        auto last = samples.begin() + static_cast<std::ptrdiff_t>(keys.k_contact) + 1;
        auto [lo, hi] = std::minmax_element(
            first, last, [&](const KineticSample& a, const KineticSample& b) { return a.*field < b.*field; });
        return (*hi).*field - (*lo).*field;
    };
    s.wrist_change_deg = change(&KineticSample::wrist_deg);
    s.elbow_change_deg = change(&KineticSample::elbow_deg);
    s.shoulder_change_deg = change(&KineticSample::shoulder_deg);
    s.backswing_end_racket_shuttle_angle_deg = samples[keys.k_fwd].racket_shuttle_deg;
    return s;
}

}  // namespace bms::kinetics
