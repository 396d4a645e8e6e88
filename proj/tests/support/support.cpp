#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bms::test {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v;
    do {
        v = Vec3(n(rng), n(rng), n(rng));
    } while (v.norm() < 1e-3);
    return v.normalized();
}

Vec3 random_perpendicular(const Vec3& v, std::mt19937_64& rng) {
    Vec3 p;
    do {
        const Vec3 r = random_unit(rng);
        p = r - r.dot(v) / v.squaredNorm() * v;
    } while (p.norm() < 1e-3);
    return p.normalized();
}

AnalyticPose random_pose(std::mt19937_64& rng) {
    AnalyticPose p;
    p.pitch_deg = uniform(rng, -80.0, 80.0);
    p.wrist_deg = uniform(rng, 5.0, 175.0);
    p.elbow_deg = uniform(rng, 5.0, 175.0);
    p.racket_shuttle_deg = uniform(rng, 5.0, 175.0);
    const double heading = uniform(rng, 0.0, 2.0 * std::numbers::pi);

    const Vec3 n(std::cos(p.pitch_deg * kDeg) * std::cos(heading), std::sin(p.pitch_deg * kDeg),
                 std::cos(p.pitch_deg * kDeg) * std::sin(heading));
    const Vec3 u = random_perpendicular(n, rng);
    const Vec3 s = n.cross(u);  // u x s = n
    const Vec3 f = std::cos(p.wrist_deg * kDeg) * u + std::sin(p.wrist_deg * kDeg) * random_perpendicular(u, rng);
    const Vec3 minus_a =
        std::cos(p.elbow_deg * kDeg) * f + std::sin(p.elbow_deg * kDeg) * random_perpendicular(f, rng);
    const Vec3 a = -minus_a;
    p.shoulder_deg = std::acos(std::clamp(-a.y(), -1.0, 1.0)) / kDeg;

    const double upper = uniform(rng, 0.2, 0.4);
    const double fore = uniform(rng, 0.2, 0.35);
    const double top_len = uniform(rng, 0.05, 0.2);
    const double bottom_len = uniform(rng, 0.3, 0.6);
    const double width = uniform(rng, 0.05, 0.15);

    auto& fr = p.frame;
    fr.timestamp = 0.0;
    fr.handedness = Handedness::Right;
    fr.shoulder = Vec3(uniform(rng, -1, 1), uniform(rng, 1.2, 1.6), uniform(rng, -1, 1));
    fr.shuttle_shoulder = fr.shoulder + Vec3(0.4, 0.0, 0.0);
    fr.elbow = fr.shoulder + upper * a;
    fr.wrist = fr.elbow + fore * f;
    fr.hand = fr.wrist + 0.08 * f;
    fr.racket_middle = fr.wrist + uniform(rng, 0.1, 0.3) * random_unit(rng);
    fr.racket_top = fr.racket_middle + top_len * u;
    fr.racket_bottom = fr.racket_middle - bottom_len * u;
    fr.racket_side = fr.racket_middle + width * s;
    const Vec3 w = random_perpendicular(u, rng);
    fr.shuttle_hand = fr.racket_bottom + uniform(rng, 0.2, 0.8) *
                                             (std::cos(p.racket_shuttle_deg * kDeg) * u +
                                              std::sin(p.racket_shuttle_deg * kDeg) * w);
    fr.complete = true;
    p.major = (top_len + bottom_len) * u;
    p.side = width * s;
    return p;
}

SkeletonFrame frame_with_top(double t, const Vec3& top) {
    SkeletonFrame f;
    f.timestamp = t;
    f.handedness = Handedness::Right;
    f.shoulder = Vec3(-0.2, 1.4, 0.0);
    f.shuttle_shoulder = Vec3(0.2, 1.4, 0.0);
    f.elbow = Vec3(-0.2, 1.1, 0.05);
    f.wrist = Vec3(-0.15, 0.95, 0.25);
    f.hand = Vec3(-0.12, 0.93, 0.32);
    f.shuttle_hand = Vec3(-0.2, 1.05, 0.2);
    f.racket_top = top;
    f.racket_middle = top - Vec3(0.0, 0.1, 0.0);
    f.racket_bottom = top - Vec3(0.0, 0.6, 0.0);
    f.racket_side = f.racket_middle + Vec3(0.1, 0.0, 0.0);
    f.complete = true;
    return f;
}

SynthesisParams clean_params(int serves, Handedness h) {
    SynthesisParams p;
    p.handedness = h;
    p.serves.assign(static_cast<std::size_t>(serves), ServeParams{});
    return p;
}

}  // namespace bms::test
