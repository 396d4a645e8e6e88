#include "bms/mocap/synthesize.hpp"

#include "bms/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace bms {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kPreReadyOffset = 0.10;
constexpr int kFollowAccelFrames = 4;

struct State {
    Vec3 racket = Vec3::Zero();
    Vec3 shuttle_hand = Vec3::Zero();
    double wrist = 0.0;
    double elbow = 0.0;
    double shoulder = 0.0;
};

double ease(double tau) { return (1.0 - std::cos(kPi * tau)) / 2.0; }

int frames_for(double seconds, double rate, const char* what) {
    if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
        throw ParameterError(std::string(what) + " must be a non-negative duration");
    }
    return static_cast<int>(std::lround(seconds * rate));
}

// Unit vector v with v.p1 = c1 and v.p2 = c2 (p1, p2 unit, not parallel); `sign` picks one of
// the two solutions.
Vec3 two_cone(const Vec3& p1, double c1, const Vec3& p2, double c2, double sign) {
    const double k = p1.dot(p2);
    const double den = 1.0 - k * k;
    const double x = (c1 - k * c2) / den;
    const double y = (c2 - k * c1) / den;
    const double z2 = 1.0 - (x * x + y * y + 2.0 * x * y * k);
    if (z2 < 1e-4) throw ParameterError("joint angles are not reachable with this arm geometry");
    const Vec3 n = p1.cross(p2).normalized();
    return x * p1 + y * p2 + sign * std::sqrt(z2) * n;
}

double angle_deg(const Vec3& a, const Vec3& b) {
    return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0)) / kDeg;
}

}  // namespace

bool ServeParams::zero_amplitude() const {
    return contact_speed_mps == 0.0 && height_drop_m == 0.0 && wrist_change_deg == 0.0 &&
           elbow_change_deg == 0.0 && shoulder_change_deg == 0.0 && wrist_oscillation_deg == 0.0;
}

Recording synthesize_service(const SynthesisParams& P) {
    if (!(P.rate_hz > 0.0) || !std::isfinite(P.rate_hz)) throw ParameterError("rate_hz must be positive");
    const auto& rk = P.racket;
    if (!(rk.middle_to_top_m > 0.0) || !(rk.middle_to_bottom_m > 0.0) || !(rk.head_half_width_m > 0.0)) {
        throw ParameterError("racket dimensions must be positive");
    }
    const auto& body = P.body;
    if (!(body.upper_arm_m > 0.0) || !(body.forearm_m > 0.0) || !(body.shoulder_half_width_m > 0.0) ||
        !(body.hand_m > 0.0) || !(body.wrist_marker_half_width_m > 0.0)) {
        throw ParameterError("body dimensions must be positive");
    }
    if (!(P.noise_sd_m >= 0.0)) throw ParameterError("noise must be non-negative");

    const double dt = 1.0 / P.rate_hz;
    const Vec3 up = Vec3::UnitY();
    const Vec3 forward = Vec3::UnitZ();
    // Facing +Z with Y up, the body's right is -X.
    const Vec3 dominant = P.handedness == Handedness::Right ? Vec3(-1, 0, 0) : Vec3(1, 0, 0);

    const Vec3 shoulder(dominant.x() * body.shoulder_half_width_m, body.shoulder_height_m, 0.0);
    const Vec3 shuttle_shoulder(-dominant.x() * body.shoulder_half_width_m, body.shoulder_height_m, 0.0);
    const double arm = body.upper_arm_m + body.forearm_m;
    const Vec3 shuttle_target(shoulder.x(), P.guidance.shuttle_height_m,
                              P.guidance.forward_fraction * arm);
    const Vec3 racket_target = shuttle_target + P.guidance.racket_gap_m * dominant;
    const Vec3 pre_ready = racket_target + kPreReadyOffset * dominant;

    // Racket orientation is fixed per serve: normal tilted up by the pitch, major pointing down and
    // across the body at major_from_down_deg from vertical.
    auto racket_frame = [&](double pitch_deg, Vec3& u, Vec3& s) {
        const double p = pitch_deg * kDeg;
        const double alpha = rk.major_from_down_deg * kDeg;
        if (!(std::abs(pitch_deg) < rk.major_from_down_deg) || !(rk.major_from_down_deg < 90.0)) {
            throw ParameterError("pitch must be smaller than the racket's angle from vertical");
        }
        const Vec3 n = std::cos(p) * forward + std::sin(p) * up;
        const Vec3 w1 = -dominant;
        const Vec3 w2 = (-up + std::sin(p) * n).normalized();
        const double sin_t = std::cos(alpha) / std::cos(p);
        const double cos_t = std::sqrt(1.0 - sin_t * sin_t);
        u = cos_t * w1 + sin_t * w2;
        s = n.cross(u);
    };

    std::vector<State> states;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> dropouts;
    std::vector<Vec3> majors;  // per-frame racket major direction
    std::vector<Vec3> sides;
    Recording rec;
    rec.rate_hz = P.rate_hz;
    rec.handedness = P.handedness;
    rec.labels = markers::required_labels();
    rec.metadata["generator"] = "bms-synthesize";

    State cur;
    cur.racket = racket_target + Vec3(0.0, -0.25, 0.35);
    cur.shuttle_hand = shuttle_target + Vec3(0.0, -0.35, -0.05);
    cur.wrist = P.wrist_base_deg;
    cur.elbow = P.elbow_base_deg;
    cur.shoulder = P.shoulder_base_deg;
    Vec3 cur_u, cur_s;
    racket_frame(P.serves.empty() ? 21.6 : P.serves.front().pitch_deg, cur_u, cur_s);

    auto push = [&](const State& s) {
        states.push_back(s);
        majors.push_back(cur_u);
        sides.push_back(cur_s);
    };

    for (int i = 0, n = std::max(1, frames_for(P.lead_s, P.rate_hz, "lead")); i < n; ++i) push(cur);

    for (const auto& sv : P.serves) {
        const int n_a = frames_for(sv.approach_s, P.rate_hz, "approach");
        const int n_c = frames_for(sv.creep_s, P.rate_hz, "creep");
        const int n_h = frames_for(sv.hold_s, P.rate_hz, "hold");
        const int n_b = frames_for(sv.backswing_s, P.rate_hz, "backswing");
        const int n_f = frames_for(sv.forward_swing_s, P.rate_hz, "forward swing");
        const int n_d = frames_for(sv.follow_s, P.rate_hz, "follow-through");
        const int n_r = frames_for(sv.rest_s, P.rate_hz, "rest");

        if (sv.zero_amplitude()) {
            const int total = n_a + n_c + n_h + n_b + n_f + kFollowAccelFrames + n_d + n_r;
            for (int i = 0; i < total; ++i) push(cur);
            continue;
        }
        if (!(sv.contact_speed_mps > 0.0)) throw ParameterError("contact speed must be positive");
        if (n_c < 1 || n_h < 1) throw ParameterError("creep and hold need at least one frame");
        if (n_b < 2) throw ParameterError("backswing needs at least two frames");
        if (n_f < 6) throw ParameterError("forward swing needs at least six frames");
        if (sv.wrist_change_deg < 0.0 || sv.elbow_change_deg < 0.0 || sv.shoulder_change_deg < 0.0) {
            throw ParameterError("joint changes are magnitudes");
        }

        const double t_f = n_f * dt;
        const double accel = sv.contact_speed_mps / t_f;
        const double stroke = sv.contact_speed_mps * t_f / 2.0;
        if (!(stroke > std::abs(sv.height_drop_m))) {
            throw ParameterError("height drop exceeds the stroke length");
        }
        const double back = std::sqrt(stroke * stroke - sv.height_drop_m * sv.height_drop_m);
        // Unit stroke direction from the backswing end toward contact.
        const Vec3 e = Vec3(0.0, sv.height_drop_m, back) / stroke;

        racket_frame(sv.pitch_deg, cur_u, cur_s);

        // Approach and creep into the ready pose.
        const State start = cur;
        for (int j = 1; j <= n_a; ++j) {
            const double w = ease(static_cast<double>(j) / n_a);
            cur.racket = start.racket + w * (pre_ready - start.racket);
            cur.shuttle_hand = start.shuttle_hand + w * (shuttle_target - start.shuttle_hand);
            push(cur);
        }
        cur.shuttle_hand = shuttle_target;
        for (int j = 1; j <= n_c; ++j) {
            cur.racket = pre_ready + ease(static_cast<double>(j) / n_c) * (racket_target - pre_ready);
            push(cur);
        }
        cur.racket = racket_target;
        for (int j = 0; j < n_h; ++j) push(cur);

        ServeTruth truth;
        truth.k_back = states.size() - 1;
        truth.k_fwd = truth.k_back + static_cast<std::size_t>(n_b);
        truth.k_contact = truth.k_fwd + static_cast<std::size_t>(n_f);

        auto with_angles = [&](State s, double bump) {
            s.wrist = P.wrist_base_deg + sv.wrist_change_deg * bump;
            s.elbow = P.elbow_base_deg - sv.elbow_change_deg * bump;
            s.shoulder = P.shoulder_base_deg + sv.shoulder_change_deg * bump;
            return s;
        };

        for (int j = 1; j <= n_b; ++j) {
            const double w = ease(static_cast<double>(j) / n_b);
            cur.racket = racket_target - stroke * w * e;
            push(with_angles(cur, w));
        }
        const int settle = n_f - 4;
        for (int j = 1; j <= n_f + kFollowAccelFrames; ++j) {
            const double t = j * dt;
            cur.racket = racket_target + (-stroke + accel * t * t / 2.0) * e;
            const double bump = j <= settle ? (1.0 + std::cos(kPi * j / settle)) / 2.0 : 0.0;
            push(with_angles(cur, bump));
        }
        cur = with_angles(cur, 0.0);
        {
            const double t1 = (n_f + kFollowAccelFrames) * dt;
            const double s1 = -stroke + accel * t1 * t1 / 2.0;
            const double v1 = accel * t1;
            const double t_d = n_d * dt;
            for (int j = 1; j <= n_d; ++j) {
                const double t = j * dt;
                cur.racket = racket_target + (s1 + v1 * t - v1 * t * t / (2.0 * t_d)) * e;
                push(cur);
            }
        }
        for (int j = 0; j < n_r; ++j) push(cur);

        if (sv.wrist_oscillation_deg != 0.0 && sv.wrist_oscillation_cycles > 0) {
            const double span = static_cast<double>(truth.k_contact - truth.k_back);
            for (std::size_t g = truth.k_back; g <= truth.k_contact; ++g) {
                states[g].wrist += sv.wrist_oscillation_deg *
                                   std::sin(2.0 * kPi * sv.wrist_oscillation_cycles *
                                            static_cast<double>(g - truth.k_back) / span);
            }
        }

        auto change = [&](double State::*field) {
            double lo = states[truth.k_back].*field;
            double hi = lo;
            for (std::size_t g = truth.k_back; g <= truth.k_contact; ++g) {
                lo = std::min(lo, states[g].*field);
                hi = std::max(hi, states[g].*field);
            }
            return hi - lo;
        };
        truth.pitch_deg = sv.pitch_deg;
        truth.speed_mps = sv.contact_speed_mps;
        truth.height_diff_m = std::abs(sv.height_drop_m);
        truth.wrist_change_deg = change(&State::wrist);
        truth.elbow_change_deg = change(&State::elbow);
        truth.shoulder_change_deg = change(&State::shoulder);
        const Vec3 bottom_at_fwd = racket_target - stroke * e - rk.middle_to_bottom_m * cur_u;
        truth.backswing_end_racket_shuttle_deg = angle_deg(cur_u, shuttle_target - bottom_at_fwd);

        if (sv.dropout) {
            const auto& d = *sv.dropout;
            if (std::find(rec.labels.begin(), rec.labels.end(), d.label) == rec.labels.end()) {
                throw ParameterError("dropout names an unknown marker '" + d.label + "'");
            }
            if (d.count < 1) throw ParameterError("dropout needs a positive frame count");
            for (int j = 0; j < d.count; ++j) {
                const auto g = static_cast<std::ptrdiff_t>(truth.k_back) + d.offset + j;
                if (g >= 0 && static_cast<std::size_t>(g) < states.size()) {
                    dropouts.push_back({static_cast<std::size_t>(g), {d.label}});
                }
            }
            truth.lost_tracking = true;
        }
        rec.truth.push_back(truth);
    }

    // Arm chain. The forearm keeps a fixed angle from vertical and meets the racket major at the
    // wrist angle; the upper arm meets the vertical at the shoulder angle and the forearm at the
    // elbow angle. Solution branches are fixed once so the chain moves continuously.
    const double forearm_down = std::cos(P.forearm_from_down_deg * kDeg);
    const Vec3 down = -up;
    auto solve_forearm = [&](const Vec3& u, double wrist_deg, double sign) {
        return two_cone(u, std::cos(wrist_deg * kDeg), down, forearm_down, sign);
    };
    auto solve_upper = [&](const Vec3& f, double shoulder_deg, double elbow_deg, double sign) {
        return two_cone(down, std::cos(shoulder_deg * kDeg), f, -std::cos(elbow_deg * kDeg), sign);
    };
    const Vec3 f_plus = solve_forearm(majors.front(), P.wrist_base_deg, 1.0);
    const double f_sign = f_plus.dot(forward) >= 0.0 ? 1.0 : -1.0;
    const Vec3 f0 = solve_forearm(majors.front(), P.wrist_base_deg, f_sign);
    const Vec3 a_plus = solve_upper(f0, P.shoulder_base_deg, P.elbow_base_deg, 1.0);
    const double a_sign = a_plus.dot(forward) >= 0.0 ? 1.0 : -1.0;

    std::mt19937_64 rng(P.seed);
    std::normal_distribution<double> noise(0.0, P.noise_sd_m > 0.0 ? P.noise_sd_m : 1.0);
    const std::size_t n_labels = rec.labels.size();
    auto slot = [&](std::string_view l) { return *rec.index_of(l); };
    const bool right = P.handedness == Handedness::Right;
    using namespace markers;
    const std::size_t i_sho = slot(right ? kRightShoulder : kLeftShoulder);
    const std::size_t i_elb = slot(right ? kRightElbow : kLeftElbow);
    const std::size_t i_wra = slot(right ? kRightWristA : kLeftWristA);
    const std::size_t i_wrb = slot(right ? kRightWristB : kLeftWristB);
    const std::size_t i_fin = slot(right ? kRightFinger : kLeftFinger);
    const std::size_t i_osho = slot(right ? kLeftShoulder : kRightShoulder);
    const std::size_t i_oelb = slot(right ? kLeftElbow : kRightElbow);
    const std::size_t i_owra = slot(right ? kLeftWristA : kRightWristA);
    const std::size_t i_owrb = slot(right ? kLeftWristB : kRightWristB);
    const std::size_t i_ofin = slot(right ? kLeftFinger : kRightFinger);

    rec.frames.reserve(states.size());
    for (std::size_t g = 0; g < states.size(); ++g) {
        const auto& s = states[g];
        const Vec3& u = majors[g];
        const Vec3 f = solve_forearm(u, s.wrist, f_sign);
        const Vec3 a = solve_upper(f, s.shoulder, s.elbow, a_sign);
        const Vec3 elbow = shoulder + body.upper_arm_m * a;
        const Vec3 wrist = elbow + body.forearm_m * f;
        const Vec3 across = f.cross(up).normalized() * body.wrist_marker_half_width_m;

        MarkerFrame mf;
        mf.timestamp = static_cast<double>(g) * dt;
        mf.positions.assign(n_labels, Vec3::Zero());
        mf.valid.assign(n_labels, true);
        mf.positions[i_sho] = shoulder;
        mf.positions[i_elb] = elbow;
        mf.positions[i_wra] = wrist + across;
        mf.positions[i_wrb] = wrist - across;
        mf.positions[i_fin] = wrist + body.hand_m * f;
        mf.positions[i_osho] = shuttle_shoulder;
        mf.positions[i_oelb] = shuttle_shoulder + Vec3(0.0, -0.28, 0.08);
        mf.positions[i_owra] = s.shuttle_hand + Vec3(0.025, 0.0, -0.07);
        mf.positions[i_owrb] = s.shuttle_hand + Vec3(-0.025, 0.0, -0.07);
        mf.positions[i_ofin] = s.shuttle_hand;
        mf.positions[slot(kRacketMiddle)] = s.racket;
        mf.positions[slot(kRacketTop)] = s.racket + rk.middle_to_top_m * u;
        mf.positions[slot(kRacketBottom)] = s.racket - rk.middle_to_bottom_m * u;
        mf.positions[slot(kRacketSide)] = s.racket + rk.head_half_width_m * sides[g];
        if (P.noise_sd_m > 0.0) {
            for (auto& p : mf.positions) p += Vec3(noise(rng), noise(rng), noise(rng));
        }
        rec.frames.push_back(std::move(mf));
    }
    for (const auto& [g, labels] : dropouts) {
        for (const auto& l : labels) {
            const auto m = slot(l);
            rec.frames[g].valid[m] = false;
            rec.frames[g].positions[m] = Vec3::Zero();
        }
    }
    rec.metadata["serves"] = std::to_string(rec.truth.size());
    return rec;
}

}  // namespace bms
