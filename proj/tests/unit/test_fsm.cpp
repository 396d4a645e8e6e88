#include "bms/errors.hpp"
#include "bms/fsm/service_fsm.hpp"
#include "bms/mocap/relabel.hpp"
#include "bms/mocap/synthesize.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bms;
using namespace bms::fsm;

namespace {

std::vector<Transition> run(const std::vector<SkeletonFrame>& frames, const FsmConfig& cfg = {}) {
    ServiceStateMachine m(cfg);
    std::vector<Transition> all;
    for (const auto& f : frames) {
        auto r = m.step(f);
        all.insert(all.end(), r.transitions.begin(), r.transitions.end());
    }
    return all;
}

std::vector<ServiceState> targets(const std::vector<Transition>& ts) {
    std::vector<ServiceState> out;
    for (const auto& t : ts) out.push_back(t.to);
    return out;
}

}  // namespace

TEST_CASE("legal transitions") {
    using S = ServiceState;
    CHECK(is_legal(S::Idle, S::Ready));
    CHECK(is_legal(S::Ready, S::BackwardSwing));
    CHECK(is_legal(S::BackwardSwing, S::ForwardSwing));
    CHECK(is_legal(S::ForwardSwing, S::Contact));
    CHECK(is_legal(S::Contact, S::Idle));
    CHECK(is_legal(S::Ready, S::Idle));
    CHECK(is_legal(S::ForwardSwing, S::Idle));
    CHECK_FALSE(is_legal(S::Idle, S::Contact));
    CHECK_FALSE(is_legal(S::Ready, S::ForwardSwing));
    CHECK_FALSE(is_legal(S::Contact, S::Ready));
    CHECK_FALSE(is_legal(S::Idle, S::Idle));
}

TEST_CASE("scripted serve walks the full cycle") {
    const auto rec = synthesize_service(test::clean_params(1));
    const auto ts = run(relabel(rec));
    using S = ServiceState;
    CHECK(targets(ts) == std::vector<S>{S::Ready, S::BackwardSwing, S::ForwardSwing, S::Contact, S::Idle});
    REQUIRE(ts.size() == 5);
    CHECK(ts.front().from == S::Idle);
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        CHECK(ts[i].to == ts[i + 1].from);
        CHECK(is_legal(ts[i].from, ts[i].to));
        CHECK(ts[i].frame_index < ts[i + 1].frame_index);
    }
    CHECK(ts.back().cause == Cause::Dwell);
    CHECK(ts[1].serve_index == 1);
}

TEST_CASE("contact returns to idle after the dwell") {
    const auto rec = synthesize_service(test::clean_params(1));
    FsmConfig cfg;
    cfg.dwell_s = 1.0;
    const auto ts = run(relabel(rec), cfg);
    REQUIRE(ts.size() == 5);
    const auto& contact = ts[3];
    const auto& idle = ts[4];
    CHECK(idle.timestamp - contact.timestamp >= 1.0);
    CHECK(idle.timestamp - contact.timestamp < 1.0 + 1.5 / rec.rate_hz);
}

TEST_CASE("moving forward from ready aborts to idle") {
    const auto rec = synthesize_service(test::clean_params(1));
    const auto frames = relabel(rec);
    ServiceStateMachine m;
    std::size_t ready_at = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (!m.step(frames[i]).transitions.empty()) {
            ready_at = i;
            break;
        }
    }
    REQUIRE(m.state() == ServiceState::Ready);

    std::vector<Transition> ts;
    SkeletonFrame f = frames[ready_at];
    const double dt = 1.0 / rec.rate_hz;
    for (int k = 1; k <= 20; ++k) {
        SkeletonFrame g = f;
        g.timestamp = f.timestamp + k * dt;
        const Vec3 shift(0, 0, 1.0 * k * dt);
        g.racket_top += shift;
        g.racket_bottom += shift;
        g.racket_side += shift;
        g.racket_middle += shift;
        auto r = m.step(g);
        ts.insert(ts.end(), r.transitions.begin(), r.transitions.end());
    }
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].from == ServiceState::Ready);
    CHECK(ts[0].to == ServiceState::Idle);
    CHECK(ts[0].cause == Cause::Aborted);
}

TEST_CASE("a dropout mid-swing yields a lost-tracking record") {
    auto p = test::clean_params(2);
    p.serves[0].dropout = Dropout{"RKTTOP", 30, 4};
    const auto rec = synthesize_service(p);
    const auto records = segment_recording(rec);
    REQUIRE(records.size() == 2);
    CHECK(records[0].lost_tracking);
    CHECK_FALSE(records[0].summary);
    CHECK_FALSE(records[1].lost_tracking);
    CHECK(records[1].summary);

    const auto ts = run(relabel(rec));
    bool saw_lost = false;
    for (const auto& t : ts) saw_lost = saw_lost || t.cause == Cause::LostTracking;
    CHECK(saw_lost);
}

TEST_CASE("serve records carry the contact window and the keyframes") {
    const auto rec = synthesize_service(test::clean_params(3));
    const auto records = segment_recording(rec);
    REQUIRE(records.size() == 3);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        CHECK(r.serve_index == i + 1);
        CHECK(r.first_frame + r.keys.k_back == rec.truth[i].k_back);
        CHECK(r.first_frame + r.keys.k_fwd == rec.truth[i].k_fwd);
        CHECK(r.contact_frame() == rec.truth[i].k_contact);
        CHECK(r.keys.k_contact + 3 < r.frames.size());
        CHECK(r.samples.size() == r.frames.size());
    }
}

TEST_CASE("randomized clean serves segment at the true contact") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto p = test::clean_params(5);
        p.seed = rng();
        for (auto& s : p.serves) {
            s.contact_speed_mps = 4.0 + 3.0 * u(rng);
            s.pitch_deg = 5.0 + 35.0 * u(rng);
            s.height_drop_m = 0.2 * u(rng);
            s.wrist_change_deg = 2.0 + 16.0 * u(rng);
            s.elbow_change_deg = 10.0 * u(rng);
            s.shoulder_change_deg = 3.0 * u(rng);
            s.forward_swing_s = 0.15 + 0.1 * u(rng);
            s.backswing_s = 0.35 + 0.3 * u(rng);
        }
        const auto rec = synthesize_service(p);
        const auto records = segment_recording(rec);
        REQUIRE(records.size() == rec.truth.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto got = static_cast<long>(records[i].contact_frame());
            const auto want = static_cast<long>(rec.truth[i].k_contact);
            CHECK(std::abs(got - want) <= 1);
        }
    }
}

TEST_CASE("half-millimetre marker noise keeps contact within a frame") {
    auto p = test::clean_params(12);
    p.noise_sd_m = 0.0005;
    const auto rec = synthesize_service(p);
    const auto records = segment_recording(rec);
    REQUIRE(records.size() == rec.truth.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto got = static_cast<long>(records[i].contact_frame());
        const auto want = static_cast<long>(rec.truth[i].k_contact);
        CHECK(std::abs(got - want) <= 1);
    }
}

TEST_CASE("finish flushes a serve cut off after contact") {
    const auto rec = synthesize_service(test::clean_params(1));
    auto frames = relabel(rec);
    frames.resize(rec.truth[0].k_contact + 3);
    ServiceStateMachine m;
    std::size_t released = 0;
    for (const auto& f : frames) released += m.step(f).record.has_value();
    CHECK(released == 0);
    const auto r = m.finish();
    REQUIRE(r);
    CHECK(r->contact_frame() == rec.truth[0].k_contact);
    CHECK_FALSE(m.finish());
}

TEST_CASE("a stationary stream never leaves idle") {
    SkeletonFrame f = test::frame_with_top(0.0, Vec3(0.3, 2.0, 0.5));
    std::vector<SkeletonFrame> frames;
    for (int i = 0; i < 200; ++i) {
        f.timestamp = i / 120.0;
        frames.push_back(f);
    }
    CHECK(run(frames).empty());
}
