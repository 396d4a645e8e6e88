#include "bms/analytics/analytics.hpp"
#include "bms/analytics/report.hpp"
#include "bms/errors.hpp"
#include "bms/fsm/service_fsm.hpp"
#include "bms/mocap/synthesize.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace bms;
using namespace bms::analytics;

namespace {

std::vector<double> sine(int periods, int n, double a = 1.0, double b = 0.0) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
        v.push_back(a * std::sin(2.0 * std::numbers::pi * periods * i / n) + b);
    }
    return v;
}

Trial valid_trial(std::size_t idx, double speed) {
    kinetics::ServiceSummary s;
    s.speed_at_contact_mps = speed;
    s.pitch_at_contact_deg = 20.0;
    return {idx, TrialLabel::Valid, s};
}

}  // namespace

TEST_CASE("extrema counting") {
    std::vector<double> ramp;
    for (int i = 0; i < 60; ++i) ramp.push_back(0.5 * i);
    CHECK(count_extrema(ramp) == 0);
    CHECK_FALSE(detect_jitter(ramp, 2));
    CHECK(count_extrema(sine(3, 60)) == 6);
    CHECK(detect_jitter(sine(3, 60), 2));
    CHECK(count_extrema(std::vector<double>(10, 4.2)) == 0);
    CHECK_FALSE(detect_jitter(std::vector<double>(10, 4.2), 0));
    CHECK_THROWS_AS(count_extrema(std::vector<double>{1, 2}), LabelingError);
}

TEST_CASE("reversal tolerance ignores small wiggles") {
    std::vector<double> v;
    for (int i = 0; i < 60; ++i) v.push_back(0.1 * i + 0.2 * std::sin(1.0 * i));
    CHECK(count_extrema(v) > 2);
    CHECK(count_extrema(v, 0.5) == 0);
    CHECK(count_extrema(sine(3, 60, 2.0), 0.5) == 6);
    CHECK(count_extrema(sine(3, 60, 0.1), 0.5) == 0);
    CHECK_THROWS_AS(count_extrema(v, -1.0), ParameterError);
}

TEST_CASE("jitter detection is affine invariant") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> amp(1e-3, 1e3);
    std::uniform_real_distribution<double> off(-1e3, 1e3);
    for (int i = 0; i < 100; ++i) {
        const double a = amp(rng);
        const double b = off(rng);
        CHECK(detect_jitter(sine(3, 60, a, b), 2));
        std::vector<double> ramp;
        for (int k = 0; k < 60; ++k) ramp.push_back(a * k + b);
        CHECK_FALSE(detect_jitter(ramp, 2));
    }
}

TEST_CASE("trial labels from synthesized serves") {
    auto p = test::clean_params(3);
    p.serves[1].dropout = Dropout{"RWRA", 40, 3};
    p.serves[2].wrist_oscillation_deg = 3.0;
    p.serves[2].wrist_oscillation_cycles = 4;
    const auto records = fsm::segment_recording(synthesize_service(p));
    REQUIRE(records.size() == 3);
    CHECK(label_trial(records[0]) == TrialLabel::Valid);
    CHECK(label_trial(records[1]) == TrialLabel::LostTracking);
    CHECK(label_trial(records[2]) == TrialLabel::Jitter);
    CHECK(make_trial(records[1]).summary == std::nullopt);
}

TEST_CASE("marker noise alone is not jitter") {
    auto p = test::clean_params(12);
    p.noise_sd_m = 0.0005;
    p.serves[3].wrist_oscillation_deg = 3.0;
    p.serves[3].wrist_oscillation_cycles = 4;
    const auto records = fsm::segment_recording(synthesize_service(p));
    REQUIRE(records.size() == 12);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(label_trial(records[i]) == (i == 3 ? TrialLabel::Jitter : TrialLabel::Valid));
    }
}

TEST_CASE("distribution summary") {
    const auto d = describe(std::vector<double>{1, 2, 3, 4, 5});
    CHECK(d.mean == 3.0);
    CHECK(d.sd == doctest::Approx(std::sqrt(2.5)));
    CHECK(d.median == 3.0);
    CHECK(d.q1 == 2.0);
    CHECK(d.q3 == 4.0);
    CHECK(describe(std::vector<double>{7}).sd == 0.0);
}

TEST_CASE("session summary uses the first n valid trials") {
    std::vector<Trial> same;
    for (std::size_t i = 0; i < 12; ++i) same.push_back(valid_trial(i + 1, 5.0));
    auto s = session_summary(same, 12);
    CHECK(s.n == 12);
    CHECK(s[Variable::Speed].mean == 5.0);
    CHECK(s[Variable::Speed].sd == 0.0);

    std::vector<Trial> more;
    for (std::size_t i = 0; i < 14; ++i) more.push_back(valid_trial(i + 1, 5.0 + (i >= 12 ? 100.0 : 0.01 * i)));
    std::vector<Trial> first12(more.begin(), more.begin() + 12);
    CHECK(session_summary(more, 12) == session_summary(first12, 12));

    std::vector<Trial> mixed;
    std::mt19937_64 rng(3);
    for (const auto& t : first12) {
        if (rng() % 2) mixed.push_back({99, TrialLabel::Jitter, kinetics::ServiceSummary{}});
        mixed.push_back(t);
        if (rng() % 3 == 0) mixed.push_back({98, TrialLabel::LostTracking, std::nullopt});
    }
    CHECK(session_summary(mixed, 12) == session_summary(first12, 12));

    try {
        session_summary(first12, 13);
        FAIL("expected a summary error");
    } catch (const SummaryError& e) {
        CHECK(std::string(e.what()).find("short by 1") != std::string::npos);
    }
    CHECK(session_summary(std::vector<Trial>{}, 0).n == 0);
}

TEST_CASE("paired t-test") {
    const std::vector<double> d{1, 2, 3, 4, 5};
    const std::vector<double> z(5, 0.0);
    const auto r = paired_t_test(d, z);
    CHECK(r.t == doctest::Approx(4.242640687119285).epsilon(1e-12));
    CHECK(r.df == 4);
    CHECK(r.p_two_tailed == doctest::Approx(0.013235599563682695).epsilon(1e-9));

    const auto same = paired_t_test(d, d);
    CHECK(same.t == 0.0);
    CHECK(same.p_two_tailed == 1.0);

    CHECK_THROWS_AS(paired_t_test(std::vector<double>{1}, std::vector<double>{2}), PairingError);
    CHECK_THROWS_AS(paired_t_test(d, std::vector<double>{1, 2}), PairingError);
    CHECK_THROWS_AS(paired_t_test(d, std::vector<double>{0, 1, 2, 3, 4}), DegenerateVarianceError);

    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        std::vector<double> a(2 + k % 20);
        std::vector<double> b(a.size());
        for (auto& x : a) x = g(rng);
        for (auto& x : b) x = g(rng) + 0.3;
        const auto ab = paired_t_test(a, b);
        const auto ba = paired_t_test(b, a);
        CHECK(ab.t == -ba.t);
        CHECK(ab.p_two_tailed == ba.p_two_tailed);
        CHECK(ab.p_two_tailed >= 0.0);
        CHECK(ab.p_two_tailed <= 1.0);
    }
    CHECK(two_tailed_p(1.0, 4) > two_tailed_p(2.0, 4));
}

TEST_CASE("linear regression") {
    const std::vector<double> t{0, 1, 2, 3, 4};
    std::vector<double> y;
    for (double x : t) y.push_back(2 * x + 1);
    auto f = linear_regression(t, y);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    f = linear_regression(t, std::vector<double>(5, 3.0));
    CHECK(f.slope == 0.0);
    CHECK(f.intercept == 3.0);
    CHECK(f.r_squared == 1.0);

    CHECK_THROWS_AS(linear_regression(std::vector<double>(4, 1.0), std::vector<double>{1, 2, 3, 4}),
                    SingularityError);
    CHECK_THROWS_AS(linear_regression(std::vector<double>{1}, std::vector<double>{1}), PairingError);

    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> xs(20);
    std::vector<double> ys(20);
    for (std::size_t i = 0; i < 20; ++i) {
        xs[i] = g(rng);
        ys[i] = 0.7 * xs[i] + g(rng);
    }
    f = linear_regression(xs, ys);
    double resid = 0.0;
    double ortho = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        const double e = ys[i] - (f.slope * xs[i] + f.intercept);
        resid += e;
        ortho += e * xs[i];
    }
    CHECK(std::abs(resid) < 1e-9);
    CHECK(std::abs(ortho) < 1e-9);
    CHECK(f.r_squared >= 0.0);
    CHECK(f.r_squared <= 1.0);
}

TEST_CASE("analysis report over synthesized sessions") {
    const auto model = model::builtin_model(model::ExertionPattern::WristOnly);
    EngineConfig cfg;
    auto pa = test::clean_params(4);
    auto pb = test::clean_params(5);
    for (std::size_t i = 0; i < pb.serves.size(); ++i) pb.serves[i].contact_speed_mps = 5.0 + 0.1 * i;
    pb.serves[4].dropout = Dropout{"RKTTOP", 50, 2};
    std::vector<SessionReport> sessions{
        analyze_recording(synthesize_service(pa), "a", model, cfg),
        analyze_recording(synthesize_service(pb), "b", model, cfg),
    };
    CHECK(sessions[1].rows.size() == 5);
    CHECK(sessions[1].rows[4].label == TrialLabel::LostTracking);
    CHECK_FALSE(sessions[1].rows[4].feedback);
    CHECK(sessions[0].rows[0].feedback);

    const auto r = build_report(sessions, 0);
    CHECK(r.n == 4);
    REQUIRE(r.stats.size() == 2);
    CHECK(r.stats[0][Variable::Speed].sd < 1e-9);
    const auto& speed = r.pairwise[static_cast<std::size_t>(Variable::Speed)];
    REQUIRE(speed[0][1]);
    CHECK(speed[0][1]->t == -speed[1][0]->t);
    const auto& shoulder = r.pairwise[static_cast<std::size_t>(Variable::Shoulder)];
    REQUIRE(shoulder[0][1]);
    CHECK(shoulder[0][1]->t == 0.0);
    CHECK(shoulder[0][1]->p_two_tailed == 1.0);

    CHECK_THROWS_AS(build_report(sessions, 5), SummaryError);

    std::ostringstream text;
    std::ostringstream trials;
    std::ostringstream stats;
    std::ostringstream pvals;
    write_text(text, r);
    write_trials_csv(trials, r);
    write_sessions_csv(stats, r);
    write_pvalues_csv(pvals, r);
    CHECK(text.str().find("lost_tracking") != std::string::npos);
    const auto trial_text = trials.str();
    const auto stats_text = stats.str();
    CHECK(std::count(trial_text.begin(), trial_text.end(), '\n') == 10);
    CHECK(std::count(stats_text.begin(), stats_text.end(), '\n') == 1 + 2 * kVariables.size());
    CHECK(!pvals.str().empty());
}
