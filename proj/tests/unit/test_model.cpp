#include "bms/errors.hpp"
#include "bms/model/expert_model.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace bms;
using namespace bms::model;

TEST_CASE("builtin reference values") {
    const auto w = builtin_model(ExertionPattern::WristOnly);
    CHECK(w.pitch == VariableStats{21.60, 7.95, Unit::Deg});
    CHECK(w.height_diff == VariableStats{0.11, 0.07, Unit::M});
    CHECK(w.speed == VariableStats{5.41, 0.41, Unit::Mps});
    CHECK(w.wrist_change == VariableStats{9.96, 3.93, Unit::Deg});
    CHECK(w.elbow_change == VariableStats{4.97, 0.96, Unit::Deg});
    CHECK(w.shoulder_change == VariableStats{1.48, 0.87, Unit::Deg});
    const auto e = builtin_model(ExertionPattern::ElbowWrist);
    CHECK(e.elbow_change == VariableStats{9.10, 3.04, Unit::Deg});
    CHECK(e.shoulder_change == w.shoulder_change);
    CHECK(e.pitch == w.pitch);
}

TEST_CASE("linear quantiles") {
    const std::vector<double> s{1, 2, 3, 4, 100};
    CHECK(quantile_linear(s, 0.25) == 2.0);
    CHECK(quantile_linear(s, 0.75) == 4.0);
    CHECK(quantile_linear(s, 0.5) == 3.0);
    const std::vector<double> even{1, 2, 3, 4};
    CHECK(quantile_linear(even, 0.25) == doctest::Approx(1.75));
    CHECK_THROWS_AS(quantile_linear(std::vector<double>{}, 0.5), ParameterError);
}

TEST_CASE("IQR outlier removal") {
    CHECK(remove_outliers_iqr(std::vector<double>{1, 2, 3, 4, 100}) == std::vector<double>{1, 2, 3, 4});
    CHECK(remove_outliers_iqr(std::vector<double>{100, 4, 1, 3, 2}) == std::vector<double>{4, 1, 3, 2});
    CHECK(remove_outliers_iqr(std::vector<double>{5, 5, 5}) == std::vector<double>{5, 5, 5});
    CHECK(remove_outliers_iqr(std::vector<double>{}).empty());
    CHECK(remove_outliers_iqr(std::vector<double>{42}) == std::vector<double>{42});
    const auto once = remove_outliers_iqr(std::vector<double>{1, 2, 3, 4, 100});
    CHECK(remove_outliers_iqr(once) == once);
}

TEST_CASE("IQR removal is permutation invariant") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> len(0, 30);
    for (int k = 0; k < 1000; ++k) {
        std::vector<double> v(static_cast<std::size_t>(len(rng)));
        for (auto& x : v) x = g(rng) * (k % 7 == 0 ? 10.0 : 1.0);
        if (!v.empty() && k % 3 == 0) v[0] = 50.0;

        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> oracle;
        if (sorted.size() <= 1) {
            oracle = sorted;
        } else {
            auto q = [&](double p) {
                const double pos = p * static_cast<double>(sorted.size() - 1);
                const auto lo = static_cast<std::size_t>(pos);
                const auto hi = std::min(lo + 1, sorted.size() - 1);
                return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
            };
            const double q1 = q(0.25);
            const double q3 = q(0.75);
            for (double x : sorted) {
                if (x >= q1 - 1.5 * (q3 - q1) && x <= q3 + 1.5 * (q3 - q1)) oracle.push_back(x);
            }
        }

        auto kept = remove_outliers_iqr(v);
        std::shuffle(v.begin(), v.end(), rng);
        auto kept2 = remove_outliers_iqr(v);
        std::sort(kept.begin(), kept.end());
        std::sort(kept2.begin(), kept2.end());
        CHECK(kept == oracle);
        CHECK(kept2 == oracle);
    }
}

namespace {

kinetics::ServiceSummary summary(double pitch, double h, double speed, double w, double e, double s) {
    kinetics::ServiceSummary x;
    x.pitch_at_contact_deg = pitch;
    x.max_abs_height_delta_m = h;
    x.speed_at_contact_mps = speed;
    x.wrist_change_deg = w;
    x.elbow_change_deg = e;
    x.shoulder_change_deg = s;
    return x;
}

}  // namespace

TEST_CASE("fitting a model") {
    std::vector<kinetics::ServiceSummary> same(2, summary(20, 0.1, 5, 10, 4, 1));
    auto m = fit_model(same, ExertionPattern::WristOnly);
    CHECK(m.pitch.mean == 20.0);
    CHECK(m.pitch.sd == 0.0);
    CHECK(m.speed.mean == 5.0);
    CHECK(m.speed.sd == 0.0);
    CHECK(m.height_diff.unit == Unit::M);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<kinetics::ServiceSummary> data;
    for (int i = 0; i < 30; ++i) {
        data.push_back(summary(21.6 + 2 * g(rng), 0.11 + 0.01 * g(rng), 5.41 + 0.1 * g(rng),
                               9.96 + g(rng), 4.97 + 0.3 * g(rng), 1.48 + 0.2 * g(rng)));
    }
    const auto clean = fit_model(data, ExertionPattern::WristOnly);
    std::vector<double> speeds;
    for (const auto& s : data) speeds.push_back(s.speed_at_contact_mps);
    const auto kept = remove_outliers_iqr(speeds);
    double mean = 0;
    for (double v : kept) mean += v;
    mean /= static_cast<double>(kept.size());
    double ss = 0;
    for (double v : kept) ss += (v - mean) * (v - mean);
    CHECK(std::abs(clean.speed.mean - mean) < 1e-9);
    CHECK(std::abs(clean.speed.sd - std::sqrt(ss / static_cast<double>(kept.size() - 1))) < 1e-9);

    auto dirty = data;
    dirty.push_back(summary(21.6, 0.11, 54.1, 9.96, 4.97, 1.48));
    const auto robust = fit_model(dirty, ExertionPattern::WristOnly);
    CHECK(robust.speed.mean == doctest::Approx(clean.speed.mean).epsilon(0.01));

    auto shuffled = data;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto perm = fit_model(shuffled, ExertionPattern::WristOnly);
    CHECK(perm.pitch.mean == doctest::Approx(clean.pitch.mean).epsilon(1e-12));
    CHECK(perm.wrist_change.sd == doctest::Approx(clean.wrist_change.sd).epsilon(1e-12));

    CHECK_THROWS_AS(fit_model(std::vector<kinetics::ServiceSummary>{summary(1, 1, 1, 1, 1, 1)},
                              ExertionPattern::WristOnly),
                    FittingError);
}

TEST_CASE("exertion pattern classification") {
    CHECK(classify_pattern(9.96, 9.10) == ExertionPattern::ElbowWrist);
    CHECK(classify_pattern(9.96, 4.97) == ExertionPattern::WristOnly);
    CHECK(classify_pattern(5.0, 4.8) == ExertionPattern::ElbowWrist);
    CHECK(classify_pattern(10.0, 6.0) == ExertionPattern::ElbowWrist);
    CHECK(classify_pattern(50.0, 29.0) == classify_pattern(5.0, 2.9));
    CHECK_THROWS_AS(classify_pattern(0.0, 1.0), ParameterError);
}

TEST_CASE("model documents round-trip") {
    for (auto p : {ExertionPattern::WristOnly, ExertionPattern::ElbowWrist}) {
        const auto m = builtin_model(p);
        CHECK(model_from_json(to_json(m)) == m);
        CHECK(load_model(std::string(to_string(p))) == m);
    }
    CHECK_THROWS_AS(model_from_json("{\"pattern\":\"wrist_only\"}"), ParseError);
    CHECK_THROWS_AS(model_from_json("not json"), ParseError);
}
