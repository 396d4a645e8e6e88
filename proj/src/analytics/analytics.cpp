#include "bms/analytics/analytics.hpp"

#include "bms/errors.hpp"
#include "bms/model/expert_model.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bms::analytics {

std::string_view to_string(TrialLabel l) {
    switch (l) {
        case TrialLabel::Valid: return "valid";
        case TrialLabel::Jitter: return "jitter";
        case TrialLabel::LostTracking: return "lost_tracking";
    }
    return "valid";
}

std::string_view to_string(Variable v) {
    switch (v) {
        case Variable::Pitch: return "pitch";
        case Variable::HeightDiff: return "height_diff";
        case Variable::Speed: return "speed";
        case Variable::Wrist: return "wrist_change";
        case Variable::Elbow: return "elbow_change";
        case Variable::Shoulder: return "shoulder_change";
    }
    return "pitch";
}

double value_of(const kinetics::ServiceSummary& s, Variable v) {
    switch (v) {
        case Variable::Pitch: return s.pitch_at_contact_deg;
        case Variable::HeightDiff: return s.max_abs_height_delta_m;
        case Variable::Speed: return s.speed_at_contact_mps;
        case Variable::Wrist: return s.wrist_change_deg;
        case Variable::Elbow: return s.elbow_change_deg;
        case Variable::Shoulder: return s.shoulder_change_deg;
    }
    return 0.0;
}

std::size_t count_extrema(std::span<const double> series, double min_reversal) {
    if (series.size() < 3) throw LabelingError("jitter detection needs at least 3 samples");
    if (!(min_reversal >= 0.0)) throw ParameterError("reversal tolerance must be non-negative");
    std::vector<double> smooth(series.size());
    smooth.front() = series.front();
    smooth.back() = series.back();
    for (std::size_t i = 1; i + 1 < series.size(); ++i) {
        smooth[i] = (series[i - 1] + series[i] + series[i + 1]) / 3.0;
    }
    const auto [lo, hi] = std::minmax_element(smooth.begin(), smooth.end());
    const double range = *hi - *lo;
    const double scale = std::max(std::abs(*lo), std::abs(*hi));
    if (!(range > 1e-9 * scale) || range == 0.0) return 0;
    const double h = std::max(min_reversal, 1e-9 * range);

    std::size_t extrema = 0;
    int dir = 0;
    double low = smooth.front();
    double high = smooth.front();
    double extreme = smooth.front();
    for (std::size_t i = 1; i < smooth.size(); ++i) {
        const double x = smooth[i];
        if (dir == 0) {
            low = std::min(low, x);
            high = std::max(high, x);
            if (x - low > h) {
                dir = 1;
                extreme = x;
            } else if (high - x > h) {
                dir = -1;
                extreme = x;
            }
        } else if (dir > 0) {
            if (x > extreme) {
                extreme = x;
            } else if (extreme - x > h) {
                ++extrema;
                dir = -1;
                extreme = x;
            }
        } else {
            if (x < extreme) {
                extreme = x;
            } else if (x - extreme > h) {
                ++extrema;
                dir = 1;
                extreme = x;
            }
        }
    }
    return extrema;
}

bool detect_jitter(std::span<const double> series, int max_extrema, double min_reversal) {
    return count_extrema(series, min_reversal) > static_cast<std::size_t>(std::max(max_extrema, 0));
}

TrialLabel label_trial(const fsm::ServiceRecord& record, const JitterConfig& cfg) {
    if (record.lost_tracking || !record.summary) return TrialLabel::LostTracking;
    const auto& k = record.keys;
    const auto& s = record.samples;
    auto series = [&](std::size_t from, double kinetics::KineticSample::*field) {
        std::vector<double> v;
        for (std::size_t i = from; i <= k.k_contact && i < s.size(); ++i) v.push_back(s[i].*field);
        return v;
    };
    auto jitter = [&](std::size_t from, double kinetics::KineticSample::*field, int max, double tol) {
        const auto v = series(from, field);
        return v.size() >= 3 && detect_jitter(v, max, tol);
    };
    using S = kinetics::KineticSample;
    const double deg = cfg.angle_tolerance_deg;
    if (jitter(k.k_back, &S::wrist_deg, cfg.joint_max_extrema, deg) ||
        jitter(k.k_back, &S::elbow_deg, cfg.joint_max_extrema, deg) ||
        jitter(k.k_back, &S::shoulder_deg, cfg.joint_max_extrema, deg) ||
        jitter(k.k_fwd, &S::pitch_deg, cfg.kinetic_max_extrema, deg) ||
        jitter(k.k_fwd, &S::speed_mps, cfg.kinetic_max_extrema, cfg.speed_tolerance_mps)) {
        return TrialLabel::Jitter;
    }
    return TrialLabel::Valid;
}

Trial make_trial(const fsm::ServiceRecord& record, const JitterConfig& cfg) {
    Trial t;
    t.serve_index = record.serve_index;
    t.label = label_trial(record, cfg);
    if (t.label != TrialLabel::LostTracking) t.summary = record.summary;
    return t;
}

Distribution describe(std::span<const double> values) {
    if (values.empty()) throw SummaryError("no values to summarize");
    Distribution d;
    const double n = static_cast<double>(values.size());
    d.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - d.mean) * (v - d.mean);
        d.sd = std::sqrt(ss / (n - 1.0));
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    d.median = model::quantile_linear(sorted, 0.5);
    d.q1 = model::quantile_linear(sorted, 0.25);
    d.q3 = model::quantile_linear(sorted, 0.75);
    return d;
}

std::size_t count_valid(std::span<const Trial> trials) {
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const Trial& t) {
        return t.label == TrialLabel::Valid && t.summary;
    }));
}

std::vector<double> valid_values(std::span<const Trial> trials, Variable v, std::size_t n) {
    std::vector<double> out;
    for (const auto& t : trials) {
        if (out.size() == n) break;
        if (t.label == TrialLabel::Valid && t.summary) out.push_back(value_of(*t.summary, v));
    }
    return out;
}

SessionStats session_summary(std::span<const Trial> trials, std::size_t n) {
    const std::size_t valid = count_valid(trials);
    if (valid < n) {
        throw SummaryError("session has " + std::to_string(valid) + " valid trials, " +
                           std::to_string(n) + " required (short by " + std::to_string(n - valid) + ")");
    }
    SessionStats s;
    s.n = n;
    if (n == 0) return s;
    for (std::size_t i = 0; i < kVariables.size(); ++i) {
        s.variables[i] = describe(valid_values(trials, kVariables[i], n));
    }
    return s;
}

double two_tailed_p(double t, int df) {
    if (df < 1) throw ParameterError("t distribution needs df >= 1");
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(df);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw PairingError("paired samples differ in length");
    if (a.size() < 2) throw PairingError("paired t-test needs at least 2 pairs");
    const double n = static_cast<double>(a.size());
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    TTestResult r;
    r.df = static_cast<int>(a.size()) - 1;
    if (sd == 0.0) {
        if (mean == 0.0) return r;
        throw DegenerateVarianceError("paired differences have zero variance");
    }
    r.t = mean / (sd / std::sqrt(n));
    r.p_two_tailed = two_tailed_p(r.t, r.df);
    return r;
}

RegressionFit linear_regression(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw PairingError("regression inputs differ in length");
    if (t.size() < 2) throw PairingError("regression needs at least 2 points");
    const double n = static_cast<double>(t.size());
    const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double stt = 0.0;
    double sty = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (stt == 0.0) throw SingularityError("predictor is constant");
    RegressionFit f;
    f.slope = sty / stt;
    f.intercept = my - f.slope * mt;
    if (syy == 0.0) return f;
    double sse = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * t[i]);
        sse += r * r;
    }
    f.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
    return f;
}

}  // namespace bms::analytics
