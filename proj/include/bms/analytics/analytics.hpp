#pragma once

#include "bms/fsm/service_fsm.hpp"
#include "bms/kinetics/kinetics.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace bms::analytics {

enum class TrialLabel { Valid, Jitter, LostTracking };

std::string_view to_string(TrialLabel l);

struct JitterConfig {
    int joint_max_extrema = 3;    // wrist/elbow/shoulder over backswing start .. contact
    int kinetic_max_extrema = 2;  // pitch/speed over forward swing start .. contact
    /// Reversals smaller than these are capture noise, not turning points.
    double angle_tolerance_deg = 1.0;
    double speed_tolerance_mps = 0.05;
};

/// Turning points of the 3-point moving average of `series`: a turning point is counted when the
/// smoothed series reverses by more than `min_reversal` from its running extreme. With the
/// default 0, reversals smaller than 1e-9 of the smoothed range are treated as flat, so every
/// strict interior local extremum counts. A series whose range is negligible against its
/// magnitude counts as constant.
std::size_t count_extrema(std::span<const double> series, double min_reversal = 0.0);

/// True iff count_extrema(series, min_reversal) > max_extrema. Throws LabelingError for fewer
/// than 3 values.
bool detect_jitter(std::span<const double> series, int max_extrema, double min_reversal = 0.0);

/// LostTracking dominates; otherwise Jitter if any joint-angle series or the forward-swing pitch
/// or speed series has too many turning points.
TrialLabel label_trial(const fsm::ServiceRecord& record, const JitterConfig& cfg = {});

enum class Variable { Pitch, HeightDiff, Speed, Wrist, Elbow, Shoulder };

inline constexpr std::array<Variable, 6> kVariables = {Variable::Pitch, Variable::HeightDiff,
                                                       Variable::Speed, Variable::Wrist,
                                                       Variable::Elbow, Variable::Shoulder};

std::string_view to_string(Variable v);
double value_of(const kinetics::ServiceSummary& s, Variable v);

struct Distribution {
    double mean = 0.0;
    double sd = 0.0;  // sample SD; 0 for a single value
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;

    bool operator==(const Distribution&) const = default;
};

/// Throws SummaryError for an empty input.
Distribution describe(std::span<const double> values);

struct Trial {
    std::size_t serve_index = 0;
    TrialLabel label = TrialLabel::Valid;
    std::optional<kinetics::ServiceSummary> summary;
};

Trial make_trial(const fsm::ServiceRecord& record, const JitterConfig& cfg = {});

struct SessionStats {
    std::size_t n = 0;
    std::array<Distribution, kVariables.size()> variables{};

    const Distribution& operator[](Variable v) const { return variables[static_cast<std::size_t>(v)]; }
    bool operator==(const SessionStats&) const = default;
};

/// Statistics over exactly the first n Valid trials in arrival order. Throws SummaryError naming
/// the shortfall when fewer than n are Valid. n = 0 yields an empty summary.
SessionStats session_summary(std::span<const Trial> trials, std::size_t n);

/// Values of one variable over the first n Valid trials.
std::vector<double> valid_values(std::span<const Trial> trials, Variable v, std::size_t n);

std::size_t count_valid(std::span<const Trial> trials);

struct TTestResult {
    double t = 0.0;
    int df = 0;
    double p_two_tailed = 1.0;
};

/// Paired two-tailed t-test on a - b. Throws PairingError for unequal lengths or n < 2 and
/// DegenerateVarianceError when the differences have zero variance but nonzero mean. Identical
/// samples give t = 0, p = 1.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Two-tailed p-value of a t statistic.
double two_tailed_p(double t, int df);

struct RegressionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

/// Ordinary least squares of y on t. r_squared is 1 when y has no variance. Throws PairingError
/// for unequal lengths or fewer than 2 points and SingularityError when t is constant.
RegressionFit linear_regression(std::span<const double> t, std::span<const double> y);

}  // namespace bms::analytics
