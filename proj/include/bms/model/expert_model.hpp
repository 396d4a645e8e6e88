#pragma once

#include "bms/kinetics/kinetics.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bms::model {

enum class Unit { Deg, M, Mps };

enum class ExertionPattern { WristOnly, ElbowWrist };

std::string_view to_string(Unit u);
std::string_view to_string(ExertionPattern p);
ExertionPattern parse_pattern(std::string_view s);

struct VariableStats {
    double mean = 0.0;
    double sd = 0.0;
    Unit unit = Unit::Deg;

    bool operator==(const VariableStats&) const = default;
};

/// Ideal-service reference: per-variable mean/SD plus the exertion pattern it describes.
struct ExpertModel {
    VariableStats pitch{0.0, 0.0, Unit::Deg};
    VariableStats height_diff{0.0, 0.0, Unit::M};
    VariableStats speed{0.0, 0.0, Unit::Mps};
    VariableStats wrist_change{0.0, 0.0, Unit::Deg};
    VariableStats elbow_change{0.0, 0.0, Unit::Deg};
    VariableStats shoulder_change{0.0, 0.0, Unit::Deg};
    ExertionPattern pattern = ExertionPattern::WristOnly;

    bool operator==(const ExpertModel&) const = default;
};

/// Sub-elite reference values for the backhand short service. The two patterns differ only in
/// the elbow row.
ExpertModel builtin_model(ExertionPattern pattern);

/// Linear interpolation between order statistics at position q*(n-1). `sorted` must be ascending
/// and non-empty.
double quantile_linear(std::span<const double> sorted, double q);

/// Drops values outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR]; survivors keep their input order.
std::vector<double> remove_outliers_iqr(std::span<const double> samples);

/// Per variable: IQR outlier removal, then sample mean and SD (n-1). Variables are filtered
/// independently. Throws FittingError when fewer than two values survive for any variable.
ExpertModel fit_model(std::span<const kinetics::ServiceSummary> summaries, ExertionPattern pattern);

inline constexpr double kDefaultPatternRatio = 0.6;

/// ElbowWrist when elbow_change / wrist_change >= ratio. Throws ParameterError if wrist_change <= 0.
ExertionPattern classify_pattern(double wrist_change_deg, double elbow_change_deg,
                                 double ratio = kDefaultPatternRatio);

/// Key/value document: {"pattern": ..., "variables": {"pitch": {"mean", "sd", "unit"}, ...}}.
std::string to_json(const ExpertModel& m);
ExpertModel model_from_json(const std::string& text);

/// Accepts "wrist_only" / "elbow_wrist" for the builtin models, otherwise a document path.
ExpertModel load_model(const std::string& name_or_path);

}  // namespace bms::model
