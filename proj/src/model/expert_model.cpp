#include "bms/model/expert_model.hpp"

#include "bms/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bms::model {

std::string_view to_string(Unit u) {
    switch (u) {
        case Unit::Deg: return "deg";
        case Unit::M: return "m";
        case Unit::Mps: return "m/s";
    }
    return "deg";
}

std::string_view to_string(ExertionPattern p) {
    return p == ExertionPattern::WristOnly ? "wrist_only" : "elbow_wrist";
}

ExertionPattern parse_pattern(std::string_view s) {
    if (s == "wrist_only" || s == "WristOnly") return ExertionPattern::WristOnly;
    if (s == "elbow_wrist" || s == "ElbowWrist") return ExertionPattern::ElbowWrist;
    throw ParseError(0, "unknown exertion pattern '" + std::string(s) + "'");
}

namespace {

Unit parse_unit(std::string_view s) {
    if (s == "deg") return Unit::Deg;
    if (s == "m") return Unit::M;
    if (s == "m/s") return Unit::Mps;
    throw ParseError(0, "unknown unit '" + std::string(s) + "'");
}

struct Field {
    const char* key;
    VariableStats ExpertModel::*stats;
    double (*extract)(const kinetics::ServiceSummary&);
};

const Field kFields[] = {
    {"pitch", &ExpertModel::pitch, [](const kinetics::ServiceSummary& s) { return s.pitch_at_contact_deg; }},
    {"height_diff", &ExpertModel::height_diff, [](const kinetics::ServiceSummary& s) { return s.max_abs_height_delta_m; }},
    {"speed", &ExpertModel::speed, [](const kinetics::ServiceSummary& s) { return s.speed_at_contact_mps; }},
    {"wrist_change", &ExpertModel::wrist_change, [](const kinetics::ServiceSummary& s) { return s.wrist_change_deg; }},
    {"elbow_change", &ExpertModel::elbow_change, [](const kinetics::ServiceSummary& s) { return s.elbow_change_deg; }},
    {"shoulder_change", &ExpertModel::shoulder_change, [](const kinetics::ServiceSummary& s) { return s.shoulder_change_deg; }},
};

}  // namespace

ExpertModel builtin_model(ExertionPattern pattern) {
    ExpertModel m;
    m.pattern = pattern;
    m.pitch = {21.60, 7.95, Unit::Deg};
    m.height_diff = {0.11, 0.07, Unit::M};
    m.speed = {5.41, 0.41, Unit::Mps};
    m.wrist_change = {9.96, 3.93, Unit::Deg};
    m.elbow_change = pattern == ExertionPattern::WristOnly ? VariableStats{4.97, 0.96, Unit::Deg}
                                                           : VariableStats{9.10, 3.04, Unit::Deg};
    m.shoulder_change = {1.48, 0.87, Unit::Deg};
    return m;
}

double quantile_linear(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ParameterError("quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> remove_outliers_iqr(std::span<const double> samples) {
    if (samples.size() <= 1) return {samples.begin(), samples.end()};
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double q1 = quantile_linear(sorted, 0.25);
    const double q3 = quantile_linear(sorted, 0.75);
    const double iqr = q3 - q1;
    const double lo = q1 - 1.5 * iqr;
    const double hi = q3 + 1.5 * iqr;
    std::vector<double> out;
    out.reserve(samples.size());
    std::copy_if(samples.begin(), samples.end(), std::back_inserter(out),
                 [&](double v) { return v >= lo && v <= hi; });
    return out;
}

ExpertModel fit_model(std::span<const kinetics::ServiceSummary> summaries, ExertionPattern pattern) {
    if (summaries.size() < 2) throw FittingError("fitting needs at least two summaries");
    ExpertModel m = builtin_model(pattern);
    for (const auto& field : kFields) {
        std::vector<double> values;
        values.reserve(summaries.size());
        for (const auto& s : summaries) values.push_back(field.extract(s));
        const auto kept = remove_outliers_iqr(values);
        if (kept.size() < 2) {
            throw FittingError(std::string("fewer than two values survive outlier removal for ") +
                               field.key);
        }
        const double n = static_cast<double>(kept.size());
        double mean = 0.0;
        for (double v : kept) mean += v;
        mean /= n;
        double ss = 0.0;
        for (double v : kept) ss += (v - mean) * (v - mean);
        auto& stats = m.*(field.stats);
        stats.mean = mean;
        stats.sd = std::sqrt(ss / (n - 1.0));
    }
    return m;
}

ExertionPattern classify_pattern(double wrist_change_deg, double elbow_change_deg, double ratio) {
    if (!(wrist_change_deg > 0.0)) throw ParameterError("wrist change must be positive");
    return elbow_change_deg / wrist_change_deg >= ratio ? ExertionPattern::ElbowWrist
                                                        : ExertionPattern::WristOnly;
}

std::string to_json(const ExpertModel& m) {
    nlohmann::ordered_json j;
    j["pattern"] = std::string(to_string(m.pattern));
    nlohmann::ordered_json vars;
    for (const auto& field : kFields) {
        const auto& s = m.*(field.stats);
        vars[field.key] = {{"mean", s.mean}, {"sd", s.sd}, {"unit", std::string(to_string(s.unit))}};
    }
    j["variables"] = std::move(vars);
    return j.dump(2) + "\n";
}

ExpertModel model_from_json(const std::string& text) {
    ExpertModel m;
    try {
        auto j = nlohmann::json::parse(text, nullptr, true, true);
        m.pattern = parse_pattern(j.at("pattern").get<std::string>());
        const auto& vars = j.at("variables");
        for (const auto& field : kFields) {
            const auto& v = vars.at(field.key);
            auto& s = m.*(field.stats);
            s.mean = v.at("mean").get<double>();
            s.sd = v.at("sd").get<double>();
            s.unit = parse_unit(v.at("unit").get<std::string>());
            if (!std::isfinite(s.mean) || !(s.sd >= 0.0)) {
                throw ParseError(0, std::string("invalid statistics for ") + field.key);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("model document: ") + e.what());
    }
    return m;
}

ExpertModel load_model(const std::string& name_or_path) {
    if (name_or_path == "wrist_only" || name_or_path == "elbow_wrist") {
        return builtin_model(parse_pattern(name_or_path));
    }
    std::ifstream in(name_or_path, std::ios::binary);
    if (!in) throw Error("cannot open model '" + name_or_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace bms::model
