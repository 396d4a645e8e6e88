#pragma once

#include "bms/analytics/analytics.hpp"
#include "bms/common/config.hpp"
#include "bms/feedback/feedback.hpp"
#include "bms/fsm/service_fsm.hpp"
#include "bms/model/expert_model.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bms::analytics {

struct TrialRow {
    std::size_t serve_index = 0;
    TrialLabel label = TrialLabel::Valid;
    std::size_t first_frame = 0;
    kinetics::Keyframes keys;  // stream frame indices
    std::optional<kinetics::ServiceSummary> summary;
    std::optional<feedback::FeedbackReport> feedback;
};

/// Labels a segmented serve and judges it when it has a summary and the model is judgeable.
TrialRow make_row(const fsm::ServiceRecord& record, const model::ExpertModel& model,
                  const JitterConfig& cfg);

struct SessionReport {
    std::string name;
    std::vector<TrialRow> rows;

    std::vector<Trial> trials() const;
};

SessionReport analyze_recording(const Recording& rec, const std::string& name,
                                const model::ExpertModel& model, const EngineConfig& cfg);

using PairMatrix = std::vector<std::vector<std::optional<TTestResult>>>;

struct AnalysisReport {
    std::vector<SessionReport> sessions;
    std::size_t n = 0;  // valid trials per session entering the statistics
    std::vector<SessionStats> stats;
    /// Per variable, paired t-tests between sessions; empty cells where undefined.
    std::array<PairMatrix, kVariables.size()> pairwise;
};

/// valid_n = 0 uses the smallest valid count across sessions. Throws SummaryError when a session
/// falls short of an explicit valid_n.
AnalysisReport build_report(std::vector<SessionReport> sessions, std::size_t valid_n);

void write_trials_csv(std::ostream& out, const AnalysisReport& r);
void write_sessions_csv(std::ostream& out, const AnalysisReport& r);
void write_pvalues_csv(std::ostream& out, const AnalysisReport& r);
/// Human-readable tables: per-trial judgments, session mean +/- SD per variable, and pairwise
/// p-values with * (p < 0.05) and ** (p < 0.01).
void write_text(std::ostream& out, const AnalysisReport& r);

}  // namespace bms::analytics
