#include "bms/analytics/report.hpp"

#include "bms/common/text.hpp"
#include "bms/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

namespace bms::analytics {

namespace {

std::string num(double v) { return text::format_double(v); }

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t w) {
    return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

std::string_view unit_of(Variable v) {
    switch (v) {
        case Variable::HeightDiff: return "m";
        case Variable::Speed: return "m/s";
        default: return "deg";
    }
}

std::string stars(double p) {
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

}  // namespace

TrialRow make_row(const fsm::ServiceRecord& record, const model::ExpertModel& model,
                  const JitterConfig& cfg) {
    TrialRow row;
    row.serve_index = record.serve_index;
    row.label = label_trial(record, cfg);
    row.first_frame = record.first_frame;
    row.keys = {record.first_frame + record.keys.k_back, record.first_frame + record.keys.k_fwd,
                record.first_frame + record.keys.k_contact};
    if (row.label != TrialLabel::LostTracking) {
        row.summary = record.summary;
        if (model.pattern == model::ExertionPattern::WristOnly) {
            row.feedback = feedback::judge_shot(*record.summary, model);
        }
    }
    return row;
}

std::vector<Trial> SessionReport::trials() const {
    std::vector<Trial> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r.serve_index, r.label, r.summary});
    return out;
}

SessionReport analyze_recording(const Recording& rec, const std::string& name,
                                const model::ExpertModel& model, const EngineConfig& cfg) {
    SessionReport s;
    s.name = name;
    for (const auto& record : fsm::segment_recording(rec, cfg.fsm)) {
        s.rows.push_back(make_row(record, model, cfg.jitter));
    }
    return s;
}

AnalysisReport build_report(std::vector<SessionReport> sessions, std::size_t valid_n) {
    AnalysisReport r;
    r.sessions = std::move(sessions);
    std::vector<std::vector<Trial>> trials;
    for (const auto& s : r.sessions) trials.push_back(s.trials());
    if (valid_n == 0) {
        std::size_t n = std::numeric_limits<std::size_t>::max();
        for (const auto& t : trials) n = std::min(n, count_valid(t));
        r.n = trials.empty() ? 0 : n;
    } else {
        r.n = valid_n;
    }
    for (std::size_t i = 0; i < trials.size(); ++i) {
        try {
            r.stats.push_back(session_summary(trials[i], r.n));
        } catch (const SummaryError& e) {
            throw SummaryError("session '" + r.sessions[i].name + "': " + e.what());
        }
    }
    const std::size_t k = trials.size();
    for (std::size_t vi = 0; vi < kVariables.size(); ++vi) {
        auto& m = r.pairwise[vi];
        m.assign(k, std::vector<std::optional<TTestResult>>(k));
        if (r.n < 2) continue;
        std::vector<std::vector<double>> values;
        for (const auto& t : trials) values.push_back(valid_values(t, kVariables[vi], r.n));
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
                if (a == b) continue;
                try {
                    m[a][b] = paired_t_test(values[a], values[b]);
                } catch (const DegenerateVarianceError&) {
                }
            }
        }
    }
    return r;
}

void write_trials_csv(std::ostream& out, const AnalysisReport& r) {
    out << "session,serve,label,first_frame,k_back,k_fwd,k_contact";
    for (auto v : kVariables) out << ',' << to_string(v);
    out << ",pitch_status,pitch_direction,speed_status,height_status,wrist_status,elbow_status,"
           "shoulder_status\n";
    for (const auto& s : r.sessions) {
        for (const auto& t : s.rows) {
            out << s.name << ',' << t.serve_index << ',' << to_string(t.label) << ',' << t.first_frame
                << ',' << t.keys.k_back << ',' << t.keys.k_fwd << ',' << t.keys.k_contact;
            for (auto v : kVariables) out << ',' << (t.summary ? num(value_of(*t.summary, v)) : "");
            if (t.feedback) {
                const auto& f = *t.feedback;
                out << ',' << to_string(f.pitch.status) << ',' << to_string(f.pitch.direction) << ','
                    << to_string(f.speed.status) << ',' << to_string(f.height.status) << ','
                    << to_string(f.wrist.status) << ',' << to_string(f.elbow.status) << ','
                    << to_string(f.shoulder.status);
            } else {
                out << ",,,,,,,";
            }
            out << '\n';
        }
    }
}

void write_sessions_csv(std::ostream& out, const AnalysisReport& r) {
    out << "session,n,variable,mean,sd,median,q1,q3\n";
    for (std::size_t i = 0; i < r.sessions.size(); ++i) {
        const auto& st = r.stats[i];
        for (auto v : kVariables) {
            out << r.sessions[i].name << ',' << st.n << ',' << to_string(v);
            if (st.n == 0) {
                out << ",,,,,\n";
                continue;
            }
            const auto& d = st[v];
            out << ',' << num(d.mean) << ',' << num(d.sd) << ',' << num(d.median) << ',' << num(d.q1)
                << ',' << num(d.q3) << '\n';
        }
    }
}

void write_pvalues_csv(std::ostream& out, const AnalysisReport& r) {
    out << "variable,session";
    for (const auto& s : r.sessions) out << ',' << s.name;
    out << '\n';
    for (std::size_t vi = 0; vi < kVariables.size(); ++vi) {
        for (std::size_t a = 0; a < r.sessions.size(); ++a) {
            out << to_string(kVariables[vi]) << ',' << r.sessions[a].name;
            for (std::size_t b = 0; b < r.sessions.size(); ++b) {
                out << ',';
                if (a == b) {
                    out << '1';
                } else if (const auto& t = r.pairwise[vi][a][b]) {
                    out << num(t->p_two_tailed);
                }
            }
            out << '\n';
        }
    }
}

void write_text(std::ostream& out, const AnalysisReport& r) {
    for (const auto& s : r.sessions) {
        out << "Session " << s.name << ": " << s.rows.size() << " serves, "
            << count_valid(s.trials()) << " valid\n";
        out << "  " << pad("serve", 7) << pad("label", 15) << pad("pitch", 16) << pad("speed", 16)
            << pad("height", 16) << pad("wrist", 16) << pad("elbow", 16) << "shoulder\n";
        for (const auto& t : s.rows) {
            out << "  " << pad(std::to_string(t.serve_index), 7) << pad(std::string(to_string(t.label)), 15);
            if (!t.summary) {
                out << "-\n";
                continue;
            }
            auto cell = [&](Variable v, const feedback::JudgedValue* j, int digits) {
                std::string c = fixed(value_of(*t.summary, v), digits);
                if (j) c += " " + std::string(to_string(j->status));
                return c;
            };
            const auto* f = t.feedback ? &*t.feedback : nullptr;
            out << pad(cell(Variable::Pitch, f ? &f->pitch : nullptr, 2), 16)
                << pad(cell(Variable::Speed, f ? &f->speed : nullptr, 2), 16)
                << pad(cell(Variable::HeightDiff, f ? &f->height : nullptr, 3), 16)
                << pad(cell(Variable::Wrist, f ? &f->wrist : nullptr, 2), 16)
                << pad(cell(Variable::Elbow, f ? &f->elbow : nullptr, 2), 16)
                << cell(Variable::Shoulder, f ? &f->shoulder : nullptr, 2) << '\n';
        }
        out << '\n';
    }

    out << "Session statistics over the first " << r.n << " valid serves (mean +/- SD)\n";
    out << "  " << pad("variable", 22);
    for (const auto& s : r.sessions) out << pad(s.name, 20);
    out << '\n';
    for (auto v : kVariables) {
        out << "  " << pad(std::string(to_string(v)) + " (" + std::string(unit_of(v)) + ")", 22);
        for (const auto& st : r.stats) {
            if (st.n == 0) {
                out << pad("-", 20);
                continue;
            }
            const int digits = v == Variable::HeightDiff ? 3 : 2;
            out << pad(fixed(st[v].mean, digits) + " +/- " + fixed(st[v].sd, digits), 20);
        }
        out << '\n';
    }

    if (r.sessions.size() < 2) return;
    out << "\nPairwise paired t-tests, two-tailed p (* p < 0.05, ** p < 0.01)\n";
    for (std::size_t vi = 0; vi < kVariables.size(); ++vi) {
        out << "  " << to_string(kVariables[vi]) << '\n';
        for (std::size_t a = 0; a < r.sessions.size(); ++a) {
            for (std::size_t b = a + 1; b < r.sessions.size(); ++b) {
                out << "    " << pad(r.sessions[a].name + " vs " + r.sessions[b].name, 24);
                if (const auto& t = r.pairwise[vi][a][b]) {
                    out << "t=" << fixed(t->t, 3) << " df=" << t->df << " p=" << fixed(t->p_two_tailed, 4)
                        << ' ' << stars(t->p_two_tailed) << '\n';
                } else {
                    out << "undefined\n";
                }
            }
        }
    }
}

}  // namespace bms::analytics
