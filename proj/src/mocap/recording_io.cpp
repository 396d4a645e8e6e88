#include "bms/mocap/recording_io.hpp"

#include "bms/common/text.hpp"
#include "bms/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace bms {

namespace {

using ordered_json = nlohmann::ordered_json;

void append_number(std::string& out, double v) { out += text::format_double(v); }

bool parse_number(std::string_view s, double& v) { return text::try_parse_double(s, v); }

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

void check_label(const std::string& label, std::size_t line) {
    if (!markers::is_known_label(label)) {
        throw ParseError(line, "unknown marker label '" + label + "'");
    }
}

void check_time(const Recording& rec, double t, std::size_t line) {
    if (!std::isfinite(t)) throw ParseError(line, "non-finite timestamp");
    if (!rec.frames.empty() && !(t > rec.frames.back().timestamp)) {
        throw ParseError(line, "timestamps must strictly increase");
    }
}

Recording parse_csv(std::istream& in) {
    Recording rec;
    std::string raw;
    std::size_t line_no = 0;
    if (!std::getline(in, raw)) throw ParseError(1, "missing header row");
    ++line_no;
    auto header = split(trim_cr(raw), ',');
    if (header.empty() || header[0] != "t" || (header.size() - 1) % 3 != 0) {
        throw ParseError(line_no, "header must be t followed by <label>.x,<label>.y,<label>.z triples");
    }
    for (std::size_t c = 1; c < header.size(); c += 3) {
        auto col = header[c];
        auto dot = col.rfind('.');
        if (dot == std::string_view::npos || col.substr(dot) != ".x") {
            throw ParseError(line_no, "malformed header cell '" + std::string(col) + "'");
        }
        std::string label(col.substr(0, dot));
        if (header[c + 1] != label + ".y" || header[c + 2] != label + ".z") {
            throw ParseError(line_no, "malformed header triple for '" + label + "'");
        }
        check_label(label, line_no);
        if (rec.index_of(label)) throw ParseError(line_no, "duplicate label '" + label + "'");
        rec.labels.push_back(std::move(label));
    }

    const std::size_t n = rec.labels.size();
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim_cr(raw);
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " cells, got " +
                                          std::to_string(cells.size()));
        }
        MarkerFrame f;
        if (!parse_number(cells[0], f.timestamp)) throw ParseError(line_no, "bad timestamp");
        check_time(rec, f.timestamp, line_no);
        f.positions.assign(n, Vec3::Zero());
        f.valid.assign(n, true);
        for (std::size_t m = 0; m < n; ++m) {
            Vec3 p;
            bool ok = true;
            for (int k = 0; k < 3; ++k) {
                auto cell = cells[1 + 3 * m + k];
                if (cell.empty()) {
                    ok = false;
                    continue;
                }
                if (!parse_number(cell, p[k])) {
                    throw ParseError(line_no, "bad number '" + std::string(cell) + "'");
                }
            }
            if (ok && !p.allFinite()) throw ParseError(line_no, "non-finite coordinate");
            if (ok) {
                f.positions[m] = p;
            } else {
                f.valid[m] = false;
            }
        }
        rec.frames.push_back(std::move(f));
    }
    return rec;
}

Recording parse_jsonl(std::istream& in) {
    JsonlFrameDecoder dec;
    Recording rec;
    std::string raw;
    while (std::getline(in, raw)) {
        if (auto f = dec.decode(raw)) rec.frames.push_back(std::move(*f));
    }
    rec.labels = dec.labels();
    return rec;
}

void write_csv(std::ostream& out, const Recording& rec) {
    std::string line = "t";
    for (const auto& l : rec.labels) {
        line += "," + l + ".x," + l + ".y," + l + ".z";
    }
    line += '\n';
    out << line;
    for (const auto& f : rec.frames) {
        line.clear();
        append_number(line, f.timestamp);
        for (std::size_t m = 0; m < rec.labels.size(); ++m) {
            for (int k = 0; k < 3; ++k) {
                line += ',';
                if (f.valid[m]) append_number(line, f.positions[m][k]);
            }
        }
        line += '\n';
        out << line;
    }
}

void write_jsonl(std::ostream& out, const Recording& rec) {
    for (const auto& f : rec.frames) {
        ordered_json j;
        j["t"] = f.timestamp;
        ordered_json mk = ordered_json::object();
        for (std::size_t m = 0; m < rec.labels.size(); ++m) {
            if (f.valid[m]) {
                mk[rec.labels[m]] = {f.positions[m].x(), f.positions[m].y(), f.positions[m].z()};
            } else {
                mk[rec.labels[m]] = nullptr;
            }
        }
        j["markers"] = std::move(mk);
        out << j.dump() << '\n';
    }
}

}  // namespace

std::optional<MarkerFrame> JsonlFrameDecoder::decode(std::string_view raw) {
    const std::size_t line_no = ++line_;
    auto line = trim_cr(raw);
    if (line.empty()) return std::nullopt;
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("t") || !j["t"].is_number() || !j.contains("markers") ||
        !j["markers"].is_object()) {
        throw ParseError(line_no, "frame object needs numeric 't' and object 'markers'");
    }
    const auto& mk = j["markers"];
    if (!started_) {
        for (auto it = mk.begin(); it != mk.end(); ++it) {
            check_label(it.key(), line_no);
            labels_.push_back(it.key());
        }
        started_ = true;
    }
    if (mk.size() != labels_.size()) throw ParseError(line_no, "marker set differs from the first frame");
    MarkerFrame f;
    f.timestamp = j["t"].get<double>();
    if (!std::isfinite(f.timestamp)) throw ParseError(line_no, "non-finite timestamp");
    if (last_t_ && !(f.timestamp > *last_t_)) throw ParseError(line_no, "timestamps must strictly increase");
    f.positions.assign(labels_.size(), Vec3::Zero());
    f.valid.assign(labels_.size(), false);
    for (auto it = mk.begin(); it != mk.end(); ++it) {
        const auto pos = std::find(labels_.begin(), labels_.end(), it.key());
        if (pos == labels_.end()) {
            check_label(it.key(), line_no);
            throw ParseError(line_no, "marker '" + it.key() + "' not present in the first frame");
        }
        const auto idx = static_cast<std::size_t>(pos - labels_.begin());
        const auto& v = it.value();
        if (v.is_null()) continue;
        if (!v.is_array() || v.size() != 3) {
            throw ParseError(line_no, "marker '" + it.key() + "' must be [x,y,z] or null");
        }
        Vec3 p;
        for (int k = 0; k < 3; ++k) {
            if (!v[k].is_number()) throw ParseError(line_no, "non-numeric coordinate");
            p[k] = v[k].get<double>();
        }
        if (!p.allFinite()) throw ParseError(line_no, "non-finite coordinate");
        f.positions[idx] = p;
        f.valid[idx] = true;
    }
    last_t_ = f.timestamp;
    return f;
}

RecordingFormat format_from_path(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    if (ext == ".csv") return RecordingFormat::Csv;
    if (ext == ".jsonl" || ext == ".ndjson") return RecordingFormat::JsonLines;
    throw ParseError(0, "cannot infer recording format from '" + p.string() + "'");
}

Recording parse_recording(std::istream& in, RecordingFormat format) {
    return format == RecordingFormat::Csv ? parse_csv(in) : parse_jsonl(in);
}

void write_recording(std::ostream& out, const Recording& rec, RecordingFormat format) {
    if (format == RecordingFormat::Csv) {
        write_csv(out, rec);
    } else {
        write_jsonl(out, rec);
    }
}

std::string sidecar_json(const Recording& rec) {
    ordered_json j;
    j["rate_hz"] = rec.rate_hz;
    j["handedness"] = std::string(to_string(rec.handedness));
    j["labels"] = rec.labels;
    j["metadata"] = rec.metadata;
    ordered_json truth = ordered_json::array();
    for (const auto& t : rec.truth) {
        truth.push_back({
            {"k_back", t.k_back},
            {"k_fwd", t.k_fwd},
            {"k_contact", t.k_contact},
            {"pitch_deg", t.pitch_deg},
            {"speed_mps", t.speed_mps},
            {"height_diff_m", t.height_diff_m},
            {"wrist_change_deg", t.wrist_change_deg},
            {"elbow_change_deg", t.elbow_change_deg},
            {"shoulder_change_deg", t.shoulder_change_deg},
            {"backswing_end_racket_shuttle_deg", t.backswing_end_racket_shuttle_deg},
            {"lost_tracking", t.lost_tracking},
        });
    }
    j["ground_truth"] = std::move(truth);
    return j.dump(2) + "\n";
}

void apply_sidecar(Recording& rec, const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("sidecar: ") + e.what());
    }
    try {
        if (j.contains("rate_hz")) rec.rate_hz = j["rate_hz"].get<double>();
        if (j.contains("handedness")) rec.handedness = parse_handedness(j["handedness"].get<std::string>());
        if (rec.labels.empty() && j.contains("labels")) {
            rec.labels = j["labels"].get<std::vector<std::string>>();
        }
        if (j.contains("metadata")) {
            rec.metadata = j["metadata"].get<std::map<std::string, std::string>>();
        }
        rec.truth.clear();
        if (j.contains("ground_truth")) {
            for (const auto& t : j["ground_truth"]) {
                ServeTruth s;
                s.k_back = t.at("k_back").get<std::size_t>();
                s.k_fwd = t.at("k_fwd").get<std::size_t>();
                s.k_contact = t.at("k_contact").get<std::size_t>();
                s.pitch_deg = t.at("pitch_deg").get<double>();
                s.speed_mps = t.at("speed_mps").get<double>();
                s.height_diff_m = t.at("height_diff_m").get<double>();
                s.wrist_change_deg = t.at("wrist_change_deg").get<double>();
                s.elbow_change_deg = t.at("elbow_change_deg").get<double>();
                s.shoulder_change_deg = t.at("shoulder_change_deg").get<double>();
                s.backswing_end_racket_shuttle_deg =
                    t.at("backswing_end_racket_shuttle_deg").get<double>();
                s.lost_tracking = t.value("lost_tracking", false);
                rec.truth.push_back(s);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("sidecar: ") + e.what());
    }
    if (!(rec.rate_hz > 0.0)) throw ParseError(0, "sidecar: rate_hz must be positive");
}

std::filesystem::path sidecar_path(const std::filesystem::path& recording) {
    auto p = recording;
    p += ".meta.json";
    return p;
}

Recording load_recording(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open recording '" + p.string() + "'");
    Recording rec = parse_recording(in, format_from_path(p));
    auto side = sidecar_path(p);
    if (std::filesystem::exists(side)) {
        std::ifstream s(side, std::ios::binary);
        std::stringstream ss;
        ss << s.rdbuf();
        apply_sidecar(rec, ss.str());
    }
    validate(rec);
    return rec;
}

void save_recording(const std::filesystem::path& p, const Recording& rec) {
    {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error("cannot write recording '" + p.string() + "'");
        write_recording(out, rec, format_from_path(p));
    }
    std::ofstream side(sidecar_path(p), std::ios::binary);
    side << sidecar_json(rec);
}

}  // namespace bms
