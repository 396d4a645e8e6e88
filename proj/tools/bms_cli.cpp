#include "bms/analytics/report.hpp"
#include "bms/common/config.hpp"
#include "bms/errors.hpp"
#include "bms/mocap/recording_io.hpp"
#include "bms/mocap/synthesize.hpp"
#include "bms/model/expert_model.hpp"
#include "bms/stream/server.hpp"
#include "bms/stream/session.hpp"
#include "bms/trajectory/trajectory.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace bms;

namespace {

struct Globals {
    std::string config_path;
    std::vector<std::string> overrides;
};

EngineConfig engine_config(const Globals& g) { return load_config(g.config_path, g.overrides); }

model::ExpertModel active_model(const EngineConfig& cfg, const std::string& flag) {
    return model::load_model(flag.empty() ? cfg.model : flag);
}

std::vector<std::string> session_names(const std::vector<std::string>& paths) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const auto& p : paths) {
        std::string base = fs::path(p).stem().string();
        std::string name = base;
        for (int i = 2; seen.count(name) != 0; ++i) name = base + "_" + std::to_string(i);
        seen.insert(name);
        names.push_back(name);
    }
    return names;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << content;
}

int cmd_analyze(const Globals& g, const std::vector<std::string>& recordings, const std::string& model_flag,
                const std::string& out_dir, const std::string& format) {
    const auto cfg = engine_config(g);
    const auto model = active_model(cfg, model_flag);
    const auto names = session_names(recordings);
    std::vector<analytics::SessionReport> sessions;
    for (std::size_t i = 0; i < recordings.size(); ++i) {
        sessions.push_back(analytics::analyze_recording(load_recording(recordings[i]), names[i], model, cfg));
    }
    const auto report = analytics::build_report(std::move(sessions), cfg.session_valid_n);
    auto render = [&](void (*writer)(std::ostream&, const analytics::AnalysisReport&)) {
        std::ostringstream ss;
        writer(ss, report);
        return ss.str();
    };
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "trials.csv", render(analytics::write_trials_csv));
        write_file(fs::path(out_dir) / "sessions.csv", render(analytics::write_sessions_csv));
        write_file(fs::path(out_dir) / "pvalues.csv", render(analytics::write_pvalues_csv));
        write_file(fs::path(out_dir) / "report.txt", render(analytics::write_text));
    }
    if (format == "csv") {
        std::cout << render(analytics::write_trials_csv);
    } else if (out_dir.empty()) {
        std::cout << render(analytics::write_text);
    }
    return 0;
}

int cmd_fit(const Globals& g, const std::vector<std::string>& recordings, const std::string& pattern,
            const std::string& out_path) {
    const auto cfg = engine_config(g);
    const auto judge_model = model::builtin_model(model::ExertionPattern::WristOnly);
    std::vector<kinetics::ServiceSummary> summaries;
    for (const auto& path : recordings) {
        const auto rec = load_recording(path);
        for (const auto& record : fsm::segment_recording(rec, cfg.fsm)) {
            const auto row = analytics::make_row(record, judge_model, cfg.jitter);
            if (row.label == analytics::TrialLabel::Valid) summaries.push_back(*row.summary);
        }
    }
    model::ExertionPattern p = model::ExertionPattern::WristOnly;
    if (pattern == "auto") {
        if (summaries.empty()) throw FittingError("no valid serves to fit");
        double wrist = 0.0;
        double elbow = 0.0;
        for (const auto& s : summaries) {
            wrist += s.wrist_change_deg;
            elbow += s.elbow_change_deg;
        }
        p = model::classify_pattern(wrist, elbow);
    } else {
        p = model::parse_pattern(pattern);
    }
    const auto fitted = model::fit_model(summaries, p);
    const std::string doc = model::to_json(fitted);
    if (out_path.empty()) {
        std::cout << doc;
    } else {
        write_file(out_path, doc);
    }
    std::cerr << "fitted " << summaries.size() << " valid serves from " << recordings.size()
              << " recording(s)\n";
    return 0;
}

int cmd_judge(const Globals& g, const std::string& recording, const std::string& model_flag) {
    const auto cfg = engine_config(g);
    const auto model = active_model(cfg, model_flag);
    const auto session = analytics::analyze_recording(load_recording(recording),
                                                      session_names({recording}).front(), model, cfg);
    stream::Json out = stream::Json::array();
    std::size_t judged = 0;
    for (const auto& row : session.rows) {
        stream::Json j;
        j["serve_id"] = stream::serve_id(session.name, row.serve_index);
        j["label"] = analytics::to_string(row.label);
        j["summary"] = row.summary ? stream::to_json(*row.summary) : stream::Json(nullptr);
        j["report"] = row.feedback ? stream::to_json(*row.feedback) : stream::Json(nullptr);
        judged += row.feedback.has_value();
        out.push_back(std::move(j));
    }
    std::cout << out.dump(2) << '\n';
    if (judged == 0) throw JudgmentError("no serve in '" + recording + "' could be judged");
    return 0;
}

int cmd_replay(const Globals& g, const std::string& recording, double speed, std::optional<int> serve_port,
               std::size_t wait_clients, double linger_s, bool print, const std::string& model_flag) {
    const auto cfg = engine_config(g);
    const auto model = active_model(cfg, model_flag);
    const auto rec = load_recording(recording);
    std::unique_ptr<stream::StreamServer> server;
    if (serve_port) {
        server = std::make_unique<stream::StreamServer>(cfg.stream.address, static_cast<unsigned short>(*serve_port),
                                                        model::to_json(model), cfg.stream.queue_capacity);
        std::cerr << "serving ws://" << cfg.stream.address << ':' << server->port() << "/stream\n";
        if (wait_clients > 0 && !server->wait_for_clients(wait_clients, std::chrono::minutes(10))) {
            throw Error("timed out waiting for clients");
        }
    }
    const bool to_stdout = print || !server;
    const auto result = stream::run_session(
        rec, session_names({recording}).front(), model, cfg,
        [&](const stream::StreamMessage& m) {
            if (server) server->publish(m);
            if (to_stdout) std::cout << stream::encode(m);
        },
        speed);
    if (server) {
        server->flush(std::chrono::milliseconds(static_cast<long>(linger_s * 1000.0)));
        server->stop();
    }
    std::cerr << "replayed " << rec.frames.size() << " frames, " << result.rows.size() << " serves, "
              << result.messages << " messages\n";
    return 0;
}

int cmd_serve(const Globals& g, int ingest_port, int serve_port, const std::string& handedness,
              const std::string& session, const std::string& model_flag) {
    const auto cfg = engine_config(g);
    const auto model = active_model(cfg, model_flag);
    const auto hand = parse_handedness(handedness);
    stream::StreamServer server(cfg.stream.address, static_cast<unsigned short>(serve_port), model::to_json(model),
                                cfg.stream.queue_capacity);
    std::cerr << "serving ws://" << cfg.stream.address << ':' << server.port() << "/stream\n";
    std::unique_ptr<stream::LiveSession> live;
    auto publish = [&](const stream::StreamMessage& m) { server.publish(m); };
    stream::receive_frames(
        cfg.stream.address, static_cast<unsigned short>(ingest_port),
        [&](const std::vector<std::string>& labels, const MarkerFrame& f) {
            if (!live) live = std::make_unique<stream::LiveSession>(session, labels, hand, model, cfg, publish);
            live->push(f);
        },
        [](unsigned short p) { std::cerr << "accepting marker frames on port " << p << '\n'; });
    if (live) {
        const auto result = live->finish();
        std::cerr << "session ended: " << result.rows.size() << " serves\n";
    }
    server.flush(std::chrono::seconds(2));
    server.stop();
    return 0;
}

int cmd_classify(const Globals& g, const std::string& csv, const std::string& out_path) {
    const auto cfg = engine_config(g);
    std::ifstream in(csv);
    if (!in) throw Error("cannot read '" + csv + "'");
    const auto obs = trajectory::read_observations(in, cfg.server_z);
    std::vector<trajectory::Classification> cls;
    for (const auto& o : obs) cls.push_back(trajectory::classify(o, cfg.court, cfg.board, cfg.stripe_m));
    std::ostringstream ss;
    trajectory::write_classified(ss, obs, cls);
    if (out_path.empty()) {
        std::cout << ss.str();
    } else {
        write_file(out_path, ss.str());
    }
    return 0;
}

int cmd_synth(const std::string& out, int serves, std::uint64_t seed, double noise, const std::string& handedness,
              const std::vector<int>& jitter_serves, const std::vector<int>& dropout_serves) {
    SynthesisParams p;
    p.handedness = parse_handedness(handedness);
    p.seed = seed;
    p.noise_sd_m = noise;
    auto member = [](const std::vector<int>& v, int i) { return std::find(v.begin(), v.end(), i) != v.end(); };
    for (int i = 1; i <= serves; ++i) {
        ServeParams s;
        if (member(jitter_serves, i)) {
            s.wrist_oscillation_deg = 3.0;
            s.wrist_oscillation_cycles = 4;
        }
        if (member(dropout_serves, i)) s.dropout = Dropout{std::string(markers::kRacketTop), 70, 4};
        p.serves.push_back(s);
    }
    save_recording(out, synthesize_service(p));
    std::cerr << "wrote " << out << " with " << serves << " serves\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Backhand short service training engine"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON config file (default: $BMS_CONFIG)");
    app.add_option("--set", g.overrides, "Override a config key, key=value (repeatable)");

    std::vector<std::string> recordings;
    std::string recording;
    std::string model_flag;
    std::string out;
    std::string format = "text";
    std::string pattern = "wrist_only";

    auto* analyze = app.add_subcommand("analyze", "Batch report over one or more recordings");
    analyze->add_option("recordings", recordings, "Recording files (.csv/.jsonl)")->required()->check(CLI::ExistingFile);
    analyze->add_option("--model", model_flag, "Builtin model name or model document");
    analyze->add_option("--out", out, "Directory for trials.csv, sessions.csv, pvalues.csv, report.txt");
    analyze->add_option("--format", format, "Stdout format")->check(CLI::IsMember({"text", "csv"}));

    auto* fit = app.add_subcommand("fit", "Fit an expert model from recordings");
    fit->add_option("recordings", recordings, "Recording files")->required()->check(CLI::ExistingFile);
    fit->add_option("--pattern", pattern, "Exertion pattern")
        ->check(CLI::IsMember({"wrist_only", "elbow_wrist", "auto"}));
    fit->add_option("--out", out, "Model document path (default: stdout)");

    double speed = 1.0;
    std::optional<int> serve_port;
    std::size_t wait_clients = 0;
    double linger = 1.0;
    bool print = false;
    auto* replay = app.add_subcommand("replay", "Replay a recording through the live pipeline");
    replay->add_option("recording", recording, "Recording file")->required()->check(CLI::ExistingFile);
    replay->add_option("--speed", speed, "Playback speed factor; 0 = as fast as possible")->check(CLI::NonNegativeNumber);
    replay->add_option("--serve-port", serve_port, "Serve /stream and /model on this port")->check(CLI::Range(0, 65535));
    replay->add_option("--wait-clients", wait_clients, "Wait for this many stream clients before starting");
    replay->add_option("--linger", linger, "Seconds to drain client queues at the end")->check(CLI::NonNegativeNumber);
    replay->add_flag("--print", print, "Also write NDJSON messages to stdout");
    replay->add_option("--model", model_flag, "Builtin model name or model document");

    int ingest_port = 0;
    int live_port = 0;
    std::string handedness = "right";
    std::string session = "live";
    auto* serve = app.add_subcommand("serve", "Judge live marker frames sent as JsonLines over TCP");
    serve->add_option("--ingest-port", ingest_port, "TCP port receiving marker frames")->required()->check(CLI::Range(0, 65535));
    serve->add_option("--serve-port", live_port, "Port for /stream and /model")->check(CLI::Range(0, 65535));
    serve->add_option("--handedness", handedness, "Trainee handedness")->check(CLI::IsMember({"left", "right"}));
    serve->add_option("--session", session, "Session id");
    serve->add_option("--model", model_flag, "Builtin model name or model document");

    auto* classify = app.add_subcommand("classify-trajectory", "Classify shuttle trajectory observations");
    classify->add_option("csv", recording, "Observation CSV")->required()->check(CLI::ExistingFile);
    classify->add_option("--out", out, "Output CSV (default: stdout)");

    auto* judge = app.add_subcommand("judge", "Judge every serve of a recording");
    judge->add_option("recording", recording, "Recording file")->required()->check(CLI::ExistingFile);
    judge->add_option("--model", model_flag, "Builtin model name or model document");

    int serves = 5;
    std::uint64_t seed = 1;
    double noise = 0.0;
    std::vector<int> jitter_serves;
    std::vector<int> dropout_serves;
    auto* synth = app.add_subcommand("synth", "Write a synthetic recording with ground truth");
    synth->add_option("out", out, "Output recording (.csv/.jsonl)")->required();
    synth->add_option("--serves", serves, "Number of serves")->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", seed, "Noise seed");
    synth->add_option("--noise-sd", noise, "Marker noise SD (m)")->check(CLI::NonNegativeNumber);
    synth->add_option("--handedness", handedness, "Trainee handedness")->check(CLI::IsMember({"left", "right"}));
    synth->add_option("--jitter", jitter_serves, "1-based serves with wrist oscillation");
    synth->add_option("--dropout", dropout_serves, "1-based serves with a mid-swing marker dropout");

    auto* config = app.add_subcommand("config", "Print the effective configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*analyze) return cmd_analyze(g, recordings, model_flag, out, format);
        if (*fit) return cmd_fit(g, recordings, pattern, out);
        if (*replay) return cmd_replay(g, recording, speed, serve_port, wait_clients, linger, print, model_flag);
        if (*serve) return cmd_serve(g, ingest_port, live_port, handedness, session, model_flag);
        if (*classify) return cmd_classify(g, recording, out);
        if (*judge) return cmd_judge(g, recording, model_flag);
        if (*synth) return cmd_synth(out, serves, seed, noise, handedness, jitter_serves, dropout_serves);
        if (*config) {
            std::cout << config_to_json(engine_config(g));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
