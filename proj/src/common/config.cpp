#include "bms/common/config.hpp"

#include "bms/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <type_traits>
#include <sstream>
#include <string_view>
#include <variant>

namespace bms {

namespace {

using ordered_json = nlohmann::ordered_json;
using Slot = std::variant<double*, int*, std::size_t*, std::string*, bool*>;

struct Entry {
    std::string_view key;
    Slot slot;
};

std::vector<Entry> entries(EngineConfig& c) {
    auto& f = c.fsm;
    auto& g = c.fsm.guidance;
    return {
        {"fsm.ready_tolerance_m", &f.ready_tolerance_m},
        {"fsm.v_min_mps", &f.v_min_mps},
        {"fsm.sustain_frames", &f.sustain_frames},
        {"fsm.dwell_s", &f.dwell_s},
        {"fsm.trend_frames", &f.trend_frames},
        {"fsm.post_contact_frames", &f.post_contact_frames},
        {"fsm.preroll_frames", &f.preroll_frames},
        {"guidance.shuttle_height_m", &g.shuttle_height_m},
        {"guidance.forward_fraction", &g.forward_fraction},
        {"guidance.racket_gap_m", &g.racket_gap_m},
        {"guidance.halo_green_m", &g.halo_green_m},
        {"guidance.halo_yellow_m", &g.halo_yellow_m},
        {"guidance.sweep_back_rad", &g.sweep_back_rad},
        {"guidance.sweep_forward_rad", &g.sweep_forward_rad},
        {"jitter.joint_max_extrema", &c.jitter.joint_max_extrema},
        {"jitter.kinetic_max_extrema", &c.jitter.kinetic_max_extrema},
        {"jitter.angle_tolerance_deg", &c.jitter.angle_tolerance_deg},
        {"jitter.speed_tolerance_mps", &c.jitter.speed_tolerance_mps},
        {"session.valid_n", &c.session_valid_n},
        {"court.net_z", &c.court.net_z},
        {"court.short_service_line_z", &c.court.short_service_line_z},
        {"court.back_z", &c.court.court_back_z},
        {"court.center_x", &c.court.center_x},
        {"court.side_x", &c.court.side_x},
        {"court.target_square_m", &c.court.target_square_m},
        {"court.server_z", &c.server_z},
        {"board.stripe_m", &c.stripe_m},
        {"board.shuttle_to_board_m", &c.board.shuttle_to_board_m},
        {"board.camera_to_board_m", &c.board.camera_to_board_m},
        {"stream.address", &c.stream.address},
        {"stream.port", &c.stream.port},
        {"stream.queue_capacity", &c.stream.queue_capacity},
        {"stream.send_frames", &c.stream.send_frames},
        {"model", &c.model},
    };
}

Slot* find(std::vector<Entry>& es, std::string_view key) {
    for (auto& e : es) {
        if (e.key == key) return &e.slot;
    }
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void assign(Slot& slot, std::string_view key, const ordered_json& v) {
    const std::string k(key);
    std::visit(
        [&](auto* p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ConfigError(k + " expects a number");
                *p = v.get<double>();
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError(k + " expects true or false");
                *p = v.get<bool>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ConfigError(k + " expects a string");
                *p = v.get<std::string>();
            } else {
                if (!v.is_number_integer()) throw ConfigError(k + " expects an integer");
                if constexpr (std::is_same_v<T, std::size_t>) {
                    if (v.get<long long>() < 0) throw ConfigError(k + " must be non-negative");
                }
                *p = v.get<T>();
            }
        },
        slot);
}

void apply_object(std::vector<Entry>& es, const ordered_json& obj, const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            apply_object(es, *it, key);
        } else {
            assign(*find(es, key), key, *it);
        }
    }
}

}  // namespace

void apply_config_json(EngineConfig& cfg, const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    auto es = entries(cfg);
    apply_object(es, doc, "");
}

void apply_override(EngineConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' is not key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    auto es = entries(cfg);
    Slot* slot = find(es, key);
    ordered_json v;
    if (std::holds_alternative<std::string*>(*slot)) {
        v = raw;
    } else {
        try {
            v = ordered_json::parse(raw);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("override '" + assignment + "' has an unreadable value");
        }
    }
    assign(*slot, key, v);
}

EngineConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    EngineConfig cfg;
    std::filesystem::path p = path;
    if (p.empty()) {
        if (const char* env = std::getenv("BMS_CONFIG"); env != nullptr && *env != '\0') p = env;
    }
    if (!p.empty()) {
        std::ifstream in(p);
        if (!in) throw ConfigError("cannot read config '" + p.string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        apply_config_json(cfg, ss.str());
    }
    for (const auto& o : overrides) apply_override(cfg, o);
    return cfg;
}

std::string config_to_json(const EngineConfig& cfg) {
    EngineConfig copy = cfg;
    ordered_json doc = ordered_json::object();
    for (const auto& e : entries(copy)) {
        std::visit([&](auto* p) { doc[std::string(e.key)] = *p; }, e.slot);
    }
    return doc.dump(2) + "\n";
}

}  // namespace bms
