#pragma once

#include "bms/analytics/analytics.hpp"
#include "bms/fsm/service_fsm.hpp"
#include "bms/trajectory/trajectory.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace bms {

struct StreamConfig {
    std::string address = "127.0.0.1";
    int port = 8765;
    std::size_t queue_capacity = 1024;  // per client, oldest dropped first
    bool send_frames = true;
};

/// Every tunable of the engine. Keys are dotted names such as `fsm.v_min_mps`.
struct EngineConfig {
    fsm::FsmConfig fsm;  // fsm.guidance holds the guidance geometry
    analytics::JitterConfig jitter;
    /// Valid trials per session used for statistics; 0 means the smallest count across sessions.
    std::size_t session_valid_n = 0;
    trajectory::CourtGeometry court;
    double server_z = -2.2;
    double stripe_m = trajectory::kStripeWidthM;
    trajectory::BoardGeometry board;
    StreamConfig stream;
    std::string model = "wrist_only";
};

/// Applies a JSON object (comments allowed; nested objects flatten to dotted keys) on top of
/// `cfg`. Throws ConfigError for unknown keys or mistyped values.
void apply_config_json(EngineConfig& cfg, const std::string& text);

/// Applies one `key=value` override.
void apply_override(EngineConfig& cfg, const std::string& assignment);

/// Defaults, then the file named by `path` (or by BMS_CONFIG when `path` is empty), then the
/// overrides in order.
EngineConfig load_config(const std::filesystem::path& path = {},
                         const std::vector<std::string>& overrides = {});

/// Flat key/value document of every setting.
std::string config_to_json(const EngineConfig& cfg);

}  // namespace bms
