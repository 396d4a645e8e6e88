#include "bms/mocap/replay.hpp"

#include "bms/errors.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace bms {

ReplayStatus replay(const Recording& rec, double speed_factor, const FrameSink& sink) {
    if (!(speed_factor > 0.0) || !std::isfinite(speed_factor)) {
        throw ParameterError("replay speed factor must be positive");
    }
    using clock = std::chrono::steady_clock;
    ReplayStatus status;
    if (rec.frames.empty()) {
        status.completed = true;
        return status;
    }
    const auto start = clock::now();
    const double t0 = rec.frames.front().timestamp;
    for (const auto& f : rec.frames) {
        // Pace against the absolute schedule so per-frame sleep error does not accumulate.
        auto due = start + std::chrono::duration_cast<clock::duration>(
                               std::chrono::duration<double>((f.timestamp - t0) / speed_factor));
        std::this_thread::sleep_until(due);
        if (!sink(f)) return status;
        ++status.frames_delivered;
    }
    status.completed = true;
    return status;
}

}  // namespace bms
