#pragma once

#include "bms/mocap/marker_frame.hpp"

#include <cstddef>
#include <functional>

namespace bms {

/// Consumes frames one at a time, in order. Returning false stops delivery.
/// The live-capture adapter and file replay both feed this interface.
using FrameSink = std::function<bool(const MarkerFrame&)>;

struct ReplayStatus {
    std::size_t frames_delivered = 0;
    bool completed = false;
};

/// Delivers the recording's frames paced at original delta / speed_factor.
/// Throws ParameterError if speed_factor is not positive.
ReplayStatus replay(const Recording& rec, double speed_factor, const FrameSink& sink);

}  // namespace bms
