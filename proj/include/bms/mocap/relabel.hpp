#pragma once

#include "bms/mocap/marker_frame.hpp"

#include <array>
#include <vector>

namespace bms {

/// Maps conventional markerset labels to the dominant/non-dominant arm view.
///
/// The dominant side's SHO/ELB/FIN become shoulder/elbow/hand and its wrist is the
/// midpoint of WRA and WRB; the other side's SHO/FIN become shuttle_shoulder and
/// shuttle_hand. Construction throws StructuralError if a required label is missing.
class Relabeler {
public:
    Relabeler(const std::vector<std::string>& labels, Handedness handedness);

    SkeletonFrame operator()(const MarkerFrame& frame) const;

    Handedness handedness() const { return handedness_; }

private:
    enum Slot {
        kShoulder, kElbow, kWristA, kWristB, kHand, kShuttleShoulder, kShuttleHand,
        kTop, kBottom, kSide, kMiddle, kSlotCount
    };
    Handedness handedness_;
    std::array<std::size_t, kSlotCount> index_{};
};

SkeletonFrame relabel(const MarkerFrame& frame, const std::vector<std::string>& labels,
                      Handedness handedness);

std::vector<SkeletonFrame> relabel(const Recording& rec);

}  // namespace bms
