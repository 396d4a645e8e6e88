#include "bms/mocap/relabel.hpp"

#include "bms/errors.hpp"

#include <algorithm>

namespace bms {

namespace {

std::size_t find_label(const std::vector<std::string>& labels, std::string_view l) {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) {
        throw StructuralError("recording lacks required marker '" + std::string(l) + "'");
    }
    return static_cast<std::size_t>(it - labels.begin());
}

}  // namespace

Relabeler::Relabeler(const std::vector<std::string>& labels, Handedness handedness)
    : handedness_(handedness) {
    using namespace markers;
    const bool right = handedness == Handedness::Right;
    index_[kShoulder] = find_label(labels, right ? kRightShoulder : kLeftShoulder);
    index_[kElbow] = find_label(labels, right ? kRightElbow : kLeftElbow);
    index_[kWristA] = find_label(labels, right ? kRightWristA : kLeftWristA);
    index_[kWristB] = find_label(labels, right ? kRightWristB : kLeftWristB);
    index_[kHand] = find_label(labels, right ? kRightFinger : kLeftFinger);
    index_[kShuttleShoulder] = find_label(labels, right ? kLeftShoulder : kRightShoulder);
    index_[kShuttleHand] = find_label(labels, right ? kLeftFinger : kRightFinger);
    index_[kTop] = find_label(labels, kRacketTop);
    index_[kBottom] = find_label(labels, kRacketBottom);
    index_[kSide] = find_label(labels, kRacketSide);
    index_[kMiddle] = find_label(labels, kRacketMiddle);
}

SkeletonFrame Relabeler::operator()(const MarkerFrame& frame) const {
    auto at = [&](Slot s) -> const Vec3& { return frame.positions.at(index_[s]); };
    SkeletonFrame out;
    out.timestamp = frame.timestamp;
    out.handedness = handedness_;
    out.shoulder = at(kShoulder);
    out.elbow = at(kElbow);
    out.wrist = (at(kWristA) + at(kWristB)) / 2.0;
    out.hand = at(kHand);
    out.shuttle_shoulder = at(kShuttleShoulder);
    out.shuttle_hand = at(kShuttleHand);
    out.racket_top = at(kTop);
    out.racket_bottom = at(kBottom);
    out.racket_side = at(kSide);
    out.racket_middle = at(kMiddle);
    out.complete = std::all_of(index_.begin(), index_.end(),
                               [&](std::size_t i) { return static_cast<bool>(frame.valid.at(i)); });
    return out;
}

SkeletonFrame relabel(const MarkerFrame& frame, const std::vector<std::string>& labels,
                      Handedness handedness) {
    return Relabeler(labels, handedness)(frame);
}

std::vector<SkeletonFrame> relabel(const Recording& rec) {
    std::vector<SkeletonFrame> out;
    if (rec.frames.empty()) return out;
    Relabeler r(rec.labels, rec.handedness);
    out.reserve(rec.frames.size());
    for (const auto& f : rec.frames) out.push_back(r(f));
    return out;
}

}  // namespace bms
