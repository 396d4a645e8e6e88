#pragma once

#include "bms/mocap/marker_frame.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bms {

/// On-disk layouts for marker recordings.
///
/// Csv: header `t,<label>.x,<label>.y,<label>.z,...`, one frame per row, a blank
/// coordinate cell marks the marker as lost for that frame.
/// JsonLines: one `{"t": ..., "markers": {"<label>": [x, y, z] | null}}` object per line.
///
/// Rate, handedness, free-form metadata and synthesis ground truth travel in a JSON
/// sidecar next to the recording (`<file>.meta.json`).
enum class RecordingFormat { Csv, JsonLines };

RecordingFormat format_from_path(const std::filesystem::path& p);

/// Parses a complete document. Invalid markers come back with valid=false and a zero position.
/// Throws ParseError naming the offending line.
Recording parse_recording(std::istream& in, RecordingFormat format);

/// Writes numbers in shortest round-trip form, so parse(write(r)) == r.
void write_recording(std::ostream& out, const Recording& rec, RecordingFormat format);

/// Incremental JsonLines reader for live sources. The first frame fixes the marker set; blank
/// lines yield nothing. Throws ParseError with the running line number.
class JsonlFrameDecoder {
public:
    std::optional<MarkerFrame> decode(std::string_view line);
    const std::vector<std::string>& labels() const { return labels_; }

private:
    std::vector<std::string> labels_;
    std::optional<double> last_t_;
    std::size_t line_ = 0;
    bool started_ = false;
};

/// Sidecar document (rate, handedness, metadata, ground truth).
std::string sidecar_json(const Recording& rec);
void apply_sidecar(Recording& rec, const std::string& json_text);

std::filesystem::path sidecar_path(const std::filesystem::path& recording);

/// File helpers: format from extension, sidecar read/written when present.
Recording load_recording(const std::filesystem::path& p);
void save_recording(const std::filesystem::path& p, const Recording& rec);

}  // namespace bms
