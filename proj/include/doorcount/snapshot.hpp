#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "doorcount/depth_pipeline.hpp"

namespace doorcount {

/// Binary portable graymap: "P5\n<w> <h>\n255\n" followed by w*h bytes.
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
/// Accepts the layout written by encode_pgm (any whitespace between header
/// tokens, maxval 255). Returns empty on malformed input.
std::optional<GrayImage> decode_pgm(const std::vector<std::uint8_t>& bytes);

/// "snap-" followed by the zero-padded event seq.
std::string snapshot_id_for(std::uint64_t event_seq);
bool is_valid_snapshot_id(const std::string& id);

/// One grayscale snapshot per counted event, stored as <dir>/<id>.pgm.
class SnapshotStore {
public:
    explicit SnapshotStore(std::filesystem::path dir);

    /// Renders and writes the frame. Throws LogIoError on storage failure.
    std::string save(const DepthFrame& frame, const SegmentationConfig& cfg, std::uint64_t event_seq);
    std::optional<std::filesystem::path> path_for(const std::string& id) const;
    std::optional<std::vector<std::uint8_t>> load(const std::string& id) const;
    void clear();
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

}  // namespace doorcount
