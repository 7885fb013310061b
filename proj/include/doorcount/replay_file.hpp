#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "doorcount/depth_pipeline.hpp"

namespace doorcount {

// DRF1 replay container, all integers little-endian:
//
//   "DRF1" | u32 width | u32 height | u32 frame_count | u32 reserved (0)
//   frame_count x { u64 timestamp_us | u64 frame_index | width*height x u16 depth_mm }
//
// The file length is exactly 20 + frame_count * (16 + 2 * width * height).

inline constexpr std::size_t kReplayHeaderBytes = 20;

enum class ReplayErrorKind { Io, CorruptHeader, DimensionMismatch, Truncated, TrailingData, OutOfOrder };

std::string_view to_string(ReplayErrorKind k);

class ReplayError : public std::runtime_error {
public:
    ReplayError(ReplayErrorKind kind, const std::string& what, std::optional<std::uint64_t> frame_position = {})
        : std::runtime_error(what), kind_(kind), frame_position_(frame_position) {}

    ReplayErrorKind kind() const { return kind_; }
    /// Ordinal (0-based) of the frame record the error refers to, if any.
    std::optional<std::uint64_t> frame_position() const { return frame_position_; }

private:
    ReplayErrorKind kind_;
    std::optional<std::uint64_t> frame_position_;
};

struct ReplayHeader {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t frame_count = 0;

    std::uint64_t record_bytes() const { return 16 + 2ull * width * height; }
    std::uint64_t file_bytes() const { return kReplayHeaderBytes + std::uint64_t{frame_count} * record_bytes(); }
};

/// Streams frames into a DRF1 file. The frame count in the header is
/// patched by finish(); a writer destroyed without finish() still patches it.
class ReplayWriter {
public:
    ReplayWriter(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height);
    ~ReplayWriter();
    ReplayWriter(const ReplayWriter&) = delete;
    ReplayWriter& operator=(const ReplayWriter&) = delete;

    void append(const DepthFrame& frame);
    void finish();
    std::uint32_t frames_written() const { return count_; }

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::uint32_t width_, height_;
    std::uint32_t count_ = 0;
    std::optional<std::uint64_t> last_index_;
    std::vector<unsigned char> buf_;
    bool finished_ = false;
};

/// Streams frames out of a DRF1 file. Header, size and ordering problems are
/// reported as ReplayError with a distinct kind.
class ReplayReader {
public:
    explicit ReplayReader(const std::filesystem::path& path);

    const ReplayHeader& header() const { return header_; }
    /// Next frame, or empty at the end of the file.
    std::optional<DepthFrame> next();
    std::uint32_t frames_read() const { return position_; }

private:
    std::ifstream in_;
    ReplayHeader header_;
    std::uint32_t position_ = 0;
    std::optional<std::uint64_t> last_index_;
    std::vector<unsigned char> buf_;
};

void write_replay(std::span<const DepthFrame> frames, const std::filesystem::path& path);
std::vector<DepthFrame> read_replay(const std::filesystem::path& path);

}  // namespace doorcount
