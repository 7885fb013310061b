#include "doorcount/replay_file.hpp"

#include <array>
#include <cstring>

namespace doorcount {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'R', 'F', '1'};

void put_u32(unsigned char* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}
void put_u64(unsigned char* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}
std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{p[i]} << (8 * i);
    return v;
}
std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{p[i]} << (8 * i);
    return v;
}

std::string pos_str(std::uint64_t pos) { return "frame #" + std::to_string(pos); }

}  // namespace

std::string_view to_string(ReplayErrorKind k) {
    switch (k) {
        case ReplayErrorKind::Io: return "io";
        case ReplayErrorKind::CorruptHeader: return "corrupt_header";
        case ReplayErrorKind::DimensionMismatch: return "dimension_mismatch";
        case ReplayErrorKind::Truncated: return "truncated";
        case ReplayErrorKind::TrailingData: return "trailing_data";
        case ReplayErrorKind::OutOfOrder: return "out_of_order";
    }
    return "unknown";
}

ReplayWriter::ReplayWriter(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height)
    : path_(path), width_(width), height_(height) {
    if (width == 0 || height == 0)
        throw ReplayError(ReplayErrorKind::DimensionMismatch, "replay frames must have non-zero dimensions");
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw ReplayError(ReplayErrorKind::Io, "cannot open " + path.string() + " for writing");
    std::array<unsigned char, kReplayHeaderBytes> header{};
    std::memcpy(header.data(), kMagic.data(), 4);
    put_u32(header.data() + 4, width);
    put_u32(header.data() + 8, height);
    put_u32(header.data() + 12, 0);
    put_u32(header.data() + 16, 0);
    out_.write(reinterpret_cast<const char*>(header.data()), header.size());
    buf_.resize(ReplayHeader{width, height, 0}.record_bytes());
}

ReplayWriter::~ReplayWriter() {
    try {
        finish();
    } catch (...) {
    }
}

void ReplayWriter::append(const DepthFrame& frame) {
    if (finished_) throw std::logic_error("ReplayWriter::append after finish");
    if (frame.width != width_ || frame.height != height_ || !frame.well_formed())
        throw ReplayError(ReplayErrorKind::DimensionMismatch,
                          pos_str(count_) + " is " + std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                              ", file is " + std::to_string(width_) + "x" + std::to_string(height_),
                          count_);
    if (last_index_ && frame.frame_index <= *last_index_)
        throw ReplayError(ReplayErrorKind::OutOfOrder,
                          pos_str(count_) + " has frame_index " + std::to_string(frame.frame_index) +
                              " after " + std::to_string(*last_index_),
                          count_);
    if (count_ == UINT32_MAX) throw ReplayError(ReplayErrorKind::DimensionMismatch, "too many frames for DRF1");

    put_u64(buf_.data(), frame.timestamp_us);
    put_u64(buf_.data() + 8, frame.frame_index);
    unsigned char* p = buf_.data() + 16;
    for (DepthMm d : frame.depth) {
        *p++ = static_cast<unsigned char>(d & 0xff);
        *p++ = static_cast<unsigned char>(d >> 8);
    }
    out_.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    if (!out_) throw ReplayError(ReplayErrorKind::Io, "write failed on " + path_.string(), count_);
    last_index_ = frame.frame_index;
    ++count_;
}

void ReplayWriter::finish() {
    if (finished_) return;
    finished_ = true;
    std::array<unsigned char, 4> n{};
    put_u32(n.data(), count_);
    out_.seekp(12);
    out_.write(reinterpret_cast<const char*>(n.data()), n.size());
    out_.close();
    if (!out_) throw ReplayError(ReplayErrorKind::Io, "failed to finalize " + path_.string());
}

ReplayReader::ReplayReader(const std::filesystem::path& path) {
    in_.open(path, std::ios::binary);
    if (!in_) throw ReplayError(ReplayErrorKind::Io, "cannot open " + path.string());
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw ReplayError(ReplayErrorKind::Io, "cannot stat " + path.string());

    std::array<unsigned char, kReplayHeaderBytes> raw{};
    in_.read(reinterpret_cast<char*>(raw.data()), raw.size());
    if (in_.gcount() != static_cast<std::streamsize>(raw.size()))
        throw ReplayError(ReplayErrorKind::CorruptHeader, "file shorter than the DRF1 header");
    if (std::memcmp(raw.data(), kMagic.data(), 4) != 0)
        throw ReplayError(ReplayErrorKind::CorruptHeader, "bad magic, expected DRF1");
    header_.width = get_u32(raw.data() + 4);
    header_.height = get_u32(raw.data() + 8);
    header_.frame_count = get_u32(raw.data() + 12);
    if (get_u32(raw.data() + 16) != 0) throw ReplayError(ReplayErrorKind::CorruptHeader, "reserved field is not 0");
    if (header_.width == 0 || header_.height == 0)
        throw ReplayError(ReplayErrorKind::DimensionMismatch, "header declares an empty frame size");

    const std::uint64_t expected = header_.file_bytes();
    if (size > expected)
        throw ReplayError(ReplayErrorKind::TrailingData,
                          std::to_string(size - expected) + " bytes after the declared " +
                              std::to_string(header_.frame_count) + " frames");
    if (size < expected) {
        const std::uint64_t complete = (size - kReplayHeaderBytes) / header_.record_bytes();
        throw ReplayError(ReplayErrorKind::Truncated,
                          "file truncated inside " + pos_str(complete) + " of " + std::to_string(header_.frame_count),
                          complete);
    }
    buf_.resize(header_.record_bytes());
}

std::optional<DepthFrame> ReplayReader::next() {
    if (position_ >= header_.frame_count) return std::nullopt;
    in_.read(reinterpret_cast<char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    if (in_.gcount() != static_cast<std::streamsize>(buf_.size()))
        throw ReplayError(ReplayErrorKind::Truncated, "file truncated inside " + pos_str(position_), position_);

    DepthFrame f;
    f.width = header_.width;
    f.height = header_.height;
    f.timestamp_us = get_u64(buf_.data());
    f.frame_index = get_u64(buf_.data() + 8);
    if (last_index_ && f.frame_index <= *last_index_)
        throw ReplayError(ReplayErrorKind::OutOfOrder,
                          pos_str(position_) + " has frame_index " + std::to_string(f.frame_index) + " after " +
                              std::to_string(*last_index_),
                          position_);
    f.depth.resize(f.pixel_count());
    const unsigned char* p = buf_.data() + 16;
    for (DepthMm& d : f.depth) {
        d = static_cast<DepthMm>(p[0] | (p[1] << 8));
        p += 2;
    }
    last_index_ = f.frame_index;
    ++position_;
    return f;
}

void write_replay(std::span<const DepthFrame> frames, const std::filesystem::path& path) {
    if (frames.empty()) throw ReplayError(ReplayErrorKind::DimensionMismatch, "cannot write an empty replay");
    ReplayWriter w(path, frames.front().width, frames.front().height);
    for (const DepthFrame& f : frames) w.append(f);
    w.finish();
}

std::vector<DepthFrame> read_replay(const std::filesystem::path& path) {
    ReplayReader r(path);
    std::vector<DepthFrame> frames;
    frames.reserve(r.header().frame_count);
    while (auto f = r.next()) frames.push_back(std::move(*f));
    return frames;
}

}  // namespace doorcount
