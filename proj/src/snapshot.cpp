#include "doorcount/snapshot.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "doorcount/logs.hpp"

namespace doorcount {

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    const std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

std::optional<GrayImage> decode_pgm(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    };
    auto read_uint = [&]() -> std::optional<std::uint32_t> {
        skip_ws();
        std::uint64_t v = 0;
        const std::size_t start = pos;
        while (pos < bytes.size() && std::isdigit(bytes[pos]) && v <= UINT32_MAX) v = v * 10 + (bytes[pos++] - '0');
        if (pos == start || v > UINT32_MAX) return std::nullopt;
        return static_cast<std::uint32_t>(v);
    };
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') return std::nullopt;
    pos = 2;
    const auto w = read_uint(), h = read_uint(), maxval = read_uint();
    if (!w || !h || !maxval || *maxval != 255) return std::nullopt;
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) return std::nullopt;
    ++pos;  // single whitespace before the raster
    const std::size_t n = static_cast<std::size_t>(*w) * *h;
    if (bytes.size() - pos != n) return std::nullopt;
    return GrayImage{*w, *h, std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end())};
}

std::string snapshot_id_for(std::uint64_t event_seq) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap-%08llu", static_cast<unsigned long long>(event_seq));
    return buf;
}

bool is_valid_snapshot_id(const std::string& id) {
    constexpr std::string_view prefix = "snap-";
    if (id.size() < prefix.size() + 8 || id.size() > prefix.size() + 20 || id.rfind(prefix, 0) != 0) return false;
    for (std::size_t i = prefix.size(); i < id.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
    return true;
}

SnapshotStore::SnapshotStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string SnapshotStore::save(const DepthFrame& frame, const SegmentationConfig& cfg, std::uint64_t event_seq) {
    const std::string id = snapshot_id_for(event_seq);
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    const auto bytes = encode_pgm(render_grayscale(frame, cfg));
    std::ofstream out(dir_ / (id + ".pgm"), std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw LogIoError("cannot write snapshot " + id + " under " + dir_.string());
    return id;
}

std::optional<std::filesystem::path> SnapshotStore::path_for(const std::string& id) const {
    if (!is_valid_snapshot_id(id)) return std::nullopt;
    auto p = dir_ / (id + ".pgm");
    if (!std::filesystem::is_regular_file(p)) return std::nullopt;
    return p;
}

std::optional<std::vector<std::uint8_t>> SnapshotStore::load(const std::string& id) const {
    const auto p = path_for(id);
    if (!p) return std::nullopt;
    std::ifstream in(*p, std::ios::binary);
    if (!in) return std::nullopt;
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void SnapshotStore::clear() {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir_, ec)) return;
    for (const auto& entry : std::filesystem::directory_iterator(dir_, ec))
        if (entry.path().extension() == ".pgm") std::filesystem::remove(entry.path(), ec);
}

}  // namespace doorcount
