#include "doorcount/config.hpp"

#include <charconv>
#include <vector>

namespace doorcount {

namespace {

std::uint32_t parse_u32(std::string_view s, const std::string& context) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    std::uint32_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("expected an unsigned integer in '" + context + "'");
    return v;
}

}  // namespace

Rect parse_rect(const std::string& text) {
    std::vector<std::uint32_t> v;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        v.push_back(parse_u32(rest.substr(0, comma), text));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (v.size() != 4) throw ConfigError("ROI must be x,y,w,h, got '" + text + "'");
    return {v[0], v[1], v[2], v[3]};
}

CrossingAxis parse_axis(const std::string& text) {
    if (text == "horizontal") return CrossingAxis::horizontal;
    if (text == "vertical") return CrossingAxis::vertical;
    throw ConfigError("crossing axis must be horizontal or vertical, got '" + text + "'");
}

std::string to_string(CrossingAxis axis) { return axis == CrossingAxis::horizontal ? "horizontal" : "vertical"; }

std::pair<std::string, int> parse_listen(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0) throw ConfigError("listen address must be HOST:PORT, got '" + text + "'");
    const std::uint32_t port = parse_u32(std::string_view(text).substr(colon + 1), text);
    if (port > 65535) throw ConfigError("port out of range in '" + text + "'");
    return {text.substr(0, colon), static_cast<int>(port)};
}

RoiLayout make_layout(FrameDims dims, CrossingAxis axis, const std::optional<Rect>& roi1,
                      const std::optional<Rect>& roi2, const std::optional<Rect>& roi3) {
    const int given = int(roi1.has_value()) + int(roi2.has_value()) + int(roi3.has_value());
    RoiLayout layout;
    if (given == 0) {
        layout = RoiLayout::bands(dims.width, dims.height, axis);
    } else if (given == 3) {
        layout.rois = {*roi1, *roi2, *roi3};
        layout.crossing_axis = axis;
    } else {
        throw ConfigError("give all three of roi1, roi2, roi3 or none");
    }
    layout.validate(dims.width, dims.height);
    return layout;
}

}  // namespace doorcount
