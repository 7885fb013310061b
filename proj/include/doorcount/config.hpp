#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "doorcount/depth_pipeline.hpp"
#include "doorcount/scene_synth.hpp"

namespace doorcount {

// Value parsers shared by the command line and the key = value config file.
// All throw ConfigError with a message naming the offending text.

/// "x,y,w,h" in pixels.
Rect parse_rect(const std::string& text);
/// "horizontal" or "vertical".
CrossingAxis parse_axis(const std::string& text);
std::string to_string(CrossingAxis axis);
/// "HOST:PORT"; the port may be 0.
std::pair<std::string, int> parse_listen(const std::string& text);

/// Default equal bands unless all three rectangles are given. Validated
/// against `dims`.
RoiLayout make_layout(FrameDims dims, CrossingAxis axis, const std::optional<Rect>& roi1,
                      const std::optional<Rect>& roi2, const std::optional<Rect>& roi3);

}  // namespace doorcount
