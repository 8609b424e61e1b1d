#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "coastcast/geometry.hpp"

namespace coastcast {

// POLYGON / MULTIPOLYGON well-known text. First ring of each polygon is the
// outer ring, the rest are holes. Unclosed rings are closed by appending the
// first vertex. Syntax errors carry the byte offset in the message.
std::vector<Polygon> parse_wkt(std::string_view text);

std::string to_wkt(const Polygon& poly);

// One POLYGON/MULTIPOLYGON per non-empty line.
VectorLayer read_wkt_layer(const std::string& path, int year);

std::string layer_to_wkt(const VectorLayer& layer);

} // namespace coastcast
