#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "coastcast/geometry.hpp"

namespace coastcast {

// ESRI .shp main-file reader, geometry only (.dbf/.shx are ignored).
//
// Layout (per the ESRI shapefile whitepaper):
//   header, 100 bytes:
//     0   int32 BE   file code 9994
//     24  int32 BE   file length in 16-bit words
//     28  int32 LE   version 1000
//     32  int32 LE   shape type (0 = null, 5 = polygon)
//     36  8 x f64 LE Xmin, Ymin, Xmax, Ymax, Zmin, Zmax, Mmin, Mmax
//   records:
//     int32 BE record number (1-based), int32 BE content length in words,
//     content: int32 LE shape type, 4 x f64 LE box, int32 LE NumParts,
//     int32 LE NumPoints, NumParts x int32 LE part start indices,
//     NumPoints x (f64, f64) LE points.
//
// Ring roles follow file-encoding orientation: clockwise rings open a new
// polygon, counter-clockwise rings become holes of the polygon opened last.
// Null records are skipped. All reads are bounds-checked; a short buffer
// raises truncated_record rather than reading past the end.
VectorLayer parse_shapefile(std::span<const unsigned char> bytes, int year = 0);

VectorLayer read_shapefile_layer(const std::string& path, int year);

} // namespace coastcast
