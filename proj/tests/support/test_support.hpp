#pragma once

#include <string>

#include "routepack/network.hpp"
#include "routepack/packing.hpp"
#include "routepack/raster.hpp"

namespace routepack::test {

std::string data_path(const std::string& name);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

RouteNetwork load_network(const std::string& name);

// 1200x800 canvas with 20 px padding, the CLI default.
Viewport default_viewport(const RouteNetwork& net);

// Empty string when the document is well-formed XML, else expat's message.
std::string xml_error(const std::string& document);

// Set ROUTEPACK_UPDATE_GOLDENS=1 to rewrite golden files instead of comparing.
bool update_goldens();

// Union of a few random discs, rectangles and thick strokes on a 64x64 canvas.
BinaryImage random_blob(unsigned seed);

// T-junction of three 1 px branches meeting at (10, 10).
BinaryImage t_junction();

}  // namespace routepack::test
