#pragma once

#include <string>
#include <string_view>

namespace cyclicwave {

/// %.17g, with "inf"/"-inf"/"nan" spelled out.
std::string fmt17(double x);

/// Writes to `path` via a sibling temporary and rename, so readers never see a partial file.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace cyclicwave
