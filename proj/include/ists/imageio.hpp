#pragma once

#include <filesystem>

#include "ists/tensor.hpp"

namespace ists {

/// 8-bit RGB PNG.
void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

}  // namespace ists
