#pragma once

#include <string>

#include "core/raster.hpp"

namespace sdgf {

// PFM, little-endian scale header, bottom-up row order.
//   1 channel : "Pf", dims line "W H"
//   3 channels: "PF", dims line "W H", interleaved RGB
//   N channels: "Pf", dims line "W H N", N planes stored plane-major
// The N-plane form is the stack format used for offset fields and volume dumps.
void write_pfm(const std::string& path, const ImageGrid& grid);
ImageGrid read_pfm(const std::string& path);

// 16-bit grayscale PNG, stored value = meters * 256, 0 = invalid
// (KITTI depth-completion convention).
void write_depth_png(const std::string& path, const DepthMap& depth);
DepthMap read_depth_png(const std::string& path);

// Images: floats in [0,1] stored as 16-bit gray or RGB PNG. Reading accepts
// 8- or 16-bit gray/RGB and rescales to [0,1]; alpha is dropped.
void write_image_png(const std::string& path, const ImageGrid& image);
ImageGrid read_image_png(const std::string& path);

bool file_exists(const std::string& path);

}  // namespace sdgf
