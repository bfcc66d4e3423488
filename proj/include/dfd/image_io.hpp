// Copyright 2026 The dfd Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DFD_IMAGE_IO_HPP_
#define DFD_IMAGE_IO_HPP_

#include <filesystem>

#include "dfd/image.hpp"

namespace dfd {

// PFM: "PF" (3 channels) or "Pf" (1 channel), little-endian float32
// (scale -1.0), scanlines stored bottom-to-top. Values are rounded to
// float32 on write.
void write_pfm(const std::filesystem::path& path, const ImageBuffer& image);
void write_pfm(const std::filesystem::path& path, const DepthMap& depth);
ImageBuffer read_pfm_image(const std::filesystem::path& path);
DepthMap read_pfm_depth(const std::filesystem::path& path);

// 16-bit grayscale PNG holding depth in millimeters. Depths are rounded to
// the nearest millimeter and saturate at 65535; 0 stays invalid.
void write_png16_depth(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_png16_depth(const std::filesystem::path& path);

// 8- or 16-bit PNG assumed sRGB encoded; returns linear intensities in [0,1].
ImageBuffer read_png_image_linear(const std::filesystem::path& path);

/// Depth from .pfm (meters) or .png (16-bit millimeters), chosen by extension.
DepthMap read_depth(const std::filesystem::path& path);
/// Image from .pfm (linear) or .png (sRGB, linearized), chosen by extension.
ImageBuffer read_image(const std::filesystem::path& path);

double srgb_to_linear(double v);

}  // namespace dfd

#endif  // DFD_IMAGE_IO_HPP_
