// Copyright 2026 The EgoDemo Authors
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

#pragma once

#include <filesystem>

#include "egodemo/image.hpp"

namespace egodemo {

// 8-bit RGB, 8-bit grey and 16-bit grey PNG files. Loading converts nothing:
// a file with a different colour type or bit depth is a DataError.
void write_png_rgb(const std::filesystem::path& path, const RgbImage& image);
void write_png_gray8(const std::filesystem::path& path, const Image<std::uint8_t>& image);
void write_png_gray16(const std::filesystem::path& path, const DepthImage& image);

RgbImage read_png_rgb(const std::filesystem::path& path);
Image<std::uint8_t> read_png_gray8(const std::filesystem::path& path);
DepthImage read_png_gray16(const std::filesystem::path& path);

// Masks are stored as 0/255 and loaded back as 0/1.
void write_png_mask(const std::filesystem::path& path, const MaskImage& mask);
MaskImage read_png_mask(const std::filesystem::path& path);

}  // namespace egodemo
