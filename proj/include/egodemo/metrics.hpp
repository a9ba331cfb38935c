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

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "egodemo/image.hpp"

namespace egodemo {

// Returned by psnr for identical inputs.
constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

// 10 log10(255^2 / MSE) with MSE over all pixels and channels jointly.
double psnr(const RgbImage& a, const RgbImage& b);
// Same, restricted to pixels where mask != 0. Throws if the mask is empty.
double psnr_masked(const RgbImage& a, const RgbImage& b, const MaskImage& mask);

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;

// Rec.601 luma of an 8-bit RGB image, unrounded.
FloatImage luma601(const RgbImage& image);

// Mean SSIM over every 11x11 window that lies fully inside the image
// (Gaussian weights, sigma 1.5, dynamic range 255).
double ssim(const RgbImage& a, const RgbImage& b);

struct FrameMetrics {
  double psnr = 0.0;
  double ssim = 0.0;
};

struct VideoMetrics {
  std::vector<FrameMetrics> frames;
  double mean_psnr = 0.0;  // +inf if every frame is identical
  double mean_ssim = 0.0;

  std::string to_json() const;
};

VideoMetrics video_metrics(std::span<const RgbImage> pred, std::span<const RgbImage> ref, int jobs = 1);

}  // namespace egodemo
