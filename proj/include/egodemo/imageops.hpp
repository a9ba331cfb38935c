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

#include "egodemo/image.hpp"
#include "egodemo/rendering.hpp"
#include "egodemo/reprojection.hpp"

namespace egodemo {

// Fills invalid pixels by pull-push over a 2x pyramid down to 1x1, seeded by
// the valid pixels that touch a hole (8-neighbourhood). Valid pixels are left
// untouched, every output pixel is valid, and depth is passed through.
// Throws DataError when the frame has no valid pixel.
RgbdFrame hole_fill(const RgbdFrame& frame);

// Robot colour where the robot mask is set, scene colour elsewhere.
RgbImage naive_compose(const RgbImage& scene, const RenderedRobotFrame& robot);
RgbImage naive_compose(const RgbdFrame& scene, const RenderedRobotFrame& robot);

}  // namespace egodemo
