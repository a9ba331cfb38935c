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

#include "egodemo/imageops.hpp"

#include <algorithm>
#include <cmath>

#include "egodemo/error.hpp"

namespace egodemo {

namespace {

struct Level {
  int w = 0;
  int h = 0;
  std::vector<double> color;   // 3 per pixel, normalised average
  std::vector<double> weight;  // clamped to [0, 1]
};

Level pull(const Level& fine) {
  Level c;
  c.w = (fine.w + 1) / 2;
  c.h = (fine.h + 1) / 2;
  c.color.assign(static_cast<std::size_t>(c.w) * c.h * 3, 0.0);
  c.weight.assign(static_cast<std::size_t>(c.w) * c.h, 0.0);
  for (int y = 0; y < c.h; ++y) {
    for (int x = 0; x < c.w; ++x) {
      double wsum = 0.0;
      double acc[3] = {0.0, 0.0, 0.0};
      for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
          const int fx = 2 * x + i;
          const int fy = 2 * y + j;
          if (fx >= fine.w || fy >= fine.h) continue;
          const std::size_t k = static_cast<std::size_t>(fy) * fine.w + fx;
          const double w = fine.weight[k];
          if (w <= 0.0) continue;
          wsum += w;
          for (int ch = 0; ch < 3; ++ch) acc[ch] += w * fine.color[3 * k + ch];
        }
      }
      const std::size_t k = static_cast<std::size_t>(y) * c.w + x;
      if (wsum > 0.0) {
        for (int ch = 0; ch < 3; ++ch) c.color[3 * k + ch] = acc[ch] / wsum;
      }
      c.weight[k] = std::min(1.0, wsum);
    }
  }
  return c;
}

// Bilinear sample of a fully populated coarse level at fine pixel (x, y).
void upsample(const Level& coarse, int x, int y, double out[3]) {
  const double cx = std::clamp((x - 0.5) * 0.5, 0.0, static_cast<double>(coarse.w - 1));
  const double cy = std::clamp((y - 0.5) * 0.5, 0.0, static_cast<double>(coarse.h - 1));
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const int x1 = std::min(x0 + 1, coarse.w - 1);
  const int y1 = std::min(y0 + 1, coarse.h - 1);
  const double a = cx - x0;
  const double b = cy - y0;
  auto at = [&](int xx, int yy, int ch) { return coarse.color[3 * (static_cast<std::size_t>(yy) * coarse.w + xx) + ch]; };
  for (int ch = 0; ch < 3; ++ch) {
    out[ch] = (1.0 - b) * ((1.0 - a) * at(x0, y0, ch) + a * at(x1, y0, ch)) +
              b * ((1.0 - a) * at(x0, y1, ch) + a * at(x1, y1, ch));
  }
}

void push(Level& fine, const Level& coarse) {
  for (int y = 0; y < fine.h; ++y) {
    for (int x = 0; x < fine.w; ++x) {
      const std::size_t k = static_cast<std::size_t>(y) * fine.w + x;
      const double w = fine.weight[k];
      if (w >= 1.0) continue;
      double up[3];
      upsample(coarse, x, y, up);
      for (int ch = 0; ch < 3; ++ch) fine.color[3 * k + ch] = w * fine.color[3 * k + ch] + (1.0 - w) * up[ch];
      fine.weight[k] = 1.0;
    }
  }
}

}  // namespace

RgbdFrame hole_fill(const RgbdFrame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  if (!frame.validity.same_size(frame.rgb) || frame.rgb.channels() != 3) {
    throw InvalidArgument("hole_fill needs a 3-channel rgb image with matching validity");
  }
  if (frame.valid_count() == 0) throw DataError("hole_fill: frame has no valid pixels to propagate");
  if (frame.valid_count() == frame.rgb.pixel_count()) return frame;

  Level base;
  base.w = w;
  base.h = h;
  base.color.assign(static_cast<std::size_t>(w) * h * 3, 0.0);
  base.weight.assign(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!frame.validity(x, y)) continue;
      bool touches_hole = false;
      for (int dy = -1; dy <= 1 && !touches_hole; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (frame.validity.contains(x + dx, y + dy) && !frame.validity(x + dx, y + dy)) {
            touches_hole = true;
            break;
          }
        }
      }
      if (!touches_hole) continue;
      const std::size_t k = static_cast<std::size_t>(y) * w + x;
      base.weight[k] = 1.0;
      for (int ch = 0; ch < 3; ++ch) base.color[3 * k + ch] = frame.rgb(x, y, ch);
    }
  }

  std::vector<Level> pyramid;
  pyramid.push_back(std::move(base));
  while (pyramid.back().w > 1 || pyramid.back().h > 1) pyramid.push_back(pull(pyramid.back()));
  for (std::size_t i = pyramid.size() - 1; i-- > 0;) push(pyramid[i], pyramid[i + 1]);

  RgbdFrame out = frame;
  const Level& top = pyramid.front();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (frame.validity(x, y)) continue;
      const std::size_t k = static_cast<std::size_t>(y) * w + x;
      for (int ch = 0; ch < 3; ++ch) {
        out.rgb(x, y, ch) = static_cast<std::uint8_t>(std::lround(std::clamp(top.color[3 * k + ch], 0.0, 255.0)));
      }
      out.validity(x, y) = 1;
    }
  }
  return out;
}

RgbImage naive_compose(const RgbImage& scene, const RenderedRobotFrame& robot) {
  if (!scene.same_size(robot.rgb) || !robot.mask.same_size(robot.rgb) || scene.channels() != 3) {
    throw InvalidArgument("scene " + std::to_string(scene.width()) + "x" + std::to_string(scene.height()) +
                          " and robot " + std::to_string(robot.rgb.width()) + "x" +
                          std::to_string(robot.rgb.height()) + " frames differ in size");
  }
  RgbImage out = scene;
  for (int y = 0; y < scene.height(); ++y) {
    for (int x = 0; x < scene.width(); ++x) {
      if (!robot.mask(x, y)) continue;
      for (int c = 0; c < 3; ++c) out(x, y, c) = robot.rgb(x, y, c);
    }
  }
  return out;
}

RgbImage naive_compose(const RgbdFrame& scene, const RenderedRobotFrame& robot) {
  return naive_compose(scene.rgb, robot);
}

}  // namespace egodemo
