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

#include "egodemo/metrics.hpp"

#include <cmath>

#include <json.hpp>

#include "egodemo/error.hpp"
#include "egodemo/parallel.hpp"

namespace egodemo {

namespace {

void check_pair(const RgbImage& a, const RgbImage& b) {
  if (!a.same_shape(b) || a.channels() != 3) {
    throw InvalidArgument("image shapes differ: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                          "x" + std::to_string(a.channels()) + " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()) + "x" + std::to_string(b.channels()));
  }
}

double psnr_from_sse(double sse, double count) {
  if (sse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(255.0 * 255.0 / (sse / count));
}

std::vector<double> gaussian_kernel() {
  std::vector<double> k(kSsimWindow);
  double sum = 0.0;
  const int r = kSsimWindow / 2;
  for (int i = 0; i < kSsimWindow; ++i) {
    k[i] = std::exp(-static_cast<double>((i - r) * (i - r)) / (2.0 * kSsimSigma * kSsimSigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// 'Valid' separable filtering: output is (w - n + 1) x (h - n + 1).
std::vector<double> filter_valid(const std::vector<double>& img, int w, int h, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * img[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += k[j] * rows[static_cast<std::size_t>(y + j) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

}  // namespace

double psnr(const RgbImage& a, const RgbImage& b) {
  check_pair(a, b);
  double sse = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = static_cast<double>(a.data()[i]) - b.data()[i];
    sse += d * d;
  }
  return psnr_from_sse(sse, static_cast<double>(a.data().size()));
}

double psnr_masked(const RgbImage& a, const RgbImage& b, const MaskImage& mask) {
  check_pair(a, b);
  if (!mask.same_size(a)) throw InvalidArgument("mask size does not match images");
  double sse = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      if (!mask(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const double d = static_cast<double>(a(x, y, c)) - b(x, y, c);
        sse += d * d;
      }
      n += 3;
    }
  if (n == 0) throw InvalidArgument("psnr mask selects no pixels");
  return psnr_from_sse(sse, static_cast<double>(n));
}

FloatImage luma601(const RgbImage& image) {
  FloatImage out(image.width(), image.height(), 1);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      out(x, y) = 0.299 * image(x, y, 0) + 0.587 * image(x, y, 1) + 0.114 * image(x, y, 2);
  return out;
}

double ssim(const RgbImage& a, const RgbImage& b) {
  check_pair(a, b);
  const int w = a.width();
  const int h = a.height();
  if (w < kSsimWindow || h < kSsimWindow) {
    throw InvalidArgument("ssim needs images of at least " + std::to_string(kSsimWindow) + "x" +
                          std::to_string(kSsimWindow) + " pixels");
  }
  const auto x = luma601(a).data();
  const auto y = luma601(b).data();
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto k = gaussian_kernel();
  const auto mx = filter_valid(x, w, h, k);
  const auto my = filter_valid(y, w, h, k);
  const auto exx = filter_valid(xx, w, h, k);
  const auto eyy = filter_valid(yy, w, h, k);
  const auto exy = filter_valid(xy, w, h, k);
  const double c1 = (kSsimK1 * 255.0) * (kSsimK1 * 255.0);
  const double c2 = (kSsimK2 * 255.0) * (kSsimK2 * 255.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = exx[i] - mx[i] * mx[i];
    const double vy = eyy[i] - my[i] * my[i];
    const double cxy = exy[i] - mx[i] * my[i];
    sum += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cxy + c2)) /
           ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return sum / static_cast<double>(mx.size());
}

VideoMetrics video_metrics(std::span<const RgbImage> pred, std::span<const RgbImage> ref, int jobs) {
  if (pred.size() != ref.size()) {
    throw InvalidArgument("video lengths differ: " + std::to_string(pred.size()) + " vs " +
                          std::to_string(ref.size()));
  }
  if (pred.empty()) throw InvalidArgument("videos have no frames");
  VideoMetrics m;
  m.frames.resize(pred.size());
  parallel_for(pred.size(), jobs, [&](std::size_t t) {
    m.frames[t] = {psnr(pred[t], ref[t]), ssim(pred[t], ref[t])};
  });
  double ps = 0.0;
  double ss = 0.0;
  for (const auto& f : m.frames) {
    ps += f.psnr;
    ss += f.ssim;
  }
  m.mean_psnr = ps / static_cast<double>(m.frames.size());
  m.mean_ssim = ss / static_cast<double>(m.frames.size());
  return m;
}

std::string VideoMetrics::to_json() const {
  // JSON has no infinity; identical frames report psnr as the string "inf".
  auto number = [](double v) -> nlohmann::json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
  };
  nlohmann::json j;
  j["frames"] = frames.size();
  j["mean_psnr_db"] = number(mean_psnr);
  j["mean_ssim"] = mean_ssim;
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    per.push_back({{"frame", t}, {"psnr_db", number(frames[t].psnr)}, {"ssim", frames[t].ssim}});
  }
  j["per_frame"] = per;
  return j.dump(2) + "\n";
}

}  // namespace egodemo
