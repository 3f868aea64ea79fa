#include "ifta/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ifta {

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + r];
  }
  for (double& v : k) v /= sum;
  return k;
}

int mirror(int i, int n) {
  // Reflect-101 style mirroring: ... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

ImageGrid separable_blur(const ImageGrid& img, const std::vector<double>& k) {
  const int r = (static_cast<int>(k.size()) - 1) / 2;
  ImageGrid tmp = ImageGrid::zeros(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += k[i + r] * img.at(mirror(x + i, img.width), y);
      tmp.at(x, y) = s;
    }
  ImageGrid out = ImageGrid::zeros(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += k[i + r] * tmp.at(x, mirror(y + i, img.height));
      out.at(x, y) = s;
    }
  return out;
}

// 1D quadratic-fit peak offset from three samples, clamped to [-0.5, 0.5].
double parabola_offset(double fm, double f0, double fp) {
  const double denom = fm - 2.0 * f0 + fp;
  if (std::abs(denom) < 1e-12) return 0.0;
  return std::clamp(0.5 * (fm - fp) / denom, -0.5, 0.5);
}

}  // namespace

ImageGrid dog_filter(const ImageGrid& img, const DetectorConfig& cfg) {
  if (cfg.sigma1 < 0.5)
    throw std::invalid_argument("dog_filter: sigma1 must be >= 0.5 px");
  if (cfg.ratio <= 1.0)
    throw std::invalid_argument("dog_filter: ratio must be > 1");
  if (img.values.size() != static_cast<size_t>(img.width) * img.height)
    throw std::invalid_argument("dog_filter: inconsistent image dimensions");
  for (double v : img.values)
    if (!std::isfinite(v))
      throw std::invalid_argument("dog_filter: non-finite pixel value");

  const ImageGrid lo = separable_blur(img, gaussian_kernel(cfg.sigma1));
  const ImageGrid hi = separable_blur(img, gaussian_kernel(cfg.sigma1 * cfg.ratio));
  ImageGrid out = ImageGrid::zeros(img.width, img.height);
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = lo.values[i] - hi.values[i];
  return out;
}

std::vector<Detection> detect_features(const ImageGrid& filtered,
                                       const DetectorConfig& cfg, int frame) {
  const size_t n = filtered.values.size();
  std::vector<Detection> out;
  if (n == 0) return out;

  double mean = 0.0;
  for (double v : filtered.values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : filtered.values) var += (v - mean) * (v - mean);
  var /= n;
  const double thresh = mean + cfg.k_thresh * std::sqrt(var);

  for (int y = 1; y < filtered.height - 1; ++y) {
    for (int x = 1; x < filtered.width - 1; ++x) {
      const double v = filtered.at(x, y);
      if (v <= thresh) continue;
      bool strict_max = true;
      for (int dy = -1; dy <= 1 && strict_max; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (filtered.at(x + dx, y + dy) >= v) {
            strict_max = false;
            break;
          }
        }
      if (!strict_max) continue;

      Detection d;
      d.frame = frame;
      d.x = x + parabola_offset(filtered.at(x - 1, y), v, filtered.at(x + 1, y));
      d.y = y + parabola_offset(filtered.at(x, y - 1), v, filtered.at(x, y + 1));
      d.score = v;
      out.push_back(d);
    }
  }
  return out;
}

}  // namespace ifta
