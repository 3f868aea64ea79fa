#pragma once

#include <string>
#include <vector>

namespace ifta {

// Row-major grayscale image with continuous intensities.
struct ImageGrid {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // size width * height

  double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }

  static ImageGrid zeros(int w, int h) {
    return ImageGrid{w, h, std::vector<double>(static_cast<size_t>(w) * h, 0.0)};
  }
};

// Binary PGM (P5), maxval 255 or 65535 (16-bit stored big-endian).
ImageGrid read_pgm(const std::string& path);
void write_pgm(const std::string& path, const ImageGrid& img, int maxval = 255);

}  // namespace ifta
