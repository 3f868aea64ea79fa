#pragma once

#include <vector>

#include "ifta/geometry.hpp"
#include "ifta/image.hpp"

namespace ifta {

struct DetectorConfig {
  double sigma1 = 2.0;    // inner Gaussian, pixels
  double ratio = 1.1;     // sigma2 / sigma1
  double k_thresh = 3.0;  // threshold = mean + k * std of the filtered image
};

// Difference-of-Gaussians bandpass: G(sigma1) * img - G(sigma1*ratio) * img.
// Mirror padding at the borders; kernels truncated at 4 sigma and
// renormalized to unit sum. Requires sigma1 >= 0.5 and finite pixels.
ImageGrid dog_filter(const ImageGrid& img, const DetectorConfig& cfg);

// Strict 8-neighborhood local maxima of a filtered image above
// mean + k_thresh * std, refined to sub-pixel by a 3x3 quadratic fit.
std::vector<Detection> detect_features(const ImageGrid& filtered,
                                       const DetectorConfig& cfg,
                                       int frame = 0);

}  // namespace ifta
