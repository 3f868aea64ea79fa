#include "ifta/geometry.hpp"

#include <stdexcept>

namespace ifta {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double angular_diff(double a, double b) { return wrap_angle(a - b); }

MeanResultant mean_resultant(std::span<const double> angles,
                             std::span<const double> weights) {
  if (angles.empty()) throw std::invalid_argument("mean_resultant: empty sample");
  if (!weights.empty() && weights.size() != angles.size())
    throw std::invalid_argument("mean_resultant: weight/angle size mismatch");

  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (size_t i = 0; i < angles.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w < 0.0) throw std::invalid_argument("mean_resultant: negative weight");
    sw += w;
    sx += w * std::cos(angles[i]);
    sy += w * std::sin(angles[i]);
  }
  if (sw <= 0.0)
    throw std::invalid_argument("mean_resultant: degenerate sample (zero total weight)");

  MeanResultant out;
  out.rbar = std::hypot(sx, sy) / sw;
  if (out.rbar > 1.0) out.rbar = 1.0;  // rounding guard
  out.degenerate = out.rbar < 1e-9;
  out.mu = out.degenerate ? 0.0 : std::atan2(sy, sx);
  return out;
}

}  // namespace ifta
