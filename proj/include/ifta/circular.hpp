#pragma once

#include <cstdint>
#include <span>
#include <vector>

// von Mises machinery: density evaluation, concentration estimation,
// circular k-means, and mixture fitting with component-count selection.

namespace ifta {

// log I0(kappa), safe up to the kappa cap (no overflow).
double log_bessel_i0(double kappa);

// I1(kappa) / I0(kappa), the mean resultant length of vM(mu, kappa).
double bessel_i1_over_i0(double kappa);

constexpr double kKappaCap = 500.0;

// Closed-form concentration estimate from a mean resultant length
// (Banerjee approximation), capped at kKappaCap.
double kappa_from_rbar(double rbar);

struct VonMisesComponent {
  double mu = 0.0;
  double kappa = 0.0;
  double weight = 1.0;
};

// log density of vM(mu, kappa) at theta.
double vm_log_density(double theta, const VonMisesComponent& c);

struct KMeansResult {
  std::vector<double> centers;  // mean directions
  std::vector<int> labels;      // per-angle center index
  double dispersion = 0.0;      // sum of 1 - cos(theta - center)
};

// Lloyd-style circular k-means maximizing cos(theta - mu); best of 5
// seeded restarts. Requires k >= 1 and at least k angles.
KMeansResult circular_kmeans(std::span<const double> angles, int k,
                             uint64_t seed);

struct MixtureFit {
  std::vector<VonMisesComponent> components;
  double loglik = 0.0;
  int n_annihilated = 0;       // components dropped below the weight floor
  bool uniform_fallback = false;  // everything annihilated, kappa=0 stand-in
  // Per-iteration log-likelihood of the winning run; annihilation events
  // reset the trace segment (discontinuity allowed there).
  std::vector<std::vector<double>> loglik_segments;
};

// Fit a von Mises mixture with automatic component count in [1, k_max].
// Each candidate count is initialized from circular_kmeans and fit by EM
// with weight-floor annihilation (w_min); the count is chosen by a
// parsimony score. Requires sample size >= 2 * k_max.
MixtureFit vm_mixture_em(std::span<const double> angles, int k_max,
                         double w_min = 0.02, uint64_t seed = 0);

// Per-angle responsibilities under a fitted mixture; rows sum to 1.
std::vector<std::vector<double>> vm_responsibilities(
    std::span<const double> angles,
    std::span<const VonMisesComponent> components);

// Index of the highest-posterior component for one angle.
int vm_best_component(double theta,
                      std::span<const VonMisesComponent> components);

}  // namespace ifta
