#include "ifta/circular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ifta/geometry.hpp"

namespace ifta {

namespace {

// I0 and I1 by direct power series; terms stay within double range for
// kappa <= kKappaCap (I0(500) ~ 1e215).
void bessel_i0_i1(double x, double* i0, double* i1) {
  const double q = 0.25 * x * x;
  double t0 = 1.0;  // (q^m) / (m!)^2
  double s0 = 1.0;
  double t1 = 0.5 * x;  // (x/2)^(2m+1) / (m! (m+1)!)
  double s1 = t1;
  for (int m = 1; m < 1200; ++m) {
    t0 *= q / (static_cast<double>(m) * m);
    t1 *= q / (static_cast<double>(m) * (m + 1));
    s0 += t0;
    s1 += t1;
    if (t0 < s0 * 1e-18 && t1 < s1 * 1e-18) break;
  }
  *i0 = s0;
  *i1 = s1;
}

}  // namespace

double log_bessel_i0(double kappa) {
  if (kappa < 0.0) kappa = -kappa;
  if (kappa > kKappaCap) kappa = kKappaCap;
  if (kappa < 40.0) {
    double i0, i1;
    bessel_i0_i1(kappa, &i0, &i1);
    return std::log(i0);
  }
  // Asymptotic: I0(x) ~ e^x / sqrt(2 pi x) * (1 + 1/(8x) + 9/(128 x^2)).
  const double inv = 1.0 / kappa;
  const double corr = 1.0 + 0.125 * inv + (9.0 / 128.0) * inv * inv;
  return kappa - 0.5 * std::log(2.0 * kPi * kappa) + std::log(corr);
}

double bessel_i1_over_i0(double kappa) {
  if (kappa <= 0.0) return 0.0;
  if (kappa > kKappaCap) kappa = kKappaCap;
  if (kappa < 40.0) {
    double i0, i1;
    bessel_i0_i1(kappa, &i0, &i1);
    return i1 / i0;
  }
  const double inv = 1.0 / kappa;
  return 1.0 - 0.5 * inv - 0.125 * inv * inv - 0.125 * inv * inv * inv;
}

double kappa_from_rbar(double rbar) {
  if (rbar <= 0.0) return 0.0;
  if (rbar >= 1.0) return kKappaCap;
  const double r2 = rbar * rbar;
  const double k = rbar * (2.0 - r2) / (1.0 - r2);
  return std::min(k, kKappaCap);
}

double vm_log_density(double theta, const VonMisesComponent& c) {
  return c.kappa * std::cos(theta - c.mu) - std::log(2.0 * kPi) -
         log_bessel_i0(c.kappa);
}

KMeansResult circular_kmeans(std::span<const double> angles, int k,
                             uint64_t seed) {
  const int n = static_cast<int>(angles.size());
  if (k < 1) throw std::invalid_argument("circular_kmeans: k must be >= 1");
  if (n < k) throw std::invalid_argument("circular_kmeans: fewer angles than k");

  KMeansResult best;
  best.dispersion = std::numeric_limits<double>::infinity();

  constexpr int kRestarts = 5;
  for (int restart = 0; restart < kRestarts; ++restart) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (restart + 1));
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> centers(k);
    for (int c = 0; c < k; ++c) centers[c] = angles[order[c]];

    std::vector<int> labels(n, -1);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        double bestcos = -2.0;
        for (int c = 0; c < k; ++c) {
          const double v = std::cos(angles[i] - centers[c]);
          if (v > bestcos + 1e-15) {
            bestcos = v;
            arg = c;
          }
        }
        if (labels[i] != arg) {
          labels[i] = arg;
          changed = true;
        }
      }
      if (!changed && iter > 0) break;

      for (int c = 0; c < k; ++c) {
        double sx = 0.0, sy = 0.0;
        int cnt = 0;
        for (int i = 0; i < n; ++i) {
          if (labels[i] != c) continue;
          sx += std::cos(angles[i]);
          sy += std::sin(angles[i]);
          ++cnt;
        }
        if (cnt == 0) {
          // Re-seed the empty center at the worst-fit angle.
          int worst = 0;
          double worstcos = 2.0;
          for (int i = 0; i < n; ++i) {
            const double v = std::cos(angles[i] - centers[labels[i]]);
            if (v < worstcos) {
              worstcos = v;
              worst = i;
            }
          }
          centers[c] = angles[worst];
        } else if (sx != 0.0 || sy != 0.0) {
          centers[c] = std::atan2(sy, sx);
        }
      }
    }

    double disp = 0.0;
    for (int i = 0; i < n; ++i) disp += 1.0 - std::cos(angles[i] - centers[labels[i]]);
    if (disp < best.dispersion) {
      best.centers = centers;
      best.labels = labels;
      best.dispersion = disp;
    }
  }
  return best;
}

namespace {

// Maximum-likelihood concentration: solves I1(k)/I0(k) = rbar by Newton
// from the closed-form initial guess. The closed form alone is a few
// percent off, which is enough to break EM monotonicity.
double kappa_ml(double rbar) {
  if (rbar <= 0.0) return 0.0;
  if (rbar >= bessel_i1_over_i0(kKappaCap)) return kKappaCap;
  double k = std::max(kappa_from_rbar(rbar), 1e-8);
  for (int it = 0; it < 25; ++it) {
    const double a = bessel_i1_over_i0(k);
    const double da = 1.0 - a / k - a * a;
    if (da <= 0.0) break;
    const double step = (a - rbar) / da;
    k -= step;
    if (k <= 0.0) k = 1e-8;
    if (k >= kKappaCap) return kKappaCap;
    if (std::abs(step) < 1e-12 * (1.0 + k)) break;
  }
  return std::min(k, kKappaCap);
}

struct EmRun {
  std::vector<VonMisesComponent> comps;
  double loglik = 0.0;
  int n_annihilated = 0;
  std::vector<std::vector<double>> segments;
};

// EM with weight-floor annihilation for a fixed initial component count.
EmRun run_em(std::span<const double> angles,
             std::vector<VonMisesComponent> comps, double w_min) {
  const int n = static_cast<int>(angles.size());
  std::vector<double> ct(n), st(n);
  for (int i = 0; i < n; ++i) {
    ct[i] = std::cos(angles[i]);
    st[i] = std::sin(angles[i]);
  }

  EmRun run;
  run.segments.emplace_back();
  double prev = -std::numeric_limits<double>::infinity();
  std::vector<double> logw, cmu, smu, logi0;
  std::vector<double> lp;

  for (int iter = 0; iter < 500; ++iter) {
    const int k = static_cast<int>(comps.size());
    logw.resize(k);
    cmu.resize(k);
    smu.resize(k);
    logi0.resize(k);
    for (int c = 0; c < k; ++c) {
      logw[c] = std::log(std::max(comps[c].weight, 1e-300));
      cmu[c] = std::cos(comps[c].mu);
      smu[c] = std::sin(comps[c].mu);
      logi0[c] = log_bessel_i0(comps[c].kappa);
    }

    // E step: responsibilities and log-likelihood.
    std::vector<double> S(k, 0.0), Sx(k, 0.0), Sy(k, 0.0);
    double loglik = 0.0;
    lp.resize(k);
    for (int i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        lp[c] = logw[c] + comps[c].kappa * (ct[i] * cmu[c] + st[i] * smu[c]) -
                logi0[c];
        mx = std::max(mx, lp[c]);
      }
      double z = 0.0;
      for (int c = 0; c < k; ++c) {
        lp[c] = std::exp(lp[c] - mx);
        z += lp[c];
      }
      loglik += mx + std::log(z);
      for (int c = 0; c < k; ++c) {
        const double r = lp[c] / z;
        S[c] += r;
        Sx[c] += r * ct[i];
        Sy[c] += r * st[i];
      }
    }
    loglik -= n * std::log(2.0 * kPi);
    run.segments.back().push_back(loglik);
    run.loglik = loglik;

    const bool converged =
        iter > 0 && (loglik - prev) / n < 1e-6;
    prev = loglik;

    // M step.
    std::vector<VonMisesComponent> next;
    bool annihilated = false;
    for (int c = 0; c < k; ++c) {
      VonMisesComponent nc;
      nc.weight = S[c] / n;
      if (nc.weight < w_min) {
        annihilated = true;
        ++run.n_annihilated;
        continue;
      }
      const double rlen = std::hypot(Sx[c], Sy[c]);
      nc.mu = rlen > 0.0 ? std::atan2(Sy[c], Sx[c]) : comps[c].mu;
      nc.kappa = kappa_ml(S[c] > 0.0 ? rlen / S[c] : 0.0);
      next.push_back(nc);
    }
    if (next.empty()) {
      run.comps.clear();
      return run;  // caller installs the uniform fallback
    }
    double wsum = 0.0;
    for (const auto& c : next) wsum += c.weight;
    for (auto& c : next) c.weight /= wsum;
    comps = std::move(next);

    if (annihilated) {
      // Log-likelihood may jump across an annihilation; open a new
      // monotone segment.
      run.segments.emplace_back();
      prev = -std::numeric_limits<double>::infinity();
      continue;
    }
    if (converged) break;
  }
  run.comps = std::move(comps);
  return run;
}

// A candidate minority component found by a circular scan statistic.
struct SpikeSeed {
  double mu;
  double kappa;
  double weight;
};

// Densest circular arc at a few widths, scored by excess count over the
// uniform expectation. Plain k-means initialization misses a concentrated
// cluster that is a small minority of the data, so each significant arc
// becomes an extra starting component (mean of the arc's members, a
// concentration matched to the arc width, and a weight from the excess).
// Arcs that do not clear a 3-sigma Poisson bar yield nothing, so clustered
// or near-uniform data costs no extra EM runs.
std::vector<SpikeSeed> scan_seeds(std::span<const double> angles,
                                  double w_min) {
  const int n = static_cast<int>(angles.size());
  std::vector<double> sorted(angles.begin(), angles.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<SpikeSeed> seeds;
  for (const double width : {0.25, 0.5, 1.0}) {
    const double expected = n * width / (2.0 * kPi);
    int best_i = -1, best_cnt = 0, j = 0;
    for (int i = 0; i < n; ++i) {
      if (j < i) j = i;
      // j runs over the unwrapped circle; index modulo n.
      while (j - i < n &&
             sorted[j % n] + (j >= n ? 2.0 * kPi : 0.0) <= sorted[i] + width)
        ++j;
      if (j - i > best_cnt) {
        best_cnt = j - i;
        best_i = i;
      }
    }
    const double excess = best_cnt - expected;
    if (best_i < 0 || excess < 3.0 * std::sqrt(expected + 1.0)) continue;

    double sx = 0.0, sy = 0.0;
    for (int k = best_i; k < best_i + best_cnt; ++k) {
      sx += std::cos(sorted[k % n]);
      sy += std::sin(sorted[k % n]);
    }
    const double mu = std::atan2(sy, sx);
    // Concentration whose spread matches the arc width (sd ~ width / 2).
    const double kappa = 4.0 / (width * width);
    const double weight =
        std::clamp(excess / n, 2.0 * w_min, 0.25);
    seeds.push_back({mu, kappa, weight});
  }
  return seeds;
}

}  // namespace

MixtureFit vm_mixture_em(std::span<const double> angles, int k_max,
                         double w_min, uint64_t seed) {
  const int n = static_cast<int>(angles.size());
  if (k_max < 1) throw std::invalid_argument("vm_mixture_em: k_max must be >= 1");
  if (n < 2 * k_max)
    throw std::invalid_argument("vm_mixture_em: sample too small for k_max");

  MixtureFit best;
  double best_score = std::numeric_limits<double>::infinity();
  const double logn = std::log(static_cast<double>(n));

  // Message-length-style parsimony score: each component pays for its two
  // shape parameters at the precision its own effective sample size
  // supports, plus the mixing proportions. Unlike a flat per-component
  // penalty this keeps a small but sharply concentrated component
  // affordable while still collapsing near-uniform data to one component.
  const auto score_of = [&](const EmRun& run) {
    double p = 0.0;
    for (const auto& c : run.comps)
      p += std::log(std::max(n * c.weight, 1.0));
    p += 0.5 * static_cast<double>(run.comps.size()) * logn;
    return -run.loglik + p;
  };
  const auto consider = [&](EmRun run) {
    if (run.comps.empty()) return;
    const double score = score_of(run);
    if (score < best_score - 1e-12) {
      best_score = score;
      best.components = std::move(run.comps);
      best.loglik = run.loglik;
      best.n_annihilated = run.n_annihilated;
      best.loglik_segments = std::move(run.segments);
      best.uniform_fallback = false;
    }
  };

  const std::vector<SpikeSeed> spike_seeds = scan_seeds(angles, w_min);
  for (int k = 1; k <= k_max; ++k) {
    const KMeansResult km = circular_kmeans(angles, k, seed);
    std::vector<VonMisesComponent> init(k);
    for (int c = 0; c < k; ++c) {
      double sx = 0.0, sy = 0.0;
      int cnt = 0;
      for (int i = 0; i < n; ++i) {
        if (km.labels[i] != c) continue;
        sx += std::cos(angles[i]);
        sy += std::sin(angles[i]);
        ++cnt;
      }
      init[c].mu = km.centers[c];
      init[c].weight = std::max(1, cnt) / static_cast<double>(n);
      init[c].kappa = cnt > 0 ? kappa_from_rbar(std::hypot(sx, sy) / cnt) : 0.0;
    }
    double wsum = 0.0;
    for (const auto& c : init) wsum += c.weight;
    for (auto& c : init) c.weight /= wsum;

    consider(run_em(angles, init, w_min));

    // Same start plus one concentrated candidate per significant arc, so a
    // minority cluster hiding inside a broad background can be found. The
    // candidate's start concentration matters: too wide and it melts into
    // the background before E-steps can focus it, too narrow and it starves
    // below the annihilation floor.
    if (static_cast<int>(init.size()) < k_max &&
        n >= 2 * (static_cast<int>(init.size()) + 1)) {
      for (const SpikeSeed& s : spike_seeds) {
        std::vector<VonMisesComponent> with_spike = init;
        for (auto& c : with_spike) c.weight *= 1.0 - s.weight;
        with_spike.push_back({s.mu, s.kappa, s.weight});
        consider(run_em(angles, std::move(with_spike), w_min));
      }
    }
  }

  if (best.components.empty()) {
    best.components.push_back({0.0, 0.0, 1.0});
    best.uniform_fallback = true;
  }
  return best;
}

std::vector<std::vector<double>> vm_responsibilities(
    std::span<const double> angles,
    std::span<const VonMisesComponent> components) {
  const int n = static_cast<int>(angles.size());
  const int k = static_cast<int>(components.size());
  std::vector<std::vector<double>> out(n, std::vector<double>(k));
  std::vector<double> lp(k);
  for (int i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      lp[c] = std::log(std::max(components[c].weight, 1e-300)) +
              vm_log_density(angles[i], components[c]);
      mx = std::max(mx, lp[c]);
    }
    double z = 0.0;
    for (int c = 0; c < k; ++c) {
      out[i][c] = std::exp(lp[c] - mx);
      z += out[i][c];
    }
    for (int c = 0; c < k; ++c) out[i][c] /= z;
  }
  return out;
}

int vm_best_component(double theta,
                      std::span<const VonMisesComponent> components) {
  int arg = 0;
  double bestlp = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(components.size()); ++c) {
    const double lp = std::log(std::max(components[c].weight, 1e-300)) +
                      vm_log_density(theta, components[c]);
    if (lp > bestlp + 1e-15) {
      bestlp = lp;
      arg = c;
    }
  }
  return arg;
}

}  // namespace ifta
