#include "sgps/noise_est.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "sgps/error.hpp"
#include "sgps/simd/kernels.hpp"

namespace sgps {
namespace {

struct PatchGrid {
  std::size_t width = 0;   // patch extent along columns
  std::size_t height = 0;  // patch extent along rows
  std::size_t across = 0;
  std::size_t down = 0;

  std::size_t count() const { return across * down; }
  std::size_t dimension() const { return width * height; }
};

PatchGrid layout(const Signal& x, const PatchConfig& cfg) {
  const std::size_t p = cfg.patch_size;
  if (p == 0 || cfg.stride == 0) throw ArgumentError("patch size and stride must be >= 1");
  const Shape& s = x.shape();
  if (s.numel() == 0) throw ArgumentError("cannot extract patches from an empty signal");
  PatchGrid g;
  if (s.is_grid()) {
    if (s.rows() < p || s.cols() < p) {
      throw ArgumentError("image " + s.to_string() + " is smaller than patch size " + std::to_string(p));
    }
    g.width = p;
    g.height = p;
    g.across = (s.cols() - p) / cfg.stride + 1;
    g.down = (s.rows() - p) / cfg.stride + 1;
  } else {
    if (s.rows() < p) {
      throw ArgumentError("signal of length " + s.to_string() + " is shorter than patch size " + std::to_string(p));
    }
    g.width = p;
    g.height = 1;
    g.across = (s.rows() - p) / cfg.stride + 1;
    g.down = 1;
  }
  return g;
}

void copy_patch(const Signal& x, const PatchGrid& g, const PatchConfig& cfg, std::size_t index, double* out) {
  const std::size_t r0 = (index / g.across) * cfg.stride;
  const std::size_t c0 = (index % g.across) * cfg.stride;
  const std::size_t cols = x.shape().is_grid() ? x.shape().cols() : x.size();
  for (std::size_t i = 0; i < g.height; ++i) {
    const double* src = x.values().data() + (r0 + i) * cols + c0;
    std::copy(src, src + g.width, out + i * g.width);
  }
}

double median_of_sorted_tail(const std::vector<double>& desc, std::size_t start) {
  const std::size_t len = desc.size() - start;
  const std::size_t mid = start + len / 2;
  if (len % 2 == 1) return desc[mid];
  return 0.5 * (desc[mid - 1] + desc[mid]);
}

}  // namespace

std::vector<Signal> extract_patches(const Signal& x, const PatchConfig& cfg) {
  const PatchGrid g = layout(x, cfg);
  const Shape patch_shape = x.shape().is_grid() ? Shape::grid(g.height, g.width) : Shape::vector(g.width);
  std::vector<Signal> patches;
  patches.reserve(g.count());
  for (std::size_t i = 0; i < g.count(); ++i) {
    Signal patch(patch_shape);
    copy_patch(x, g, cfg, i, patch.values().data());
    patches.push_back(std::move(patch));
  }
  return patches;
}

NoiseEstimate estimate_noise(const Signal& x, const PatchConfig& cfg) {
  const PatchGrid g = layout(x, cfg);
  const std::size_t s = g.count();
  const std::size_t r = g.dimension();
  if (s < 2) throw ArgumentError("noise estimation needs at least 2 patches, got " + std::to_string(s));

  std::vector<double> buffer(s * r);
  for (std::size_t i = 0; i < s; ++i) copy_patch(x, g, cfg, i, buffer.data() + i * r);

  std::vector<double> mu(r, 0.0);
  const auto& k = simd::active();
  for (std::size_t i = 0; i < s; ++i) k.axpy(1.0, buffer.data() + i * r, mu.data(), r);
  for (double& m : mu) m /= static_cast<double>(s);

  std::vector<double> cov(r * r, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    double* v = buffer.data() + i * r;
    k.axpy(-1.0, mu.data(), v, r);
    k.rank1_update(cov.data(), v, r);
  }

  Eigen::MatrixXd sigma(r, r);
  const double inv_s = 1.0 / static_cast<double>(s);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a; b < r; ++b) {
      const double c = cov[a * r + b] * inv_s;
      sigma(a, b) = c;
      sigma(b, a) = c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("patch covariance eigensolver did not converge");

  NoiseEstimate est;
  est.patches = s;
  est.rank_deficient = s <= r;
  est.eigenvalues.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    est.eigenvalues[i] = std::max(0.0, solver.eigenvalues()[static_cast<Eigen::Index>(r - 1 - i)]);
  }

  // Suffix sums give the tail means in one pass.
  std::vector<double> suffix(r + 1, 0.0);
  for (std::size_t i = r; i-- > 0;) suffix[i] = suffix[i + 1] + est.eigenvalues[i];

  est.tail_start = r - 1;
  est.tau = est.eigenvalues.back();
  for (std::size_t i = 0; i < r; ++i) {
    const double m = suffix[i] / static_cast<double>(r - i);
    const double med = median_of_sorted_tail(est.eigenvalues, i);
    if (std::abs(m - med) <= cfg.tolerance * std::abs(med) || m < med) {
      est.tail_start = i;
      est.tau = m;
      break;
    }
  }
  est.sigma = std::sqrt(est.tau);
  return est;
}

double estimate_sigma(const Signal& x, const PatchConfig& cfg) { return estimate_noise(x, cfg).sigma; }

}  // namespace sgps
