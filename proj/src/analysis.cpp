#include "sgps/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "sgps/error.hpp"

namespace sgps {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("normal_quantile needs p in (0, 1)");
  return std::numbers::sqrt2 * boost::math::erf_inv(2.0 * p - 1.0);
}

NormalityReport normality_report(std::span<const double> residuals) {
  const std::size_t n = residuals.size();
  if (n < 100) throw ArgumentError("normality_report needs at least 100 samples");
  double mean = 0.0;
  for (double r : residuals) mean += r;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double r : residuals) {
    const double d = r - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (!(m2 > 0.0)) throw ArgumentError("normality_report: residuals have zero variance");

  NormalityReport out;
  out.samples = n;
  out.skewness = m3 / std::pow(m2, 1.5);
  out.excess_kurtosis = m4 / (m2 * m2) - 3.0;

  std::vector<double> sorted(residuals.begin(), residuals.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(m2);
  double sq = 0.0, sqq = 0.0, szq = 0.0, szz = 0.0;
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (static_cast<double>(n) + 0.25));
    sq += q[i];
  }
  const double qmean = sq / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (sorted[i] - mean) / sd;
    const double dq = q[i] - qmean;
    sqq += dq * dq;
    szq += z * dq;
    szz += z * z;
  }
  out.qq_correlation = std::clamp(szq / std::sqrt(sqq * szz), 0.0, 1.0);
  return out;
}

NormalityReport normality_report(const Signal& residuals) { return normality_report(residuals.values()); }

double gaussian_w2(const Signal& mean_a, double var_a, const Signal& mean_b, double var_b) {
  require_same_shape(mean_a, mean_b, "gaussian_w2");
  if (var_a < 0.0 || var_b < 0.0) throw ArgumentError("gaussian_w2 needs nonnegative variances");
  const double gap = std::sqrt(var_a) - std::sqrt(var_b);
  return squared_distance(mean_a, mean_b) + static_cast<double>(mean_a.size()) * gap * gap;
}

double gaussian_w2(double mean_a, double var_a, double mean_b, double var_b, std::size_t n) {
  if (var_a < 0.0 || var_b < 0.0) throw ArgumentError("gaussian_w2 needs nonnegative variances");
  const double gap = std::sqrt(var_a) - std::sqrt(var_b);
  const double d = mean_a - mean_b;
  return static_cast<double>(n) * (d * d + gap * gap);
}

namespace {

double kl_terms(double mean_sq_dist, double var_q, double var_p, std::size_t n) {
  if (!(var_q > 0.0) || !(var_p > 0.0)) throw ArgumentError("kl_gaussian needs positive variances");
  const double nn = static_cast<double>(n);
  const double ratio = var_q / var_p;
  return 0.5 * (nn * ratio + mean_sq_dist / var_p - nn - nn * std::log(ratio));
}

}  // namespace

double kl_gaussian(const Signal& mean_q, double var_q, const Signal& mean_p, double var_p) {
  require_same_shape(mean_q, mean_p, "kl_gaussian");
  return kl_terms(squared_distance(mean_q, mean_p), var_q, var_p, mean_q.size());
}

double kl_gaussian(double mean_q, double var_q, double mean_p, double var_p, std::size_t n) {
  const double d = mean_q - mean_p;
  return kl_terms(static_cast<double>(n) * d * d, var_q, var_p, n);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("loglog_slope needs two equal-length series");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ArgumentError("loglog_slope needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ArgumentError("loglog_slope needs distinct x values");
  return sxy / sxx;
}

}  // namespace sgps
