#pragma once

#include "tilings/common.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <vector>

namespace tilings {

struct Moments {
  double mean = 0, variance = 0, skewness = 0, excess_kurtosis = 0;
};

inline Moments sample_moments(const std::vector<double>& xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : xs) {
    double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2 * n / std::max(1.0, n - 1);
  if (m2 > 0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
};

// Pearson test of observed counts against probabilities. Adjacent bins are
// merged until each expected count is at least 5.
inline ChiSquareResult chi_square_test(const std::vector<long>& observed,
                                       const std::vector<double>& probs) {
  require(observed.size() == probs.size(), "domain", "chi-square size mismatch");
  long total = 0;
  for (long o : observed) total += o;
  std::vector<double> e, o;
  double acc_e = 0, acc_o = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc_e += probs[i] * static_cast<double>(total);
    acc_o += static_cast<double>(observed[i]);
    if (acc_e >= 5.0) {
      e.push_back(acc_e);
      o.push_back(acc_o);
      acc_e = acc_o = 0;
    }
  }
  if (acc_e > 0 || acc_o > 0) {
    if (e.empty()) {
      e.push_back(acc_e);
      o.push_back(acc_o);
    } else {
      e.back() += acc_e;
      o.back() += acc_o;
    }
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double d = o[i] - e[i];
    r.statistic += d * d / e[i];
  }
  r.dof = static_cast<int>(e.size()) - 1;
  if (r.dof > 0) {
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  }
  return r;
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace tilings
