#include "gnf/complexity.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace gnf {

namespace {

BigInt ipow(BigInt base, std::uint64_t exp) {
  BigInt result = 1;
  while (exp) {
    if (exp & 1) result *= base;
    base *= base;
    exp >>= 1;
  }
  return result;
}

}  // namespace

BigInt bound_value_size_raw(std::uint64_t C, std::uint64_t p,
                            std::uint64_t size) {
  return BigInt(C) * ipow(BigInt(size), p);
}

BigInt bound_time_raw(std::uint64_t C, std::uint64_t p, std::uint64_t size,
                      std::uint64_t rank) {
  return BigInt(36) * ipow(BigInt(C), p + 1) * BigInt(rank + 1) *
         ipow(BigInt(size), p * p + 1);
}

BigInt bound_value_size(std::uint64_t C, std::uint64_t p, const Element& w) {
  return bound_value_size_raw(C, p, w.size());
}

BigInt bound_time(std::uint64_t C, std::uint64_t p, const Element& w) {
  return bound_time_raw(C, p, w.size(), w.rank());
}

ExponentFit fit_exponent(const std::vector<Measurement>& measurements) {
  if (measurements.size() < 3) {
    throw std::invalid_argument("exponent fit needs at least 3 measurements");
  }
  std::set<std::uint64_t> sizes;
  for (const Measurement& m : measurements) sizes.insert(m.input_size);
  if (sizes.size() < 2) {
    throw std::invalid_argument(
        "exponent fit needs at least 2 distinct input sizes");
  }

  const std::size_t n = measurements.size();
  std::vector<double> xs(n), ys(n);
  double x_mean = 0, y_mean = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::log(static_cast<double>(measurements[i].input_size));
    ys[i] = std::log(static_cast<double>(
        std::max<std::uint64_t>(measurements[i].steps, 1)));
    x_mean += xs[i];
    y_mean += ys[i];
  }
  x_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
    sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
  }
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  double intercept = y_mean - fit.exponent * x_mean;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ys[i] - (intercept + fit.exponent * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

}  // namespace gnf
