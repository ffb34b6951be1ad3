#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gnf/element.hpp"

namespace gnf {

using BigInt = boost::multiprecision::cpp_int;

// Accumulator for abstract evaluation cost. Charges are positive integers;
// the total is the sum over the evaluation's event log.
struct CostMeter {
  std::uint64_t total = 0;
  void charge(std::uint64_t n) { total += n; }
};

// Exact value of C * size(w)^p.
BigInt bound_value_size(std::uint64_t C, std::uint64_t p, const Element& w);

// Exact value of 36 * C^(p+1) * (rank(w)+1) * size(w)^(p*p+1).
BigInt bound_time(std::uint64_t C, std::uint64_t p, const Element& w);

// Same bounds from raw size/rank numbers (grids, property tests).
BigInt bound_value_size_raw(std::uint64_t C, std::uint64_t p, std::uint64_t size);
BigInt bound_time_raw(std::uint64_t C, std::uint64_t p, std::uint64_t size,
                      std::uint64_t rank);

// Per-evaluation record: what was measured and what the declared constants
// promise for this input.
struct Measurement {
  std::uint64_t input_size = 0;
  std::uint64_t input_rank = 0;
  std::uint64_t output_size = 0;  // 0 when the result is `false`
  std::uint64_t steps = 0;
  std::uint64_t family_c = 0;
  std::uint64_t family_p = 0;
  BigInt bound_size;
  BigInt bound_time;

  bool within_size_bound() const { return BigInt(output_size) <= bound_size; }
  bool within_time_bound() const { return BigInt(steps) <= bound_time; }
};

// Least-squares slope of log(steps) vs log(size).
struct ExponentFit {
  double exponent = 0.0;
  double residual = 0.0;  // root mean squared residual in log space
};

// Requires >= 3 measurements and >= 2 distinct sizes; throws
// std::invalid_argument otherwise.
ExponentFit fit_exponent(const std::vector<Measurement>& measurements);

}  // namespace gnf
