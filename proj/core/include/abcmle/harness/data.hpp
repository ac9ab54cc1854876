#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace abcmle {

// A raw observation series read from disk, in file order.
struct RawSeries {
  std::vector<double> values;
  std::string note;  // provenance: where the series came from
};

// Reads a one-value-per-row CSV. A non-numeric first row is treated as a
// header and skipped. Rows with several comma-separated fields contribute
// their last field (so "date,price" exports work unchanged). Malformed or
// non-finite values are reported with their line number.
RawSeries ingest_csv(const std::filesystem::path& path);

// r_t = 100 * log(o_{t+1} / o_t); output has length m - 1. All prices must
// be strictly positive.
std::vector<double> preprocess_log_returns(std::span<const double> prices);

// Ordinary least squares fit of r_t = c + rho * r_{t-1} + e_t.
struct Ar1Fit {
  double intercept = 0.0;  // c
  double slope = 0.0;      // rho
  std::vector<double> residuals;  // e_2 .. e_m, length m - 1
};

Ar1Fit ar1_residuals(std::span<const double> returns);

}  // namespace abcmle
