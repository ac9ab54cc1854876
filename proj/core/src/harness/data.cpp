#include "abcmle/harness/data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "abcmle/errors.hpp"
#include "abcmle/harness/record_io.hpp"

namespace abcmle {

namespace {

std::string trim(const std::string& text) {
  const std::size_t begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const std::size_t end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::string last_field(const std::string& line) {
  const std::size_t pos = line.find_last_of(',');
  return trim(pos == std::string::npos ? line : line.substr(pos + 1));
}

}  // namespace

RawSeries ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open data file '" + path.string() + "'");
  }
  RawSeries series;
  series.note = path.string();
  std::string line;
  long line_number = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string field = last_field(line);
    if (field.empty()) continue;
    double value = 0.0;
    try {
      value = parse_double(field);
    } catch (const ConfigError&) {
      if (first_content) {  // header row
        first_content = false;
        continue;
      }
      std::ostringstream os;
      os << "malformed value '" << field << "' at line " << line_number
         << " of '" << path.string() << "'";
      throw ConfigError(os.str());
    }
    first_content = false;
    if (!std::isfinite(value)) {
      std::ostringstream os;
      os << "non-finite value at line " << line_number << " of '"
         << path.string() << "'";
      throw ConfigError(os.str());
    }
    series.values.push_back(value);
  }
  if (series.values.empty()) {
    throw ConfigError("data file '" + path.string() + "' contains no values");
  }
  return series;
}

std::vector<double> preprocess_log_returns(std::span<const double> prices) {
  if (prices.size() < 2) {
    throw ConfigError("log-return preprocessing needs at least 2 prices");
  }
  std::vector<double> returns;
  returns.reserve(prices.size() - 1);
  for (std::size_t t = 0; t + 1 < prices.size(); ++t) {
    if (!(prices[t] > 0.0) || !(prices[t + 1] > 0.0)) {
      std::ostringstream os;
      os << "price at row " << (prices[t] > 0.0 ? t + 2 : t + 1)
         << " is not strictly positive; log returns are undefined";
      throw DomainError(os.str());
    }
    returns.push_back(100.0 * std::log(prices[t + 1] / prices[t]));
  }
  return returns;
}

Ar1Fit ar1_residuals(std::span<const double> returns) {
  const std::size_t m = returns.size();
  if (m < 3) {
    throw ConfigError("autoregression fit needs at least 3 observations");
  }
  // Regress r_t on r_{t-1} with intercept, t = 2..m.
  const std::size_t n = m - 1;
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    mean_x += returns[t];
    mean_y += returns[t + 1];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dx = returns[t] - mean_x;
    sxx += dx * dx;
    sxy += dx * (returns[t + 1] - mean_y);
  }
  if (sxx == 0.0) {
    throw Error("autoregression fit is degenerate: the series is constant");
  }
  Ar1Fit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.residuals.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    fit.residuals.push_back(returns[t + 1] - fit.intercept -
                            fit.slope * returns[t]);
  }
  return fit;
}

}  // namespace abcmle
