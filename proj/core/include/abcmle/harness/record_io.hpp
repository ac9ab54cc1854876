#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "abcmle/mle/run_record.hpp"

namespace abcmle {

// Shortest decimal string that parses back to exactly the same double
// (std::to_chars round-trip guarantee). All numeric file output goes through
// this so emitted artifacts are byte-stable and lossless.
std::string format_double(double value);

// Strict inverse of format_double; accepts any decimal/scientific literal,
// nan and inf. Throws ConfigError on anything else.
double parse_double(const std::string& text);

// A plain numeric table with '#'-prefixed provenance comments. This is the
// only file format the harness emits for traces, so every artifact can be
// read back and checked against its summary.
struct CsvTable {
  std::vector<std::string> comments;  // stored without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// Run-trace serialization: one row per recorded update, record metadata
// (initial/final parameters, counters, abort reason) in comment lines so a
// round-trip reproduces the in-memory record exactly. `provenance` lines are
// emitted first, verbatim.
void write_run_record(const std::filesystem::path& path,
                      const RunRecord& record,
                      const std::vector<std::string>& parameter_names,
                      const std::vector<std::string>& provenance,
                      bool include_timing);
RunRecord read_run_record(const std::filesystem::path& path);

}  // namespace abcmle
