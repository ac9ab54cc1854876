#include "abcmle/harness/record_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "abcmle/errors.hpp"

namespace abcmle {

std::string format_double(double value) {
  char buffer[40];
  const std::to_chars_result result =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const std::from_chars_result result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end || text.empty()) {
    throw ConfigError("cannot parse '" + text + "' as a number");
  }
  return value;
}

namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(',');
    out += format_double(values[i]);
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> values;
  if (text.empty()) return values;
  for (const std::string& field : split(text, ',')) {
    values.push_back(parse_double(field));
  }
  return values;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open '" + path.string() + "' for writing");
  }
  for (const std::string& comment : table.comments) {
    out << "# " << comment << "\n";
  }
  out << join(table.columns, ',') << "\n";
  for (const std::vector<double>& row : table.rows) {
    out << join_doubles(row) << "\n";
  }
  if (!out) {
    throw ConfigError("failed while writing '" + path.string() + "'");
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open '" + path.string() + "'");
  }
  CsvTable table;
  std::string line;
  long line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t start = 1;
      if (start < line.size() && line[start] == ' ') ++start;
      table.comments.push_back(line.substr(start));
      continue;
    }
    if (!have_header) {
      table.columns = split(line, ',');
      have_header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(table.columns.size());
    for (const std::string& field : split(line, ',')) {
      try {
        row.push_back(parse_double(field));
      } catch (const ConfigError&) {
        std::ostringstream os;
        os << "malformed value '" << field << "' at line " << line_number
           << " of '" << path.string() << "'";
        throw ConfigError(os.str());
      }
    }
    if (row.size() != table.columns.size()) {
      std::ostringstream os;
      os << "line " << line_number << " of '" << path.string() << "' has "
         << row.size() << " fields, expected " << table.columns.size();
      throw ConfigError(os.str());
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) {
    throw ConfigError("'" + path.string() + "' contains no header row");
  }
  return table;
}

void write_run_record(const std::filesystem::path& path,
                      const RunRecord& record,
                      const std::vector<std::string>& parameter_names,
                      const std::vector<std::string>& provenance,
                      bool include_timing) {
  CsvTable table;
  table.comments = provenance;
  table.comments.push_back("initial_theta=" + join_doubles(record.initial_theta));
  table.comments.push_back("final_theta=" + join_doubles(record.final_theta));
  table.comments.push_back("averaged=" + std::to_string(record.averaged));
  table.comments.push_back("updates=" + std::to_string(record.updates));
  table.comments.push_back("clip_events=" + std::to_string(record.clip_events));
  table.comments.push_back(std::string("completed=") +
                           (record.completed ? "1" : "0"));
  if (!record.abort_reason.empty()) {
    table.comments.push_back("abort_reason=" + record.abort_reason);
  }

  table.columns.push_back("index");
  for (const std::string& name : parameter_names) table.columns.push_back(name);
  for (const std::string& name : parameter_names)
    table.columns.push_back("grad_" + name);
  table.columns.push_back("log_likelihood");
  table.columns.push_back("ess");
  table.columns.push_back("clipped");
  if (include_timing) table.columns.push_back("seconds");

  for (const RunStep& step : record.steps) {
    std::vector<double> row;
    row.reserve(table.columns.size());
    row.push_back(static_cast<double>(step.index));
    for (double v : step.theta) row.push_back(v);
    for (double v : step.gradient) row.push_back(v);
    row.push_back(step.log_likelihood);
    row.push_back(step.ess);
    row.push_back(step.clipped ? 1.0 : 0.0);
    if (include_timing) row.push_back(step.seconds);
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

RunRecord read_run_record(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  RunRecord record;
  for (const std::string& comment : table.comments) {
    const std::size_t eq = comment.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = comment.substr(0, eq);
    const std::string value = comment.substr(eq + 1);
    if (key == "initial_theta") {
      record.initial_theta = parse_doubles(value);
    } else if (key == "final_theta") {
      record.final_theta = parse_doubles(value);
    } else if (key == "averaged") {
      record.averaged = std::stol(value);
    } else if (key == "updates") {
      record.updates = std::stol(value);
    } else if (key == "clip_events") {
      record.clip_events = std::stol(value);
    } else if (key == "completed") {
      record.completed = (value == "1");
    } else if (key == "abort_reason") {
      record.abort_reason = value;
    }
  }

  // Column layout: index, dim parameters, dim gradients, log_likelihood,
  // ess, clipped, [seconds].
  std::size_t dim = 0;
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    if (table.columns[c].rfind("grad_", 0) == 0) {
      dim = c - 1;
      break;
    }
  }
  if (dim == 0) {
    throw ConfigError("'" + path.string() +
                      "' has no gradient columns; not a run trace");
  }
  const bool has_timing = !table.columns.empty() &&
                          table.columns.back() == "seconds";
  const std::size_t expected = 1 + 2 * dim + 3 + (has_timing ? 1 : 0);
  if (table.columns.size() != expected) {
    throw ConfigError("'" + path.string() + "' has an unexpected column layout");
  }

  record.steps.reserve(table.rows.size());
  for (const std::vector<double>& row : table.rows) {
    RunStep step;
    step.index = static_cast<long>(row[0]);
    step.theta.assign(row.begin() + 1, row.begin() + 1 + dim);
    step.gradient.assign(row.begin() + 1 + dim, row.begin() + 1 + 2 * dim);
    step.log_likelihood = row[1 + 2 * dim];
    step.ess = row[2 + 2 * dim];
    step.clipped = (row[3 + 2 * dim] != 0.0);
    if (has_timing) step.seconds = row[4 + 2 * dim];
    record.steps.push_back(std::move(step));
  }
  return record;
}

}  // namespace abcmle
