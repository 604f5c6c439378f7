#include "swarmtune/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "swarmtune/errors.hpp"

namespace swarmtune {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& rec : trace) {
    out << rec.evaluation << ',' << rec.iteration << ',' << rec.candidate.num_filters << ','
        << rec.candidate.dense_units << ',' << format_real(rec.candidate.dropout_rate) << ','
        << format_real(rec.candidate.learning_rate) << ',' << format_real(rec.fitness) << ','
        << format_real(rec.best_so_far) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRecord>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot open " + path.string() + " for writing");
  }
  write_trace_csv(out, trace);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_field_real(const std::string& s, const std::filesystem::path& path, std::size_t lineno) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad numeric field '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open trace file " + path.string());
  }
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": empty trace file");
  }
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) {
    throw ParseError(path.string() + ":1: unexpected trace header '" + line + "'");
  }
  std::vector<TraceRecord> trace;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 8) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected 8 fields, got " +
                       std::to_string(fields.size()));
    }
    TraceRecord rec;
    rec.evaluation = static_cast<std::size_t>(parse_field_real(fields[0], path, lineno));
    rec.iteration = static_cast<std::size_t>(parse_field_real(fields[1], path, lineno));
    rec.candidate.num_filters = static_cast<int>(parse_field_real(fields[2], path, lineno));
    rec.candidate.dense_units = static_cast<int>(parse_field_real(fields[3], path, lineno));
    rec.candidate.dropout_rate = parse_field_real(fields[4], path, lineno);
    rec.candidate.learning_rate = parse_field_real(fields[5], path, lineno);
    rec.fitness = parse_field_real(fields[6], path, lineno);
    rec.best_so_far = parse_field_real(fields[7], path, lineno);
    trace.push_back(rec);
  }
  return trace;
}

}  // namespace swarmtune
