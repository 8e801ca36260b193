#include "lieopt/trace.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "lieopt/dataio.hpp"

namespace lieopt {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

void write_csv_row(const TraceRecord& r, std::ostream& out) {
  out << r.step << ',' << format_double(r.t) << ',' << format_double(r.objective) << ','
      << format_double(r.energy) << ',' << format_double(r.group_drift) << ','
      << format_double(r.skew_drift) << ',' << format_double(r.eig_err) << ','
      << format_double(r.subspace_err) << ',' << r.elapsed_ns << '\n';
}

void write_json_row(const TraceRecord& r, std::ostream& out) {
  out << "{\"step\":" << r.step << ",\"t\":" << format_double(r.t)
      << ",\"objective\":" << format_double(r.objective) << ",\"energy\":" << format_double(r.energy)
      << ",\"group_drift\":" << format_double(r.group_drift)
      << ",\"skew_drift\":" << format_double(r.skew_drift)
      << ",\"eig_err\":" << format_double(r.eig_err)
      << ",\"subspace_err\":" << format_double(r.subspace_err)
      << ",\"elapsed_ns\":" << r.elapsed_ns << "}\n";
}

template <typename T>
T parse_field(std::string_view field, std::size_t line) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw DataError("trace csv line " + std::to_string(line) + ": bad field '" +
                    std::string(field) + "'");
  }
  return value;
}

}  // namespace

void emit_trace(const std::vector<TraceRecord>& records, TraceFormat format, std::ostream& out) {
  if (format == TraceFormat::Csv) {
    out << kTraceCsvHeader << '\n';
    for (const auto& r : records) write_csv_row(r, out);
  } else {
    for (const auto& r : records) write_json_row(r, out);
  }
}

void emit_trace(const std::vector<TraceRecord>& records, TraceFormat format,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace to " + path.string());
  emit_trace(records, format, out);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<TraceRecord> parse_trace_csv(std::string_view text) {
  std::vector<TraceRecord> records;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line_no == 1) {
      if (line != kTraceCsvHeader) throw DataError("trace csv: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::array<std::string_view, 9> fields;
    std::size_t k = 0;
    while (k < fields.size()) {
      const auto comma = line.find(',');
      fields[k++] = line.substr(0, comma);
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (k != fields.size()) throw DataError("trace csv line " + std::to_string(line_no) + ": field count");
    TraceRecord r;
    r.step = parse_field<std::int64_t>(fields[0], line_no);
    r.t = parse_field<double>(fields[1], line_no);
    r.objective = parse_field<double>(fields[2], line_no);
    r.energy = parse_field<double>(fields[3], line_no);
    r.group_drift = parse_field<double>(fields[4], line_no);
    r.skew_drift = parse_field<double>(fields[5], line_no);
    r.eig_err = parse_field<double>(fields[6], line_no);
    r.subspace_err = parse_field<double>(fields[7], line_no);
    r.elapsed_ns = parse_field<std::int64_t>(fields[8], line_no);
    records.push_back(r);
  }
  return records;
}

TraceFormat parse_trace_format(std::string_view name) {
  if (name == "csv") return TraceFormat::Csv;
  if (name == "jsonl") return TraceFormat::Jsonl;
  throw std::invalid_argument("unknown trace format '" + std::string(name) + "'");
}

}  // namespace lieopt
