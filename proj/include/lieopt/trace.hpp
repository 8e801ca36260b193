#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lieopt {

struct TraceRecord {
  std::int64_t step = 0;
  double t = 0.0;
  double objective = 0.0;
  double energy = 0.0;
  double group_drift = 0.0;
  double skew_drift = 0.0;
  double eig_err = 0.0;
  double subspace_err = 0.0;
  std::int64_t elapsed_ns = 0;
};

enum class TraceFormat { Csv, Jsonl };

inline constexpr std::string_view kTraceCsvHeader =
    "step,t,objective,energy,group_drift,skew_drift,eig_err,subspace_err,elapsed_ns";

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

void emit_trace(const std::vector<TraceRecord>& records, TraceFormat format, std::ostream& out);
void emit_trace(const std::vector<TraceRecord>& records, TraceFormat format,
                const std::filesystem::path& path);

std::vector<TraceRecord> parse_trace_csv(std::string_view text);

TraceFormat parse_trace_format(std::string_view name);

}  // namespace lieopt
