#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "curvflow/flow.hpp"

namespace curvflow {

inline constexpr const char* kTraceHeader = "step,t,dt,r,norm_err,u_min,u_max,f,R_min,R_max,res_linf";

// Header plus one row per record; reals as %.16e, LF line endings.
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);
void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRecord> trace);
std::string format_trace_row(const TraceRecord& rec);

// Inverse of write_trace_csv. Throws Error on a bad header or row.
std::vector<TraceRecord> read_trace_csv(const std::string& text);

}  // namespace curvflow
