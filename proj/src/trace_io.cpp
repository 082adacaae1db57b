#include "curvflow/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "curvflow/errors.hpp"

namespace curvflow {

std::string format_trace_row(const TraceRecord& rec)
{
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%ld,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e", rec.step,
                  rec.t, rec.dt, rec.r, rec.norm_err, rec.u_min, rec.u_max, rec.f, rec.R_min,
                  rec.R_max, rec.res_linf);
    return buf;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace)
{
    out << kTraceHeader << '\n';
    for (const auto& rec : trace)
        out << format_trace_row(rec) << '\n';
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRecord> trace)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    write_trace_csv(out, trace);
    if (!out)
        throw Error("failed writing " + path.string());
}

std::vector<TraceRecord> read_trace_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader)
        throw Error("trace CSV: unexpected header");
    std::vector<TraceRecord> out;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        TraceRecord r;
        const int got = std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf",
                                    &r.step, &r.t, &r.dt, &r.r, &r.norm_err, &r.u_min, &r.u_max,
                                    &r.f, &r.R_min, &r.R_max, &r.res_linf);
        if (got != 11)
            throw Error("trace CSV: malformed row '" + line + "'");
        out.push_back(r);
    }
    return out;
}

}  // namespace curvflow
