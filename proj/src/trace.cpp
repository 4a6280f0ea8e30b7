#include <zoalm/trace.hpp>

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace zoalm {

const char *const kTraceHeader =
    "run_id,kind,iteration,solver_queries,verification_queries,objective,pres,dres,beta,"
    "dual_norm,wall_ms";

const char *to_string(IterationKind kind) {
    switch (kind) {
    case IterationKind::outer: return "outer";
    case IterationKind::inner: return "inner";
    case IterationKind::epoch: return "epoch";
    case IterationKind::step: return "step";
    case IterationKind::final: return "final";
    }
    return "step";
}

IterationKind iteration_kind_from_string(const std::string &s) {
    if (s == "outer") return IterationKind::outer;
    if (s == "inner") return IterationKind::inner;
    if (s == "epoch") return IterationKind::epoch;
    if (s == "step") return IterationKind::step;
    if (s == "final") return IterationKind::final;
    throw ConfigError("unknown iteration kind '" + s + "'");
}

void SolverTrace::record(TraceRecord r, const QueryLedger &ledger) {
    r.run_id               = run_id_;
    r.solver_queries       = ledger.solver_queries;
    r.verification_queries = ledger.verification_queries;
    r.wall_ms              = elapsed_ms();
    records_.push_back(std::move(r));
}

double SolverTrace::elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string &s) {
    char *end      = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError("trace: bad number '" + s + "'");
    return v;
}

} // namespace

void write_trace_csv(std::ostream &os, const std::vector<TraceRecord> &records) {
    os << kTraceHeader << '\n';
    for (const auto &r : records) {
        os << r.run_id << ',' << to_string(r.kind) << ',' << r.iteration << ',' << r.solver_queries
           << ',' << r.verification_queries << ',' << fmt_double(r.objective) << ','
           << fmt_double(r.pres) << ',' << fmt_double(r.dres) << ',' << fmt_double(r.beta) << ','
           << fmt_double(r.dual_norm) << ',' << fmt_double(r.wall_ms) << '\n';
    }
}

std::vector<TraceRecord> read_trace_csv(std::istream &is) {
    std::string line;
    if (!std::getline(is, line))
        throw ConfigError("trace: empty file");
    if (line != kTraceHeader)
        throw ConfigError("trace: schema mismatch, header is '" + line + "'");
    std::vector<TraceRecord> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cols.push_back(cell);
        if (cols.size() != 11)
            throw ConfigError("trace: line " + std::to_string(lineno) + " has " +
                              std::to_string(cols.size()) + " columns");
        TraceRecord r;
        r.run_id               = cols[0];
        r.kind                 = iteration_kind_from_string(cols[1]);
        r.iteration            = std::stoull(cols[2]);
        r.solver_queries       = std::stoull(cols[3]);
        r.verification_queries = std::stoull(cols[4]);
        r.objective            = parse_double(cols[5]);
        r.pres                 = parse_double(cols[6]);
        r.dres                 = parse_double(cols[7]);
        r.beta                 = parse_double(cols[8]);
        r.dual_norm            = parse_double(cols[9]);
        r.wall_ms              = parse_double(cols[10]);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace zoalm
