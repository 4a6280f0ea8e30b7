#pragma once

#include <zoalm/oracle.hpp>

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace zoalm {

enum class IterationKind { outer, inner, epoch, step, final };

const char *to_string(IterationKind kind);
IterationKind iteration_kind_from_string(const std::string &s);

/// One row of a solver trace. Unused numeric fields stay NaN.
struct TraceRecord {
    std::string run_id;
    IterationKind kind                 = IterationKind::step;
    std::uint64_t iteration            = 0;
    std::uint64_t solver_queries       = 0;
    std::uint64_t verification_queries = 0;
    double objective                   = std::numeric_limits<double>::quiet_NaN();
    double pres                        = std::numeric_limits<double>::quiet_NaN();
    /// Dual residual, or the (estimated) stationarity for unconstrained runs.
    double dres      = std::numeric_limits<double>::quiet_NaN();
    double beta      = std::numeric_limits<double>::quiet_NaN();
    double dual_norm = std::numeric_limits<double>::quiet_NaN();
    double wall_ms   = 0;
};

/// Time-stamped record sink. Solvers append to it when given one.
class SolverTrace {
  public:
    using Clock = std::chrono::steady_clock;

    explicit SolverTrace(std::string run_id = {}) : run_id_(std::move(run_id)), start_(Clock::now()) {}

    /// Stamps run id, ledger counters and wall time, then appends.
    void record(TraceRecord r, const QueryLedger &ledger);

    const std::vector<TraceRecord> &records() const { return records_; }
    const std::string &run_id() const { return run_id_; }
    double elapsed_ms() const;

    /// Inner solvers skip epoch-level rows when this is false.
    bool keep_epochs = true;

  private:
    std::string run_id_;
    Clock::time_point start_;
    std::vector<TraceRecord> records_;
};

/// CSV with header `kTraceHeader`, LF line endings.
extern const char *const kTraceHeader;
void write_trace_csv(std::ostream &os, const std::vector<TraceRecord> &records);
std::vector<TraceRecord> read_trace_csv(std::istream &is);

} // namespace zoalm
