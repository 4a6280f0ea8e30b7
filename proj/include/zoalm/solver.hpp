#pragma once

#include <zoalm/oracle.hpp>
#include <zoalm/trace.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>

namespace zoalm {

enum class SolveStatus { converged, budget_exceeded, iteration_limit };

const char *to_string(SolveStatus s);

struct SolveResult {
    Vector x;
    SolveStatus status          = SolveStatus::iteration_limit;
    std::uint64_t iterations    = 0;
    /// Last stationarity measure the solver itself computed (estimated).
    double stationarity         = std::numeric_limits<double>::infinity();
    std::uint64_t solver_queries = 0;

    bool converged() const { return status == SolveStatus::converged; }
};

/// Optional instrumentation shared by the solvers.
struct SolverHooks {
    SolverTrace *trace = nullptr;
    /// White-box objective for trace rows; evaluated under a VerificationScope.
    std::function<double(const Vector &)> objective;
    /// Called with (k, x^{k+1}) after every iteration when set.
    std::function<void(std::uint64_t, const Vector &)> observer;
};

/// Counts solver queries spent since construction against a cap (0 = none).
class QueryBudget {
  public:
    QueryBudget(const QueryLedger &ledger, std::uint64_t cap)
        : ledger_(&ledger), start_(ledger.solver_queries), cap_(cap) {}

    std::uint64_t used() const { return ledger_->solver_queries - start_; }
    bool exhausted() const { return cap_ != 0 && used() >= cap_; }
    /// True when spending `next` more queries would pass the cap.
    bool would_exceed(std::uint64_t next) const { return cap_ != 0 && used() + next > cap_; }
    std::uint64_t cap() const { return cap_; }
    /// Cap to hand to a nested solver that has its own cap `child_cap`
    /// (0 = unlimited). Callers check exhausted() first.
    std::uint64_t limit_for(std::uint64_t child_cap) const {
        if (cap_ == 0)
            return child_cap;
        const auto rem = remaining();
        return child_cap == 0 ? rem : std::min(child_cap, rem);
    }
    std::uint64_t remaining() const {
        if (cap_ == 0)
            return 0;
        return used() >= cap_ ? 0 : cap_ - used();
    }

  private:
    const QueryLedger *ledger_;
    std::uint64_t start_;
    std::uint64_t cap_;
};

} // namespace zoalm
