#pragma once

#include <zoalm/errors.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

namespace zoalm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index  = Eigen::Index;

/// Query accounting shared by all oracles of one problem instance.
///
/// Every scalar function evaluation is charged to exactly one bucket:
/// `solver_queries` (what an algorithm spends) or `verification_queries`
/// (diagnostics such as KKT reporting and white-box gradients). A
/// VerificationScope reroutes charges to the verification bucket.
struct QueryLedger {
    std::uint64_t solver_queries       = 0;
    std::uint64_t verification_queries = 0;

    std::uint64_t total() const { return solver_queries + verification_queries; }

    void charge(std::uint64_t n = 1) {
        if (verifying_depth_ > 0)
            verification_queries += n;
        else
            solver_queries += n;
    }
    bool verifying() const { return verifying_depth_ > 0; }

  private:
    friend class VerificationScope;
    int verifying_depth_ = 0;
};

/// RAII guard: while alive, evaluations are charged as verification queries.
class VerificationScope {
  public:
    explicit VerificationScope(QueryLedger &ledger) : ledger_(&ledger) { ++ledger_->verifying_depth_; }
    ~VerificationScope() { --ledger_->verifying_depth_; }
    VerificationScope(const VerificationScope &)            = delete;
    VerificationScope &operator=(const VerificationScope &) = delete;

  private:
    QueryLedger *ledger_;
};

/// A scalar function R^d -> R reachable only through value queries.
///
/// BlackBoxOracle is a handle: copies share the evaluation counter and the
/// ledger. A *primitive* oracle charges one query to the ledger per call; a
/// *derived* oracle (augmented Lagrangian, shifted proximal objective) charges
/// nothing itself because the primitive oracles it calls are charged.
///
/// The optional verifier returns the exact gradient. Solvers never call it;
/// it only backs white-box diagnostics.
class BlackBoxOracle {
  public:
    using ValueFn    = std::function<double(const Vector &)>;
    using GradientFn = std::function<Vector(const Vector &)>;

    BlackBoxOracle() = default;

    static BlackBoxOracle primitive(Index dim, ValueFn value, GradientFn verifier = {},
                                    std::shared_ptr<QueryLedger> ledger = {});
    /// `queries_per_eval` declares how many primitive queries one call of
    /// `value` makes; budgets and ledger checks rely on it.
    static BlackBoxOracle derived(Index dim, ValueFn value, GradientFn verifier,
                                  std::shared_ptr<QueryLedger> ledger,
                                  std::uint64_t queries_per_eval);

    /// f(x). Throws InputError on dimension mismatch or non-finite input and
    /// NumericError when f(x) is not finite.
    double eval(const Vector &x) const;

    /// Exact gradient from the hidden verifier. Charged as verification.
    Vector true_gradient(const Vector &x) const;

    bool has_verifier() const { return state_ && static_cast<bool>(state_->verifier); }
    Index dim() const { return state_ ? state_->dim : 0; }
    /// Number of eval() calls made through this oracle (and its copies).
    std::uint64_t count() const { return state_ ? state_->count : 0; }
    /// Ledger charges per eval(): 1 for primitive, declared cost for derived.
    std::uint64_t cost_per_eval() const { return state_ ? state_->cost : 0; }

    QueryLedger &ledger() const { return *state_->ledger; }
    const std::shared_ptr<QueryLedger> &ledger_ptr() const { return state_->ledger; }

    explicit operator bool() const { return static_cast<bool>(state_); }

  private:
    struct State {
        Index dim = 0;
        ValueFn value;
        GradientFn verifier;
        std::shared_ptr<QueryLedger> ledger;
        bool primitive           = true;
        std::uint64_t cost       = 1;
        mutable std::uint64_t count = 0;
    };
    std::shared_ptr<State> state_;
};

} // namespace zoalm
