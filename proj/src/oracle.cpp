#include <zoalm/oracle.hpp>

#include <cmath>
#include <string>

namespace zoalm {

BlackBoxOracle BlackBoxOracle::primitive(Index dim, ValueFn value, GradientFn verifier,
                                         std::shared_ptr<QueryLedger> ledger) {
    if (dim <= 0)
        throw InputError("oracle dimension must be positive");
    if (!value)
        throw InputError("oracle needs a value function");
    BlackBoxOracle o;
    o.state_            = std::make_shared<State>();
    o.state_->dim       = dim;
    o.state_->value     = std::move(value);
    o.state_->verifier  = std::move(verifier);
    o.state_->ledger    = ledger ? std::move(ledger) : std::make_shared<QueryLedger>();
    o.state_->primitive = true;
    return o;
}

BlackBoxOracle BlackBoxOracle::derived(Index dim, ValueFn value, GradientFn verifier,
                                       std::shared_ptr<QueryLedger> ledger,
                                       std::uint64_t queries_per_eval) {
    auto o              = primitive(dim, std::move(value), std::move(verifier), std::move(ledger));
    o.state_->primitive = false;
    o.state_->cost      = queries_per_eval;
    return o;
}

double BlackBoxOracle::eval(const Vector &x) const {
    if (!state_)
        throw UnsupportedOperation("eval on an empty oracle");
    if (x.size() != state_->dim)
        throw InputError("dimension mismatch: oracle expects " + std::to_string(state_->dim) +
                         ", got " + std::to_string(x.size()));
    if (!x.allFinite())
        throw InputError("oracle queried at a non-finite point");
    ++state_->count;
    if (state_->primitive)
        state_->ledger->charge(1);
    const double v = state_->value(x);
    if (!std::isfinite(v))
        throw NumericError("oracle produced a non-finite value");
    return v;
}

Vector BlackBoxOracle::true_gradient(const Vector &x) const {
    if (!state_ || !state_->verifier)
        throw UnsupportedOperation("oracle has no gradient verifier");
    if (x.size() != state_->dim)
        throw InputError("dimension mismatch in true_gradient");
    if (state_->primitive)
        state_->ledger->verification_queries += 1;
    return state_->verifier(x);
}

} // namespace zoalm
