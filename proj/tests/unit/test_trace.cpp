#include <doctest.h>
#include <zoalm/trace.hpp>

#include <sstream>

using namespace zoalm;

TEST_CASE("trace round trip") {
    QueryLedger ledger;
    SolverTrace trace("run-1");
    TraceRecord r;
    r.kind = IterationKind::outer;
    r.iteration = 3;
    r.pres = 0.1 / 3.0;
    r.beta = 0.27;
    ledger.charge(42);
    trace.record(r, ledger);
    r.kind = IterationKind::epoch;
    r.objective = -1.25e-7;
    ledger.charge(8);
    trace.record(r, ledger);

    std::stringstream ss;
    write_trace_csv(ss, trace.records());
    CHECK(ss.str().rfind(kTraceHeader, 0) == 0);
    const auto back = read_trace_csv(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].run_id == "run-1");
    CHECK(back[0].kind == IterationKind::outer);
    CHECK(back[0].solver_queries == 42);
    CHECK(back[0].pres == r.pres);
    CHECK(std::isnan(back[0].objective));
    CHECK(back[1].objective == -1.25e-7);
    CHECK(back[1].solver_queries == 50);
}

TEST_CASE("trace reader rejects foreign schemas") {
    std::stringstream bad("a,b,c\n1,2,3\n");
    CHECK_THROWS_AS(read_trace_csv(bad), ConfigError);
    std::stringstream short_row(std::string(kTraceHeader) + "\nx,outer,1\n");
    CHECK_THROWS_AS(read_trace_csv(short_row), ConfigError);
    std::stringstream empty(std::string(kTraceHeader) + "\n");
    CHECK(read_trace_csv(empty).empty());
}

TEST_CASE("iteration kind names") {
    for (auto k : {IterationKind::outer, IterationKind::inner, IterationKind::epoch, IterationKind::step,
                   IterationKind::final})
        CHECK(iteration_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(iteration_kind_from_string("bogus"), ConfigError);
}
