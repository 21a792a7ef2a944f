#include <doctest.h>

#include "steinmix/errors.hpp"
#include "steinmix/verification.hpp"

using namespace steinmix;

TEST_CASE("single properties on seed 7") {
    for (const char* id : {"lemma34", "pinching_ineq"}) {
        const auto r = run_property(id, 500, 7);
        CHECK(r.failures == 0);
        CHECK(r.trials == 500);
        CHECK(r.worst_margin <= r.tolerance);
    }
    const auto eq = run_property("oracle_equiv", 200, 7);
    CHECK(eq.failures == 0);
    CHECK(eq.worst_margin <= 1e-9);
    CHECK_THROWS_AS(run_property("no_such_property", 10, 7), ValidationError);
    CHECK_THROWS_AS(run_property("lemma34", 0, 7), ValidationError);
}

TEST_CASE("fault injection fails the targeted property only") {
    VerifyOptions fault;
    fault.inject_fault = "lemma45";
    const auto bad = run_property("lemma45", 50, 7, fault);
    CHECK(bad.failures > 0);
    const auto other = run_property("lemma34", 50, 7, fault);
    CHECK(other.failures == 0);
}

TEST_CASE("empty registry is rejected") {
    const PropertyRegistry empty;
    CHECK_THROWS_AS(run_all(empty, 1), ValidationError);
}

TEST_CASE("reports are deterministic") {
    PropertyRegistry small;
    for (const char* id : {"lemma34", "np_duality", "step_monotone"}) {
        Property p = default_registry().at(id);
        p.default_trials = 40;
        small.emplace(id, p);
    }
    const auto a = report_json(run_all(small, 99), 99).dump();
    const auto b = report_json(run_all(small, 99), 99).dump();
    CHECK(a == b);
    const auto c = report_json(run_all(small, 100), 100).dump();
    CHECK(a != c);

    VerifyOptions fault;
    fault.inject_fault = "np_duality";
    CHECK_FALSE(all_passed(run_all(small, 99, fault)));
    fault.inject_fault = "unregistered";
    CHECK_THROWS_AS(run_all(small, 99, fault), ValidationError);
}

TEST_CASE("full battery on the default seed") {
    const auto reports = run_all(kDefaultVerifySeed);
    int total = 0;
    for (const auto& r : reports) {
        INFO(r.id << " worst margin " << r.worst_margin);
        CHECK(r.failures == 0);
        total += r.trials;
    }
    CHECK(reports.size() == 8);
    CHECK(total >= 3000);
    CHECK(all_passed(reports));
}
