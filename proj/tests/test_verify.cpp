#include "lomboost/verify.hpp"

#include <doctest.h>

#include <sstream>

using namespace lomboost;

TEST_CASE("all properties hold on a short run") {
    const auto results = run_verification({2000, 5, InjectedFault::None});
    REQUIRE_FALSE(results.empty());
    for (const auto& r : results) {
        CAPTURE(r.name);
        CAPTURE(r.counterexample);
        CHECK(r.passed);
        CHECK(r.trials > 0);
        CHECK(r.counterexample.empty());
    }
}

TEST_CASE("an inflated modulus is caught") {
    const auto results = run_verification({2000, 5, InjectedFault::Modulus});
    bool caught = false;
    for (const auto& r : results) {
        if (!r.passed) {
            caught = true;
            CHECK(r.name.find("jensen-gap") == 0);
            CHECK(r.counterexample.find("beta") != std::string::npos);
        }
    }
    CHECK(caught);
}

TEST_CASE("verification output is reproducible") {
    std::ostringstream a, b, c;
    print_verification(a, run_verification({10, 3, InjectedFault::None}));
    print_verification(b, run_verification({10, 3, InjectedFault::None}));
    CHECK(a.str() == b.str());
    CHECK(a.str().find("PASS (10 trials)") != std::string::npos);
}
