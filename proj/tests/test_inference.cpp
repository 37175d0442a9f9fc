#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "obsdet/graph.hpp"
#include "obsdet/inference.hpp"
#include "obsdet/rng.hpp"
#include "support/random_net.hpp"
#include "support/toy_nets.hpp"

using namespace obsdet;
using namespace obsdet::testing;

namespace {

Query make_query(const BayesianNetwork& net, const std::string& target, const std::string& value,
                 std::vector<std::pair<std::string, std::string>> evidence = {}) {
    Query q;
    q.target = net.var_index(target);
    q.value = net.value_index(q.target, value);
    q.evidence = to_evidence(observations(net, std::move(evidence)));
    return q;
}

}  // namespace

TEST_CASE("enumeration oracle reproduces hand-derived values") {
    SUBCASE("prior read-off on a single node") {
        auto net = single_node_net();
        CHECK(query_enumeration(net, make_query(net, "A", "a1")) ==
              doctest::Approx(0.7).epsilon(1e-12));
    }
    SUBCASE("leaveHome with both causes absent") {
        auto net = leave_home_net();
        double p = query_enumeration(
            net, make_query(net, "leaveHome", "1", {{"driveCar", "0"}, {"doShopping", "0"}}));
        CHECK(p == doctest::Approx(0.001).epsilon(1e-9));
    }
    SUBCASE("leaveHome with one cause unknown") {
        auto net = leave_home_net();
        double p = query_enumeration(net,
                                     make_query(net, "leaveHome", "1", {{"driveCar", "0"}}));
        CHECK(p == doctest::Approx(0.4955).epsilon(1e-9));
    }
}

TEST_CASE("variable elimination reproduces the oracle examples") {
    auto net = leave_home_net();
    CHECK(query(net, make_query(net, "leaveHome", "1", {{"driveCar", "0"}, {"doShopping", "0"}}))
          == doctest::Approx(0.001).epsilon(1e-9));
    CHECK(query(net, make_query(net, "leaveHome", "1", {{"driveCar", "0"}})) ==
          doctest::Approx(0.4955).epsilon(1e-9));
    auto single = single_node_net();
    CHECK(query(single, make_query(single, "A", "a1")) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("evidence beyond the Markov blanket does not move the answer") {
    // star_net: MB(X3) = {O}. Conditioning additionally on X1, X2, X5 must
    // leave P(X3 | .) unchanged once O is fixed.
    auto net = star_net();
    Query blanket_only = make_query(net, "X3", "1", {{"O", "1"}});
    Query everything =
        make_query(net, "X3", "1", {{"O", "1"}, {"X1", "0"}, {"X2", "1"}, {"X5", "0"}});
    CHECK(std::abs(query(net, blanket_only) - query(net, everything)) <= 1e-9);
    CHECK(std::abs(query_enumeration(net, blanket_only) -
                   query_enumeration(net, everything)) <= 1e-9);
}

TEST_CASE("engines agree on random networks and random queries") {
    Rng rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        auto net = random_binary_network(rng, 4 + static_cast<int>(rng.below(7)), 0.35);
        for (int k = 0; k < 5; ++k) {
            Query q = random_query(rng, net, net.size() - 1);
            double fast = query(net, q);
            double slow = query_enumeration(net, q);
            CHECK(std::abs(fast - slow) <= 1e-9);
            CHECK(fast >= 0.0);
            CHECK(fast <= 1.0);
        }
    }
}

TEST_CASE("posterior distributions normalize and match per-value queries") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        auto net = random_binary_network(rng, 6, 0.4);
        Query q = random_query(rng, net, 3);
        auto dist = posterior_distribution(net, q.target, q.evidence);
        CHECK(std::accumulate(dist.begin(), dist.end(), 0.0) ==
              doctest::Approx(1.0).epsilon(1e-9));
        for (ValueIndex v = 0; v < net.domain_size(q.target); ++v) {
            Query per_value = q;
            per_value.value = v;
            CHECK(std::abs(dist[static_cast<std::size_t>(v)] -
                           query_enumeration(net, per_value)) <= 1e-9);
        }
    }
}

TEST_CASE("posterior examples on the leaveHome network") {
    auto net = leave_home_net();
    SUBCASE("no evidence on a root returns its prior") {
        auto dist = posterior_distribution(net, net.var_index("driveCar"), {});
        CHECK(dist[0] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("who left home despite not shopping almost surely drives") {
        auto evidence = to_evidence(observations(net, {{"leaveHome", "1"}, {"doShopping", "0"}}));
        auto dist = posterior_distribution(net, net.var_index("driveCar"), evidence);
        // 0.5*0.99 / (0.5*0.99 + 0.5*0.001), frozen from the enumeration oracle.
        CHECK(dist[1] == doctest::Approx(0.99899091).epsilon(1e-6));
        CHECK(dist[1] > 0.998);
    }
}

TEST_CASE("both engines reject impossible evidence the same way") {
    // leaveHome = 1 together with both causes absent is possible (0.001), so
    // force impossibility through a hard zero CPT.
    BayesianNetwork net({{"A", {"0", "1"}}, {"B", {"0", "1"}}}, {{0, 1}},
                        {Cpt{{}, {{1.0, 0.0}}}, Cpt{{0}, {{0.5, 0.5}, {0.5, 0.5}}}});
    Query q = make_query(net, "B", "1", {{"A", "1"}});  // P(A=1) = 0
    CHECK_THROWS_AS((void)query(net, q), ImpossibleEvidenceError);
    CHECK_THROWS_AS((void)query_enumeration(net, q), ImpossibleEvidenceError);
}

TEST_CASE("query preconditions are enforced") {
    auto net = chain_ab_net();
    Query bad;
    bad.target = net.var_index("A");
    bad.value = 0;
    bad.evidence[bad.target] = 1;
    CHECK_THROWS_AS((void)query(net, bad), std::invalid_argument);
    CHECK_THROWS_AS((void)query_enumeration(net, bad), std::invalid_argument);

    Query unknown;
    unknown.target = 99;
    unknown.value = 0;
    CHECK_THROWS_AS((void)query(net, unknown), LookupError);
}

TEST_CASE("deterministic-looking gates still work through elimination") {
    // Evidence on all variables: the conditional degenerates to 0 or 1.
    auto net = leave_home_net();
    double p = query(net, make_query(net, "leaveHome", "1",
                                     {{"driveCar", "1"}, {"doShopping", "1"}}));
    CHECK(p == doctest::Approx(0.99).epsilon(1e-9));
}
