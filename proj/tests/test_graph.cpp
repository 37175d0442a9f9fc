#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "obsdet/graph.hpp"
#include "obsdet/inference.hpp"
#include "obsdet/rng.hpp"
#include "support/dsep_oracle.hpp"
#include "support/random_net.hpp"
#include "support/toy_nets.hpp"

using namespace obsdet;
using namespace obsdet::testing;

namespace {

// A -> B -> C plus a collider D <- A, D <- C and a dangling E below D.
BayesianNetwork playground_net() {
    return BayesianNetwork(
        {{"A", {"0", "1"}},
         {"B", {"0", "1"}},
         {"C", {"0", "1"}},
         {"D", {"0", "1"}},
         {"E", {"0", "1"}}},
        {{0, 1}, {1, 2}, {0, 3}, {2, 3}, {3, 4}},
        {Cpt{{}, {{0.4, 0.6}}},
         Cpt{{0}, {{0.7, 0.3}, {0.2, 0.8}}},
         Cpt{{1}, {{0.6, 0.4}, {0.1, 0.9}}},
         Cpt{{0, 2}, {{0.9, 0.1}, {0.5, 0.5}, {0.3, 0.7}, {0.2, 0.8}}},
         Cpt{{3}, {{0.75, 0.25}, {0.15, 0.85}}}});
}

}  // namespace

TEST_CASE("markov blanket basics") {
    SUBCASE("middle of a chain has no spouses") {
        BayesianNetwork net({{"A", {"0", "1"}}, {"B", {"0", "1"}}, {"C", {"0", "1"}}},
                            {{0, 1}, {1, 2}},
                            {Cpt{{}, {{0.5, 0.5}}},
                             Cpt{{0}, {{0.5, 0.5}, {0.5, 0.5}}},
                             Cpt{{1}, {{0.5, 0.5}, {0.5, 0.5}}}});
        CHECK(markov_blanket(net, net.var_index("B")) ==
              std::vector<VarIndex>{net.var_index("A"), net.var_index("C")});
    }
    SUBCASE("co-parents are spouses") {
        BayesianNetwork net({{"A", {"0", "1"}}, {"B", {"0", "1"}}, {"C", {"0", "1"}}},
                            {{0, 2}, {1, 2}},
                            {Cpt{{}, {{0.5, 0.5}}},
                             Cpt{{}, {{0.5, 0.5}}},
                             Cpt{{0, 1}, {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}}});
        CHECK(markov_blanket(net, net.var_index("A")) ==
              std::vector<VarIndex>{net.var_index("B"), net.var_index("C")});
    }
    SUBCASE("isolated node has an empty blanket") {
        BayesianNetwork net({{"A", {"0", "1"}}, {"Z", {"0", "1"}}}, {},
                            {Cpt{{}, {{0.5, 0.5}}}, Cpt{{}, {{0.5, 0.5}}}});
        CHECK(markov_blanket(net, net.var_index("Z")).empty());
    }
    SUBCASE("unknown index is a lookup error") {
        CHECK_THROWS_AS(markov_blanket(playground_net(), 42), LookupError);
    }
}

TEST_CASE("triple activation follows the four conditions") {
    auto net = playground_net();
    const VarIndex a = 0, b = 1, c = 2, d = 3, e = 4;

    SUBCASE("observed chain middle blocks") {
        PathTriple t{a, b, c, TripleKind::ChainForward};
        CHECK(!triple_active(net, t, make_mask(net, {b})));
        CHECK(triple_active(net, t, make_mask(net, {})));
    }
    SUBCASE("observed collider opens") {
        PathTriple t{a, d, c, TripleKind::Collider};
        CHECK(triple_active(net, t, make_mask(net, {d})));
        CHECK(!triple_active(net, t, make_mask(net, {})));
    }
    SUBCASE("a collider's observed descendant opens it too") {
        PathTriple t{a, d, c, TripleKind::Collider};
        CHECK(triple_active(net, t, make_mask(net, {e})));
    }
    SUBCASE("fork blocks when its middle is observed") {
        // B <- A -> D
        PathTriple t{b, a, d, TripleKind::Fork};
        CHECK(triple_active(net, t, make_mask(net, {})));
        CHECK(!triple_active(net, t, make_mask(net, {a})));
    }
    SUBCASE("misstated orientation is rejected") {
        PathTriple wrong{a, b, c, TripleKind::Collider};
        CHECK_THROWS_AS(triple_active(net, wrong, make_mask(net, {})), std::invalid_argument);
    }
}

TEST_CASE("active paths on hand-built graphs") {
    auto net = playground_net();
    const VarIndex a = 0, b = 1, c = 2;

    SUBCASE("direct edge is always active") {
        CHECK(has_active_path(net, a, b, make_mask(net, {})));
        CHECK(has_active_path(net, a, b, make_mask(net, {c})));
    }
    SUBCASE("chain blocked by its middle unless the collider route opens") {
        BayesianNetwork chain({{"A", {"0", "1"}}, {"B", {"0", "1"}}, {"C", {"0", "1"}}},
                              {{0, 1}, {1, 2}},
                              {Cpt{{}, {{0.5, 0.5}}},
                               Cpt{{0}, {{0.5, 0.5}, {0.5, 0.5}}},
                               Cpt{{1}, {{0.5, 0.5}, {0.5, 0.5}}}});
        CHECK(!has_active_path(chain, 0, 2, make_mask(chain, {1})));
        CHECK(has_active_path(chain, 0, 2, make_mask(chain, {})));
    }
    SUBCASE("endpoints must differ") {
        CHECK_THROWS_AS(has_active_path(net, a, a, make_mask(net, {})), std::invalid_argument);
    }
}

TEST_CASE("star graph: observing the hub couples parents and separates children") {
    auto net = star_net();
    VarIndex x1 = net.var_index("X1"), x2 = net.var_index("X2"), x3 = net.var_index("X3"),
             x4 = net.var_index("X4");
    VarMask hub = make_mask(net, {net.var_index("O")});
    CHECK(has_active_path(net, x1, x2, hub));
    CHECK(!has_active_path(net, x3, x4, hub));
}

TEST_CASE("bayes-ball agrees with the all-paths oracle") {
    // The endpoint y is sometimes itself observed: prune relies on trails
    // that end at evidence nodes, so that case must agree too.
    Rng rng(31337);
    for (int trial = 0; trial < 40; ++trial) {
        auto net = random_binary_network(rng, 4 + static_cast<int>(rng.below(5)), 0.35);
        for (int probe = 0; probe < 8; ++probe) {
            auto x = static_cast<VarIndex>(rng.below(static_cast<std::uint64_t>(net.size())));
            auto y = static_cast<VarIndex>(rng.below(static_cast<std::uint64_t>(net.size())));
            if (x == y) continue;
            Evidence ev = random_evidence(rng, net, static_cast<int>(rng.below(3)), x);
            if (rng.below(2) == 0) ev.erase(y);
            std::vector<VarIndex> observed;
            for (const auto& [var, _] : ev) observed.push_back(var);
            VarMask mask = make_mask(net, observed);
            CHECK(has_active_path(net, x, y, mask) == active_path_oracle(net, x, y, mask));
        }
    }
}

TEST_CASE("d-separation implies conditional independence on positive nets") {
    Rng rng(555);
    int checked = 0;
    for (int trial = 0; trial < 30 && checked < 40; ++trial) {
        auto net = random_binary_network(rng, 6, 0.3);
        for (VarIndex x = 0; x < net.size() && checked < 40; ++x) {
            for (VarIndex y = 0; y < net.size(); ++y) {
                if (x == y) continue;
                Evidence ev = random_evidence(rng, net, 2, x);
                ev.erase(y);
                std::vector<VarIndex> observed;
                for (const auto& [var, _] : ev) observed.push_back(var);
                if (has_active_path(net, x, y, make_mask(net, observed))) continue;

                // Blocked: conditioning on y must not move P(x | ev).
                for (ValueIndex xv = 0; xv < 2; ++xv) {
                    for (ValueIndex yv = 0; yv < 2; ++yv) {
                        Query without{x, xv, ev};
                        Query with{x, xv, ev};
                        with.evidence[y] = yv;
                        CHECK(std::abs(query(net, without) - query(net, with)) <= 1e-9);
                    }
                }
                ++checked;
                break;
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("prune keeps exactly the requisite observations") {
    auto net = leave_home_net();

    SUBCASE("empty prior set prunes to nothing") {
        CHECK(prune(net, {}, net.var_index("leaveHome")).empty());
    }

    SUBCASE("an isolated extra variable is dropped") {
        // sex has no connection to leaveHome: d-separated given the rest.
        BayesianNetwork with_sex(
            {{"sex", {"f", "m"}},
             {"driveCar", {"0", "1"}},
             {"doShopping", {"0", "1"}},
             {"leaveHome", {"0", "1"}}},
            {{1, 3}, {2, 3}},
            {Cpt{{}, {{0.5, 0.5}}},
             Cpt{{}, {{0.5, 0.5}}},
             Cpt{{}, {{0.5, 0.5}}},
             Cpt{{1, 2}, {{0.999, 0.001}, {0.01, 0.99}, {0.01, 0.99}, {0.01, 0.99}}}});
        auto obs_prime = observations(with_sex,
                                      {{"sex", "f"}, {"driveCar", "0"}, {"doShopping", "0"}});
        auto kept = prune(with_sex, obs_prime, with_sex.var_index("leaveHome"));
        REQUIRE(kept.size() == 2);
        CHECK(kept[0].var == with_sex.var_index("driveCar"));
        CHECK(kept[1].var == with_sex.var_index("doShopping"));
    }

    SUBCASE("fully observed blanket bounds the result") {
        auto net2 = star_net();
        VarIndex hub = net2.var_index("O");
        auto blanket = markov_blanket(net2, hub);
        auto obs_prime = observations(
            net2, {{"X1", "0"}, {"X2", "1"}, {"X3", "0"}, {"X4", "1"}, {"X5", "0"}});
        auto kept = prune(net2, obs_prime, hub);
        for (const Observation& o : kept) {
            CHECK(std::find(blanket.begin(), blanket.end(), o.var) != blanket.end());
        }
    }

    SUBCASE("the new variable may not appear in the prior set") {
        auto obs_prime = observations(net, {{"leaveHome", "1"}});
        CHECK_THROWS_AS(prune(net, obs_prime, net.var_index("leaveHome")),
                        std::invalid_argument);
    }
}

TEST_CASE("pruned-away observations never change the conditional") {
    Rng rng(4242);
    int exercised = 0;
    for (int trial = 0; trial < 40; ++trial) {
        auto net = random_binary_network(rng, 7, 0.3);
        auto o_new_var = static_cast<VarIndex>(rng.below(static_cast<std::uint64_t>(net.size())));
        Evidence ev = random_evidence(rng, net, 4, o_new_var);
        ObservationSet obs_prime;
        for (const auto& [var, val] : ev) obs_prime.push_back({var, val, std::nullopt});

        ObservationSet kept = prune(net, obs_prime, o_new_var);
        if (kept.size() == obs_prime.size()) continue;

        for (ValueIndex nv = 0; nv < 2; ++nv) {
            double with_all = query(net, Query{o_new_var, nv, to_evidence(obs_prime)});
            for (const Observation& dropped : obs_prime) {
                if (std::find(kept.begin(), kept.end(), dropped) != kept.end()) continue;
                ObservationSet reduced;
                for (const Observation& o : obs_prime) {
                    if (!(o == dropped)) reduced.push_back(o);
                }
                double without = query(net, Query{o_new_var, nv, to_evidence(reduced)});
                CHECK(std::abs(with_all - without) <= 1e-9);
                ++exercised;
            }
        }
    }
    CHECK(exercised > 0);
}
