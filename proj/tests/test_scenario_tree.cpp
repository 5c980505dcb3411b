#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <random>

#include "glr/generate.hpp"
#include "glr/scenario_tree.hpp"

using namespace glr;

namespace {

ScenarioTree binomial(double up, double down, double p_up) {
    std::vector<TreeNode> nodes;
    nodes.push_back({0, std::nullopt, 0, 1.0, {0.0}});
    nodes.push_back({1, 0, 1, p_up, {up}});
    nodes.push_back({2, 0, 1, 1.0 - p_up, {down}});
    return ScenarioTree(1, std::move(nodes));
}

}  // namespace

TEST_CASE("one-period binomial with symmetric probabilities validates") {
    ScenarioTree t = binomial(2.0, -1.0, 0.5);
    REQUIRE(t.asset_count() == 1);
    REQUIRE(t.horizon() == 1);
    REQUIRE(t.root_id() == 0);
    REQUIRE(t.terminal_ids() == std::vector<int>{1, 2});
    REQUIRE(t.nonterminal_ids() == std::vector<int>{0});
}

TEST_CASE("child probabilities must sum to one") {
    std::vector<TreeNode> nodes;
    nodes.push_back({0, std::nullopt, 0, 1.0, {0.0}});
    nodes.push_back({1, 0, 1, 0.7, {1.0}});
    nodes.push_back({2, 0, 1, 0.2, {-1.0}});
    try {
        ScenarioTree t(1, std::move(nodes));
        FAIL("expected BadProbability");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::BadProbability);
    }
}

TEST_CASE("leaves at different stages are rejected") {
    std::vector<TreeNode> nodes;
    nodes.push_back({0, std::nullopt, 0, 1.0, {0.0}});
    nodes.push_back({1, 0, 1, 0.5, {1.0}});
    nodes.push_back({2, 0, 1, 0.5, {-1.0}});
    nodes.push_back({3, 1, 2, 0.5, {2.0}});
    nodes.push_back({4, 1, 2, 0.5, {0.0}});
    try {
        ScenarioTree t(1, std::move(nodes));
        FAIL("expected RaggedHorizon");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::RaggedHorizon);
    }
}

TEST_CASE("structural defects are caught") {
    SECTION("missing parent reference") {
        std::vector<TreeNode> nodes;
        nodes.push_back({0, std::nullopt, 0, 1.0, {0.0}});
        nodes.push_back({1, 7, 1, 1.0, {1.0}});
        REQUIRE_THROWS_MATCHES(ScenarioTree(1, std::move(nodes)), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return e.code() == ErrorCode::OrphanNode;
                               }));
    }
    SECTION("two roots") {
        std::vector<TreeNode> nodes;
        nodes.push_back({0, std::nullopt, 0, 1.0, {0.0}});
        nodes.push_back({1, std::nullopt, 0, 1.0, {0.0}});
        REQUIRE_THROWS_MATCHES(ScenarioTree(1, std::move(nodes)), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return e.code() == ErrorCode::OrphanNode;
                               }));
    }
    SECTION("non-finite price") {
        std::vector<TreeNode> nodes;
        nodes.push_back({0, std::nullopt, 0, 1.0, {0.0}});
        nodes.push_back({1, 0, 1, 0.5, {std::numeric_limits<double>::quiet_NaN()}});
        nodes.push_back({2, 0, 1, 0.5, {-1.0}});
        REQUIRE_THROWS_MATCHES(ScenarioTree(1, std::move(nodes)), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return e.code() == ErrorCode::NonFiniteNumber;
                               }));
    }
    SECTION("nonpositive probability") {
        std::vector<TreeNode> nodes;
        nodes.push_back({0, std::nullopt, 0, 1.0, {0.0}});
        nodes.push_back({1, 0, 1, 1.0, {1.0}});
        nodes.push_back({2, 0, 1, 0.0, {-1.0}});
        REQUIRE_THROWS_MATCHES(ScenarioTree(1, std::move(nodes)), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return e.code() == ErrorCode::BadProbability;
                               }));
    }
}

TEST_CASE("terminal measure is the product of branch probabilities") {
    SECTION("single stage") {
        ScenarioTree t = binomial(1.0, -1.0, 0.5);
        REQUIRE(t.terminal_measure().at(1) == 0.5);
        REQUIRE(t.terminal_measure().at(2) == 0.5);
    }
    SECTION("two stages of p=1/2 give quarters") {
        std::vector<TreeNode> nodes;
        nodes.push_back({0, std::nullopt, 0, 1.0, {0.0}});
        nodes.push_back({1, 0, 1, 0.5, {1.0}});
        nodes.push_back({2, 0, 1, 0.5, {-1.0}});
        nodes.push_back({3, 1, 2, 0.5, {2.0}});
        nodes.push_back({4, 1, 2, 0.5, {0.0}});
        nodes.push_back({5, 2, 2, 0.5, {0.0}});
        nodes.push_back({6, 2, 2, 0.5, {-2.0}});
        ScenarioTree t(1, std::move(nodes));
        for (int leaf : {3, 4, 5, 6}) REQUIRE(t.terminal_measure().at(leaf) == 0.25);
    }
    SECTION("sums to 1 and matches an independent path walk on random trees") {
        for (uint64_t seed = 1; seed <= 25; ++seed) {
            ScenarioTree t = random_tree(seed);
            double total = 0.0;
            for (auto [tid, p] : t.terminal_measure()) {
                // Independent recomputation: walk down from the root.
                double byhand = 1.0;
                int cur = tid;
                while (cur != t.root_id()) {
                    byhand *= t.node(cur).prob;
                    cur = *t.node(cur).parent;
                }
                REQUIRE_THAT(p, Catch::Matchers::WithinAbs(byhand, 1e-15));
                total += p;
            }
            REQUIRE_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-12));
        }
    }
}

TEST_CASE("gain vector telescopes price increments") {
    ScenarioTree t = binomial(2.0, -1.0, 0.5);
    SECTION("zero strategy gives zero payoff") {
        Strategy zero{{{0, {0.0}}}};
        Payoff g = t.gain_vector(zero);
        REQUIRE(g.values.at(1) == 0.0);
        REQUIRE(g.values.at(2) == 0.0);
    }
    SECTION("unit position") {
        Strategy one{{{0, {1.0}}}};
        Payoff g = t.gain_vector(one);
        REQUIRE(g.values.at(1) == 2.0);
        REQUIRE(g.values.at(2) == -1.0);
    }
    SECTION("scaling") {
        Strategy s{{{0, {-3.0}}}};
        Payoff g = t.gain_vector(s);
        REQUIRE(g.values.at(1) == -6.0);
        REQUIRE(g.values.at(2) == 3.0);
    }
    SECTION("missing node is a key mismatch") {
        Strategy bad;
        REQUIRE_THROWS_MATCHES(t.gain_vector(bad), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return e.code() == ErrorCode::KeyMismatch;
                               }));
    }
}

TEST_CASE("gain vector is linear in the strategy") {
    for (uint64_t seed = 100; seed < 120; ++seed) {
        ScenarioTree t = random_tree(seed);
        std::mt19937_64 g(seed * 31 + 7);
        auto draw = [&]() {
            Strategy s;
            for (int nid : t.nonterminal_ids()) {
                std::vector<double> pos;
                for (int a = 0; a < t.asset_count(); ++a) pos.push_back(uniform(g, -2.0, 2.0));
                s.positions[nid] = pos;
            }
            return s;
        };
        Strategy s1 = draw(), s2 = draw(), sum;
        for (int nid : t.nonterminal_ids()) {
            std::vector<double> pos;
            for (int a = 0; a < t.asset_count(); ++a)
                pos.push_back(s1.positions[nid][a] + s2.positions[nid][a]);
            sum.positions[nid] = pos;
        }
        Payoff g1 = t.gain_vector(s1), g2 = t.gain_vector(s2), gs = t.gain_vector(sum);
        for (int tid : t.terminal_ids())
            REQUIRE_THAT(gs.values.at(tid),
                         Catch::Matchers::WithinAbs(g1.values.at(tid) + g2.values.at(tid), 1e-10));
    }
}
