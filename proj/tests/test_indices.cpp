#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "glr/generate.hpp"
#include "glr/indices.hpp"

using namespace glr;
using Catch::Matchers::WithinAbs;

namespace {

ScenarioTree binomial(double up, double down, double p_up) {
    std::vector<TreeNode> nodes;
    nodes.push_back({0, std::nullopt, 0, 1.0, {0.0}});
    nodes.push_back({1, 0, 1, p_up, {up}});
    nodes.push_back({2, 0, 1, 1.0 - p_up, {down}});
    return ScenarioTree(1, std::move(nodes));
}

Payoff constant_payoff(const ScenarioTree& t, double v) {
    Payoff p;
    for (int tid : t.terminal_ids()) p.values[tid] = v;
    return p;
}

Payoff shifted(const ScenarioTree& t, const Payoff& b, double d) {
    Payoff p = b;
    for (int tid : t.terminal_ids()) p.values[tid] += d;
    return p;
}

}  // namespace

TEST_CASE("monotonicity verdicts") {
    ScenarioTree t = binomial(2.0, -1.0, 0.5);
    Payoff b = random_payoff(7, t);
    SECTION("equal endowments pass with equality") {
        PropertyVerdict v = check_monotonicity(t, b, b);
        REQUIRE(v.passed());
        REQUIRE(v.max_violation <= 1e-12);
    }
    SECTION("adding a positive constant passes") {
        REQUIRE(check_monotonicity(t, b, shifted(t, b, 1.0)).passed());
    }
    SECTION("unordered endowments violate the precondition") {
        REQUIRE_THROWS_MATCHES(check_monotonicity(t, shifted(t, b, 1.0), b), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return e.code() == ErrorCode::PreconditionViolated;
                               }));
    }
    SECTION("random ordered pairs pass across seeded instances") {
        for (uint64_t seed = 1; seed <= 60; ++seed) {
            ScenarioTree rt = random_tree(seed);
            Payoff b1 = random_payoff(seed * 2 + 1, rt);
            Payoff b2 = b1;
            std::mt19937_64 g(seed);
            for (auto& [tid, v] : b2.values) v += uniform01(g);
            REQUIRE(check_monotonicity(rt, b1, b2).passed());
        }
    }
}

TEST_CASE("quasi-concavity verdicts") {
    ScenarioTree t = binomial(2.0, -1.0, 0.5);
    Payoff b1 = random_payoff(11, t);
    Payoff b2 = random_payoff(12, t);
    SECTION("endpoints are exact") {
        REQUIRE(check_quasi_concavity(t, b1, b2, 0.0).passed());
        REQUIRE(check_quasi_concavity(t, b1, b2, 1.0).passed());
    }
    SECTION("interior mixtures on random instances") {
        std::mt19937_64 g(5);
        for (uint64_t seed = 100; seed < 160; ++seed) {
            ScenarioTree rt = random_tree(seed);
            PropertyVerdict v = check_quasi_concavity(rt, random_payoff(seed + 1, rt),
                                                      random_payoff(seed + 2, rt), uniform01(g));
            REQUIRE(v.passed());
        }
    }
    SECTION("weight outside the unit interval is rejected") {
        REQUIRE_THROWS_MATCHES(check_quasi_concavity(t, b1, b2, 1.5), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return e.code() == ErrorCode::PreconditionViolated;
                               }));
    }
}

TEST_CASE("plain gain-loss ratio is quasi-concave on positive-expectation payoffs") {
    std::mt19937_64 g(77);
    int tested = 0;
    while (tested < 200) {
        int n = 2 + static_cast<int>(g() % 4);
        std::map<int, double> p;
        double rest = 1.0;
        for (int i = 0; i < n; ++i) {
            double w = (i == n - 1) ? rest : rest * uniform(g, 0.2, 0.5);
            p[i] = w;
            rest -= (i == n - 1) ? 0.0 : w;
        }
        Payoff x, y;
        double ex = 0.0, ey = 0.0;
        for (int i = 0; i < n; ++i) {
            x.values[i] = uniform(g, -1.0, 2.0);
            y.values[i] = uniform(g, -1.0, 2.0);
            ex += p[i] * x.values[i];
            ey += p[i] * y.values[i];
        }
        if (ex <= 0.0 || ey <= 0.0) continue;
        ++tested;
        double c = uniform01(g);
        Payoff mix;
        bool zero = true;
        for (int i = 0; i < n; ++i) {
            mix.values[i] = c * x.values[i] + (1.0 - c) * y.values[i];
            zero = zero && mix.values[i] == 0.0;
        }
        if (zero) continue;
        double am = gain_loss_ratio(mix, p);
        double ax = gain_loss_ratio(x, p);
        double ay = gain_loss_ratio(y, p);
        double lo = std::min(ax, ay);
        if (std::isinf(am)) continue;
        REQUIRE(am >= lo - 1e-9 * std::max(1.0, lo));
    }
}

TEST_CASE("scale invariance verdicts") {
    SECTION("unit scale is exact and bad scales throw") {
        ScenarioTree t = binomial(2.0, -1.0, 0.5);
        Payoff b = random_payoff(3, t);
        REQUIRE(check_scale_invariance(t, b, {1.0}).passed());
        REQUIRE_THROWS_MATCHES(check_scale_invariance(t, b, {0.0}), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return e.code() == ErrorCode::BadScale;
                               }));
    }
    SECTION("canonical scales on random instances") {
        for (uint64_t seed = 200; seed < 240; ++seed) {
            ScenarioTree rt = random_tree(seed);
            PropertyVerdict v =
                check_scale_invariance(rt, random_payoff(seed + 9, rt), {0.1, 3.0, 100.0});
            REQUIRE(v.passed());
        }
    }
    SECTION("constant negative endowment in a complete martingale market") {
        ScenarioTree t = binomial(1.0, -1.0, 0.5);
        Payoff b = constant_payoff(t, -1.0);
        for (double c : {0.1, 1.0, 3.0, 100.0}) {
            Payoff cb = b;
            for (auto& [tid, v] : cb.values) v *= c;
            REQUIRE_THAT(best_gain_loss(t, cb).value, WithinAbs(1.0, 1e-9));
        }
        REQUIRE(check_scale_invariance(t, b, {0.1, 3.0, 100.0}).passed());
    }
}

TEST_CASE("continuity from below along the shifted sequence") {
    SECTION("finite limit on a fixed instance") {
        ScenarioTree t = binomial(2.0, -1.0, 0.5);
        PropertyVerdict v = check_continuity_from_below(t, random_payoff(31, t), 64);
        REQUIRE(v.passed());
    }
    SECTION("plateau case: b = 0 in a complete martingale market") {
        ScenarioTree t = binomial(1.0, -1.0, 0.5);
        Payoff zero = constant_payoff(t, 0.0);
        PropertyVerdict v = check_continuity_from_below(t, zero, 16);
        REQUIRE(v.passed());
        REQUIRE(v.max_violation <= 1e-9);
    }
    SECTION("random finite instances converge") {
        int used = 0;
        for (uint64_t seed = 300; seed < 400 && used < 30; ++seed) {
            ScenarioTree rt = random_tree(seed);
            Payoff b = random_payoff(seed + 4, rt);
            if (!std::isfinite(best_gain_loss(rt, b).value)) continue;
            ++used;
            REQUIRE(check_continuity_from_below(rt, b, 24).passed());
        }
        REQUIRE(used >= 20);
    }
    SECTION("a corrupted solver is caught by the harness") {
        ScenarioTree t = binomial(2.0, -1.0, 0.5);
        Payoff b = constant_payoff(t, -1.0);  // finite plateau at alpha*(0)
        int calls = 0;
        AlphaSolver corrupted = [&](const ScenarioTree& tr, const std::optional<Payoff>& bb) {
            double v = lp_alpha(tr, bb);
            if (++calls == 5) v += 0.5;  // one wrong answer mid-sequence
            return v;
        };
        PropertyVerdict v = check_continuity_from_below(t, b, 10, corrupted);
        REQUIRE_FALSE(v.passed());
    }
}

TEST_CASE("lambda bisection recovers the dual value") {
    SECTION("asymmetric binomial") {
        ScenarioTree t = binomial(2.0, -1.0, 0.5);
        BisectionResult r = alpha_via_lambda_bisection(t, std::nullopt, 1e-7);
        REQUIRE_THAT(r.value, WithinAbs(2.0, 1e-6));
        REQUIRE_FALSE(r.cap_reached);
    }
    SECTION("martingale tree returns exactly one") {
        ScenarioTree t = binomial(1.0, -1.0, 0.5);
        REQUIRE(alpha_via_lambda_bisection(t, std::nullopt, 1e-7).value == 1.0);
    }
    SECTION("positively priced endowment reaches the cap") {
        ScenarioTree t = binomial(2.0, -1.0, 0.5);
        Payoff b{{{1, 1.0}, {2, 0.0}}};
        BisectionResult r = alpha_via_lambda_bisection(t, b, 1e-7);
        REQUIRE(r.value == kInf);
        REQUIRE(r.cap_reached);
    }
    SECTION("agreement with the dual optimizer on random instances") {
        for (uint64_t seed = 500; seed < 560; ++seed) {
            ScenarioTree rt = random_tree(seed);
            Payoff b = random_payoff(seed + 7, rt);
            DualReport dual = dual_best_gain_loss(rt, b);
            BisectionResult bis = alpha_via_lambda_bisection(rt, b, 1e-7);
            if (std::isinf(dual.value)) {
                REQUIRE(bis.value == kInf);
            } else {
                REQUIRE_THAT(bis.value, WithinAbs(dual.value, 1e-6));
            }
        }
    }
}

TEST_CASE("alpha*(B) never falls below alpha*(0)") {
    for (uint64_t seed = 600; seed < 660; ++seed) {
        ScenarioTree rt = random_tree(seed);
        double a0 = best_gain_loss(rt).value;
        double ab = best_gain_loss(rt, random_payoff(seed + 3, rt)).value;
        if (std::isinf(a0)) {
            REQUIRE(std::isinf(ab));
        } else if (!std::isinf(ab)) {
            REQUIRE(ab >= a0 - 1e-9 * std::max(1.0, a0));
        }
    }
}

TEST_CASE("batch property driver aggregates verdicts") {
    ScenarioTree t = binomial(2.0, -1.0, 0.5);
    std::vector<PropertyVerdict> verdicts = run_property_checks(t, 4242, 10);
    REQUIRE(verdicts.size() == 5);
    for (const PropertyVerdict& v : verdicts) {
        INFO(v.property);
        REQUIRE(v.passed());
        REQUIRE(v.seed == 4242);
        REQUIRE(v.instances_tested > 0);
    }
}
