#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "glr/scenario_tree.hpp"

namespace glr {

// All randomness in the project flows through these helpers: explicit
// mt19937_64 bit streams mapped to doubles by hand, so a seed pins the exact
// sample sequence regardless of standard-library distribution internals.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

inline double normal_sample(std::mt19937_64& g) {
    double u1 = uniform01(g);
    double u2 = uniform01(g);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct TreeGenParams {
    int min_stages = 1;
    int max_stages = 3;
    int min_branch = 2;
    int max_branch = 4;
    int min_assets = 1;
    int max_assets = 2;
    double move_scale = 1.0;
    double prob_floor = 0.08;  // keeps branch probabilities well away from 0
};

namespace detail {

inline std::vector<double> random_simplex(std::mt19937_64& g, int k, double floor) {
    std::vector<double> w(k);
    double sum = 0.0;
    for (double& v : w) {
        v = floor + uniform01(g);
        sum += v;
    }
    for (double& v : w) v /= sum;
    return w;
}

struct TreeBuilder {
    std::vector<TreeNode> nodes;
    int next_id = 0;

    int add(std::optional<int> parent, int time, double prob, std::vector<double> prices) {
        nodes.push_back({next_id, parent, time, prob, std::move(prices)});
        return next_id++;
    }
};

}  // namespace detail

// Random multi-period tree. Child price moves are drawn centred near zero
// (a drift-damping recentring), which biases toward arbitrage-free markets
// without guaranteeing them; use random_arbitrage_free_tree when finiteness
// of the best gain-loss matters.
inline ScenarioTree random_tree(uint64_t seed, const TreeGenParams& params = {}) {
    std::mt19937_64 g(seed * 0x9E3779B97F4A7C15ULL + 1);
    int stages = params.min_stages +
                 static_cast<int>(g() % static_cast<uint64_t>(params.max_stages - params.min_stages + 1));
    int assets = params.min_assets +
                 static_cast<int>(g() % static_cast<uint64_t>(params.max_assets - params.min_assets + 1));

    detail::TreeBuilder tb;
    std::vector<double> root_prices;
    for (int a = 0; a < assets; ++a) root_prices.push_back(uniform(g, -1.0, 1.0));
    std::vector<int> frontier{tb.add(std::nullopt, 0, 1.0, std::move(root_prices))};

    for (int t = 1; t <= stages; ++t) {
        std::vector<int> next;
        for (int pid : frontier) {
            int k = params.min_branch +
                    static_cast<int>(g() % static_cast<uint64_t>(params.max_branch - params.min_branch + 1));
            std::vector<double> probs = detail::random_simplex(g, k, params.prob_floor);
            std::vector<std::vector<double>> moves(k, std::vector<double>(assets));
            for (int a = 0; a < assets; ++a) {
                double mean = 0.0;
                for (int c = 0; c < k; ++c) {
                    moves[c][a] = uniform(g, -params.move_scale, params.move_scale);
                    mean += probs[c] * moves[c][a];
                }
                double damp = uniform(g, 0.6, 1.0);
                for (int c = 0; c < k; ++c) moves[c][a] -= damp * mean;
            }
            for (int c = 0; c < k; ++c) {
                std::vector<double> prices = tb.nodes[pid].prices;
                for (int a = 0; a < assets; ++a) prices[a] += moves[c][a];
                next.push_back(tb.add(pid, t, probs[c], std::move(prices)));
            }
        }
        frontier = std::move(next);
    }
    return ScenarioTree(assets, std::move(tb.nodes));
}

// Tree whose historical measure is a martingale measure: every node's last
// child move is solved so the conditional one-step expectation vanishes.
inline ScenarioTree random_martingale_tree(uint64_t seed, const TreeGenParams& params = {}) {
    std::mt19937_64 g(seed * 0xD1B54A32D192ED03ULL + 3);
    int stages = params.min_stages +
                 static_cast<int>(g() % static_cast<uint64_t>(params.max_stages - params.min_stages + 1));
    int assets = params.min_assets +
                 static_cast<int>(g() % static_cast<uint64_t>(params.max_assets - params.min_assets + 1));

    detail::TreeBuilder tb;
    std::vector<double> root_prices;
    for (int a = 0; a < assets; ++a) root_prices.push_back(uniform(g, -1.0, 1.0));
    std::vector<int> frontier{tb.add(std::nullopt, 0, 1.0, std::move(root_prices))};

    for (int t = 1; t <= stages; ++t) {
        std::vector<int> next;
        for (int pid : frontier) {
            int k = params.min_branch +
                    static_cast<int>(g() % static_cast<uint64_t>(params.max_branch - params.min_branch + 1));
            std::vector<double> probs = detail::random_simplex(g, k, params.prob_floor);
            std::vector<std::vector<double>> moves(k, std::vector<double>(assets));
            for (int a = 0; a < assets; ++a) {
                double acc = 0.0;
                for (int c = 0; c + 1 < k; ++c) {
                    moves[c][a] = uniform(g, -params.move_scale, params.move_scale);
                    acc += probs[c] * moves[c][a];
                }
                moves[k - 1][a] = -acc / probs[k - 1];
            }
            for (int c = 0; c < k; ++c) {
                std::vector<double> prices = tb.nodes[pid].prices;
                for (int a = 0; a < assets; ++a) prices[a] += moves[c][a];
                next.push_back(tb.add(pid, t, probs[c], std::move(prices)));
            }
        }
        frontier = std::move(next);
    }
    return ScenarioTree(assets, std::move(tb.nodes));
}

// Martingale tree with a deterministic drift injected at the root branching,
// so the historical measure is no longer a martingale measure.
inline ScenarioTree random_nonmartingale_tree(uint64_t seed, const TreeGenParams& params = {}) {
    ScenarioTree base = random_martingale_tree(seed, params);
    std::mt19937_64 g(seed * 0xA24BAED4963EE407ULL + 9);
    std::vector<TreeNode> nodes = base.nodes();
    std::vector<double> drift;
    for (int a = 0; a < base.asset_count(); ++a) {
        double d = uniform(g, 0.2, 0.5);
        if (uniform01(g) < 0.5) d = -d;
        drift.push_back(d);
    }
    // Shift the entire subtree of each stage-1 node so only the root edge
    // acquires drift and later increments keep their conditional means.
    for (TreeNode& n : nodes) {
        if (n.time >= 1) {
            for (int a = 0; a < base.asset_count(); ++a) n.prices[a] += drift[a];
        }
    }
    return ScenarioTree(base.asset_count(), std::move(nodes));
}

inline Payoff random_payoff(uint64_t seed, const ScenarioTree& tree, double scale = 1.0) {
    std::mt19937_64 g(seed * 0x94D049BB133111EBULL + 5);
    Payoff p;
    for (int tid : tree.terminal_ids()) p.values[tid] = scale * normal_sample(g);
    return p;
}

}  // namespace glr
