#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "glr/errors.hpp"
#include "glr/scenario_tree.hpp"

namespace glr {

// Truncation of the countable fork market: stage one picks one of N binomial
// forks, stage two moves the single asset from 0 up to `up_value` or down to
// -(1 + 1/n) in fork n. The regime up_value >= 2 (1 - p_up) / p_up makes the
// long position optimal in every fork, so the per-fork optima increase
// strictly in n and the untruncated supremum is never attained.
struct ForkMarketSpec {
    int fork_count = 1;      // N >= 1
    double up_value = 2.0;   // c > 0
    double p_up = 0.5;       // conditional up probability, in (0,1)
    std::vector<double> fork_weights;  // empty = uniform; renormalized

    void validate() const {
        if (fork_count < 1) fail(ErrorCode::BadSpec, "fork_count must be at least 1");
        if (!(up_value > 0.0)) fail(ErrorCode::BadSpec, "up_value must be positive");
        if (!(p_up > 0.0 && p_up < 1.0)) fail(ErrorCode::BadSpec, "p_up must lie in (0,1)");
        double floor = 2.0 * (1.0 - p_up) / p_up;
        if (up_value < floor)
            fail(ErrorCode::BadSpec, "up_value " + std::to_string(up_value) +
                                         " below the long-optimal floor " + std::to_string(floor));
        if (!fork_weights.empty()) {
            if (static_cast<int>(fork_weights.size()) != fork_count)
                fail(ErrorCode::BadSpec, "fork_weights length must equal fork_count");
            for (double w : fork_weights)
                if (!(w > 0.0)) fail(ErrorCode::BadSpec, "fork weights must be strictly positive");
        }
    }

    std::vector<double> normalized_weights() const {
        std::vector<double> w = fork_weights;
        if (w.empty()) w.assign(fork_count, 1.0);
        double sum = 0.0;
        for (double v : w) sum += v;
        for (double& v : w) v /= sum;
        return w;
    }
};

// Node ids: 0 = root, 1..N = forks, then per fork n the up leaf N + 2n - 1
// and the down leaf N + 2n.
inline ScenarioTree make_fork_market(const ForkMarketSpec& spec) {
    spec.validate();
    std::vector<double> w = spec.normalized_weights();
    std::vector<TreeNode> nodes;
    nodes.push_back({0, std::nullopt, 0, 1.0, {0.0}});
    for (int n = 1; n <= spec.fork_count; ++n) nodes.push_back({n, 0, 1, w[n - 1], {0.0}});
    for (int n = 1; n <= spec.fork_count; ++n) {
        double down = -(1.0 + 1.0 / n);
        nodes.push_back({spec.fork_count + 2 * n - 1, n, 2, spec.p_up, {spec.up_value}});
        nodes.push_back({spec.fork_count + 2 * n, n, 2, 1.0 - spec.p_up, {down}});
    }
    return ScenarioTree(1, std::move(nodes));
}

struct ForkAlphaReport {
    std::vector<double> per_fork;  // best ratio achievable inside fork n
    double truncated_alpha = 0.0;  // market optimum of the N-fork truncation
    double limit_alpha = 0.0;      // supremum of the untruncated market
};

// Closed forms in the long-optimal regime: fork n is worth
// c p / ((1 + 1/n)(1 - p)), strictly increasing toward c p / (1 - p).
inline ForkAlphaReport fork_alpha_closed_form(const ForkMarketSpec& spec) {
    spec.validate();
    ForkAlphaReport rep;
    for (int n = 1; n <= spec.fork_count; ++n)
        rep.per_fork.push_back(spec.up_value * spec.p_up / ((1.0 + 1.0 / n) * (1.0 - spec.p_up)));
    rep.truncated_alpha = rep.per_fork.back();
    rep.limit_alpha = spec.up_value * spec.p_up / (1.0 - spec.p_up);
    return rep;
}

}  // namespace glr
