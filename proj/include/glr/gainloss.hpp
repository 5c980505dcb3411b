#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glr/lp.hpp"
#include "glr/scenario_tree.hpp"

namespace glr {

// alpha(X) = E[X+] / E[X-] under the given terminal measure. Undefined at the
// zero payoff; +inf when the payoff has no negative part.
inline double gain_loss_ratio(const Payoff& x, const std::map<int, double>& measure) {
    double pos = 0.0, neg = 0.0;
    bool all_zero = true;
    for (const auto& [tid, v] : x.values) {
        if (!std::isfinite(v)) fail(ErrorCode::NonFiniteNumber, "payoff at node " + std::to_string(tid));
        auto it = measure.find(tid);
        if (it == measure.end()) fail(ErrorCode::KeyMismatch, "payoff node " + std::to_string(tid));
        if (v != 0.0) all_zero = false;
        if (v > 0.0)
            pos += it->second * v;
        else
            neg -= it->second * v;
    }
    if (all_zero) fail(ErrorCode::ZeroPayoff, "gain-loss ratio undefined at the zero payoff");
    if (neg == 0.0) return kInf;
    return pos / neg;
}

// U(x) = x+ - lambda x-, the piecewise linear utility with loss weight lambda.
inline double gain_loss_utility(double x, double lambda) {
    if (lambda < 1.0) fail(ErrorCode::BadLambda, "lambda must be >= 1");
    return x >= 0.0 ? x : lambda * x;
}

// Convex conjugate of gain_loss_utility: 0 on [1, lambda], +inf elsewhere.
inline double gain_loss_conjugate(double y, double lambda) {
    if (lambda < 1.0) fail(ErrorCode::BadLambda, "lambda must be >= 1");
    return (y >= 1.0 && y <= lambda) ? 0.0 : kInf;
}

// V(y) - U(x) + x y; nonnegative for every pair, zero exactly at touching pairs.
inline double fenchel_gap(double x, double y, double lambda) {
    double v = gain_loss_conjugate(y, lambda);
    if (v == kInf) return kInf;
    return v - gain_loss_utility(x, lambda) + x * y;
}

struct GainLossReport {
    double value = 1.0;          // best gain-loss ratio, in [1, +inf]
    bool attained = false;
    std::optional<Strategy> witness_strategy;
    double witness_scale = 0.0;  // homogenization weight on the endowment
    double normalization = 0.0;  // E[X-] of the reported witness payoff
    LpStatus lp_status = LpStatus::Optimal;
};

namespace detail {

// Column layout of the homogenized best-gain-loss LP:
//   [strategy positions (free)] [scale s >= 0 if endowed] [u >= 0] [v >= 0]
// with one balance row per terminal node (u - v = s b + gain) and the
// normalization row E[v] = 1; the objective maximizes E[u].
struct PrimalLayout {
    int num_positions = 0;
    int scale_col = -1;
    int u0 = 0;
    int v0 = 0;
    int total = 0;
    std::vector<int> nonterm;  // node ids in column order
    std::vector<int> term;
};

inline PrimalLayout primal_layout(const ScenarioTree& tree, bool endowed) {
    PrimalLayout lay;
    lay.nonterm = tree.nonterminal_ids();
    lay.term = tree.terminal_ids();
    lay.num_positions = static_cast<int>(lay.nonterm.size()) * tree.asset_count();
    int next = lay.num_positions;
    if (endowed) lay.scale_col = next++;
    lay.u0 = next;
    next += static_cast<int>(lay.term.size());
    lay.v0 = next;
    next += static_cast<int>(lay.term.size());
    lay.total = next;
    return lay;
}

// Coefficients of the terminal gain as a linear form in the position columns.
inline std::vector<std::vector<double>> gain_coefficients(const ScenarioTree& tree,
                                                          const PrimalLayout& lay) {
    std::map<int, int> col_of_node;
    for (size_t k = 0; k < lay.nonterm.size(); ++k)
        col_of_node[lay.nonterm[k]] = static_cast<int>(k) * tree.asset_count();

    std::vector<std::vector<double>> rows;
    rows.reserve(lay.term.size());
    for (int tid : lay.term) {
        std::vector<double> row(lay.num_positions, 0.0);
        int cur = tid;
        while (cur != tree.root_id()) {
            int par = *tree.node(cur).parent;
            int base = col_of_node[par];
            for (int a = 0; a < tree.asset_count(); ++a)
                row[base + a] += tree.node(cur).prices[a] - tree.node(par).prices[a];
            cur = par;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline LpProblem build_primal(const ScenarioTree& tree, const Payoff* b, const PrimalLayout& lay,
                              const std::vector<std::vector<double>>& gains) {
    const auto& measure = tree.terminal_measure();
    LpProblem p = LpProblem::with_vars(lay.total);
    for (int k = 0; k < lay.num_positions; ++k) p.set_bounds(k, -kInf, kInf);
    if (lay.scale_col >= 0) p.set_bounds(lay.scale_col, 0.0, kInf);

    for (size_t i = 0; i < lay.term.size(); ++i) {
        std::vector<double> row(lay.total, 0.0);
        for (int k = 0; k < lay.num_positions; ++k) row[k] = -gains[i][k];
        if (b != nullptr) row[lay.scale_col] = -b->values.at(lay.term[i]);
        row[lay.u0 + static_cast<int>(i)] = 1.0;
        row[lay.v0 + static_cast<int>(i)] = -1.0;
        p.add_row(std::move(row), 0.0);
    }
    std::vector<double> norm(lay.total, 0.0);
    for (size_t i = 0; i < lay.term.size(); ++i)
        norm[lay.v0 + static_cast<int>(i)] = measure.at(lay.term[i]);
    p.add_row(std::move(norm), 1.0);

    for (size_t i = 0; i < lay.term.size(); ++i)
        p.objective[lay.u0 + static_cast<int>(i)] = measure.at(lay.term[i]);
    return p;
}

inline Strategy strategy_from_point(const ScenarioTree& tree, const PrimalLayout& lay,
                                    const std::vector<double>& x) {
    Strategy s;
    for (size_t k = 0; k < lay.nonterm.size(); ++k) {
        std::vector<double> pos(tree.asset_count());
        for (int a = 0; a < tree.asset_count(); ++a)
            pos[a] = x[static_cast<int>(k) * tree.asset_count() + a];
        s.positions[lay.nonterm[k]] = pos;
    }
    return s;
}

}  // namespace detail

// Best market gain-loss ratio around an optional endowment b:
//   sup alpha(s b + K) over scales s >= 0 and zero-cost gains K,
// solved as a single homogenized LP. With b absent this is the plain market
// optimum; an Unbounded LP encodes the value +inf. Attainment of the endowed
// supremum is decided by a second-stage LP maximizing the scale s at the
// fixed optimal value: s pinned at 0 is exactly the "infinite relative risk"
// degeneracy, reported as attained = false.
inline GainLossReport best_gain_loss(const ScenarioTree& tree,
                                     const std::optional<Payoff>& b = std::nullopt) {
    if (b) tree.require_terminal_payoff(*b);
    const bool endowed = b.has_value();
    detail::PrimalLayout lay = detail::primal_layout(tree, endowed);
    std::vector<std::vector<double>> gains = detail::gain_coefficients(tree, lay);
    LpProblem p = detail::build_primal(tree, endowed ? &*b : nullptr, lay, gains);
    LpOutcome first = solve_lp(p);

    GainLossReport rep;
    rep.lp_status = first.status;
    if (first.status == LpStatus::Infeasible)
        fail(ErrorCode::NumericalBreakdown, "homogenized gain-loss LP cannot be infeasible");

    const auto& measure = tree.terminal_measure();
    auto finish_witness = [&](const std::vector<double>& x, double scale) {
        Strategy s = detail::strategy_from_point(tree, lay, x);
        Payoff gain = tree.gain_vector(s);
        double neg = 0.0;
        for (size_t i = 0; i < lay.term.size(); ++i) {
            int tid = lay.term[i];
            double xi = gain.values.at(tid) + (endowed ? scale * b->values.at(tid) : 0.0);
            if (xi < 0.0) neg -= measure.at(tid) * xi;
        }
        rep.witness_strategy = std::move(s);
        rep.witness_scale = scale;
        rep.normalization = neg;
    };

    if (first.status == LpStatus::Unbounded) {
        rep.value = kInf;
        double ray_scale = endowed ? first.ray[lay.scale_col] : 0.0;
        finish_witness(first.ray, ray_scale);
        if (!endowed) {
            rep.attained = true;  // the ray itself is a nonzero gain with E[X-] = 0
        } else {
            // The infinite value is attained by a genuine endowed position iff
            // b + K >= 0 is superreplicable at zero cost: then either that
            // payoff is already nonzero or adding the unbounded ray makes it so.
            const int nu0 = lay.num_positions;
            LpProblem rec = LpProblem::with_vars(lay.num_positions +
                                                 static_cast<int>(lay.term.size()));
            for (int k = 0; k < lay.num_positions; ++k) rec.set_bounds(k, -kInf, kInf);
            for (size_t i = 0; i < lay.term.size(); ++i) {
                std::vector<double> row(rec.num_vars(), 0.0);
                for (int k = 0; k < lay.num_positions; ++k) row[k] = -gains[i][k];
                row[nu0 + static_cast<int>(i)] = 1.0;
                rec.add_row(std::move(row), b->values.at(lay.term[i]));
            }
            LpOutcome r = solve_lp(rec);
            rep.attained = (r.status != LpStatus::Infeasible);
            if (r.status == LpStatus::Optimal) finish_witness(r.primal, 1.0);
        }
        return rep;
    }

    rep.value = first.value;
    if (!endowed) {
        rep.attained = true;
        finish_witness(first.primal, 0.0);
        return rep;
    }

    // Second stage: maximize s over the optimal face.
    LpProblem stage2 = p;
    std::vector<double> fix = p.objective;
    stage2.add_row(std::move(fix), first.value);
    stage2.objective.assign(lay.total, 0.0);
    stage2.objective[lay.scale_col] = 1.0;
    LpOutcome second = solve_lp(stage2);
    if (second.status == LpStatus::Unbounded) {
        // The scale is a free wheel at the optimum (b is replicable up to
        // value-neutral directions); any positive s realizes the optimum.
        rep.attained = true;
        finish_witness(first.primal, first.primal[lay.scale_col]);
    } else if (second.status == LpStatus::Optimal) {
        rep.attained = second.value >= 1e-7;
        finish_witness(second.primal, second.primal[lay.scale_col]);
    } else {
        rep.attained = false;
        finish_witness(first.primal, first.primal[lay.scale_col]);
    }
    return rep;
}

// Strict comparison per the lambda gain-loss free definition: alpha* < lambda.
inline bool is_gain_loss_free(const ScenarioTree& tree, double lambda) {
    if (lambda <= 1.0) fail(ErrorCode::BadLambda, "gain-loss freedom needs lambda > 1");
    return best_gain_loss(tree).value < lambda;
}

}  // namespace glr
