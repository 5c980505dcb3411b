#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glr/gainloss.hpp"
#include "glr/lp.hpp"
#include "glr/scenario_tree.hpp"

namespace glr {

// Unnormalized pricing-kernel density against P on terminal states.
struct KernelWeights {
    std::map<int, double> weights;
};

struct DualReport {
    double value = kInf;  // min ess sup Z / ess inf Z, in [1, +inf]
    std::optional<KernelWeights> kernel;  // minimizer, min weight normalized to 1
    double ess_sup = 0.0;
    double ess_inf = 0.0;
    std::optional<double> endowment_expectation;  // E_Q[B] at the minimizer
    LpStatus lp_status = LpStatus::Optimal;
};

// One equality row per (non-terminal node, asset): the kernel-reweighted
// conditional one-step price increment vanishes,
//   sum over terminal descendants i of node n:  p_i Z_i (Sـchild(n,i) - S_n) = 0,
// which on a tree is exactly "Z is a martingale density" stage by stage.
struct MartingaleSystem {
    std::vector<int> terminals;                 // column order
    std::vector<std::vector<double>> rows;      // coefficients over terminals
    std::vector<std::pair<int, int>> row_tags;  // (node id, asset index)
};

inline MartingaleSystem martingale_constraints(const ScenarioTree& tree) {
    MartingaleSystem sys;
    sys.terminals = tree.terminal_ids();
    std::map<int, int> col;
    for (size_t i = 0; i < sys.terminals.size(); ++i) col[sys.terminals[i]] = static_cast<int>(i);

    std::map<int, int> row_of;
    for (int nid : tree.nonterminal_ids()) {
        for (int a = 0; a < tree.asset_count(); ++a) {
            row_of[nid * tree.asset_count() + a] = static_cast<int>(sys.rows.size());
            sys.rows.emplace_back(sys.terminals.size(), 0.0);
            sys.row_tags.emplace_back(nid, a);
        }
    }

    const auto& measure = tree.terminal_measure();
    for (int tid : sys.terminals) {
        double p = measure.at(tid);
        int cur = tid;
        while (cur != tree.root_id()) {
            int par = *tree.node(cur).parent;
            for (int a = 0; a < tree.asset_count(); ++a) {
                double delta = tree.node(cur).prices[a] - tree.node(par).prices[a];
                sys.rows[row_of[par * tree.asset_count() + a]][col[tid]] += p * delta;
            }
            cur = par;
        }
    }
    return sys;
}

// min ess sup Z / ess inf Z over martingale kernels bounded away from zero,
// optionally constrained by E_Q[B] <= 0 (or E_Q[B] = 0 when strict_zero).
// The floor Z >= 1 fixes the scale, so the objective linearizes to min t with
// Z <= t. Infeasibility encodes the value +inf: no admissible kernel prices
// the endowment nonpositively.
inline DualReport dual_best_gain_loss(const ScenarioTree& tree,
                                      const std::optional<Payoff>& b = std::nullopt,
                                      bool strict_zero = false) {
    if (b) tree.require_terminal_payoff(*b);
    MartingaleSystem sys = martingale_constraints(tree);
    const int nleaves = static_cast<int>(sys.terminals.size());
    const auto& measure = tree.terminal_measure();

    // Columns: Z (nleaves, >= 1), t (>= 1), cap slacks w (nleaves, >= 0),
    // optional endowment slack.
    const int t_col = nleaves;
    const int w0 = nleaves + 1;
    const bool slack_endow = b.has_value() && !strict_zero;
    const int endow_col = w0 + nleaves;
    const int total = w0 + nleaves + (slack_endow ? 1 : 0);

    LpProblem p = LpProblem::with_vars(total);
    for (int i = 0; i < nleaves; ++i) p.set_bounds(i, 1.0, kInf);
    p.set_bounds(t_col, 1.0, kInf);
    for (int i = 0; i < nleaves; ++i) p.set_bounds(w0 + i, 0.0, kInf);
    if (slack_endow) p.set_bounds(endow_col, 0.0, kInf);

    for (int i = 0; i < nleaves; ++i) {
        std::vector<double> row(total, 0.0);
        row[i] = 1.0;
        row[t_col] = -1.0;
        row[w0 + i] = 1.0;
        p.add_row(std::move(row), 0.0);
    }
    for (const auto& mrow : sys.rows) {
        std::vector<double> row(total, 0.0);
        for (int i = 0; i < nleaves; ++i) row[i] = mrow[i];
        p.add_row(std::move(row), 0.0);
    }
    if (b) {
        std::vector<double> row(total, 0.0);
        for (int i = 0; i < nleaves; ++i)
            row[i] = measure.at(sys.terminals[i]) * b->values.at(sys.terminals[i]);
        if (slack_endow) row[endow_col] = 1.0;
        p.add_row(std::move(row), 0.0);
    }
    p.objective[t_col] = -1.0;  // minimize t

    LpOutcome o = solve_lp(p);
    DualReport rep;
    rep.lp_status = o.status;
    if (o.status == LpStatus::Infeasible) {
        rep.value = kInf;
        return rep;
    }
    if (o.status == LpStatus::Unbounded)
        fail(ErrorCode::NumericalBreakdown, "kernel LP objective is bounded below by 1");

    rep.value = -o.value;
    double zmin = kInf, zmax = 0.0;
    for (int i = 0; i < nleaves; ++i) {
        zmin = std::min(zmin, o.primal[i]);
        zmax = std::max(zmax, o.primal[i]);
    }
    KernelWeights kw;
    double pz = 0.0, pzb = 0.0;
    for (int i = 0; i < nleaves; ++i) {
        int tid = sys.terminals[i];
        double z = o.primal[i] / zmin;
        kw.weights[tid] = z;
        pz += measure.at(tid) * z;
        if (b) pzb += measure.at(tid) * z * b->values.at(tid);
    }
    rep.ess_inf = 1.0;
    rep.ess_sup = zmax / zmin;
    rep.kernel = std::move(kw);
    if (b) rep.endowment_expectation = pzb / pz;
    return rep;
}

// Is Q_lambda intersect M nonempty (optionally with E_Q[B] <= 0)?
inline bool q_lambda_m_feasible(const ScenarioTree& tree, double lambda,
                                const std::optional<Payoff>& b = std::nullopt) {
    if (lambda < 1.0) fail(ErrorCode::BadLambda, "lambda must be >= 1");
    if (b) tree.require_terminal_payoff(*b);
    MartingaleSystem sys = martingale_constraints(tree);
    const int nleaves = static_cast<int>(sys.terminals.size());
    const auto& measure = tree.terminal_measure();
    const bool endowed = b.has_value();

    LpProblem p = LpProblem::with_vars(nleaves + (endowed ? 1 : 0));
    for (int i = 0; i < nleaves; ++i) p.set_bounds(i, 1.0, lambda);
    if (endowed) p.set_bounds(nleaves, 0.0, kInf);
    for (const auto& mrow : sys.rows) {
        std::vector<double> row(p.num_vars(), 0.0);
        for (int i = 0; i < nleaves; ++i) row[i] = mrow[i];
        p.add_row(std::move(row), 0.0);
    }
    if (endowed) {
        std::vector<double> row(p.num_vars(), 0.0);
        for (int i = 0; i < nleaves; ++i)
            row[i] = measure.at(sys.terminals[i]) * b->values.at(sys.terminals[i]);
        row[nleaves] = 1.0;
        p.add_row(std::move(row), 0.0);
    }
    return solve_lp(p).status != LpStatus::Infeasible;
}

struct GoodDealBounds {
    bool feasible = false;
    double lower = 0.0;
    double upper = 0.0;
    double lambda = 0.0;
};

// Price interval inf/sup E_Q[C] over Q in Q_lambda intersect M. Each side is
// a linear-fractional program in the kernel, lifted over the homogeneous cone
//   { (y, tau) : martingale rows on y, tau <= y_i <= lambda tau, tau >= 0 }.
inline GoodDealBounds good_deal_bounds(const ScenarioTree& tree, const Payoff& claim,
                                       double lambda) {
    if (lambda < 1.0) fail(ErrorCode::BadLambda, "lambda must be >= 1");
    tree.require_terminal_payoff(claim);
    MartingaleSystem sys = martingale_constraints(tree);
    const int nleaves = static_cast<int>(sys.terminals.size());
    const auto& measure = tree.terminal_measure();

    // Columns: y (nleaves, >= 0), tau (>= 0), floor slacks f, cap slacks w.
    const int tau_col = nleaves;
    const int f0 = nleaves + 1;
    const int w0 = f0 + nleaves;
    const int total = w0 + nleaves;
    LpProblem cone = LpProblem::with_vars(total);
    for (const auto& mrow : sys.rows) {
        std::vector<double> row(total, 0.0);
        for (int i = 0; i < nleaves; ++i) row[i] = mrow[i];
        cone.add_row(std::move(row), 0.0);
    }
    for (int i = 0; i < nleaves; ++i) {
        std::vector<double> row(total, 0.0);  // y_i - tau - f_i = 0
        row[i] = 1.0;
        row[tau_col] = -1.0;
        row[f0 + i] = -1.0;
        cone.add_row(std::move(row), 0.0);
    }
    for (int i = 0; i < nleaves; ++i) {
        std::vector<double> row(total, 0.0);  // y_i - lambda tau + w_i = 0
        row[i] = 1.0;
        row[tau_col] = -lambda;
        row[w0 + i] = 1.0;
        cone.add_row(std::move(row), 0.0);
    }

    std::vector<double> numer(total, 0.0), denom(total, 0.0);
    for (int i = 0; i < nleaves; ++i) {
        int tid = sys.terminals[i];
        numer[i] = measure.at(tid) * claim.values.at(tid);
        denom[i] = measure.at(tid);
    }

    GoodDealBounds out;
    out.lambda = lambda;
    LpOutcome lo = solve_fractional(Sense::Minimize, numer, denom, cone);
    if (lo.status == LpStatus::Infeasible) return out;
    LpOutcome hi = solve_fractional(Sense::Maximize, numer, denom, cone);
    if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
        fail(ErrorCode::NumericalBreakdown, "good-deal bounds must be finite on a compact kernel set");
    out.feasible = true;
    out.lower = lo.value;
    out.upper = hi.value;
    return out;
}

// Market-modified risk measure: sup E_Q[-X] over Q_lambda intersect M,
// with the convention -inf when the set is empty.
inline double market_rho(const ScenarioTree& tree, const Payoff& x, double lambda) {
    GoodDealBounds gdb = good_deal_bounds(tree, x, lambda);
    if (!gdb.feasible) return -kInf;
    return -gdb.lower;
}

struct DualityGapReport {
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;  // |primal - dual| / max(1, dual) when both finite
    bool agree = false;
    std::optional<double> strict_zero_check;  // |E_Q*[B]| when alpha*(0) < alpha*(B) < inf
};

inline DualityGapReport duality_gap_report(const ScenarioTree& tree,
                                           const std::optional<Payoff>& b = std::nullopt) {
    DualityGapReport rep;
    rep.primal = best_gain_loss(tree, b).value;
    DualReport dual = dual_best_gain_loss(tree, b);
    rep.dual = dual.value;
    if (std::isfinite(rep.primal) && std::isfinite(rep.dual)) {
        rep.gap = std::abs(rep.primal - rep.dual) / std::max(1.0, rep.dual);
    } else if (std::isinf(rep.primal) && std::isinf(rep.dual)) {
        rep.gap = 0.0;
    } else {
        rep.gap = kInf;
    }
    rep.agree = rep.gap <= 1e-7;
    if (b && std::isfinite(rep.dual)) {
        double alpha0 = dual_best_gain_loss(tree).value;
        if (rep.dual > alpha0 + 1e-9 && dual.endowment_expectation)
            rep.strict_zero_check = std::abs(*dual.endowment_expectation);
    }
    return rep;
}

}  // namespace glr
