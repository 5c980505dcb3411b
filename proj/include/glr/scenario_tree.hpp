#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "glr/errors.hpp"

namespace glr {

// One event-tree node. `prob` is the conditional probability of reaching this
// node given its parent; the root carries prob 1. Prices are the discounted
// asset prices observed at the node (r = 0 convention).
struct TreeNode {
    int id = 0;
    std::optional<int> parent;
    int time = 0;
    double prob = 1.0;
    std::vector<double> prices;
};

// Terminal payoff: one real per leaf id.
struct Payoff {
    std::map<int, double> values;
};

// Predictable trading strategy: one position vector (size = asset count) per
// non-terminal node, chosen at that node and held over the next period.
struct Strategy {
    std::map<int, std::vector<double>> positions;
};

// Finite multi-period market model on an event tree. The constructor
// validates every structural invariant and freezes the object; all accessors
// are const and the type is safe to share across threads.
class ScenarioTree {
public:
    ScenarioTree(int asset_count, std::vector<TreeNode> nodes)
        : asset_count_(asset_count), nodes_(std::move(nodes)) {
        validate();
        build_measure();
    }

    int asset_count() const { return asset_count_; }
    int horizon() const { return horizon_; }
    int root_id() const { return root_id_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    const TreeNode& node(int id) const { return nodes_[index_of(id)]; }

    bool is_terminal(int id) const { return children_.at(index_of(id)).empty(); }

    // Ids sorted ascending; fixed ordering keeps every LP construction and
    // JSON report deterministic.
    const std::vector<int>& terminal_ids() const { return terminal_ids_; }
    const std::vector<int>& nonterminal_ids() const { return nonterminal_ids_; }

    std::vector<int> children_ids(int id) const {
        std::vector<int> out;
        for (int idx : children_.at(index_of(id))) out.push_back(nodes_[idx].id);
        return out;
    }

    // P restricted to terminal states: product of branch probabilities along
    // each root-to-leaf path. Sums to 1 within 1e-12 on every valid tree.
    const std::map<int, double>& terminal_measure() const { return terminal_measure_; }

    // Terminal gain of a zero-cost strategy: telescoping sum of
    // <position at edge start, price change over the edge> along each path.
    Payoff gain_vector(const Strategy& xi) const {
        require_strategy(xi);
        Payoff out;
        for (int tid : terminal_ids_) {
            double gain = 0.0;
            int idx = index_of(tid);
            while (nodes_[idx].parent.has_value()) {
                int pidx = index_of(*nodes_[idx].parent);
                const std::vector<double>& pos = xi.positions.at(nodes_[pidx].id);
                for (int a = 0; a < asset_count_; ++a) {
                    gain += pos[a] * (nodes_[idx].prices[a] - nodes_[pidx].prices[a]);
                }
                idx = pidx;
            }
            out.values[tid] = gain;
        }
        return out;
    }

    void require_terminal_payoff(const Payoff& p) const {
        if (p.values.size() != terminal_ids_.size())
            fail(ErrorCode::KeyMismatch, "payoff has " + std::to_string(p.values.size()) +
                                             " entries, tree has " +
                                             std::to_string(terminal_ids_.size()) + " leaves");
        for (int tid : terminal_ids_) {
            auto it = p.values.find(tid);
            if (it == p.values.end())
                fail(ErrorCode::KeyMismatch, "payoff missing terminal node " + std::to_string(tid));
            if (!std::isfinite(it->second))
                fail(ErrorCode::NonFiniteNumber, "payoff at node " + std::to_string(tid));
        }
    }

    void require_strategy(const Strategy& xi) const {
        if (xi.positions.size() != nonterminal_ids_.size())
            fail(ErrorCode::KeyMismatch, "strategy has " + std::to_string(xi.positions.size()) +
                                             " entries, tree has " +
                                             std::to_string(nonterminal_ids_.size()) +
                                             " non-terminal nodes");
        for (int nid : nonterminal_ids_) {
            auto it = xi.positions.find(nid);
            if (it == xi.positions.end())
                fail(ErrorCode::KeyMismatch, "strategy missing node " + std::to_string(nid));
            if (static_cast<int>(it->second.size()) != asset_count_)
                fail(ErrorCode::DimensionMismatch,
                     "strategy at node " + std::to_string(nid) + " has wrong asset count");
            for (double v : it->second)
                if (!std::isfinite(v))
                    fail(ErrorCode::NonFiniteNumber, "strategy at node " + std::to_string(nid));
        }
    }

private:
    int index_of(int id) const {
        auto it = index_.find(id);
        if (it == index_.end()) fail(ErrorCode::OrphanNode, "unknown node id " + std::to_string(id));
        return it->second;
    }

    void validate() {
        constexpr double kProbTol = 1e-12;
        if (asset_count_ <= 0) fail(ErrorCode::DimensionMismatch, "asset_count must be positive");
        if (nodes_.empty()) fail(ErrorCode::OrphanNode, "tree has no nodes");

        for (size_t i = 0; i < nodes_.size(); ++i) {
            const TreeNode& n = nodes_[i];
            if (index_.count(n.id))
                fail(ErrorCode::OrphanNode, "duplicate node id " + std::to_string(n.id));
            index_[n.id] = static_cast<int>(i);
        }

        int root = -1;
        for (const TreeNode& n : nodes_) {
            if (static_cast<int>(n.prices.size()) != asset_count_)
                fail(ErrorCode::DimensionMismatch,
                     "node " + std::to_string(n.id) + " has " + std::to_string(n.prices.size()) +
                         " prices, expected " + std::to_string(asset_count_));
            for (double s : n.prices)
                if (!std::isfinite(s)) fail(ErrorCode::NonFiniteNumber, "price at node " + std::to_string(n.id));
            if (!std::isfinite(n.prob)) fail(ErrorCode::NonFiniteNumber, "prob at node " + std::to_string(n.id));
            if (n.prob <= 0.0 || n.prob > 1.0)
                fail(ErrorCode::BadProbability,
                     "node " + std::to_string(n.id) + " prob " + std::to_string(n.prob) +
                         " outside (0,1]");
            if (!n.parent.has_value()) {
                if (root != -1)
                    fail(ErrorCode::OrphanNode, "second parentless node " + std::to_string(n.id));
                root = n.id;
                if (n.time != 0)
                    fail(ErrorCode::RaggedHorizon, "root node " + std::to_string(n.id) + " not at time 0");
                if (std::abs(n.prob - 1.0) > kProbTol)
                    fail(ErrorCode::BadProbability, "root prob must be 1");
            }
        }
        if (root == -1) fail(ErrorCode::OrphanNode, "no root node");
        root_id_ = root;

        children_.assign(nodes_.size(), {});
        for (const TreeNode& n : nodes_) {
            if (!n.parent.has_value()) continue;
            auto it = index_.find(*n.parent);
            if (it == index_.end())
                fail(ErrorCode::OrphanNode, "node " + std::to_string(n.id) + " references missing parent " +
                                                std::to_string(*n.parent));
            const TreeNode& parent = nodes_[it->second];
            if (n.time != parent.time + 1)
                fail(ErrorCode::RaggedHorizon, "node " + std::to_string(n.id) + " at time " +
                                                   std::to_string(n.time) + " under parent at time " +
                                                   std::to_string(parent.time));
            children_[it->second].push_back(index_[n.id]);
        }

        for (auto& kids : children_)
            std::sort(kids.begin(), kids.end(),
                      [&](int a, int b) { return nodes_[a].id < nodes_[b].id; });

        horizon_ = -1;
        for (size_t i = 0; i < nodes_.size(); ++i) {
            const TreeNode& n = nodes_[i];
            if (children_[i].empty()) {
                if (horizon_ == -1) horizon_ = n.time;
                if (n.time != horizon_)
                    fail(ErrorCode::RaggedHorizon, "leaf " + std::to_string(n.id) + " at time " +
                                                       std::to_string(n.time) + ", expected " +
                                                       std::to_string(horizon_));
                terminal_ids_.push_back(n.id);
            } else {
                double sum = 0.0;
                for (int c : children_[i]) sum += nodes_[c].prob;
                if (std::abs(sum - 1.0) > kProbTol)
                    fail(ErrorCode::BadProbability, "children of node " + std::to_string(n.id) +
                                                        " have probabilities summing to " +
                                                        std::to_string(sum));
                nonterminal_ids_.push_back(n.id);
            }
        }
        std::sort(terminal_ids_.begin(), terminal_ids_.end());
        std::sort(nonterminal_ids_.begin(), nonterminal_ids_.end());
    }

    void build_measure() {
        for (int tid : terminal_ids_) {
            double p = 1.0;
            int idx = index_of(tid);
            while (nodes_[idx].parent.has_value()) {
                p *= nodes_[idx].prob;
                idx = index_of(*nodes_[idx].parent);
            }
            terminal_measure_[tid] = p;
        }
    }

    int asset_count_;
    std::vector<TreeNode> nodes_;
    std::unordered_map<int, int> index_;
    std::vector<std::vector<int>> children_;
    std::vector<int> terminal_ids_;
    std::vector<int> nonterminal_ids_;
    std::map<int, double> terminal_measure_;
    int root_id_ = -1;
    int horizon_ = 0;
};

}  // namespace glr
