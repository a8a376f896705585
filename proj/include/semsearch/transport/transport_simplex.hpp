#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "semsearch/common/errors.hpp"

namespace semsearch::transport {

/// Optimal flow matrix (row-major, supply.size() x demand.size()).
struct transport_plan {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> flow;
    double objective = 0.0;

    double operator()(std::size_t i, std::size_t j) const { return flow[i * cols + j]; }
};

/// Exact solver for the balanced transportation problem
///
///   min sum_ij T_ij c_ij   s.t.  T >= 0,  sum_j T_ij = supply_i,  sum_i T_ij = demand_j
///
/// using the primal transportation simplex. The basis is a spanning tree of
/// the bipartite row/column graph (rows + cols - 1 cells, degenerate cells
/// carry zero flow). Dantzig pricing is used until a run of degenerate
/// pivots is seen, then Bland's rule, which cannot cycle.
///
/// Demand is rescaled to the supply total before solving, so inputs only
/// need to balance approximately.
class transport_simplex {
public:
    transport_simplex(std::span<const double> supply, std::span<const double> demand, std::span<const double> cost)
        : n_(supply.size()), m_(demand.size()), supply_(supply.begin(), supply.end()),
          demand_(demand.begin(), demand.end()), cost_(cost.begin(), cost.end()) {
        if (n_ == 0 || m_ == 0) throw solver_error("transport problem needs at least one supply and one demand node");
        if (cost_.size() != n_ * m_) throw solver_error("cost matrix shape does not match marginals");
        for (double s : supply_)
            if (!(s >= 0.0) || !std::isfinite(s)) throw solver_error("supply must be finite and non-negative");
        for (double d : demand_)
            if (!(d >= 0.0) || !std::isfinite(d)) throw solver_error("demand must be finite and non-negative");
        for (double c : cost_)
            if (!std::isfinite(c)) throw solver_error("cost matrix must be finite");
        const double total_s = std::accumulate(supply_.begin(), supply_.end(), 0.0);
        const double total_d = std::accumulate(demand_.begin(), demand_.end(), 0.0);
        if (total_s <= 0.0 || total_d <= 0.0) throw solver_error("transport problem has no mass");
        if (std::abs(total_s - total_d) > 1e-6 * std::max(total_s, total_d))
            throw solver_error("unbalanced transport problem: supply " + std::to_string(total_s) + " vs demand " +
                               std::to_string(total_d));
        for (double& d : demand_) d *= total_s / total_d;
    }

    transport_plan solve() {
        initial_basis();
        const double cmax = *std::max_element(cost_.begin(), cost_.end(), [](double a, double b) {
            return std::abs(a) < std::abs(b);
        });
        const double optimality_tol = 1e-12 * std::max(1.0, std::abs(cmax));
        const std::size_t max_pivots = 50 * (n_ + m_) * (n_ + m_) + 1000;
        std::size_t degenerate_run = 0;
        bool bland = false;

        for (std::size_t pivot = 0;; ++pivot) {
            if (pivot > max_pivots) throw solver_error("transport simplex exceeded its pivot limit");
            compute_potentials();
            const auto entering = select_entering(optimality_tol, bland);
            if (entering == npos) break;
            const double theta = pivot_on(entering, bland);
            if (theta == 0.0) {
                if (++degenerate_run > n_ + m_) bland = true;
            } else {
                degenerate_run = 0;
            }
        }

        transport_plan plan;
        plan.rows = n_;
        plan.cols = m_;
        plan.flow.assign(n_ * m_, 0.0);
        for (const auto cell : basis_) plan.flow[cell] = std::max(0.0, flow_[cell]);
        plan.objective = 0.0;
        for (std::size_t k = 0; k < plan.flow.size(); ++k) plan.objective += plan.flow[k] * cost_[k];
        return plan;
    }

private:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    // Node numbering: rows 0..n-1, columns n..n+m-1.
    std::size_t row_of(std::size_t cell) const { return cell / m_; }
    std::size_t col_node(std::size_t cell) const { return n_ + cell % m_; }

    void link(std::size_t cell) {
        adjacency_[row_of(cell)].push_back(cell);
        adjacency_[col_node(cell)].push_back(cell);
        basis_.push_back(cell);
        in_basis_[cell] = 1;
    }

    void unlink(std::size_t cell) {
        auto drop = [cell](std::vector<std::size_t>& v) { v.erase(std::find(v.begin(), v.end(), cell)); };
        drop(adjacency_[row_of(cell)]);
        drop(adjacency_[col_node(cell)]);
        basis_.erase(std::find(basis_.begin(), basis_.end(), cell));
        in_basis_[cell] = 0;
    }

    // North-west corner rule; always yields exactly n + m - 1 tree cells.
    void initial_basis() {
        flow_.assign(n_ * m_, 0.0);
        in_basis_.assign(n_ * m_, 0);
        adjacency_.assign(n_ + m_, {});
        basis_.clear();
        std::vector<double> s = supply_;
        std::vector<double> d = demand_;
        std::size_t i = 0;
        std::size_t j = 0;
        while (true) {
            const std::size_t cell = i * m_ + j;
            const double x = std::min(s[i], d[j]);
            flow_[cell] = x;
            s[i] -= x;
            d[j] -= x;
            link(cell);
            if (i + 1 == n_ && j + 1 == m_) break;
            if (j + 1 == m_ || (i + 1 < n_ && s[i] <= d[j])) {
                d[j] += s[i];  // remaining rounding dust stays in the column
                s[i] = 0.0;
                ++i;
            } else {
                s[i] += d[j];
                d[j] = 0.0;
                ++j;
            }
        }
    }

    void compute_potentials() {
        potential_.assign(n_ + m_, 0.0);
        std::vector<char> seen(n_ + m_, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            for (const auto cell : adjacency_[node]) {
                const auto r = row_of(cell);
                const auto c = col_node(cell);
                const auto other = node == r ? c : r;
                if (seen[other]) continue;
                seen[other] = 1;
                // u_r + v_c = cost
                potential_[other] = cost_[cell] - potential_[node];
                stack.push_back(other);
            }
        }
    }

    std::size_t select_entering(double tol, bool bland) const {
        std::size_t best = npos;
        double best_rc = -tol;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                const std::size_t cell = i * m_ + j;
                if (in_basis_[cell]) continue;
                const double rc = cost_[cell] - potential_[i] - potential_[n_ + j];
                if (rc < best_rc) {
                    if (bland) return cell;
                    best_rc = rc;
                    best = cell;
                }
            }
        }
        return best;
    }

    // Tree path from the entering cell's column back to its row, as cells.
    std::vector<std::size_t> tree_path(std::size_t from, std::size_t to) const {
        std::vector<std::size_t> parent_cell(n_ + m_, npos);
        std::vector<char> seen(n_ + m_, 0);
        std::vector<std::size_t> stack{from};
        seen[from] = 1;
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            if (node == to) break;
            for (const auto cell : adjacency_[node]) {
                const auto r = row_of(cell);
                const auto c = col_node(cell);
                const auto other = node == r ? c : r;
                if (seen[other]) continue;
                seen[other] = 1;
                parent_cell[other] = cell;
                stack.push_back(other);
            }
        }
        if (!seen[to]) throw solver_error("transport simplex basis is not a spanning tree");
        std::vector<std::size_t> path;
        for (auto node = to; node != from;) {
            const auto cell = parent_cell[node];
            path.push_back(cell);
            node = node == row_of(cell) ? col_node(cell) : row_of(cell);
        }
        return path;  // ordered from `to` back towards `from`
    }

    double pivot_on(std::size_t entering, bool bland) {
        // Cycle: entering (+), then the tree path from its column to its row
        // alternates -, +, -, ...
        const auto path = tree_path(row_of(entering), col_node(entering));
        std::size_t leaving = npos;
        double theta = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < path.size(); k += 2) {
            const auto cell = path[k];
            const double x = flow_[cell];
            if (x < theta || (x == theta && bland && cell < leaving)) {
                theta = x;
                leaving = cell;
            }
        }
        theta = std::max(0.0, theta);
        flow_[entering] = theta;
        for (std::size_t k = 0; k < path.size(); ++k) {
            auto& x = flow_[path[k]];
            x = (k % 2 == 0) ? std::max(0.0, x - theta) : x + theta;
        }
        flow_[leaving] = 0.0;
        unlink(leaving);
        link(entering);
        return theta;
    }

    std::size_t n_;
    std::size_t m_;
    std::vector<double> supply_;
    std::vector<double> demand_;
    std::vector<double> cost_;
    std::vector<double> flow_;
    std::vector<char> in_basis_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::vector<std::size_t> basis_;
    std::vector<double> potential_;
};

inline transport_plan solve_transport(std::span<const double> supply, std::span<const double> demand,
                                      std::span<const double> cost) {
    return transport_simplex(supply, demand, cost).solve();
}

}  // namespace semsearch::transport
