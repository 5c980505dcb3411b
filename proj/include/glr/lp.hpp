#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "glr/errors.hpp"

namespace glr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Solver tolerances: primal feasibility 1e-9, reduced-cost optimality 1e-9,
// pivot candidacy 1e-11. Inputs are row-equilibrated before these apply.
inline constexpr double kFeasTol = 1e-9;
inline constexpr double kOptTol = 1e-9;
inline constexpr double kPivotTol = 1e-11;

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

// maximize objective . x  subject to  rows . x = rhs,  lower <= x <= upper.
// Inequalities are modelled by the caller through slack variables; bounds may
// be -inf / +inf.
struct LpProblem {
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<double> lower;
    std::vector<double> upper;

    static LpProblem with_vars(int n) {
        LpProblem p;
        p.objective.assign(n, 0.0);
        p.lower.assign(n, 0.0);
        p.upper.assign(n, kInf);
        return p;
    }

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    void set_bounds(int j, double lo, double hi) {
        lower[j] = lo;
        upper[j] = hi;
    }

    void add_row(std::vector<double> coeffs, double b) {
        if (static_cast<int>(coeffs.size()) != num_vars())
            fail(ErrorCode::DimensionMismatch,
                 "row has " + std::to_string(coeffs.size()) + " coefficients, expected " +
                     std::to_string(num_vars()));
        rows.push_back(std::move(coeffs));
        rhs.push_back(b);
    }
};

struct LpOutcome {
    LpStatus status = LpStatus::Optimal;
    double value = 0.0;
    std::vector<double> primal;         // structural variables
    std::vector<double> dual_multipliers;  // one per equality row
    std::vector<double> reduced_costs;  // structural variables
    std::vector<double> ray;            // improving recession direction (Unbounded)
    std::vector<double> farkas;         // row multipliers certifying emptiness (Infeasible)
    double max_primal_residual = 0.0;
    double dual_sign_residual = 0.0;    // worst reduced-cost sign violation at bounds
    long iterations = 0;
};

namespace detail {

// Dense LU with partial pivoting; used for the fresh basis solves that back
// the reported solution, duals and certificates.
class DenseLu {
public:
    explicit DenseLu(std::vector<double> a, int n) : n_(n), a_(std::move(a)), perm_(n) {
        for (int i = 0; i < n_; ++i) perm_[i] = i;
        for (int k = 0; k < n_; ++k) {
            int piv = k;
            double best = std::abs(at(k, k));
            for (int i = k + 1; i < n_; ++i) {
                double v = std::abs(at(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (best < 1e-13)
                fail(ErrorCode::NumericalBreakdown, "singular basis matrix in refactorization");
            if (piv != k) {
                for (int j = 0; j < n_; ++j) std::swap(at(piv, j), at(k, j));
                std::swap(perm_[piv], perm_[k]);
            }
            double inv = 1.0 / at(k, k);
            for (int i = k + 1; i < n_; ++i) {
                double f = at(i, k) * inv;
                at(i, k) = f;
                if (f == 0.0) continue;
                for (int j = k + 1; j < n_; ++j) at(i, j) -= f * at(k, j);
            }
        }
    }

    // Solve A x = b.
    std::vector<double> solve(const std::vector<double>& b) const {
        std::vector<double> x(n_);
        for (int i = 0; i < n_; ++i) x[i] = b[perm_[i]];
        for (int i = 1; i < n_; ++i) {
            double s = x[i];
            for (int j = 0; j < i; ++j) s -= at(i, j) * x[j];
            x[i] = s;
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = x[i];
            for (int j = i + 1; j < n_; ++j) s -= at(i, j) * x[j];
            x[i] = s / at(i, i);
        }
        return x;
    }

    // Solve A^T y = c.
    std::vector<double> solve_transposed(const std::vector<double>& c) const {
        std::vector<double> z(c);
        for (int i = 0; i < n_; ++i) {
            double s = z[i];
            for (int j = 0; j < i; ++j) s -= at(j, i) * z[j];
            z[i] = s / at(i, i);
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = z[i];
            for (int j = i + 1; j < n_; ++j) s -= at(j, i) * z[j];
            z[i] = s;
        }
        std::vector<double> y(n_);
        for (int i = 0; i < n_; ++i) y[perm_[i]] = z[i];
        return y;
    }

private:
    double& at(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    int n_;
    std::vector<double> a_;
    std::vector<int> perm_;
};

// Bounded-variable primal simplex on a dense tableau. Bland's rule for both
// entering and leaving choices keeps the pivot sequence deterministic and
// cycle-free; phase 1 runs on explicit signed artificial columns whose duals
// provide the infeasibility certificate.
class Simplex {
public:
    explicit Simplex(const LpProblem& p) { build(p); }

    LpOutcome run() {
        LpOutcome out;
        if (bound_cross_) {
            out.status = LpStatus::Infeasible;
            return out;
        }

        // Phase 1: maximize -sum(artificials).
        std::vector<double> c1(n_, 0.0);
        for (int k = ns_; k < n_; ++k) c1[k] = -1.0;
        compute_reduced_costs(c1);
        PhaseResult r1 = iterate(c1);
        if (r1.unbounded)
            fail(ErrorCode::NumericalBreakdown, "phase-1 objective reported unbounded");
        double infeas = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= ns_) infeas += std::abs(xb_[i]);
        if (infeas > 10.0 * kFeasTol * (1.0 + bnorm_)) {
            out.status = LpStatus::Infeasible;
            out.farkas = infeasibility_certificate(c1);
            out.iterations = pivots_;
            return out;
        }

        // Pin artificials at zero and push them out of the basis where a
        // structural pivot exists; rows with no such pivot are redundant.
        for (int k = ns_; k < n_; ++k) up_[k] = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < ns_) continue;
            for (int j = 0; j < ns_; ++j) {
                if (st_[j] == St::Basic || lo_[j] == up_[j]) continue;
                if (std::abs(tab(i, j)) > 1e-7) {
                    degenerate_swap(i, j);
                    break;
                }
            }
        }

        // Phase 2.
        compute_reduced_costs(c2_);
        PhaseResult r2 = iterate(c2_);
        out.iterations = pivots_;
        if (r2.unbounded) {
            out.status = LpStatus::Unbounded;
            out.value = kInf;
            out.ray = extract_ray(r2.enter, r2.sigma);
            return out;
        }
        finalize(out);
        return out;
    }

private:
    enum class St : std::uint8_t { Basic, Lower, Upper, FreeZero };

    struct PhaseResult {
        bool unbounded = false;
        int enter = -1;
        int sigma = 0;
    };

    double& tab(int i, int j) { return tab_[static_cast<size_t>(i) * n_ + j]; }
    double tab_at(int i, int j) const { return tab_[static_cast<size_t>(i) * n_ + j]; }

    double nb_value(int j) const {
        switch (st_[j]) {
            case St::Lower: return lo_[j];
            case St::Upper: return up_[j];
            default: return 0.0;
        }
    }

    void build(const LpProblem& p) {
        m_ = p.num_rows();
        ns_ = p.num_vars();
        n_ = ns_ + m_;
        if (static_cast<int>(p.lower.size()) != ns_ || static_cast<int>(p.upper.size()) != ns_)
            fail(ErrorCode::DimensionMismatch, "bounds arrays do not match variable count");
        if (static_cast<int>(p.rhs.size()) != m_)
            fail(ErrorCode::DimensionMismatch, "rhs does not match row count");
        for (const auto& row : p.rows)
            if (static_cast<int>(row.size()) != ns_)
                fail(ErrorCode::DimensionMismatch, "constraint row has wrong length");
        for (double v : p.objective)
            if (!std::isfinite(v)) fail(ErrorCode::NonFiniteNumber, "objective coefficient");
        for (double v : p.rhs)
            if (!std::isfinite(v)) fail(ErrorCode::NonFiniteNumber, "rhs entry");
        for (const auto& row : p.rows)
            for (double v : row)
                if (!std::isfinite(v)) fail(ErrorCode::NonFiniteNumber, "constraint coefficient");
        for (int j = 0; j < ns_; ++j) {
            if (std::isnan(p.lower[j]) || std::isnan(p.upper[j]))
                fail(ErrorCode::NonFiniteNumber, "variable bound");
            if (p.lower[j] > p.upper[j]) bound_cross_ = true;
        }

        lo_ = p.lower;
        up_ = p.upper;
        c2_ = p.objective;
        lo_.resize(n_, 0.0);
        up_.resize(n_, kInf);
        c2_.resize(n_, 0.0);

        // Row equilibration by powers of two: scale-free pivoting without
        // perturbing representable values.
        row_scale_.assign(m_, 1.0);
        a_.assign(static_cast<size_t>(m_) * n_, 0.0);
        b_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double mx = std::abs(p.rhs[i]);
            for (double v : p.rows[i]) mx = std::max(mx, std::abs(v));
            double scale = 1.0;
            if (mx > 0.0) scale = std::exp2(std::round(std::log2(mx)));
            row_scale_[i] = scale;
            for (int j = 0; j < ns_; ++j) a_[static_cast<size_t>(i) * n_ + j] = p.rows[i][j] / scale;
            b_[i] = p.rhs[i] / scale;
        }
        bnorm_ = 0.0;
        for (double v : b_) bnorm_ = std::max(bnorm_, std::abs(v));

        st_.assign(n_, St::Lower);
        for (int j = 0; j < ns_; ++j) {
            if (std::isfinite(lo_[j]))
                st_[j] = St::Lower;
            else if (std::isfinite(up_[j]))
                st_[j] = St::Upper;
            else
                st_[j] = St::FreeZero;
        }

        basis_.resize(m_);
        xb_.assign(m_, 0.0);
        tab_.assign(static_cast<size_t>(m_) * n_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double r = b_[i];
            for (int j = 0; j < ns_; ++j) r -= a_[static_cast<size_t>(i) * n_ + j] * nb_value(j);
            double sign = (r >= 0.0) ? 1.0 : -1.0;
            art_sign_.push_back(sign);
            a_[static_cast<size_t>(i) * n_ + (ns_ + i)] = sign;
            basis_[i] = ns_ + i;
            st_[ns_ + i] = St::Basic;
            xb_[i] = std::abs(r);
            for (int j = 0; j < n_; ++j) tab(i, j) = sign * a_[static_cast<size_t>(i) * n_ + j];
        }
        dj_.assign(n_, 0.0);
    }

    void compute_reduced_costs(const std::vector<double>& c) {
        dj_ = c;
        for (int i = 0; i < m_; ++i) {
            double cb = c[basis_[i]];
            if (cb == 0.0) continue;
            for (int j = 0; j < n_; ++j) dj_[j] -= cb * tab_at(i, j);
        }
        for (int i = 0; i < m_; ++i) dj_[basis_[i]] = 0.0;
    }

    // One simplex phase under objective c (already loaded into dj_).
    // Termination claims are only accepted from a freshly refactorized state:
    // tableau drift can fake both optimality and unboundedness.
    PhaseResult iterate(const std::vector<double>& c) {
        const long cap = 20000 + 500L * (m_ + n_);
        long local = 0;
        bool fresh = (pivots_ == last_refresh_);
        for (;;) {
            if (++local > cap)
                fail(ErrorCode::NumericalBreakdown,
                     "simplex iteration cap exceeded (" + std::to_string(cap) + ")");
            if (pivots_ - last_refresh_ >= 128) {
                refresh(c);
                last_refresh_ = pivots_;
                fresh = true;
            }

            // Bland entering rule: smallest index with an improving sign.
            int enter = -1;
            int sigma = 0;
            for (int j = 0; j < n_; ++j) {
                if (st_[j] == St::Basic) continue;
                if (lo_[j] == up_[j]) continue;
                double d = dj_[j];
                if (st_[j] == St::Lower && d > kOptTol) {
                    enter = j;
                    sigma = 1;
                } else if (st_[j] == St::Upper && d < -kOptTol) {
                    enter = j;
                    sigma = -1;
                } else if (st_[j] == St::FreeZero && std::abs(d) > kOptTol) {
                    enter = j;
                    sigma = d > 0.0 ? 1 : -1;
                } else {
                    continue;
                }
                break;
            }
            if (enter < 0) {
                if (!fresh && m_ > 0) {
                    refresh(c);
                    last_refresh_ = pivots_;
                    fresh = true;
                    continue;
                }
                return {};
            }

            double tmax = kInf;
            if (std::isfinite(lo_[enter]) && std::isfinite(up_[enter])) tmax = up_[enter] - lo_[enter];

            int leave = -1;
            double t = tmax;
            for (int i = 0; i < m_; ++i) {
                double w = tab_at(i, enter);
                if (std::abs(w) <= kPivotTol) continue;
                double delta = -sigma * w;  // movement rate of basic i
                int bi = basis_[i];
                double lim;
                if (delta > 0.0) {
                    if (!std::isfinite(up_[bi])) continue;
                    lim = (up_[bi] - xb_[i]) / delta;
                } else {
                    if (!std::isfinite(lo_[bi])) continue;
                    lim = (lo_[bi] - xb_[i]) / delta;
                }
                if (lim < 0.0) lim = 0.0;
                double window = std::isfinite(t) ? 1e-12 * (1.0 + std::abs(t)) : 0.0;
                if (lim < t - window) {
                    t = lim;
                    leave = i;
                } else if (lim <= t + window && leave >= 0 && basis_[i] < basis_[leave]) {
                    leave = i;
                    t = std::min(t, lim);
                }
            }

            if (leave < 0 && !std::isfinite(tmax)) {
                if (!fresh && m_ > 0) {
                    refresh(c);
                    last_refresh_ = pivots_;
                    fresh = true;
                    continue;
                }
                return {true, enter, sigma};
            }

            // A tiny pivot element on a stale tableau is more likely drift
            // than geometry; rebuild before trusting it.
            if (leave >= 0 && std::abs(tab_at(leave, enter)) < 1e-7 && !fresh) {
                refresh(c);
                last_refresh_ = pivots_;
                fresh = true;
                continue;
            }

            // Apply the step.
            fresh = false;
            if (t != 0.0) {
                for (int i = 0; i < m_; ++i) xb_[i] -= sigma * t * tab_at(i, enter);
            }
            if (leave < 0) {
                st_[enter] = (sigma > 0) ? St::Upper : St::Lower;
                continue;
            }

            int leaving_var = basis_[leave];
            double w_leave = tab_at(leave, enter);
            double entering_value = nb_value(enter) + sigma * t;
            st_[leaving_var] = (-sigma * w_leave > 0.0) ? St::Upper : St::Lower;
            pivot(leave, enter);
            st_[enter] = St::Basic;
            basis_[leave] = enter;
            xb_[leave] = entering_value;
            ++pivots_;
        }
    }

    void pivot(int r, int jq) {
        double inv = 1.0 / tab(r, jq);
        for (int j = 0; j < n_; ++j) tab(r, j) *= inv;
        tab(r, jq) = 1.0;  // kill roundoff on the pivot itself
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            double f = tab_at(i, jq);
            if (f == 0.0) continue;
            for (int j = 0; j < n_; ++j) tab(i, j) -= f * tab_at(r, j);
            tab(i, jq) = 0.0;
        }
        double fd = dj_[jq];
        if (fd != 0.0) {
            for (int j = 0; j < n_; ++j) dj_[j] -= fd * tab_at(r, j);
        }
        dj_[jq] = 0.0;
    }

    // Basis swap at step length zero (used to evict artificials).
    void degenerate_swap(int r, int jq) {
        double entering_value = nb_value(jq);
        st_[basis_[r]] = St::Lower;
        pivot(r, jq);
        st_[jq] = St::Basic;
        basis_[r] = jq;
        xb_[r] = entering_value;
        ++pivots_;
    }

    DenseLu factorize_basis() const {
        std::vector<double> bm(static_cast<size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i)
            for (int k = 0; k < m_; ++k)
                bm[static_cast<size_t>(i) * m_ + k] = a_[static_cast<size_t>(i) * n_ + basis_[k]];
        return DenseLu(std::move(bm), m_);
    }

    // Recompute tableau, basic values and reduced costs from scratch.
    void refresh(const std::vector<double>& c) {
        if (m_ == 0) {
            compute_reduced_costs(c);
            return;
        }
        DenseLu lu = factorize_basis();
        std::vector<double> col(m_);
        for (int j = 0; j < n_; ++j) {
            for (int i = 0; i < m_; ++i) col[i] = a_[static_cast<size_t>(i) * n_ + j];
            std::vector<double> t = lu.solve(col);
            for (int i = 0; i < m_; ++i) tab(i, j) = t[i];
        }
        std::vector<double> r(b_);
        for (int j = 0; j < n_; ++j) {
            if (st_[j] == St::Basic) continue;
            double v = nb_value(j);
            if (v == 0.0) continue;
            for (int i = 0; i < m_; ++i) r[i] -= a_[static_cast<size_t>(i) * n_ + j] * v;
        }
        xb_ = lu.solve(r);
        compute_reduced_costs(c);
    }

    std::vector<double> dual_from_basis(const std::vector<double>& c) const {
        if (m_ == 0) return {};
        std::vector<double> cb(m_);
        for (int i = 0; i < m_; ++i) cb[i] = c[basis_[i]];
        // Column k of the basis matrix belongs to row-equation space; solve
        // B^T y = c_B with B in row-major layout (B[i][k] = a(i, basis[k])).
        DenseLu lu = factorize_basis();
        return lu.solve_transposed(cb);
    }

    std::vector<double> infeasibility_certificate(const std::vector<double>& c1) {
        std::vector<double> y = dual_from_basis(c1);
        // Unscale: certificate applies to the caller's rows.
        for (int i = 0; i < m_; ++i) y[i] /= row_scale_[i];
        return y;
    }

    std::vector<double> extract_ray(int enter, int sigma) const {
        std::vector<double> ray(ns_, 0.0);
        if (enter < ns_) ray[enter] = sigma;
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] >= ns_) continue;
            double w = tab_at(i, enter);
            if (std::abs(w) <= kPivotTol) continue;
            ray[basis_[i]] = -sigma * w;
        }
        // Canonical scale: unit infinity norm, deterministic reporting.
        double mx = 0.0;
        for (double v : ray) mx = std::max(mx, std::abs(v));
        if (mx > 0.0)
            for (double& v : ray) v /= mx;
        return ray;
    }

    void finalize(LpOutcome& out) {
        out.status = LpStatus::Optimal;
        std::vector<double> x(n_, 0.0);
        for (int j = 0; j < n_; ++j)
            if (st_[j] != St::Basic) x[j] = nb_value(j);

        if (m_ > 0) {
            DenseLu lu = factorize_basis();
            std::vector<double> r(b_);
            for (int j = 0; j < n_; ++j) {
                if (st_[j] == St::Basic) continue;
                double v = nb_value(j);
                if (v == 0.0) continue;
                for (int i = 0; i < m_; ++i) r[i] -= a_[static_cast<size_t>(i) * n_ + j] * v;
            }
            std::vector<double> xb = lu.solve(r);
            for (int i = 0; i < m_; ++i) x[basis_[i]] = xb[i];
            std::vector<double> cb(m_);
            for (int i = 0; i < m_; ++i) cb[i] = c2_[basis_[i]];
            std::vector<double> y = lu.solve_transposed(cb);
            out.dual_multipliers.resize(m_);
            for (int i = 0; i < m_; ++i) out.dual_multipliers[i] = y[i] / row_scale_[i];
            out.reduced_costs.assign(ns_, 0.0);
            for (int j = 0; j < ns_; ++j) {
                double d = c2_[j];
                for (int i = 0; i < m_; ++i) d -= y[i] * a_[static_cast<size_t>(i) * n_ + j];
                out.reduced_costs[j] = d;
            }
        } else {
            out.reduced_costs.assign(c2_.begin(), c2_.begin() + ns_);
        }

        out.primal.assign(x.begin(), x.begin() + ns_);
        double val = 0.0;
        for (int j = 0; j < ns_; ++j) val += c2_[j] * x[j];
        out.value = val;

        for (int i = 0; i < m_; ++i) {
            double res = -b_[i] * row_scale_[i];
            for (int j = 0; j < n_; ++j)
                res += a_[static_cast<size_t>(i) * n_ + j] * row_scale_[i] * x[j];
            out.max_primal_residual = std::max(out.max_primal_residual, std::abs(res));
        }
        for (int j = 0; j < ns_; ++j) {
            double viol = 0.0;
            if (st_[j] == St::Lower)
                viol = std::max(0.0, out.reduced_costs[j]);
            else if (st_[j] == St::Upper)
                viol = std::max(0.0, -out.reduced_costs[j]);
            else if (st_[j] == St::FreeZero)
                viol = std::abs(out.reduced_costs[j]);
            out.dual_sign_residual = std::max(out.dual_sign_residual, viol);
        }
        out.iterations = pivots_;
    }

    int m_ = 0, ns_ = 0, n_ = 0;
    bool bound_cross_ = false;
    std::vector<double> a_;  // scaled rows, structural + artificial columns
    std::vector<double> b_;
    std::vector<double> row_scale_;
    std::vector<double> lo_, up_, c2_;
    std::vector<double> art_sign_;
    std::vector<int> basis_;
    std::vector<St> st_;
    std::vector<double> tab_;
    std::vector<double> xb_;
    std::vector<double> dj_;
    double bnorm_ = 0.0;
    long pivots_ = 0;
    long last_refresh_ = 0;
};

}  // namespace detail

inline LpOutcome solve_lp(const LpProblem& p) {
    detail::Simplex s(p);
    return s.run();
}

enum class Sense { Maximize, Minimize };

// Optimize numerator.x / denominator.x over the cone described by `cone`
// (homogeneous rows plus sign bounds). Normalizes denominator.x = 1; an
// Unbounded outcome encodes an infinite ratio, Infeasible an empty domain.
// The caller guarantees the denominator is strictly positive on the cone
// minus the origin.
inline LpOutcome solve_fractional(Sense sense, const std::vector<double>& numerator,
                                  const std::vector<double>& denominator, const LpProblem& cone) {
    if (static_cast<int>(numerator.size()) != cone.num_vars() ||
        static_cast<int>(denominator.size()) != cone.num_vars())
        fail(ErrorCode::DimensionMismatch, "fractional forms do not match cone variables");
    LpProblem p = cone;
    p.add_row(denominator, 1.0);
    p.objective = numerator;
    if (sense == Sense::Minimize)
        for (double& v : p.objective) v = -v;
    LpOutcome out = solve_lp(p);
    if (sense == Sense::Minimize && out.status == LpStatus::Optimal) out.value = -out.value;
    if (sense == Sense::Minimize && out.status == LpStatus::Unbounded) out.value = -kInf;
    return out;
}

}  // namespace glr
