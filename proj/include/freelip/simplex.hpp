#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "freelip/errors.hpp"
#include "freelip/scalar.hpp"

namespace freelip {

// Linear programming kernels. Two solvers share the conventions
//   minimize c.x  subject to  A x = b, x >= 0
// and both run on double (tolerance pivots) or Rational (exact pivots).
//
// FeasibilitySolver: phase-1-only revised simplex with an explicit basis
// inverse. It answers many feasibility questions against one fixed column
// set, re-entering via the dual simplex when only the right-hand side moved.
// Every caller re-verifies the returned certificate independently, so the
// warm HOT path cannot silently corrupt an answer.
//
// DenseSimplex: a small two-phase tableau simplex with Bland's rule, used for
// genuine optimization problems (they are tiny here).

template <class T>
struct lp_tol {
    static constexpr double pivot = 1e-11;
    static constexpr double feas = 1e-9;
    static constexpr double cost = 1e-9;
};

template <class T>
inline bool lp_neg(const T& x) {
    if constexpr (scalar_traits<T>::exact)
        return x < 0;
    else
        return to_double(x) < -lp_tol<T>::feas;
}

template <class T>
inline bool lp_pos(const T& x) {
    if constexpr (scalar_traits<T>::exact)
        return x > 0;
    else
        return to_double(x) > lp_tol<T>::feas;
}

template <class T>
using SparseCol = std::vector<std::pair<std::size_t, T>>;

template <class T>
struct FeasibilityResult {
    bool feasible = false;
    // Column index -> weight for a feasible combination (real columns only).
    std::vector<std::pair<std::size_t, T>> coeffs;
    // Farkas certificate when infeasible: y.b > 0 and y.a_j <= 0 per column.
    std::vector<T> farkas;
};

template <class T>
class FeasibilitySolver {
public:
    explicit FeasibilitySolver(std::size_t rows) : m_(rows) {}

    std::size_t add_column(SparseCol<T> col) {
        cols_.push_back(std::move(col));
        return cols_.size() - 1;
    }

    std::size_t real_columns() const { return art_base_ ? art_base_ : cols_.size(); }

    // Appends the signed artificial columns; no more real columns after this.
    void finalize() {
        if (art_base_) return;
        art_base_ = cols_.size();
        for (std::size_t r = 0; r < m_; ++r) {
            cols_.push_back({{r, T(1)}});
            cols_.push_back({{r, T(-1)}});
        }
    }

    FeasibilityResult<T> solve(const std::vector<T>& b) {
        if (!art_base_) finalize();
        if (b.size() != m_) fail(Errc::BadInput, "rhs size mismatch");
        if (!warm_) {
            cold_start(b);
            primal_phase1(b);
        } else {
            load_xb(b);
            if (!dual_resolve(b)) { // stalled; rebuild from scratch
                cold_start(b);
                primal_phase1(b);
            }
        }
        warm_ = true;
        return extract(b);
    }

    void reset() { warm_ = false; }

private:
    std::size_t m_;
    std::vector<SparseCol<T>> cols_;
    std::size_t art_base_ = 0;

    bool warm_ = false;
    std::vector<std::size_t> basis_; // row -> column id
    std::vector<char> in_basis_;     // column id -> 0/1
    std::vector<T> binv_;            // column-major m x m
    std::vector<T> xb_;

    bool is_art(std::size_t col) const { return col >= art_base_; }
    T& bi(std::size_t r, std::size_t c) { return binv_[c * m_ + r]; }
    const T& bi(std::size_t r, std::size_t c) const { return binv_[c * m_ + r]; }

    void cold_start(const std::vector<T>& b) {
        basis_.assign(m_, 0);
        in_basis_.assign(cols_.size(), 0);
        binv_.assign(m_ * m_, T(0));
        xb_.assign(m_, T(0));
        for (std::size_t r = 0; r < m_; ++r) {
            bool nonneg = !(b[r] < 0);
            basis_[r] = art_base_ + 2 * r + (nonneg ? 0 : 1);
            in_basis_[basis_[r]] = 1;
            bi(r, r) = nonneg ? T(1) : T(-1);
            xb_[r] = nonneg ? b[r] : T(-b[r]);
        }
    }

    std::vector<T> ftran(const SparseCol<T>& a) const {
        std::vector<T> y(m_, T(0));
        for (const auto& [j, v] : a) {
            const T* colj = &binv_[j * m_];
            for (std::size_t i = 0; i < m_; ++i)
                if (colj[i] != 0) y[i] += v * colj[i];
        }
        return y;
    }

    void load_xb(const std::vector<T>& b) {
        xb_.assign(m_, T(0));
        for (std::size_t j = 0; j < m_; ++j) {
            if (b[j] == 0) continue;
            const T* colj = &binv_[j * m_];
            for (std::size_t i = 0; i < m_; ++i)
                if (colj[i] != 0) xb_[i] += b[j] * colj[i];
        }
    }

    // y = (phase-1 costs on basis) * Binv; costs are 1 on artificial columns.
    std::vector<T> multipliers() const {
        std::vector<T> y(m_, T(0));
        for (std::size_t r = 0; r < m_; ++r)
            if (is_art(basis_[r]))
                for (std::size_t c = 0; c < m_; ++c)
                    if (bi(r, c) != 0) y[c] += bi(r, c);
        return y;
    }

    T dot_col(const std::vector<T>& y, std::size_t col) const {
        T acc(0);
        for (const auto& [r, v] : cols_[col])
            if (y[r] != 0) acc += y[r] * v;
        return acc;
    }

    T reduced_cost(const std::vector<T>& y, std::size_t col) const {
        T rc = is_art(col) ? T(1) : T(0);
        rc -= dot_col(y, col);
        return rc;
    }

    void pivot(std::size_t row, std::size_t col, const std::vector<T>& d) {
        std::vector<std::size_t> nz;
        nz.reserve(m_);
        for (std::size_t i = 0; i < m_; ++i)
            if (i != row && d[i] != 0) nz.push_back(i);
        const T piv = d[row];
        for (std::size_t c = 0; c < m_; ++c) {
            T* colc = &binv_[c * m_];
            if (colc[row] == 0) continue;
            T v = colc[row] / piv;
            colc[row] = v;
            for (std::size_t i : nz) colc[i] -= d[i] * v;
        }
        T t = xb_[row] / piv;
        for (std::size_t i : nz) xb_[i] -= d[i] * t;
        xb_[row] = t;
        in_basis_[basis_[row]] = 0;
        basis_[row] = col;
        in_basis_[col] = 1;
    }

    void primal_phase1(const std::vector<T>&) {
        const std::size_t cap = 400 + 60 * m_;
        std::size_t stall = 0;
        bool bland = false;
        for (std::size_t iter = 0; iter < cap; ++iter) {
            auto y = multipliers();
            std::size_t enter = cols_.size();
            T best(0);
            for (std::size_t j = 0; j < cols_.size(); ++j) {
                if (in_basis_[j]) continue;
                T rc = reduced_cost(y, j);
                if (!lp_neg(rc)) continue;
                if (bland) { enter = j; break; }
                if (enter == cols_.size() || rc < best) { enter = j; best = rc; }
            }
            if (enter == cols_.size()) return; // optimal
            auto d = ftran(cols_[enter]);
            std::size_t leave = m_;
            for (std::size_t r = 0; r < m_; ++r) {
                if (!lp_pos(d[r])) continue;
                if (leave == m_) { leave = r; continue; }
                T lhs = xb_[r] * d[leave];
                T rhs = xb_[leave] * d[r];
                if (lhs < rhs || (lhs == rhs && basis_[r] < basis_[leave])) leave = r;
            }
            if (leave == m_) fail(Errc::SolverFailure, "phase-1 column unbounded");
            bool degenerate = (xb_[leave] == 0);
            pivot(leave, enter, d);
            stall = degenerate ? stall + 1 : 0;
            if (stall > m_ + 20) bland = true;
        }
        fail(Errc::SolverFailure, "phase-1 iteration cap");
    }

    // Dual re-entry after the right-hand side moved: the previous optimal
    // basis is still dual feasible for the (b-independent) phase-1 costs.
    bool dual_resolve(const std::vector<T>& b) {
        const std::size_t cap = 200 + 8 * m_;
        for (std::size_t iter = 0; iter < cap; ++iter) {
            std::size_t row = m_;
            for (std::size_t r = 0; r < m_; ++r)
                if (lp_neg(xb_[r])) {
                    if (row == m_ || xb_[r] < xb_[row]) row = r;
                }
            if (row == m_) return true;
            auto y = multipliers();
            std::vector<T> rho(m_);
            for (std::size_t c = 0; c < m_; ++c) rho[c] = bi(row, c);
            std::size_t enter = cols_.size();
            T best_num(0), best_den(0); // best ratio rc / (-alpha)
            for (std::size_t j = 0; j < cols_.size(); ++j) {
                if (in_basis_[j]) continue;
                T alpha = dot_col(rho, j);
                if (!lp_neg(alpha)) continue;
                T rc = reduced_cost(y, j);
                if (rc < 0) rc = T(0); // guard float drift; exact mode never hits
                if (enter == cols_.size()) {
                    enter = j; best_num = rc; best_den = -alpha;
                    continue;
                }
                T lhs = rc * best_den;
                T rhs = best_num * (-alpha);
                if (lhs < rhs) { enter = j; best_num = rc; best_den = -alpha; }
            }
            if (enter == cols_.size()) return false; // no pivot available, rebuild
            auto d = ftran(cols_[enter]);
            if (!lp_neg(d[row]) && d[row] >= 0) return false;
            pivot(row, enter, d);
        }
        (void)b;
        return false;
    }

    FeasibilityResult<T> extract(const std::vector<T>& b) {
        T art_mass(0);
        for (std::size_t r = 0; r < m_; ++r)
            if (is_art(basis_[r])) art_mass += xb_[r];
        FeasibilityResult<T> res;
        if (!lp_pos(art_mass)) {
            res.feasible = true;
            for (std::size_t r = 0; r < m_; ++r) {
                if (is_art(basis_[r])) continue;
                if (xb_[r] == 0) continue;
                T v = xb_[r];
                if constexpr (!scalar_traits<T>::exact) {
                    if (to_double(v) < 0) v = T(0);
                }
                if (v != 0) res.coeffs.emplace_back(basis_[r], v);
            }
        } else {
            res.farkas = multipliers();
        }
        (void)b;
        return res;
    }
};

// ---- dense two-phase tableau --------------------------------------------

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class T>
struct DenseLpResult {
    LpStatus status = LpStatus::Infeasible;
    T value{};
    std::vector<T> x; // per column
    std::vector<T> y; // multipliers per row, for the original row signs
};

template <class T>
class DenseSimplex {
public:
    // cols[j] is dense of size rows; minimize costs.x s.t. sum_j x_j cols[j] = b.
    static DenseLpResult<T> solve(std::size_t rows, const std::vector<std::vector<T>>& cols,
                                  const std::vector<T>& costs, std::vector<T> b) {
        const std::size_t n = cols.size();
        std::vector<int> row_sign(rows, 1);
        std::vector<std::vector<T>> tab(rows, std::vector<T>(n + rows + 1, T(0)));
        for (std::size_t r = 0; r < rows; ++r) {
            int s = b[r] < 0 ? -1 : 1;
            row_sign[r] = s;
            for (std::size_t j = 0; j < n; ++j) tab[r][j] = s < 0 ? T(-cols[j][r]) : cols[j][r];
            tab[r][n + r] = T(1);
            tab[r][n + rows] = s < 0 ? T(-b[r]) : b[r];
        }
        std::vector<std::size_t> basis(rows);
        for (std::size_t r = 0; r < rows; ++r) basis[r] = n + r;

        T final_value(0);
        bool unbounded = false;
        auto run = [&](const std::vector<T>& c, bool allow_art) -> bool {
            // Returns false on iteration cap. Bland's rule throughout.
            std::vector<T> costrow(n + rows, T(0));
            T value(0);
            for (std::size_t j = 0; j < n + rows; ++j) costrow[j] = c[j];
            for (std::size_t r = 0; r < rows; ++r) {
                if (c[basis[r]] == 0) continue;
                for (std::size_t j = 0; j < n + rows; ++j)
                    if (tab[r][j] != 0) costrow[j] -= c[basis[r]] * tab[r][j];
                value += c[basis[r]] * tab[r][n + rows];
            }
            const std::size_t cap = 2000 + 60 * (rows + n);
            for (std::size_t iter = 0; iter < cap; ++iter) {
                std::size_t enter = n + rows;
                for (std::size_t j = 0; j < n + rows; ++j) {
                    if (!allow_art && j >= n) continue;
                    if (lp_neg(costrow[j])) { enter = j; break; }
                }
                if (enter == n + rows) { final_value = value; return true; }
                std::size_t leave = rows;
                for (std::size_t r = 0; r < rows; ++r) {
                    if (!lp_pos(tab[r][enter])) continue;
                    if (leave == rows) { leave = r; continue; }
                    T lhs = tab[r][n + rows] * tab[leave][enter];
                    T rhs = tab[leave][n + rows] * tab[r][enter];
                    if (lhs < rhs || (lhs == rhs && basis[r] < basis[leave])) leave = r;
                }
                if (leave == rows) { final_value = value; unbounded = true; return true; }
                // pivot
                T piv = tab[leave][enter];
                for (auto& v : tab[leave]) v /= piv;
                for (std::size_t r = 0; r < rows; ++r) {
                    if (r == leave || tab[r][enter] == 0) continue;
                    T f = tab[r][enter];
                    for (std::size_t j = 0; j <= n + rows; ++j)
                        if (tab[leave][j] != 0) tab[r][j] -= f * tab[leave][j];
                }
                if (costrow[enter] != 0) {
                    T f = costrow[enter];
                    for (std::size_t j = 0; j < n + rows; ++j)
                        if (tab[leave][j] != 0) costrow[j] -= f * tab[leave][j];
                    value += f * tab[leave][n + rows];
                }
                basis[leave] = enter;
            }
            return false;
        };

        DenseLpResult<T> res;
        std::vector<T> phase1(n + rows, T(0));
        for (std::size_t r = 0; r < rows; ++r) phase1[n + r] = T(1);
        if (!run(phase1, true)) fail(Errc::SolverFailure, "phase-1 iteration cap");
        if (lp_pos(final_value)) {
            res.status = LpStatus::Infeasible;
            return res;
        }
        // Drive leftover artificial basics out where possible.
        for (std::size_t r = 0; r < rows; ++r) {
            if (basis[r] < n) continue;
            std::size_t enter = n;
            for (std::size_t j = 0; j < n; ++j)
                if (lp_pos(tab[r][j]) || lp_neg(tab[r][j])) { enter = j; break; }
            if (enter == n) continue; // redundant row, harmless
            T piv = tab[r][enter];
            for (auto& v : tab[r]) v /= piv;
            for (std::size_t rr = 0; rr < rows; ++rr) {
                if (rr == r || tab[rr][enter] == 0) continue;
                T f = tab[rr][enter];
                for (std::size_t j = 0; j <= n + rows; ++j)
                    if (tab[r][j] != 0) tab[rr][j] -= f * tab[r][j];
            }
            basis[r] = enter;
        }
        std::vector<T> phase2(n + rows, T(0));
        for (std::size_t j = 0; j < n; ++j) phase2[j] = costs[j];
        if (!run(phase2, false)) fail(Errc::SolverFailure, "phase-2 iteration cap");
        if (unbounded) {
            res.status = LpStatus::Unbounded;
            return res;
        }
        res.status = LpStatus::Optimal;
        res.value = final_value;
        res.x.assign(n, T(0));
        for (std::size_t r = 0; r < rows; ++r)
            if (basis[r] < n) res.x[basis[r]] = tab[r][n + rows];
        // Multipliers: costrow over artificial j is -y_j in the flipped frame.
        // Recompute directly from the final basis for clarity.
        res.y.assign(rows, T(0));
        {
            std::vector<T> costrow(n + rows, T(0));
            for (std::size_t j = 0; j < n + rows; ++j) costrow[j] = j < n ? costs[j] : T(0);
            for (std::size_t r = 0; r < rows; ++r) {
                if (basis[r] >= n || costs[basis[r]] == 0) continue;
                for (std::size_t j = 0; j < n + rows; ++j)
                    if (tab[r][j] != 0) costrow[j] -= costs[basis[r]] * tab[r][j];
            }
            for (std::size_t r = 0; r < rows; ++r)
                res.y[r] = T(row_sign[r]) * T(-costrow[n + r]);
        }
        return res;
    }
};

} // namespace freelip
