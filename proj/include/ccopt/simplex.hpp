#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ccopt/errors.hpp"
#include "ccopt/rng.hpp"

namespace ccopt {

struct SparseColumn {
    std::vector<int> row;
    std::vector<double> val;
};

enum class RowSense { Eq, Ge };

// min c'x  s.t.  A x {=, >=} b per row, x >= 0, with A stored by column.
// An empty sense vector means all rows are equalities.
struct LinearProgram {
    int num_rows = 0;
    std::vector<double> rhs;
    std::vector<SparseColumn> cols;
    std::vector<double> cost;
    std::vector<RowSense> sense;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, Numerical };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
        case LpStatus::Numerical: return "numerical";
    }
    return "?";
}

struct SimplexOptions {
    double tol = 1e-9;        // pricing and feasibility tolerance
    double pivot_tol = 1e-8;  // smallest preferred pivot magnitude
    long max_iterations = 2000000;
    int refactor_every = 200; // rebuild the basis inverse this often
    int bland_after = 2000;   // degenerate-step streak that triggers Bland's rule
    double perturb = 1e-9;    // basic-value anti-degeneracy shift scale; 0 disables
};

struct SimplexResult {
    LpStatus status = LpStatus::Numerical;
    double objective = 0.0;
    std::vector<double> x;     // structural variables only
    std::vector<int> basis;    // basic variable per row; >= #structural marks
                               // a surplus, >= #structural+#surplus an artificial
    std::vector<double> dual;  // row prices for the original cost vector
    long iterations = 0;
    double residual = 0.0;     // final max row violation of the solved system
};

// Two-phase revised simplex with a dense explicit basis inverse, suited to
// the problem sizes here (hundreds of rows, tens of thousands of columns).
// Inequality rows get internal surplus columns. Determinism contract:
// identical inputs take identical pivot sequences. Entering rule is Devex
// (reference framework reset per phase) with Bland's rule as an anti-cycling
// fallback; the leaving rule is min ratio with the largest pivot magnitude on
// ties. Degeneracy is broken by shifting every basic value up by a tiny
// deterministic amount at the start of each phase; the shift is folded into
// the right-hand side so the tableau stays consistent, and the true
// right-hand side is restored exactly before any verdict is read off.
class SimplexSolver {
public:
    SimplexSolver(const LinearProgram& lp, const SimplexOptions& opt)
        : opt_(opt), m_(lp.num_rows), ns_(static_cast<int>(lp.cols.size())) {
        if (static_cast<int>(lp.rhs.size()) != m_)
            throw ConfigError("simplex: rhs size does not match row count");
        if (lp.cost.size() != lp.cols.size())
            throw ConfigError("simplex: cost size does not match column count");
        if (!lp.sense.empty() && static_cast<int>(lp.sense.size()) != m_)
            throw ConfigError("simplex: sense size does not match row count");
        sign_.assign(m_, 1.0);
        b_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            sign_[i] = lp.rhs[i] < 0 ? -1.0 : 1.0;
            b_(i) = std::abs(lp.rhs[i]);
        }

        // Structural columns, then one surplus column per inequality row,
        // flattened for scan locality.
        surplus_of_row_.assign(m_, -1);
        int extra = 0;
        if (!lp.sense.empty())
            extra = static_cast<int>(std::count(lp.sense.begin(), lp.sense.end(), RowSense::Ge));
        n_ = ns_ + extra;
        std::size_t nnz = static_cast<std::size_t>(extra);
        for (const auto& col : lp.cols) nnz += col.row.size();
        col_start_.reserve(n_ + 1);
        col_row_.reserve(nnz);
        col_val_.reserve(nnz);
        col_start_.push_back(0);
        for (const auto& col : lp.cols) {
            for (std::size_t k = 0; k < col.row.size(); ++k) {
                const int r = col.row[k];
                if (r < 0 || r >= m_)
                    throw ConfigError("simplex: column row index out of range");
                col_row_.push_back(r);
                col_val_.push_back(col.val[k] * sign_[r]);
            }
            col_start_.push_back(static_cast<int>(col_row_.size()));
        }
        cost_.assign(lp.cost.begin(), lp.cost.end());
        for (int i = 0; i < m_; ++i) {
            if (lp.sense.empty() || lp.sense[i] == RowSense::Eq) continue;
            surplus_of_row_[i] = static_cast<int>(col_start_.size()) - 1;
            col_row_.push_back(i);
            col_val_.push_back(-1.0 * sign_[i]);
            col_start_.push_back(static_cast<int>(col_row_.size()));
            cost_.push_back(0.0);
        }
        b0_ = b_;
    }

    SimplexResult solve() {
        basis_.resize(m_);
        in_basis_.assign(n_, 0);
        for (int i = 0; i < m_; ++i) {
            // a zero-rhs inequality row can start on its own surplus column,
            // sparing phase 1 an artificial
            if (surplus_of_row_[i] >= 0 && b_(i) == 0.0) {
                basis_[i] = surplus_of_row_[i];
                in_basis_[surplus_of_row_[i]] = 1;
            } else {
                basis_[i] = n_ + i;
            }
        }
        refactor();

        SimplexResult res;
        perturb();
        res.status = run_phase(/*phase=*/1, res);
        if (res.status != LpStatus::Optimal) return finish(res);
        restore();
        if (phase1_objective() > opt_.tol * (1.0 + b_.lpNorm<1>())) {
            res.status = LpStatus::Infeasible;
            return finish(res);
        }
        expel_artificials();
        perturb();
        res.status = run_phase(/*phase=*/2, res);
        if (res.status == LpStatus::Optimal) restore();
        return finish(res);
    }

private:
    double cost_of(int j, int phase) const {
        if (phase == 1) return j >= n_ ? 1.0 : 0.0;
        return j >= n_ ? 0.0 : cost_[j];
    }

    double phase1_objective() const {
        double s = 0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= n_) s += std::max(0.0, xb_(i));
        return s;
    }

    double dot_col(int j, const Eigen::VectorXd& y) const {
        double s = 0;
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
            s += col_val_[k] * y(col_row_[k]);
        return s;
    }

    // w = B^-1 a_j
    void ftran(int j, Eigen::VectorXd& w) const {
        w.setZero();
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
            w += col_val_[k] * binv_.col(col_row_[k]);
    }

    // Shift every basic value up by a deterministic dust amount and fold the
    // shift into b_ (b += B eps), so xb_ == B^-1 b_ keeps holding. Breaks the
    // ratio-test ties that otherwise stall covering programs whose rows are
    // almost all zero-rhs.
    void perturb() {
        if (opt_.perturb <= 0) return;
        const double scale = opt_.perturb * (1.0 + b0_.lpNorm<Eigen::Infinity>());
        for (int i = 0; i < m_; ++i) {
            const double eps = scale * (1.0 + rng_.next_double());
            xb_(i) += eps;
            const int j = basis_[i];
            if (j >= n_) {
                b_(j - n_) += eps;
            } else {
                for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                    b_(col_row_[k]) += eps * col_val_[k];
            }
        }
        perturbed_ = true;
    }

    // Undo perturb() exactly and recompute the basic values for the true
    // right-hand side. Every verdict (infeasibility, final solution) is read
    // off restored values only.
    void restore() {
        b_ = b0_;
        perturbed_ = false;
        refactor();
    }

    int price(int phase, bool bland, const Eigen::VectorXd& y) const {
        int best = -1;
        double best_score = 0.0;
        for (int j = 0; j < n_; ++j) {
            if (in_basis_[j]) continue;
            const double d = cost_of(j, phase) - dot_col(j, y);
            if (d >= -opt_.tol) continue;
            if (bland) return j;
            const double score = d * d / devex_[j];
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    struct Ratio {
        int row = -1;
        double theta = 0.0;
        bool desperate = false;  // binding pivot below pivot_tol
    };

    // Leaving row for entering column w, Harris style: first pass finds the
    // tightest ratio with each basic value relaxed by a small feasibility
    // band, second pass takes the largest pivot among rows inside that bound.
    // The band trades a bounded (healable) overshoot for far better pivot
    // magnitudes, which is what keeps the updated inverse trustworthy.
    // Every component above zero_eps blocks; excluding small-but-real
    // components would leak theta * w of infeasibility into their rows on
    // every step, which compounds once such a row's variable leaves the
    // basis (a negative basic dropped to nonbasic zero falsifies the system
    // by its deficit). With full blocking, negative values stay within the
    // band: theta caps at max(0, xb)/w for the chosen row, and negative rows
    // only rise (w < 0) or block at 0 (w > 0).
    // row -1 means no positive component at all (unbounded direction).
    // Zero-valued basic artificials leave first whenever the entering column
    // touches their row, keeping parked (redundant) rows pinned at zero.
    Ratio ratio_test(const Eigen::VectorXd& w, bool bland) const {
        constexpr double zero_eps = 1e-11;
        int art_row = -1;
        double art_mag = 0;
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] >= n_ && xb_(i) <= opt_.tol && std::abs(w(i)) > opt_.pivot_tol) {
                if (std::abs(w(i)) > art_mag) {
                    art_mag = std::abs(w(i));
                    art_row = i;
                }
            }
        }
        if (art_row >= 0) return {art_row, 0.0, false};

        Ratio r;
        if (bland) {
            double theta = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (w(i) <= zero_eps) continue;
                const double t = std::max(0.0, xb_(i)) / w(i);
                if (t < theta - 1e-12) {
                    theta = t;
                    r.row = i;
                } else if (t <= theta + 1e-12 && r.row >= 0 && basis_[i] < basis_[r.row]) {
                    r.row = i;
                }
            }
        } else {
            // The band must stay at rounding scale: every pivot may dig any
            // already-negative row deeper by up to one band, and a covering
            // program takes thousands of pivots, so a generous band would
            // accumulate into real infeasibility. Tie-breaking freedom comes
            // from the basic-value perturbation instead.
            const double band = 1e-13 * (1.0 + b_.lpNorm<Eigen::Infinity>());
            double theta_max = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (w(i) <= zero_eps) continue;
                const double t = (std::max(0.0, xb_(i)) + band) / w(i);
                if (t < theta_max) theta_max = t;
            }
            double best_piv = 0.0;
            for (int i = 0; i < m_; ++i) {
                if (w(i) <= zero_eps) continue;
                if (std::max(0.0, xb_(i)) / w(i) <= theta_max && w(i) > best_piv) {
                    best_piv = w(i);
                    r.row = i;
                }
            }
        }
        if (r.row >= 0) {
            r.theta = std::max(0.0, xb_(r.row)) / w(r.row);
            r.desperate = w(r.row) < opt_.pivot_tol;
        }
        return r;
    }

    void pivot(int enter, int leave_row, const Eigen::VectorXd& w, double theta) {
        const double piv = w(leave_row);
        xb_ -= theta * w;
        xb_(leave_row) = theta;
        binv_.row(leave_row) /= piv;
        for (int i = 0; i < m_; ++i) {
            if (i == leave_row) continue;
            const double f = w(i);
            if (f != 0.0) binv_.row(i) -= f * binv_.row(leave_row);
        }
        const int old = basis_[leave_row];
        if (old < n_) in_basis_[old] = 0;
        basis_[leave_row] = enter;
        in_basis_[enter] = 1;
    }

    // Devex reference weights. Must run before pivot() so the pre-pivot
    // inverse row and basis entry are still available.
    void update_devex(int enter, int leave_row, double piv) {
        const double ge = devex_[enter];
        const double piv2 = piv * piv;
        const auto rho = binv_.row(leave_row);
        double biggest = 1.0;
        for (int j = 0; j < n_; ++j) {
            if (in_basis_[j] || j == enter) continue;
            double a = 0;
            for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                a += col_val_[k] * rho(col_row_[k]);
            if (a == 0.0) continue;
            const double cand = (a * a / piv2) * ge;
            if (cand > devex_[j]) devex_[j] = cand;
            if (devex_[j] > biggest) biggest = devex_[j];
        }
        const int leaving = basis_[leave_row];
        if (leaving < n_) devex_[leaving] = std::max(ge / piv2, 1.0);
        if (biggest > 1e10) devex_.assign(n_, 1.0);  // fresh reference framework
    }

    void refactor() {
        Eigen::MatrixXd bmat = Eigen::MatrixXd::Zero(m_, m_);
        for (int i = 0; i < m_; ++i) {
            const int j = basis_[i];
            if (j >= n_) {
                bmat(j - n_, i) = 1.0;
            } else {
                for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                    bmat(col_row_[k], i) = col_val_[k];
            }
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
        binv_ = lu.inverse();
        if (!binv_.allFinite()) throw NumericalError("simplex: singular basis on refactor");
        xb_ = lu.solve(b_);
        xb_ += lu.solve(b_ - bmat * xb_);  // one refinement step
        const double worst = xb_.minCoeff();
        if (worst < -1e-5 * (1.0 + b_.lpNorm<Eigen::Infinity>()))
            throw NumericalError("simplex: basis refactor lost feasibility");
    }

    LpStatus run_phase(int phase, SimplexResult& res) {
        Eigen::VectorXd y(m_), w(m_);
        devex_.assign(n_, 1.0);
        int since_refactor = 0;
        int degen_streak = 0;
        bool bland = false;
        while (res.iterations < opt_.max_iterations) {
            compute_duals(phase, y);
            const int enter = price(phase, bland, y);
            if (enter < 0) return LpStatus::Optimal;
            ftran(enter, w);
            Ratio r = ratio_test(w, bland);
            if (r.row < 0) {
                // phase 1 is bounded below by zero, so this is breakdown
                return phase == 1 ? LpStatus::Numerical : LpStatus::Unbounded;
            }
            if (r.desperate && since_refactor > 0) {
                // the binding pivot is dust-sized: re-derive the step from a
                // fresh factorization before trusting it
                refactor();
                since_refactor = 0;
                continue;
            }
            if (!bland && !r.desperate) update_devex(enter, r.row, w(r.row));
            pivot(enter, r.row, w, r.theta);
            ++res.iterations;
            if (r.theta <= 1e-12) {
                if (++degen_streak >= opt_.bland_after) bland = true;
            } else {
                degen_streak = 0;
                bland = false;
            }
            // a dust pivot degrades the updated inverse: rebuild immediately
            if (r.desperate) since_refactor = opt_.refactor_every;
            if (++since_refactor >= opt_.refactor_every) {
                refactor();
                since_refactor = 0;
            }
        }
        return LpStatus::IterationLimit;
    }

    void compute_duals(int phase, Eigen::VectorXd& y) const {
        Eigen::VectorXd cb(m_);
        for (int i = 0; i < m_; ++i) cb(i) = cost_of(basis_[i], phase);
        y.noalias() = binv_.transpose() * cb;
    }

    // After phase 1, swap zero artificials for decision columns where the
    // row admits a usable pivot; rows that admit none are redundant and keep
    // their artificial parked at zero.
    void expel_artificials() {
        Eigen::VectorXd w(m_);
        bool pivoted = false;
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            int found = -1;
            for (int j = 0; j < n_ && found < 0; ++j) {
                if (in_basis_[j]) continue;
                double wi = 0;
                for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                    wi += col_val_[k] * binv_(i, col_row_[k]);
                if (std::abs(wi) > opt_.pivot_tol) found = j;
            }
            if (found < 0) continue;
            ftran(found, w);
            pivot(found, i, w, 0.0);
            pivoted = true;
        }
        if (pivoted) refactor();
    }

    SimplexResult finish(SimplexResult res) {
        if (res.status == LpStatus::Optimal) {
            // solve() restored the true right-hand side already; basic values
            // are exact for this (dual-feasible) basis. Small negative dust
            // is clamped in the report; real violations are a failure.
            const double scale = 1.0 + b_.lpNorm<Eigen::Infinity>();
            std::vector<double> xfull(n_, 0.0);
            for (int i = 0; i < m_; ++i) {
                if (xb_(i) < -1e-6 * scale) res.status = LpStatus::Numerical;
                if (basis_[i] < n_) {
                    xfull[basis_[i]] = xb_(i);
                } else if (xb_(i) > 1e-7 * scale) {
                    res.status = LpStatus::Numerical; // parked artificial came alive
                }
            }
            double obj = 0;
            for (int j = 0; j < ns_; ++j) obj += cost_[j] * xfull[j];
            res.objective = obj;
            Eigen::VectorXd y(m_);
            compute_duals(2, y);
            res.dual.resize(m_);
            for (int i = 0; i < m_; ++i) res.dual[i] = y(i) * sign_[i];
            res.residual = residual(xfull);
            if (res.residual > 1e-8 * scale) res.status = LpStatus::Numerical;
            res.x.resize(ns_);
            for (int j = 0; j < ns_; ++j) res.x[j] = std::max(0.0, xfull[j]);
        }
        res.basis = basis_;
        return res;
    }

    double residual(const std::vector<double>& xfull) const {
        Eigen::VectorXd ax = Eigen::VectorXd::Zero(m_);
        for (int j = 0; j < n_; ++j) {
            if (xfull[j] == 0.0) continue;
            for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                ax(col_row_[k]) += col_val_[k] * xfull[j];
        }
        double worst = 0;
        for (int i = 0; i < m_; ++i) worst = std::max(worst, std::abs(ax(i) - b_(i)));
        return worst;
    }

    SimplexOptions opt_;
    int m_ = 0;
    int ns_ = 0; // structural columns
    int n_ = 0;  // structural + surplus columns
    std::vector<double> sign_;
    std::vector<int> col_start_;
    std::vector<int> col_row_;
    std::vector<double> col_val_;
    std::vector<double> cost_;
    std::vector<int> surplus_of_row_;
    std::vector<double> devex_;
    Eigen::VectorXd b_, b0_, xb_;
    Eigen::MatrixXd binv_;
    std::vector<int> basis_;
    std::vector<std::uint8_t> in_basis_;
    Rng rng_{0x73706c78ULL};
    bool perturbed_ = false;
};

inline SimplexResult solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {}) {
    SimplexSolver solver(lp, opt);
    return solver.solve();
}

} // namespace ccopt
