#include "reachspan/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace reachspan {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kStallLimit = 24;  // consecutive non-improving pivots before Bland's rule

double splitmix_unit(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Revised simplex for  min cost'y  s.t.  E y = rhs, y >= 0  (rhs >= 0),
// starting from the all-artificial basis.  Artificial column r behaves as
// e_r with phase-1 cost 1; once an artificial leaves the basis it never
// re-enters.  Determinism: most-negative pricing with lowest-index ties,
// falling back to Bland's rule when the objective stalls.
class StandardSimplex {
 public:
  StandardSimplex(Eigen::MatrixXd E, Eigen::VectorXd rhs, Eigen::VectorXd cost)
      : E_(std::move(E)), rhs_(std::move(rhs)), cost_(std::move(cost)) {
    n_ = static_cast<int>(E_.rows());
    m_ = static_cast<int>(E_.cols());
    basis_.resize(n_);
    for (int r = 0; r < n_; ++r) basis_[r] = m_ + r;
  }

  bool run_phase1() {
    iterate(/*phase1=*/true);
    return phase_objective(true) <= 1e-9 * (1.0 + rhs_.lpNorm<1>());
  }

  // Returns false when the objective is unbounded below.
  bool run_phase2() { return iterate(/*phase1=*/false); }

  const std::vector<int>& basis() const { return basis_; }

  // Simplex multipliers of the final basis under the phase-2 costs.
  Eigen::VectorXd multipliers() const {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix());
    return lu.transpose().solve(basis_cost(false));
  }

 private:
  Eigen::MatrixXd basis_matrix() const {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n_, n_);
    for (int r = 0; r < n_; ++r) {
      const int id = basis_[r];
      if (id < m_)
        B.col(r) = E_.col(id);
      else
        B(id - m_, r) = 1.0;
    }
    return B;
  }

  Eigen::VectorXd basis_cost(bool phase1) const {
    Eigen::VectorXd cb(n_);
    for (int r = 0; r < n_; ++r) {
      const int id = basis_[r];
      cb[r] = phase1 ? (id >= m_ ? 1.0 : 0.0) : (id < m_ ? cost_[id] : 0.0);
    }
    return cb;
  }

  double phase_objective(bool phase1) const {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix());
    const Eigen::VectorXd xb = lu.solve(rhs_);
    return basis_cost(phase1).dot(xb);
  }

  bool iterate(bool phase1) {
    std::vector<char> in_basis(static_cast<size_t>(m_) + n_, 0);
    for (int id : basis_) in_basis[id] = 1;
    std::vector<char> left_artificial(n_, 0);

    bool bland = false;
    int stall = 0;
    double prev_obj = std::numeric_limits<double>::infinity();
    const int cap = 200 + 50 * (m_ + n_);
    const double cost_scale =
        1.0 + (phase1 ? 1.0 : (m_ > 0 ? cost_.cwiseAbs().maxCoeff() : 0.0));

    for (int iter = 0; iter < cap; ++iter) {
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix());
      const Eigen::VectorXd xb = lu.solve(rhs_);
      const Eigen::VectorXd cb = basis_cost(phase1);
      const Eigen::VectorXd pi = lu.transpose().solve(cb);

      // Progress smaller than the objective's own roundoff jitter must count
      // as a stall, or cycling on degenerate vertices never arms the
      // fallback rule.
      const double obj = cb.dot(xb);
      if (obj < prev_obj - 1e-9 * (1.0 + std::abs(prev_obj))) {
        stall = 0;
      } else if (++stall > kStallLimit) {
        bland = true;
      }
      prev_obj = obj;

      // Price structural columns (artificials never re-enter).
      const Eigen::VectorXd red = (m_ > 0)
          ? Eigen::VectorXd(cost_mode(phase1) - E_.transpose() * pi)
          : Eigen::VectorXd();
      const double tol = 1e-9 * cost_scale;
      int enter = -1;
      double best = -tol;
      for (int j = 0; j < m_; ++j) {
        if (in_basis[j]) continue;
        const double rj = red[j];
        if (rj < best) {
          enter = j;
          best = rj;
          if (bland) break;
        } else if (bland && rj < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;  // optimal for this phase

      const Eigen::VectorXd u = lu.solve(E_.col(enter));
      double t_min = std::numeric_limits<double>::infinity();
      for (int r = 0; r < n_; ++r) {
        if (u[r] <= kPivotTol) continue;
        t_min = std::min(t_min, std::max(xb[r], 0.0) / u[r]);
      }
      if (!std::isfinite(t_min)) return false;  // unbounded in this phase

      // Among the blocking rows, prefer pushing an artificial out; under
      // Bland's rule take the lowest basis index instead, which is what makes
      // the fallback terminate on degenerate bases.
      int leave = -1;
      for (int r = 0; r < n_; ++r) {
        if (u[r] <= kPivotTol) continue;
        if (std::max(xb[r], 0.0) / u[r] > t_min + 1e-12) continue;
        if (leave < 0) {
          leave = r;
        } else if (bland) {
          if (basis_[r] < basis_[leave]) leave = r;
        } else if (basis_[r] >= m_ && basis_[leave] < m_) {
          leave = r;
        }
      }

      if (basis_[leave] >= m_) left_artificial[basis_[leave] - m_] = 1;
      in_basis[basis_[leave]] = 0;
      in_basis[enter] = 1;
      basis_[leave] = enter;
    }
    throw std::runtime_error("simplex iteration limit exceeded");
  }

  Eigen::VectorXd cost_mode(bool phase1) const {
    if (phase1) return Eigen::VectorXd::Zero(m_);
    return cost_;
  }

  Eigen::MatrixXd E_;
  Eigen::VectorXd rhs_, cost_;
  int n_ = 0, m_ = 0;
  std::vector<int> basis_;
};

LpResult solve_lp_impl(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                       const Eigen::VectorXd& b, bool allow_recurse) {
  const int n = static_cast<int>(A.cols());
  const int K = static_cast<int>(A.rows());
  if (n < 1) throw std::runtime_error("solve_lp: problem must have at least one variable");
  if (b.size() != K || c.size() != n)
    throw std::runtime_error("solve_lp: dimension mismatch between c, A, b");
  if (!A.allFinite() || !b.allFinite() || !c.allFinite())
    throw std::runtime_error("solve_lp: non-finite input");

  // Keep only rows with a usable normal; a null row either is vacuous or
  // makes the whole system infeasible on its own.
  std::vector<int> kept;
  kept.reserve(K);
  const double a_scale = K > 0 ? A.cwiseAbs().maxCoeff() : 0.0;
  for (int i = 0; i < K; ++i) {
    if (A.row(i).norm() > 1e-14 * (1.0 + a_scale)) {
      kept.push_back(i);
    } else if (b[i] < -1e-12 * (1.0 + b.cwiseAbs().maxCoeff())) {
      return {LpStatus::Infeasible, Eigen::VectorXd(), 0.0, {}};
    }
  }
  const int Kk = static_cast<int>(kept.size());

  const double c_norm = c.norm();
  if (Kk == 0) {
    if (c_norm <= 1e-14)
      return {LpStatus::Optimal, Eigen::VectorXd::Zero(n), 0.0, {}};
    return {LpStatus::Unbounded, Eigen::VectorXd(), 0.0, {}};
  }

  // Dual program min b'y, A'y = c, y >= 0, rows flipped so the RHS is >= 0.
  const Eigen::VectorXd c_unit = c_norm > 0.0 ? Eigen::VectorXd(c / c_norm)
                                              : Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd E(n, Kk);
  Eigen::VectorXd dual_cost(Kk);
  for (int k = 0; k < Kk; ++k) {
    const int i = kept[k];
    const double nrm = A.row(i).norm();
    E.col(k) = A.row(i).transpose() / nrm;
    dual_cost[k] = b[i] / nrm;
  }
  Eigen::VectorXd flip = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd rhs = c_unit;
  for (int r = 0; r < n; ++r) {
    if (rhs[r] < 0.0) {
      rhs[r] = -rhs[r];
      flip[r] = -1.0;
      E.row(r) = -E.row(r);
    }
  }

  StandardSimplex simplex(std::move(E), rhs, dual_cost);
  if (!simplex.run_phase1()) {
    // Dual infeasible: the primal is unbounded or infeasible.  Decide with a
    // least-violation problem over (x, s): max -s, A x - 1 s <= b, s >= 0.
    if (!allow_recurse) throw std::runtime_error("solve_lp: nested feasibility probe failed");
    Eigen::MatrixXd Aa(K + 1, n + 1);
    Aa.topLeftCorner(K, n) = A;
    Aa.topRightCorner(K, 1).setConstant(-1.0);
    Aa.bottomLeftCorner(1, n).setZero();
    Aa(K, n) = -1.0;
    Eigen::VectorXd ba(K + 1);
    ba.head(K) = b;
    ba[K] = 0.0;
    Eigen::VectorXd ca = Eigen::VectorXd::Zero(n + 1);
    ca[n] = -1.0;
    const LpResult aux = solve_lp_impl(ca, Aa, ba, false);
    if (aux.status != LpStatus::Optimal)
      throw std::runtime_error("solve_lp: feasibility probe did not converge");
    const double b_scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (aux.value >= -1e-7 * b_scale)
      return {LpStatus::Unbounded, Eigen::VectorXd(), 0.0, {}};
    return {LpStatus::Infeasible, Eigen::VectorXd(), 0.0, {}};
  }
  if (!simplex.run_phase2())
    return {LpStatus::Infeasible, Eigen::VectorXd(), 0.0, {}};

  // The simplex multipliers of the dual are the primal optimizer.
  const Eigen::VectorXd pi = simplex.multipliers();
  Eigen::VectorXd x = flip.asDiagonal() * pi;

  LpResult out;
  out.status = LpStatus::Optimal;
  out.x = x;
  out.value = c.dot(x);
  for (int r = 0; r < n; ++r) {
    const int id = simplex.basis()[r];
    if (id < Kk) out.active.push_back(kept[id]);
  }
  std::sort(out.active.begin(), out.active.end());
  return out;
}

}  // namespace

LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& b) {
  return solve_lp_impl(c, A, b, true);
}

SupportSolver::SupportSolver(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
    : A_(A), b_(b) {
  if (A_.rows() != b_.size()) throw std::runtime_error("SupportSolver: A and b row mismatch");
  const double a_scale = A_.size() > 0 ? A_.cwiseAbs().maxCoeff() : 0.0;
  const double b_scale = b_.size() > 0 ? b_.cwiseAbs().maxCoeff() : 0.0;
  for (int i = 0; i < A_.rows(); ++i) {
    const double nrm = A_.row(i).norm();
    if (nrm > 1e-14 * (1.0 + a_scale)) {
      A_.row(i) /= nrm;
      b_[i] /= nrm;
      scale_ = std::max(scale_, nrm);
    } else if (b_[i] < -1e-12 * (1.0 + b_scale)) {
      infeasible_ = true;  // a null row demands a negative offset
    }
  }
}

LpResult SupportSolver::bootstrap(const Eigen::VectorXd& c) {
  LpResult r = solve_lp(c, A_, b_);
  const int n = static_cast<int>(A_.cols());
  std::uint64_t seed = 0x5eed;
  for (int attempt = 0; attempt < 4 && r.status == LpStatus::Optimal &&
                        static_cast<int>(r.active.size()) < n;
       ++attempt) {
    // Degenerate optimum did not pin down a full vertex basis; nudge the
    // objective into general position and retry.
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g[i] = splitmix_unit(seed) - 0.5;
    const Eigen::VectorXd cp =
        (c.norm() > 0 ? Eigen::VectorXd(c / c.norm()) : Eigen::VectorXd::Zero(n)) + 1e-6 * g;
    r = solve_lp(cp, A_, b_);
  }
  if (r.status == LpStatus::Infeasible) {
    infeasible_ = true;
    return r;
  }
  if (r.status == LpStatus::Unbounded)
    throw std::runtime_error("SupportSolver: feasible set is unbounded");
  if (static_cast<int>(r.active.size()) < n)
    throw std::runtime_error("SupportSolver: could not identify a vertex basis");
  basis_ = r.active;
  x_ = r.x;
  has_vertex_ = true;
  return r;
}

LpResult SupportSolver::maximize(const Eigen::VectorXd& c) {
  const int n = static_cast<int>(A_.cols());
  const int K = static_cast<int>(A_.rows());
  if (c.size() != n) throw std::runtime_error("SupportSolver: objective size mismatch");
  if (infeasible_) return {LpStatus::Infeasible, Eigen::VectorXd(), 0.0, {}};

  for (int attempt = 0;; ++attempt) {
    if (!has_vertex_) {
      bootstrap(c);
      if (infeasible_) return {LpStatus::Infeasible, Eigen::VectorXd(), 0.0, {}};
    }
    try {
      const double tol_lambda = 1e-10 * (1.0 + c.cwiseAbs().maxCoeff());
      std::vector<char> in_basis(K, 0);
      for (int i : basis_) in_basis[i] = 1;
      bool bland = false;
      int stall = 0;
      const int cap = 500 + 20 * K;

      Eigen::MatrixXd W(n, n);
      for (int iter = 0; iter < cap; ++iter) {
        Eigen::VectorXd bw(n);
        for (int r = 0; r < n; ++r) {
          W.row(r) = A_.row(basis_[r]);
          bw[r] = b_[basis_[r]];
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(W);
        const Eigen::VectorXd ud = lu.matrixLU().diagonal().cwiseAbs();
        if (ud.minCoeff() < 1e-13 * (ud.maxCoeff() + 1e-300))
          throw std::runtime_error("SupportSolver: singular working set");

        x_ = lu.solve(bw);
        const Eigen::VectorXd lambda = lu.transpose().solve(c);

        int q = -1;
        double most = -tol_lambda;
        for (int r = 0; r < n; ++r) {
          if (lambda[r] < most) {
            q = r;
            most = lambda[r];
            if (bland) break;
          } else if (bland && lambda[r] < -tol_lambda) {
            q = r;
            break;
          }
        }
        if (q < 0) {
          LpResult out;
          out.status = LpStatus::Optimal;
          out.x = x_;
          out.value = c.dot(x_);
          out.active = basis_;
          return out;
        }

        const Eigen::VectorXd d = lu.solve(Eigen::VectorXd(-Eigen::VectorXd::Unit(n, q)));
        const Eigen::VectorXd Ad = A_ * d;
        const Eigen::VectorXd slack = b_ - A_ * x_;
        double t_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i < K; ++i) {
          if (in_basis[i] || Ad[i] <= kPivotTol) continue;
          t_min = std::min(t_min, std::max(slack[i], 0.0) / Ad[i]);
        }
        if (!std::isfinite(t_min))
          throw std::runtime_error("SupportSolver: support query is unbounded");

        // Under Bland's rule the blocking constraint must be the lowest
        // index among the near-ties, or degenerate steps can revisit the
        // same working sets forever.
        int blocking = -1;
        const double t_tie = t_min + (bland ? 1e-12 * (1.0 + t_min) : 0.0);
        for (int i = 0; i < K; ++i) {
          if (in_basis[i] || Ad[i] <= kPivotTol) continue;
          if (std::max(slack[i], 0.0) / Ad[i] <= t_tie) {
            blocking = i;
            break;
          }
        }

        if (t_min <= 1e-12) {
          if (++stall > n + 10) bland = true;
        } else {
          stall = 0;
        }
        in_basis[basis_[q]] = 0;
        in_basis[blocking] = 1;
        basis_[q] = blocking;
        x_ += t_min * d;
      }
      throw std::runtime_error("SupportSolver: pivot limit exceeded");
    } catch (const std::runtime_error&) {
      // A degraded working set can usually be repaired by re-bootstrapping
      // from scratch; give that one chance before surfacing the error.
      has_vertex_ = false;
      if (attempt >= 1) throw;
    }
  }
}

}  // namespace reachspan
