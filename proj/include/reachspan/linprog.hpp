#ifndef REACHSPAN_LINPROG_HPP
#define REACHSPAN_LINPROG_HPP

#include <Eigen/Dense>
#include <vector>

namespace reachspan {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;        // optimal vertex when status == Optimal
  double value = 0.0;       // c'x at the optimum
  std::vector<int> active;  // rows of A active at x (a full basis when one exists)
};

/**
 * @brief Maximizes c'x subject to A x <= b over free variables x.
 *
 * Dense two-phase simplex.  The tableau is built for the dual program
 * (min b'y, A'y = c, y >= 0), which keeps it at n rows regardless of how many
 * inequality rows the problem has; the primal vertex is recovered from the
 * simplex multipliers.  Deterministic: ties in pricing and ratio tests break
 * towards the lowest index, and Bland's rule takes over if the objective
 * stalls, so the method cannot cycle.
 */
LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& b);

/**
 * @brief Repeated support queries max c'x over a fixed feasible set A x <= b.
 *
 * The first call bootstraps a feasible vertex with solve_lp(); later calls
 * walk edge-by-edge from the previous optimum, which for a sequence of
 * nearby objective directions takes only a handful of basis exchanges.
 * Intended for bounded feasible sets; an unbounded objective throws.
 */
class SupportSolver {
 public:
  SupportSolver(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

  /** Solves one support query.  Status is Optimal or Infeasible. */
  LpResult maximize(const Eigen::VectorXd& c);

  int rows() const { return static_cast<int>(A_.rows()); }

 private:
  LpResult bootstrap(const Eigen::VectorXd& c);

  Eigen::MatrixXd A_;   // row-normalized copy
  Eigen::VectorXd b_;
  double scale_ = 1.0;  // largest row norm seen before normalization
  bool infeasible_ = false;
  bool has_vertex_ = false;
  std::vector<int> basis_;
  Eigen::VectorXd x_;
};

}  // namespace reachspan

#endif  // REACHSPAN_LINPROG_HPP
