#ifndef BATTRAE_LBFGS_HPP
#define BATTRAE_LBFGS_HPP

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace battrae {

struct LbfgsConfig {
  int history_size = 10;
  int max_iterations = 100;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  double grad_tolerance = 1e-5;  // infinity norm
  int max_line_search_steps = 40;
};

struct TraceRecord {
  int iteration = 0;
  double value = 0.0;
  double grad_inf_norm = 0.0;
  double step_length = 0.0;
  int line_search_evals = 0;
};

enum class StopReason {
  kGradTolerance,
  kMaxIterations,
  kLineSearchFailed,
};

struct OptimizationTrace {
  std::vector<TraceRecord> records;
  StopReason stop_reason = StopReason::kMaxIterations;
  bool line_search_failed = false;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  OptimizationTrace trace;
};

using EvalFn = std::function<std::pair<double, Eigen::VectorXd>(
    const Eigen::VectorXd&)>;

// L-BFGS with two-loop recursion and a strong-Wolfe line search
// (bracket + cubic-interpolation zoom). Curvature pairs with
// s.y <= 1e-10 ||s|| ||y|| are skipped. The first direction is steepest
// descent scaled by 1/||g||_inf. Line-search failure returns the best
// point found with the trace flagged; non-finite values from eval throw
// NumericError.
MinimizeResult minimize(const EvalFn& eval, const Eigen::VectorXd& x0,
                        const LbfgsConfig& cfg);

}  // namespace battrae

#endif
