#include "battrae/lbfgs.hpp"

#include <cmath>
#include <deque>

#include "battrae/errors.hpp"

namespace battrae {

namespace {

struct Evaluation {
  double value = 0.0;
  Eigen::VectorXd grad;
};

Evaluation checked_eval(const EvalFn& eval, const Eigen::VectorXd& x) {
  auto [value, grad] = eval(x);
  if (!std::isfinite(value) || !grad.allFinite()) {
    throw NumericError("lbfgs: eval produced a non-finite value or gradient");
  }
  return {value, std::move(grad)};
}

// Minimizer of the cubic Hermite interpolant of phi on [a, b]
// (Nocedal & Wright eq. 3.59), clamped away from the interval ends.
double cubic_minimizer(double a, double fa, double ga, double b, double fb,
                       double gb) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  double candidate;
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    candidate = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2);
  } else {
    candidate = 0.5 * (a + b);
  }
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  if (!std::isfinite(candidate) || candidate < lo + margin ||
      candidate > hi - margin) {
    candidate = 0.5 * (a + b);
  }
  return candidate;
}

struct LineSearchResult {
  bool success = false;
  double step = 0.0;
  Evaluation at_step;
  int evals = 0;
};

// Strong-Wolfe line search, Nocedal & Wright algorithms 3.5/3.6.
LineSearchResult line_search(const EvalFn& eval, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& direction, double phi0,
                             double dphi0, const LbfgsConfig& cfg) {
  LineSearchResult result;
  if (dphi0 >= 0.0) return result;  // not a descent direction

  const double c1 = cfg.wolfe_c1;
  const double c2 = cfg.wolfe_c2;
  constexpr double kMaxStep = 1e20;

  auto probe = [&](double alpha) -> std::pair<Evaluation, double> {
    Evaluation e = checked_eval(eval, x + alpha * direction);
    ++result.evals;
    return {std::move(e), 0.0};
  };

  struct Point {
    double alpha, phi, dphi;
    Evaluation eval;
  };

  auto make_point = [&](double alpha) {
    auto [e, unused] = probe(alpha);
    (void)unused;
    double dphi = e.grad.dot(direction);
    return Point{alpha, e.value, dphi, std::move(e)};
  };

  auto accept = [&](Point& p) {
    result.success = true;
    result.step = p.alpha;
    result.at_step = std::move(p.eval);
  };

  auto zoom = [&](Point lo, Point hi) {
    while (result.evals < cfg.max_line_search_steps) {
      double alpha = cubic_minimizer(lo.alpha, lo.phi, lo.dphi, hi.alpha,
                                     hi.phi, hi.dphi);
      Point p = make_point(alpha);
      if (p.phi > phi0 + c1 * alpha * dphi0 || p.phi >= lo.phi) {
        hi = std::move(p);
      } else {
        if (std::abs(p.dphi) <= -c2 * dphi0) {
          accept(p);
          return;
        }
        if (p.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = std::move(lo);
        lo = std::move(p);
      }
      if (std::abs(hi.alpha - lo.alpha) <
          1e-16 * std::max(1.0, std::abs(lo.alpha))) {
        break;  // bracket collapsed without satisfying the curvature test
      }
    }
  };

  Point prev{0.0, phi0, dphi0, {}};
  double alpha = 1.0;
  for (int i = 0; result.evals < cfg.max_line_search_steps; ++i) {
    Point p = make_point(alpha);
    if (p.phi > phi0 + c1 * alpha * dphi0 || (i > 0 && p.phi >= prev.phi)) {
      zoom(std::move(prev), std::move(p));
      return result;
    }
    if (std::abs(p.dphi) <= -c2 * dphi0) {
      accept(p);
      return result;
    }
    if (p.dphi >= 0.0) {
      zoom(std::move(p), std::move(prev));
      return result;
    }
    prev = std::move(p);
    alpha = std::min(2.0 * alpha, kMaxStep);
    if (alpha >= kMaxStep) break;
  }
  return result;
}

}  // namespace

MinimizeResult minimize(const EvalFn& eval, const Eigen::VectorXd& x0,
                        const LbfgsConfig& cfg) {
  Eigen::VectorXd x = x0;
  Evaluation current = checked_eval(eval, x);

  MinimizeResult result;
  result.x = x;
  result.value = current.value;

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y)

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    const double grad_inf = current.grad.lpNorm<Eigen::Infinity>();
    if (grad_inf < cfg.grad_tolerance) {
      result.trace.stop_reason = StopReason::kGradTolerance;
      return result;
    }

    // Two-loop recursion; first iteration falls back to scaled steepest
    // descent.
    Eigen::VectorXd direction;
    if (history.empty()) {
      direction = -current.grad / grad_inf;
    } else {
      Eigen::VectorXd q = current.grad;
      std::vector<double> alphas(history.size());
      for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
        const auto& [s, y] = history[i];
        alphas[i] = s.dot(q) / s.dot(y);
        q -= alphas[i] * y;
      }
      const auto& [s_last, y_last] = history.back();
      const double gamma = s_last.dot(y_last) / y_last.squaredNorm();
      Eigen::VectorXd r = gamma * q;
      for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& [s, y] = history[i];
        const double beta = y.dot(r) / s.dot(y);
        r += (alphas[i] - beta) * s;
      }
      direction = -r;
    }

    double dphi0 = direction.dot(current.grad);
    if (dphi0 >= 0.0) {
      // Stale curvature information; restart from steepest descent.
      history.clear();
      direction = -current.grad / grad_inf;
      dphi0 = direction.dot(current.grad);
    }

    LineSearchResult ls =
        line_search(eval, x, direction, current.value, dphi0, cfg);
    if (!ls.success) {
      result.trace.line_search_failed = true;
      result.trace.stop_reason = StopReason::kLineSearchFailed;
      return result;  // best point found so far
    }

    Eigen::VectorXd s = ls.step * direction;
    Eigen::VectorXd y = ls.at_step.grad - current.grad;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      history.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(history.size()) > cfg.history_size) {
        history.pop_front();
      }
    }

    x += ls.step * direction;
    current = std::move(ls.at_step);
    result.x = x;
    result.value = current.value;
    result.trace.records.push_back(
        {iter, current.value, current.grad.lpNorm<Eigen::Infinity>(), ls.step,
         ls.evals});
  }
  result.trace.stop_reason = StopReason::kMaxIterations;
  return result;
}

}  // namespace battrae
