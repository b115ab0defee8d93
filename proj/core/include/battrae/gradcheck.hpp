#ifndef BATTRAE_GRADCHECK_HPP
#define BATTRAE_GRADCHECK_HPP

#include <array>
#include <cstdint>

#include "battrae/grad.hpp"

namespace battrae {

/// Setup for the analytic-vs-central-difference comparison on a seeded tiny
/// model with synthetic instances.
struct GradCheckConfig {
  int dim = 3;  // d_s = d_t = d_a = d_sem
  int vocab_size = 12;
  int instance_count = 3;
  int max_phrase_len = 4;
  std::uint64_t seed = 1;
  double epsilon = 1e-5;
  // Seeds whose hinge margins or greedy tie gaps fall within this distance
  // of a non-differentiable boundary are rejected.
  double boundary_tolerance = 1e-4;
  // Shared group regularization weight. Large enough that no coordinate's
  // total gradient sits near zero, where the difference quotient would be
  // dominated by cancellation noise.
  double lambda = 1.0;
  // Parameter magnitudes are drawn uniformly from this band.
  double init_min = 0.1;
  double init_max = 0.6;
  // Test hook: added to one analytic gradient coordinate when nonzero.
  double perturb = 0.0;
};

struct GradCheckReport {
  bool boundary_skip = false;  // seed rejected, errors not populated
  std::array<double, 4> group_max_rel{};  // theta_L, rec, att, sem
  double max_rel = 0.0;
  Eigen::Index worst_index = -1;
  int worst_group = -1;
};

// Relative error |a-b| / max(|a|,|b|,1e-8) between the analytic gradient
// and the central-difference oracle, per flat coordinate. Parameters are
// drawn with magnitudes bounded away from zero and the group weights kept
// large so every coordinate carries a well-conditioned gradient.
GradCheckReport run_gradient_check(const GradCheckConfig& cfg);

extern const char* const kGradCheckGroupNames[4];

}  // namespace battrae

#endif
