#pragma once

#include <cstdint>

namespace lapfol {

/// Numerical tolerances shared by every module. One instance with the
/// defaults below is used unless a run configuration overrides a field.
struct Tolerances {
  // spaces
  double on_space = 1e-12;         // |‖p_b‖² − 1| per factor
  double unit_speed = 1e-12;       // |‖v‖ − 1|
  double tangency = 1e-12;         // normal residual of tangent vectors
  double frame_orthonormal = 1e-12;

  // polyfun
  int degree_cap = 12;
  double gradient_consistency = 1e-10;

  // lapalg
  double rank_threshold = 1e-8;    // singular values below this × scale are zero
  double rank_ambiguity_factor = 10.0;
  double basic_check = 1e-10;

  // submetry
  double fiber_constancy = 1e-10;
  double chart_residual = 1e-12;
  double volume_relative = 1e-10;
  double fd_step = 1e-4;
  double distance_refine = 1e-10;
  double min_leaf_gap = 1e-3;      // pairs closer than this in the leaf space are not tested

  // focal
  double root_bisection = 1e-10;
  double kernel_threshold = 1e-7;
  double root_merge = 1e-8;
  double window_edge = 1e-6;
  double tail_fit_residual = 1e-3;
  double ode_rel = 1e-13;
  double ode_abs = 1e-13;
  double wronskian = 1e-9;
  double scan_step = 1e-2;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

inline constexpr std::uint64_t kDefaultSeed = 20240917ULL;

}  // namespace lapfol
