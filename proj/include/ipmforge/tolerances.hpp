#pragma once

namespace ipmforge {

// Floating-point tolerances used across the library. The algorithm's theory is
// stated over the reals; every constant here is an engineering bound on the
// binary64 realization and is referenced by name where it applies.
struct Tolerances {
  // linalg
  static constexpr double symmetry_rel = 1e-12;         // required symmetry of a factored matrix
  static constexpr double chol_pivot_rel = 1e-13;       // pivot floor, relative to max diagonal
  static constexpr double chol_reconstruct_rel = 1e-10; // L*L^T reconstruction bound
  static constexpr double chol_residual = 1e-9;         // solve residual bound

  // feasibility and the runtime monitor
  static constexpr double feas_margin = 1e-12;    // strict-interior slack floor
  static constexpr double acc_slack = 1e-9;       // additive slack on centering-condition checks
  static constexpr double progress_slack = 1e-12; // additive slack on geometric-progress checks
  static constexpr double tstop_rel_slack = 1e-9; // relative slack on the final t >= t_stop check

  // oracle
  static constexpr double oracle_feas = 1e-9;    // vertex feasibility slack
  static constexpr double oracle_det_rel = 1e-12; // singular-subset pivot guard
  static constexpr double oracle_tie = 1e-12;     // equal-cost vertex tie window

  // analytic centering
  static constexpr double center_safety = 0.9; // accept lambda <= center_safety*beta
  static constexpr double center_tol = 1e-10;  // target decrement at the center
  static constexpr int max_center_iters = 500;

  // schedule
  static constexpr double degenerate_cost_norm = 1e-300;

  // MPC encoding
  static constexpr double relax_margin = 1e-6; // half-width of relaxed dynamics equalities

  // codegen
  static constexpr int elem_split_threshold = 100; // elementwise ops larger than this split per element
  static constexpr double diff_test = 1e-12;       // interpreter-vs-solver agreement bound
};

}  // namespace ipmforge
