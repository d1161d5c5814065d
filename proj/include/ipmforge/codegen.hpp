#pragma once

#include "ipmforge/codegen_ir.hpp"
#include "ipmforge/ipm_core.hpp"

namespace ipmforge::codegen {

struct SpecializeResult {
  KernelProgram kernel;
  ContractSidecar sidecar;
};

// Bakes the instance, config, schedule, and analytic center into a
// straight-line kernel plus its contract sidecar. Elementwise operations
// larger than Tolerances::elem_split_threshold are split into per-element
// set_<fn>_<var>_<row>_<col> functions.
SpecializeResult specialize(const LpInstance& p, const IpmConfig& cfg,
                            const IterationSchedule& sched, const Vector& x_ac);

enum class InterpretMode { checked, unchecked };

// Deterministic execution of the IR. In checked mode every AssertContract
// evaluates its baked predicate; violations raise ContractViolation. The
// returned certificate mirrors ipm_core::solve (monitor records are filled in
// checked mode only).
SolveCertificate interpret(const KernelProgram& k, InterpretMode mode);

struct RenderOptions {
  // Also emit runtime assert() statements where the contract is a plain
  // scalar comparison (progress, lower bound, final t_stop). Off by default:
  // the default rendering calls nothing beyond sqrt.
  bool runtime_asserts = false;
};

// Freestanding C99 text: static globals, baked constants, one function per IR
// function, one loop. Contracts appear as ACSL-style comment blocks.
std::string render_c(const KernelProgram& k, const ContractSidecar& s,
                     const RenderOptions& opts = {});

// Canonical sidecar JSON text (stable key order, round-trips through
// sidecar_from_json).
std::string render_sidecar_json(const ContractSidecar& s);

}  // namespace ipmforge::codegen
