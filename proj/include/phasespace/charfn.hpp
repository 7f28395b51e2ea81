#pragma once

#include <functional>

#include "phasespace/numerics.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

/// Largest Fock index accepted by phi_fock_element.
inline constexpr int kMaxFockIndex = 1000;

/// ⟨n| e^{βa†} e^{−β*a} |m⟩, summed in log-factorial form.
cplx phi_fock_element(int m, int n, cplx beta);

/// Φ(β): closed form when the catalog has one, Fock sum otherwise.
cplx phi(const State& state, cplx beta);

/// Fock-sum route Σ ρ_{m,n} Φ_{m,n}(β) at the given cutoff (default: the
/// state's own). Valid for |β| ≤ √cutoff / 3 unless the matrix is exact;
/// throws TruncationError outside that band or when the truncation loss
/// reaches 1e-6.
cplx phi_fock(const State& state, cplx beta, int cutoff = -1);
double fock_validity_band(int cutoff);

/// e^{−(1−s)|β|²/2} Φ(β).
cplx phi_s(const State& state, cplx beta, double s);

struct CharFn {
  State state;
  double s = 1.0;

  cplx operator()(PhasePoint beta) const { return phi_s(state, beta.value(), s); }
  /// β-domain field on `grid` with closed-form evaluation.
  PhaseField field(const PhaseGrid& grid) const;
};

struct GridScan {
  double value = 0.0;  // maximum of the scanned quantity
  PhasePoint argmax;
};

/// max |Φ(β)| e^{−|β|²/2} over the grid; ≤ 1 for physical states.
GridScan quantum_bound_check(const State& state, const PhaseGrid& grid);
inline bool within_quantum_bound(const GridScan& scan) {
  return scan.value <= 1.0 + 1e-9;
}

/// max (|Φ(β)| − 1) over the grid. A positive value certifies
/// nonclassicality; anything else is inconclusive on a finite grid.
GridScan classicality_violation(const State& state, const PhaseGrid& grid);
/// Rounding margin applied before a scan is read as a certificate.
inline constexpr double kViolationMargin = 1e-9;

/// Generic scan helper: maximum of g(β) over the grid nodes. Ties keep the
/// lexicographically smallest (x, p).
GridScan scan_max(const PhaseGrid& grid, const std::function<double(cplx)>& g);

}  // namespace phasespace
