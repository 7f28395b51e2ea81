#pragma once

// Filtered quasiprobabilities P_Ω(α;w) = (1/π²)∫d²β e^{β*α−βα*} Φ(β) Ω̃(β;w)
// for the box filter ω, whose normalized autocorrelation is a product of
// triangle functions.

#include <functional>
#include <string>

#include "phasespace/numerics.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

double tri(double x);

/// tri(Re β / w) · tri(Im β / w).
double autocorrelate_box(cplx beta, double w);

/// (w²/π²) sinc²(w Re α) sinc²(w Im α), the α-side of the box filter.
double omega_sinc(PhasePoint alpha, double w);

struct FilterKernel {
  double w = 1.0;
  std::string omega_spec;
  std::function<double(cplx)> omega_tilde;
  std::function<double(PhasePoint)> omega_alpha;
  /// Ω̃ vanishes outside [−support, support]²; infinite when not compact.
  double support = 0.0;

  static FilterKernel box(double w);
};

/// Φ(β) = exp(−λ x² − κ p²), x = Re β, p = Im β.
struct GaussianCF {
  double lambda = 0.0;
  double kappa = 0.0;
};

/// Gaussian form of vacuum, thermal, squeezed and P_max states without
/// modifiers; UnsupportedError for anything else.
GaussianCF gaussian_cf(const State& state);

/// T(y;g) = (2/π) Re ∫₀¹ dz e^{−gz²+2iyz}(1−z).
double T(double y, double g);

/// w² T(w Im α; w²λ) T(−w Re α; w²κ).
double filtered_p_gaussian(const GaussianCF& cf, double w, PhasePoint alpha);

struct FilteredP {
  PhaseField field;
  /// Largest |Im P_Ω| met on the grid before the real part was kept.
  double imag_residue = 0.0;
};

/// Quadrature of the defining integral over the kernel support with a
/// 2×200-node Gauss-Legendre rule per axis. Throws SupportError for kernels
/// without compact support and ComplexResidueError when the imaginary
/// residue exceeds 1e-9 of the peak.
FilteredP filtered_p_numeric(const State& state, const FilterKernel& kernel,
                             const PhaseGrid& grid);

/// ∫dy T(y;g) over the real line: adaptive quadrature on [−Y, Y] plus the
/// 1/y² asymptotic tail.
double T_integral(double g);

/// ∫d²α P_Ω(α;w) for a Gaussian characteristic function.
double filtered_mass(const GaussianCF& cf, double w);

}  // namespace phasespace
