#pragma once

// Complex-amplitude calculus on the phase plane: points, grids, sampled and
// closed-form fields, the Fourier pair used throughout the library, 2-D
// quadrature and the complex error function.

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace phasespace {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kSqrtPi = 1.77245385090551602729816748334114518;

/// A point α = x + ip of the phase plane (or β of the Fourier plane).
struct PhasePoint {
  double x = 0.0;
  double p = 0.0;

  static PhasePoint from_complex(cplx a) { return {a.real(), a.imag()}; }
  cplx value() const { return {x, p}; }
  cplx conj() const { return {x, -p}; }
  double norm2() const { return x * x + p * p; }

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

/// Uniform Cartesian grid [-L, L]^2 with N nodes per axis. Odd N puts the
/// origin on a node.
class PhaseGrid {
 public:
  PhaseGrid() : PhaseGrid(6.0, 257) {}
  PhaseGrid(double extent, int resolution);

  double extent() const { return extent_; }
  int resolution() const { return n_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  double coord(int i) const { return -extent_ + spacing_ * i; }
  /// Node (i, j) has x = coord(i), p = coord(j); storage is row-major in i.
  PhasePoint point(int i, int j) const { return {coord(i), coord(j)}; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }

 private:
  double extent_;
  int n_;
  double spacing_;
};

enum class Domain { alpha, beta };

/// Point mass w·δ(α - location); lets exact delta parts ride along with
/// regular fields.
struct Atom {
  PhasePoint location;
  cplx weight;
};

/// A complex function on the phase plane, given in closed form, as samples
/// on a PhaseGrid, or both.
class PhaseField {
 public:
  using Evaluator = std::function<cplx(PhasePoint)>;

  static PhaseField closed_form(Domain domain, Evaluator f, PhaseGrid grid,
                                std::vector<Atom> atoms = {});
  static PhaseField sampled(Domain domain, PhaseGrid grid,
                            std::vector<cplx> values,
                            std::vector<Atom> atoms = {});

  Domain domain() const { return domain_; }
  const PhaseGrid& grid() const { return grid_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool has_closed_form() const { return static_cast<bool>(eval_); }
  bool is_sampled() const { return !values_.empty(); }

  /// Closed-form evaluation anywhere; throws UnsupportedError for
  /// sample-only fields.
  cplx operator()(PhasePoint pt) const;
  /// Value at grid node (i, j), from samples if present.
  cplx at(int i, int j) const;
  /// Materialized samples over the grid (row-major).
  std::vector<cplx> values() const;
  /// Copy carrying explicit samples at every node.
  PhaseField sample() const;

 private:
  PhaseField(Domain d, PhaseGrid g) : domain_(d), grid_(g) {}

  Domain domain_;
  PhaseGrid grid_;
  Evaluator eval_;
  std::vector<cplx> values_;
  std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------
// Fourier pair.
//
// Forward:  Φ(β) = ∫d²α f(α) exp(βα* − β*α)
//                = ∫dx dp f(x,p) exp(i·2Imβ·x) exp(−i·2Reβ·p)
// Inverse:  f(α) = (1/π²) ∫d²β Φ(β) exp(β*α − βα*)
//
// Every module goes through these kernels; do not re-derive the signs.

inline cplx forward_kernel(cplx beta, cplx alpha) {
  return std::exp(beta * std::conj(alpha) - std::conj(beta) * alpha);
}
inline cplx inverse_kernel(cplx beta, cplx alpha) {
  return std::exp(std::conj(beta) * alpha - beta * std::conj(alpha));
}

struct FourierOptions {
  /// Largest boundary magnitude, relative to the peak, accepted before the
  /// transform is declared truncated.
  double truncation_tolerance = 1e-6;
};

/// Largest |Re β|, |Im β| the grid resolves: π/(2h).
double nyquist_limit(const PhaseGrid& grid);

cplx fourier_forward_at(const PhaseField& field, cplx beta,
                        const FourierOptions& opts = {});
PhaseField fourier_forward(const PhaseField& field, const PhaseGrid& beta_grid,
                           const FourierOptions& opts = {});
cplx fourier_inverse_at(const PhaseField& field, cplx alpha,
                        const FourierOptions& opts = {});
PhaseField fourier_inverse(const PhaseField& field,
                           const PhaseGrid& alpha_grid,
                           const FourierOptions& opts = {});

// ---------------------------------------------------------------------------
// Quadrature.

using Integrand = std::function<cplx(PhasePoint)>;

struct QuadResult {
  cplx value;
  double error_estimate = 0.0;
};

/// Polar-coordinate domain: ∫_0^{r_max} r dr ∫_0^{2π} dφ.
struct RadialSpec {
  double r_max = std::numeric_limits<double>::infinity();
  double tolerance = 1e-12;
  /// Skip the angular refinement when the integrand depends on |α| only.
  bool radially_symmetric = false;
  int max_angular_nodes = 4096;
};

/// Tensor trapezoid over the grid; the error estimate compares against the
/// half-resolution rule. Throws NonConvergence when the two disagree beyond
/// tolerance·max(1, |I|).
QuadResult quad2d(const Integrand& f, const PhaseGrid& grid,
                  double tolerance = 1e-8);
QuadResult quad2d(const Integrand& f, const RadialSpec& spec);

/// Adaptive Gauss-Kronrod on a real interval (either end may be infinite).
QuadResult quad1d(const std::function<cplx(double)>& f, double a, double b,
                  double tolerance = 1e-12);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

// ---------------------------------------------------------------------------
// Error function.

/// Largest |z| accepted by erf_cplx; beyond it e^{-z²} leaves double range.
inline constexpr double kErfStableRadius = 25.0;
/// Series / complementary-branch switch point of erf_cplx. The series loses
/// about e^{|z|²} ulps to cancellation, so it stops at |z| = 2.
inline constexpr double kErfSeriesRadius = 2.0;

/// erf(z): Maclaurin series for |z| ≤ 2, 1 − e^{−z²} w(iz) beyond (after
/// odd reflection to Re z ≥ 0). Throws RangeError for |z| > 25.
cplx erf_cplx(cplx z);

/// Faddeeva function w(z) = e^{-z²} erfc(-iz) (Weideman rational
/// approximation, N = 40; relative accuracy ~1e-15).
cplx faddeeva(cplx z);

/// Scaled complementary error function e^{z²} erfc(z).
inline cplx erfcx_cplx(cplx z) { return faddeeva(cplx{0.0, 1.0} * z); }

// ---------------------------------------------------------------------------
// Wirtinger derivatives from real partials: ∂_α = (∂_x − i∂_p)/2,
// ∂_{α*} = (∂_x + i∂_p)/2.

inline cplx wirtinger_alpha(cplx df_dx, cplx df_dp) {
  return 0.5 * (df_dx - cplx{0.0, 1.0} * df_dp);
}
inline cplx wirtinger_alpha_conj(cplx df_dx, cplx df_dp) {
  return 0.5 * (df_dx + cplx{0.0, 1.0} * df_dp);
}

}  // namespace phasespace
