#include "phasespace/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "phasespace/errors.hpp"
#include "phasespace/parallel.hpp"

namespace phasespace {

namespace {

constexpr cplx kI{0.0, 1.0};

std::vector<double> trapezoid_weights(const PhaseGrid& g) {
  std::vector<double> w(static_cast<std::size_t>(g.resolution()), g.spacing());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

void check_truncation(const PhaseField& field, double tol) {
  const auto& g = field.grid();
  const int n = g.resolution();
  double peak = 0.0;
  double edge = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double m = std::abs(field.at(i, j));
      peak = std::max(peak, m);
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) edge = std::max(edge, m);
    }
  }
  if (peak > 0.0 && edge > tol * peak) {
    throw TruncationError("field magnitude at the grid boundary (" +
                          std::to_string(edge) +
                          ") exceeds the truncation tolerance");
  }
}

void check_band(const PhaseGrid& grid, cplx target) {
  const double limit = nyquist_limit(grid);
  if (std::abs(target.real()) > limit || std::abs(target.imag()) > limit) {
    throw ResolutionError("requested point lies outside the grid's Nyquist band");
  }
}

}  // namespace

PhaseGrid::PhaseGrid(double extent, int resolution)
    : extent_(extent), n_(resolution) {
  if (!(extent > 0.0) || resolution < 2) {
    throw ParameterError("grid needs extent > 0 and at least two nodes");
  }
  spacing_ = 2.0 * extent / (resolution - 1);
}

PhaseField PhaseField::closed_form(Domain domain, Evaluator f, PhaseGrid grid,
                                   std::vector<Atom> atoms) {
  PhaseField out(domain, grid);
  out.eval_ = std::move(f);
  out.atoms_ = std::move(atoms);
  return out;
}

PhaseField PhaseField::sampled(Domain domain, PhaseGrid grid,
                               std::vector<cplx> values,
                               std::vector<Atom> atoms) {
  if (values.size() != grid.size()) {
    throw ParameterError("sample count does not match the grid");
  }
  PhaseField out(domain, grid);
  out.values_ = std::move(values);
  out.atoms_ = std::move(atoms);
  return out;
}

cplx PhaseField::operator()(PhasePoint pt) const {
  if (!eval_) throw UnsupportedError("field has no closed-form evaluator");
  return eval_(pt);
}

cplx PhaseField::at(int i, int j) const {
  if (!values_.empty()) return values_[grid_.index(i, j)];
  return eval_(grid_.point(i, j));
}

std::vector<cplx> PhaseField::values() const {
  if (!values_.empty()) return values_;
  std::vector<cplx> v(grid_.size());
  const int n = grid_.resolution();
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    for (int j = 0; j < n; ++j) {
      v[grid_.index(static_cast<int>(i), j)] =
          eval_(grid_.point(static_cast<int>(i), j));
    }
  });
  return v;
}

PhaseField PhaseField::sample() const {
  PhaseField out = *this;
  out.values_ = values();
  return out;
}

double nyquist_limit(const PhaseGrid& grid) {
  return kPi / (2.0 * grid.spacing());
}

// ---------------------------------------------------------------------------

cplx fourier_forward_at(const PhaseField& field, cplx beta,
                        const FourierOptions& opts) {
  if (field.domain() != Domain::alpha) {
    throw ParameterError("forward transform expects an alpha-domain field");
  }
  check_truncation(field, opts.truncation_tolerance);
  check_band(field.grid(), beta);
  const auto& g = field.grid();
  const auto w = trapezoid_weights(g);
  const int n = g.resolution();
  cplx sum = 0.0;
  for (int i = 0; i < n; ++i) {
    cplx row = 0.0;
    for (int j = 0; j < n; ++j) {
      row += w[j] * field.at(i, j) *
             std::exp(-kI * (2.0 * beta.real() * g.coord(j)));
    }
    sum += w[i] * row * std::exp(kI * (2.0 * beta.imag() * g.coord(i)));
  }
  for (const auto& a : field.atoms()) {
    sum += a.weight * forward_kernel(beta, a.location.value());
  }
  return sum;
}

namespace {

// out(a,b) = scale · Σ_i Σ_j w_i w_j f(i,j) exp(i·s1·u_b·x_i) exp(i·s2·v_a·p_j)
// where the output node (a, b) has first coordinate v_a and second u_b.
std::vector<cplx> separable_transform(const PhaseField& field,
                                      const PhaseGrid& out, double s1,
                                      double s2, double scale) {
  const auto& g = field.grid();
  const auto w = trapezoid_weights(g);
  const int n = g.resolution();
  const int m = out.resolution();
  const auto f = field.values();

  // inner(i, a) = Σ_j w_j f(i,j) exp(i s2 v_a p_j)
  std::vector<cplx> inner(static_cast<std::size_t>(n) * m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t a) {
    const double v = out.coord(static_cast<int>(a));
    std::vector<cplx> phase(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      phase[j] = w[j] * std::exp(kI * (s2 * v * g.coord(j)));
    }
    for (int i = 0; i < n; ++i) {
      cplx acc = 0.0;
      const cplx* row = &f[g.index(i, 0)];
      for (int j = 0; j < n; ++j) acc += row[j] * phase[j];
      inner[static_cast<std::size_t>(i) * m + a] = acc;
    }
  });

  std::vector<cplx> result(out.size());
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t b) {
    const double u = out.coord(static_cast<int>(b));
    std::vector<cplx> phase(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      phase[i] = w[i] * std::exp(kI * (s1 * u * g.coord(i)));
    }
    for (int a = 0; a < m; ++a) {
      cplx acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += inner[static_cast<std::size_t>(i) * m + a] * phase[i];
      }
      result[out.index(a, static_cast<int>(b))] = scale * acc;
    }
  });
  return result;
}

}  // namespace

PhaseField fourier_forward(const PhaseField& field, const PhaseGrid& beta_grid,
                           const FourierOptions& opts) {
  if (field.domain() != Domain::alpha) {
    throw ParameterError("forward transform expects an alpha-domain field");
  }
  check_truncation(field, opts.truncation_tolerance);
  check_band(field.grid(), {beta_grid.extent(), beta_grid.extent()});
  // exp(i·2Imβ·x) exp(−i·2Reβ·p): Reβ is the output's first coordinate.
  auto values = separable_transform(field, beta_grid, 2.0, -2.0, 1.0);
  for (const auto& atom : field.atoms()) {
    for (int a = 0; a < beta_grid.resolution(); ++a) {
      for (int b = 0; b < beta_grid.resolution(); ++b) {
        values[beta_grid.index(a, b)] +=
            atom.weight *
            forward_kernel(beta_grid.point(a, b).value(), atom.location.value());
      }
    }
  }
  return PhaseField::sampled(Domain::beta, beta_grid, std::move(values));
}

cplx fourier_inverse_at(const PhaseField& field, cplx alpha,
                        const FourierOptions& opts) {
  if (field.domain() != Domain::beta) {
    throw ParameterError("inverse transform expects a beta-domain field");
  }
  if (!field.atoms().empty()) {
    throw UnsupportedError("point masses are not supported in the beta domain");
  }
  check_truncation(field, opts.truncation_tolerance);
  check_band(field.grid(), alpha);
  const auto& g = field.grid();
  const auto w = trapezoid_weights(g);
  const int n = g.resolution();
  cplx sum = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      sum += w[k] * w[l] * field.at(k, l) *
             inverse_kernel(g.point(k, l).value(), alpha);
    }
  }
  return sum / (kPi * kPi);
}

PhaseField fourier_inverse(const PhaseField& field, const PhaseGrid& alpha_grid,
                           const FourierOptions& opts) {
  if (field.domain() != Domain::beta) {
    throw ParameterError("inverse transform expects a beta-domain field");
  }
  if (!field.atoms().empty()) {
    throw UnsupportedError("point masses are not supported in the beta domain");
  }
  check_truncation(field, opts.truncation_tolerance);
  check_band(field.grid(), {alpha_grid.extent(), alpha_grid.extent()});
  // β*α − βα* = 2i(Reβ·p − Imβ·x): the β-field's first coordinate pairs with
  // p (the output's second coordinate) and its second with x.
  // separable_transform pairs the input's first coordinate with the output's
  // second, so this is exactly its layout with s1 = +2, s2 = −2.
  auto values =
      separable_transform(field, alpha_grid, 2.0, -2.0, 1.0 / (kPi * kPi));
  return PhaseField::sampled(Domain::alpha, alpha_grid, std::move(values));
}

// ---------------------------------------------------------------------------

QuadResult quad2d(const Integrand& f, const PhaseGrid& grid, double tolerance) {
  const int n = grid.resolution();
  const double h = grid.spacing();
  std::vector<cplx> rows(static_cast<std::size_t>(n));
  std::vector<cplx> rows_coarse(static_cast<std::size_t>(n));
  std::vector<double> rows_abs(static_cast<std::size_t>(n));
  const bool can_coarsen = (n % 2 == 1) && n >= 5;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    cplx fine = 0.0;
    cplx coarse = 0.0;
    double mag = 0.0;
    for (int j = 0; j < n; ++j) {
      const cplx v = f(grid.point(i, j));
      const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      fine += wj * v;
      mag += wj * std::abs(v);
      if (can_coarsen && j % 2 == 0) coarse += wj * v;
    }
    rows[ii] = fine * h;
    rows_coarse[ii] = coarse * 2.0 * h;
    rows_abs[ii] = mag * h;
  });
  cplx fine = 0.0;
  cplx coarse = 0.0;
  double mag = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    fine += wi * h * rows[i];
    mag += wi * h * rows_abs[i];
    if (can_coarsen && i % 2 == 0) coarse += wi * 2.0 * h * rows_coarse[i];
  }
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * mag;
  const double err =
      (can_coarsen ? std::abs(fine - coarse) : std::abs(fine)) + roundoff;
  if (can_coarsen && std::abs(fine - coarse) > tolerance * std::max(1.0, std::abs(fine))) {
    throw NonConvergence("grid quadrature: refinements disagree by " +
                         std::to_string(std::abs(fine - coarse)));
  }
  return {fine, err};
}

namespace {

// Integrand value carried through Gauss-Kronrod together with its modulus.
// The modulus makes the refinement test relative to ∫|f| rather than |∫f|,
// so integrals that cancel to ~0 still terminate. Boost only subtracts to
// form the Kronrod-Gauss error, which must measure the value alone, hence
// the binary minus drops the modulus.
struct GkValue {
  cplx v;
  double mod = 0.0;
  GkValue() = default;
  GkValue(int) {}
  GkValue(cplx z, double m) : v(z), mod(m) {}
};
GkValue operator-(GkValue x) { return {-x.v, -x.mod}; }
GkValue operator+(GkValue x, GkValue y) { return {x.v + y.v, x.mod + y.mod}; }
GkValue operator-(GkValue x, GkValue y) { return {x.v - y.v, 0.0}; }
GkValue operator*(GkValue x, double s) { return {x.v * s, x.mod * s}; }
GkValue operator*(double s, GkValue x) { return {x.v * s, x.mod * s}; }
GkValue& operator+=(GkValue& x, GkValue y) { return x = x + y; }
double abs(const GkValue& x) { return std::max(std::abs(x.v), std::abs(x.mod)); }

}  // namespace

QuadResult quad1d(const std::function<cplx(double)>& f, double a, double b,
                  double tolerance) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const GkValue r = gauss_kronrod<double, 31>::integrate(
      [&](double t) {
        const cplx v = f(t);
        return GkValue{v, std::abs(v)};
      },
      a, b, 15, tolerance, &err);
  if (!std::isfinite(r.v.real()) || !std::isfinite(r.v.imag())) {
    throw NonConvergence("1-D quadrature produced a non-finite value");
  }
  return {r.v, err};
}

QuadResult quad2d(const Integrand& f, const RadialSpec& spec) {
  // Angular integral by the periodic trapezoid rule, doubled until stable.
  auto angular = [&](double r) -> cplx {
    if (r == 0.0 || spec.radially_symmetric) return 2.0 * kPi * f({r, 0.0});
    int m = 16;
    double l1 = 0.0;
    auto rule = [&](int nodes) {
      cplx s = 0.0;
      l1 = 0.0;
      for (int k = 0; k < nodes; ++k) {
        const double phi = 2.0 * kPi * k / nodes;
        const cplx v = f({r * std::cos(phi), r * std::sin(phi)});
        s += v;
        l1 += std::abs(v);
      }
      l1 *= 2.0 * kPi / nodes;
      return s * (2.0 * kPi / nodes);
    };
    cplx prev = rule(m);
    while (m < spec.max_angular_nodes) {
      m *= 2;
      const cplx next = rule(m);
      // Periodic trapezoid converges geometrically; stop at rounding level.
      if (std::abs(next - prev) <= 1e-14 * l1) return next;
      prev = next;
    }
    throw NonConvergence("angular quadrature did not settle");
  };
  auto radial = [&](double r) { return r * angular(r); };
  auto res = quad1d(radial, 0.0, spec.r_max, spec.tolerance);
  if (res.error_estimate > 1e3 * spec.tolerance * std::max(1.0, std::abs(res.value))) {
    throw NonConvergence("radial quadrature error estimate " +
                         std::to_string(res.error_estimate) +
                         " exceeds tolerance");
  }
  return res;
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ParameterError("Gauss-Legendre rule needs n >= 1");
  GaussRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 2.0);
  if (n == 1) return rule;
  // P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Error function.

namespace {

cplx erf_series(cplx z) {
  // (2/√π) Σ (−1)^n z^{2n+1} / (n! (2n+1))
  const cplx z2 = z * z;
  cplx term = z;  // (−1)^n z^{2n+1} / n!
  cplx sum = z;
  for (int n = 1; n < 400; ++n) {
    term *= -z2 / static_cast<double>(n);
    const cplx add = term / static_cast<double>(2 * n + 1);
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
  }
  return sum * (2.0 / kSqrtPi);
}

// w(z) for Im z ≥ 0 by the Laplace continued fraction
//   w(z) = (i/√π) / (z − (1/2)/(z − 1/(z − (3/2)/(z − …))))
// evaluated backwards; the depth doubles until two depths agree.

struct WeidemanTable {
  static constexpr int kN = 40;
  double L = 0.0;
  std::array<double, kN> a{};  // polynomial coefficients, highest degree first
};

const WeidemanTable& weideman_table() {
  static const WeidemanTable table = [] {
    WeidemanTable t;
    constexpr int N = WeidemanTable::kN;
    constexpr int M = 2 * N;
    constexpr int M2 = 2 * M;
    t.L = std::sqrt(N / std::sqrt(2.0));
    // f_k = exp(−t_k²)(L² + t_k²) at t_k = L tan(θ_k/2), θ_k = kπ/M,
    // k = −M+1..M−1, with a leading zero (length 2M).
    std::vector<double> f(M2, 0.0);
    for (int k = -M + 1; k <= M - 1; ++k) {
      const double theta = k * kPi / M;
      const double tk = t.L * std::tan(theta / 2.0);
      f[static_cast<std::size_t>(k + M)] = std::exp(-tk * tk) * (t.L * t.L + tk * tk);
    }
    // fftshift then DFT (direct, size 4N), keep real parts / M2.
    std::vector<double> shifted(M2);
    for (int i = 0; i < M2; ++i) shifted[i] = f[(i + M) % M2];
    for (int n = 1; n <= N; ++n) {
      double acc = 0.0;
      for (int i = 0; i < M2; ++i) {
        acc += shifted[i] * std::cos(2.0 * kPi * n * i / M2);
      }
      // flipud(a(2:N+1)): coefficient of degree n−1 stored so that index 0
      // holds the highest degree.
      t.a[static_cast<std::size_t>(N - n)] = acc / M2;
    }
    return t;
  }();
  return table;
}

cplx faddeeva_upper(cplx z) {
  const auto& t = weideman_table();
  const cplx denom = t.L - kI * z;
  const cplx Z = (t.L + kI * z) / denom;
  cplx p = 0.0;
  for (double c : t.a) p = p * Z + c;
  return 2.0 * p / (denom * denom) + (1.0 / kSqrtPi) / denom;
}

}  // namespace

cplx faddeeva(cplx z) {
  if (z.imag() >= 0.0) return faddeeva_upper(z);
  return 2.0 * std::exp(-z * z) - faddeeva_upper(-z);
}

cplx erf_cplx(cplx z) {
  const double r = std::abs(z);
  if (!(r <= kErfStableRadius)) {
    throw RangeError("erf_cplx: |z| beyond the stable radius 25");
  }
  if (r <= kErfSeriesRadius) return erf_series(z);
  // Odd symmetry moves z to Re z ≥ 0, where erfc(z) = e^{−z²} w(iz) with
  // Im(iz) ≥ 0, inside the rational approximation's accurate half-plane.
  const bool flip = z.real() < 0.0;
  const cplx u = flip ? -z : z;
  const cplx erfc = std::exp(-u * u) * faddeeva_upper(kI * u);
  const cplx e = 1.0 - erfc;
  return flip ? -e : e;
}

}  // namespace phasespace
