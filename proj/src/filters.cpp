#include "phasespace/filters.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "phasespace/charfn.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/parallel.hpp"

namespace phasespace {
namespace {

constexpr double kTaylorThreshold = 1e-3;
constexpr int kTaylorTerms = 6;
constexpr int kPanelNodes = 200;

const GaussRule& cached_rule(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

double sinc(double z) { return z == 0.0 ? 1.0 : std::sin(z) / z; }

// Σ_k (−g)^k/k! (2/π) Re∫₀¹ z^{2k}(1−z) e^{2iyz} dz, summed under one rule.
double T_taylor(double y, double g) {
  const int n = 32 + 2 * static_cast<int>(std::ceil(std::abs(y)));
  const GaussRule& rule = cached_rule(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double z = 0.5 * (rule.nodes[i] + 1.0);
    const double z2 = z * z;
    double series = 0.0;
    double term = 1.0;
    for (int k = 0; k < kTaylorTerms; ++k) {
      series += term;
      term *= -g * z2 / (k + 1);
    }
    sum += 0.5 * rule.weights[i] * series * (1.0 - z) * std::cos(2.0 * y * z);
  }
  return 2.0 / kPi * sum;
}

// Closed form rewritten with erfcx: the e^{−y²/g} prefactor is absorbed, and
// the root s of g is chosen so both erfcx arguments sit in Re z ≥ 0.
double T_closed(double y, double g) {
  const cplx iy{0.0, y};
  cplx s = g > 0.0 ? cplx{std::sqrt(g), 0.0} : cplx{0.0, std::sqrt(-g)};
  if ((-iy / s).real() < 0.0) s = -s;
  const cplx z1 = (g - iy) / s;
  const cplx z2 = -iy / s;
  const cplx phase = std::exp(cplx{-g, 2.0 * y});
  const cplx first = (phase - 1.0) / (kPi * g);
  const cplx second =
      z1 / (kSqrtPi * g) * (erfcx_cplx(z2) - phase * erfcx_cplx(z1));
  return (first + second).real();
}

}  // namespace

double tri(double x) {
  const double a = std::abs(x);
  return a >= 1.0 ? 0.0 : 1.0 - a;
}

double autocorrelate_box(cplx beta, double w) {
  if (!(w > 0.0)) throw ParameterError("filter width must be > 0");
  return tri(beta.real() / w) * tri(beta.imag() / w);
}

double omega_sinc(PhasePoint alpha, double w) {
  if (!(w > 0.0)) throw ParameterError("filter width must be > 0");
  const double a = sinc(w * alpha.x);
  const double b = sinc(w * alpha.p);
  return w * w / (kPi * kPi) * a * a * b * b;
}

FilterKernel FilterKernel::box(double w) {
  if (!(w > 0.0)) throw ParameterError("filter width must be > 0");
  FilterKernel k;
  k.w = w;
  k.omega_spec = "box";
  k.omega_tilde = [w](cplx beta) { return autocorrelate_box(beta, w); };
  k.omega_alpha = [w](PhasePoint a) { return omega_sinc(a, w); };
  k.support = w;
  return k;
}

GaussianCF gaussian_cf(const State& state) {
  const auto& spec = state.spec();
  if (!spec.modifier.is_identity()) {
    throw UnsupportedError("Gaussian form needs an unmodified state");
  }
  switch (spec.kind) {
    case StateKind::thermal: {
      const double n = spec.params.at("nbar");
      return {n, n};
    }
    case StateKind::p_max:
      return {-0.5, -0.5};
    case StateKind::squeezed: {
      const double xi = spec.params.at("xi");
      return {std::expm1(2.0 * xi) / 2.0, std::expm1(-2.0 * xi) / 2.0};
    }
    case StateKind::fock_element:
      if (spec.params.at("m") == 0.0 && spec.params.at("n") == 0.0) return {0.0, 0.0};
      break;
    default:
      break;
  }
  throw UnsupportedError("state " + std::string(to_string(spec.kind)) +
                         " has no Gaussian characteristic function");
}

double T(double y, double g) {
  if (g == 0.0) {
    if (y == 0.0) return 1.0 / kPi;
    const double s = std::sin(y) / y;
    return s * s / kPi;
  }
  if (std::abs(g) < kTaylorThreshold) return T_taylor(y, g);
  return T_closed(y, g);
}

double filtered_p_gaussian(const GaussianCF& cf, double w, PhasePoint alpha) {
  if (!(w > 0.0)) throw ParameterError("filter width must be > 0");
  const double w2 = w * w;
  return w2 * T(w * alpha.p, w2 * cf.lambda) * T(-w * alpha.x, w2 * cf.kappa);
}

FilteredP filtered_p_numeric(const State& state, const FilterKernel& kernel,
                             const PhaseGrid& grid) {
  if (!std::isfinite(kernel.support)) {
    throw SupportError("filter kernel '" + kernel.omega_spec +
                       "' lacks compact Fourier support");
  }
  // Two panels per axis so the kink of tri at 0 falls on a panel edge.
  const GaussRule& rule = cached_rule(kPanelNodes);
  const double h = 0.5 * kernel.support;
  const int m = 2 * kPanelNodes;
  Eigen::VectorXd u(m), wt(m);
  for (int i = 0; i < kPanelNodes; ++i) {
    u[i] = -h + h * rule.nodes[i];
    u[kPanelNodes + i] = h + h * rule.nodes[i];
    wt[i] = wt[kPanelNodes + i] = h * rule.weights[i];
  }

  // F(j, l) = weights · Φ · Ω̃ at β = u_j + i u_l.
  Eigen::MatrixXcd F(m, m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t j) {
    for (int l = 0; l < m; ++l) {
      const cplx beta{u[j], u[l]};
      const double om = kernel.omega_tilde(beta);
      F(j, l) = om == 0.0 ? cplx{} : wt[j] * wt[l] * om * phi(state, beta);
    }
  });

  // β*α − βα* = 2i(x Im α − p Re α): the p-sum pairs with Re α, the x-sum
  // with Im α.
  const int n = grid.resolution();
  Eigen::MatrixXcd re_side(m, n), im_side(m, n);
  for (int l = 0; l < m; ++l) {
    for (int i = 0; i < n; ++i) {
      re_side(l, i) = std::exp(cplx{0.0, -2.0 * u[l] * grid.coord(i)});
      im_side(l, i) = std::exp(cplx{0.0, 2.0 * u[l] * grid.coord(i)});
    }
  }
  const Eigen::MatrixXcd G = F * re_side;  // (x node, Re α index)
  const Eigen::MatrixXcd P = G.transpose() * im_side / (kPi * kPi);

  std::vector<cplx> values(grid.size());
  double residue = 0.0;
  double peak = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      residue = std::max(residue, std::abs(P(i, k).imag()));
      peak = std::max(peak, std::abs(P(i, k).real()));
      values[grid.index(i, k)] = P(i, k).real();
    }
  }
  if (residue > 1e-9 * std::max(1.0, peak)) {
    throw ComplexResidueError("filtered P has imaginary residue " +
                              std::to_string(residue));
  }
  return {PhaseField::sampled(Domain::alpha, grid, std::move(values)), residue};
}

double T_integral(double g) {
  // Large-y expansion of T, integrated over |y| > Y with Y a multiple of π:
  // 2∫_Y^∞ T dy = (1/π)[1/Y + (g/2 − e^{−g}(g + 1/2))/Y³] + O(g²e^{−g}/Y⁴).
  const double amp = std::max(1.0, g * g) * std::exp(std::max(0.0, -g));
  const double panel = 4.0 * kPi;
  const int panels =
      static_cast<int>(std::ceil(std::max(400.0, std::pow(1e9 * amp, 0.25)) / panel));
  const double Y = panel * panels;
  // T is entire in y with period-π oscillation, so a fixed 64-point rule
  // per 4π panel is exact to rounding; adaptive refinement only chases
  // the cancellation noise of the closed form far out.
  const GaussRule& rule = cached_rule(64);
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = panel * (i + 0.5);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      sum += 0.5 * panel * rule.weights[k] * T(mid + 0.5 * panel * rule.nodes[k], g);
    }
  }
  const double tail = (1.0 / Y + (0.5 * g - std::exp(-g) * (g + 0.5)) / (Y * Y * Y)) / kPi;
  return 2.0 * sum + tail;
}

double filtered_mass(const GaussianCF& cf, double w) {
  if (!(w > 0.0)) throw ParameterError("filter width must be > 0");
  // The w-scaling cancels: ∫w T(w y; g) dy = ∫T(y; g) dy.
  return T_integral(w * w * cf.lambda) * T_integral(w * w * cf.kappa);
}

}  // namespace phasespace
