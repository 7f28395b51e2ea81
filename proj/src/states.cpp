#include "phasespace/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "phasespace/errors.hpp"

namespace phasespace {

namespace {

constexpr double kLossTarget = 1e-12;
constexpr int kDefaultCutoff = 64;
constexpr int kMaxAdaptiveCutoff = 4000;

int as_index(double v, const char* name) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e6) {
    throw ParameterError(std::string(name) + " must be a non-negative integer");
  }
  return static_cast<int>(v);
}

// |ψ_{2j}|² of the squeezed vacuum, in log form.
double squeezed_log_prob(double xi, int j) {
  const double th = std::tanh(xi);
  return -std::log(std::cosh(xi)) + 2.0 * j * std::log(th / 2.0) +
         std::lgamma(2.0 * j + 1.0) - 2.0 * std::lgamma(j + 1.0);
}

// Diagonal populations for the kinds whose diagonals have a closed form.
double closed_diagonal(const StateSpec& s, int k) {
  switch (s.kind) {
    case StateKind::thermal: {
      const double nbar = s.params.at("nbar");
      return std::exp(k * std::log(nbar / (nbar + 1.0))) / (nbar + 1.0);
    }
    case StateKind::spats: {
      if (k == 0) return 0.0;
      const double nbar = s.params.at("nbar");
      return k * std::exp((k - 1) * std::log(nbar) -
                          (k + 1) * std::log(nbar + 1.0));
    }
    case StateKind::squeezed:
      return (k % 2 == 0) ? std::exp(squeezed_log_prob(s.params.at("xi"), k / 2))
                          : 0.0;
    default:
      return 0.0;
  }
}

// Σ_{k > cutoff} of a monotonically (eventually) decaying population.
double population_tail(const StateSpec& s, int cutoff) {
  double tail = 0.0;
  for (int k = cutoff + 1; k < cutoff + 200000; ++k) {
    const double v = closed_diagonal(s, k);
    tail += v;
    if (k > cutoff + 4 && v <= 1e-18 * std::max(tail, 1e-300)) break;
    if (v == 0.0 && k > cutoff + 4 && s.kind != StateKind::squeezed) break;
  }
  return tail;
}

int adaptive_cutoff(const StateSpec& s) {
  int k = kDefaultCutoff;
  while (k < kMaxAdaptiveCutoff && population_tail(s, k) > kLossTarget) k += 16;
  return k;
}

// ρ_{k,k} of P_cl(α;t): (t/k!) ∫ e^{-u} u^k (1+u)^{-(t+1)} du, by polar
// quadrature of P(α) e^{-|α|²} |α|^{2k} / k!.
double cauchy_lorentz_diagonal(double t, int k) {
  const double lk = std::lgamma(k + 1.0);
  Integrand f = [t, k, lk](PhasePoint a) -> cplx {
    const double r2 = a.norm2();
    if (r2 == 0.0) return k == 0 ? cauchy_lorentz_p(t, 0.0) : 0.0;
    return cauchy_lorentz_p(t, r2) *
           std::exp(k * std::log(r2) - r2 - lk);
  };
  RadialSpec spec;
  spec.radially_symmetric = true;
  spec.tolerance = 1e-13;
  return quad2d(f, spec).value.real();
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(StateKind kind) {
  switch (kind) {
    case StateKind::fock_element: return "fock_element";
    case StateKind::thermal: return "thermal";
    case StateKind::squeezed: return "squeezed";
    case StateKind::spats: return "spats";
    case StateKind::photon_vacuum_mix: return "photon_vacuum_mix";
    case StateKind::cauchy_lorentz: return "cauchy_lorentz";
    case StateKind::cauchy_lorentz_ncl: return "cauchy_lorentz_ncl";
    case StateKind::p_max: return "p_max";
    case StateKind::fock_mixture: return "fock_mixture";
    case StateKind::fock_matrix: return "fock_matrix";
  }
  return "unknown";
}

StateKind state_kind_from_string(std::string_view name) {
  for (auto k : {StateKind::fock_element, StateKind::thermal,
                 StateKind::squeezed, StateKind::spats,
                 StateKind::photon_vacuum_mix, StateKind::cauchy_lorentz,
                 StateKind::cauchy_lorentz_ncl, StateKind::p_max,
                 StateKind::fock_mixture, StateKind::fock_matrix}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown state kind '" + std::string(name) + "'");
}

StateSpec StateSpec::fock_element(int m, int n) {
  return {StateKind::fock_element, {{"m", m}, {"n", n}}, {}};
}
StateSpec StateSpec::coherent(cplx alpha0) {
  StateSpec s = vacuum();
  s.modifier.displacement = alpha0;
  return s;
}
StateSpec StateSpec::thermal(double nbar) {
  return {StateKind::thermal, {{"nbar", nbar}}, {}};
}
StateSpec StateSpec::squeezed(double xi) {
  return {StateKind::squeezed, {{"xi", xi}}, {}};
}
StateSpec StateSpec::spats(double nbar) {
  return {StateKind::spats, {{"nbar", nbar}}, {}};
}
StateSpec StateSpec::photon_vacuum_mix(double eta) {
  return {StateKind::photon_vacuum_mix, {{"eta", eta}}, {}};
}
StateSpec StateSpec::cauchy_lorentz(double t) {
  return {StateKind::cauchy_lorentz, {{"t", t}}, {}};
}
StateSpec StateSpec::cauchy_lorentz_ncl(double t) {
  return {StateKind::cauchy_lorentz_ncl, {{"t", t}}, {}};
}
StateSpec StateSpec::p_max() { return {StateKind::p_max, {}, {}}; }
StateSpec StateSpec::fock_mixture(
    const std::vector<std::pair<int, double>>& weights) {
  StateSpec s{StateKind::fock_mixture, {}, {}};
  for (const auto& [k, w] : weights) s.params["p" + std::to_string(k)] += w;
  return s;
}

double StateSpec::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) {
    throw ParameterError(std::string(to_string(kind)) + " requires parameter '" +
                         name + "'");
  }
  return it->second;
}

// ---------------------------------------------------------------------------

FockMatrix::FockMatrix(Eigen::MatrixXcd coefficients, double truncation_loss)
    : rho_(std::move(coefficients)), loss_(truncation_loss) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw ParameterError("Fock matrix must be square and non-empty");
  }
}

cplx FockMatrix::operator()(int m, int n) const {
  if (m < 0 || n < 0 || m > cutoff() || n > cutoff()) return 0.0;
  return rho_(m, n);
}

bool FockMatrix::is_hermitian(double tol) const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double FockMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------

struct State::Impl {
  StateSpec spec;
  bool physical = true;
  PForm p_form = PForm::singular;
  std::vector<Atom> atoms;
  int default_cutoff = kDefaultCutoff;
  double ncl_normalizer = std::numeric_limits<double>::quiet_NaN();
  std::optional<FockMatrix> explicit_fock;

  std::once_flag fock_once;
  FockMatrix fock_cache;
};

const StateSpec& State::spec() const { return impl_->spec; }
bool State::physical() const { return impl_->physical; }
PForm State::p_form() const { return impl_->p_form; }
const std::vector<Atom>& State::atoms() const { return impl_->atoms; }
int State::default_cutoff() const { return impl_->default_cutoff; }

double spats_p(double nbar, double r2) {
  return ((nbar + 1.0) * r2 - nbar) * std::exp(-r2 / nbar) /
         (kPi * nbar * nbar * nbar);
}

double cauchy_lorentz_p(double t, double r2) {
  return t / kPi * std::exp(-(1.0 + t) * std::log1p(r2));
}

double State::regular_p(PhasePoint alpha) const {
  if (impl_->p_form != PForm::regular) {
    throw NoRegularFormError(std::string(to_string(kind())) +
                             " has no regular P representation");
  }
  const auto& mod = impl_->spec.modifier;
  cplx a = alpha.value();
  if (!mod.is_identity()) {
    a = std::polar(1.0, -mod.rotation) * (a - mod.displacement);
  }
  const double r2 = std::norm(a);
  const auto& s = impl_->spec;
  switch (s.kind) {
    case StateKind::thermal: {
      const double nbar = s.params.at("nbar");
      return std::exp(-r2 / nbar) / (kPi * nbar);
    }
    case StateKind::spats:
      return spats_p(s.params.at("nbar"), r2);
    case StateKind::cauchy_lorentz:
      return cauchy_lorentz_p(s.params.at("t"), r2);
    case StateKind::cauchy_lorentz_ncl:
      return cauchy_lorentz_p(s.params.at("t"), r2) /
             (1.0 - impl_->ncl_normalizer);
    default:
      break;
  }
  throw NoRegularFormError("no regular P closed form");
}

bool State::has_fock() const {
  const auto& s = impl_->spec;
  if (s.kind == StateKind::p_max) return false;
  return s.modifier.displacement == cplx{0.0, 0.0};
}

const FockMatrix& State::fock() const {
  std::call_once(impl_->fock_once, [this] {
    impl_->fock_cache = fock_matrix(*this, impl_->default_cutoff);
  });
  return impl_->fock_cache;
}

double State::ncl_normalizer() const {
  if (kind() != StateKind::cauchy_lorentz_ncl) {
    throw UnsupportedError("normalizer is defined for cauchy_lorentz_ncl only");
  }
  return impl_->ncl_normalizer;
}

std::optional<double> State::generator() const {
  const auto& s = impl_->spec;
  if (!s.modifier.is_identity()) return std::nullopt;
  switch (s.kind) {
    case StateKind::thermal: return s.params.at("nbar");
    case StateKind::p_max: return -0.5;
    case StateKind::fock_element:
      if (s.params.at("m") == 0.0 && s.params.at("n") == 0.0) return 0.0;
      return std::nullopt;
    default: return std::nullopt;
  }
}

State make_state(const StateSpec& spec) {
  auto impl = std::make_shared<State::Impl>();
  impl->spec = spec;
  auto& s = impl->spec;
  auto positive = [&](const char* name) {
    const double v = s.param(name);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ParameterError(std::string(to_string(s.kind)) + ": " + name +
                           " must be positive");
    }
    return v;
  };

  switch (s.kind) {
    case StateKind::fock_element: {
      const int m = as_index(s.param("m"), "m");
      const int n = as_index(s.param("n"), "n");
      impl->physical = (m == n);
      impl->default_cutoff = std::max(m, n);
      if (m == 0 && n == 0) {
        impl->p_form = PForm::atomic;
        impl->atoms.push_back({{0.0, 0.0}, 1.0});
      }
      break;
    }
    case StateKind::thermal:
      positive("nbar");
      impl->p_form = PForm::regular;
      impl->default_cutoff = adaptive_cutoff(s);
      break;
    case StateKind::spats:
      positive("nbar");
      impl->p_form = PForm::regular;
      impl->default_cutoff = adaptive_cutoff(s);
      break;
    case StateKind::squeezed:
      positive("xi");
      impl->default_cutoff = adaptive_cutoff(s);
      break;
    case StateKind::photon_vacuum_mix: {
      const double eta = positive("eta");
      if (eta > 1.0) throw ParameterError("photon_vacuum_mix: eta must be <= 1");
      impl->default_cutoff = 1;
      break;
    }
    case StateKind::cauchy_lorentz:
      positive("t");
      impl->p_form = PForm::regular;
      break;
    case StateKind::cauchy_lorentz_ncl: {
      const double t = positive("t");
      impl->p_form = PForm::regular;
      impl->ncl_normalizer = cauchy_lorentz_diagonal(t, 0);
      impl->atoms.push_back(
          {{0.0, 0.0}, -impl->ncl_normalizer / (1.0 - impl->ncl_normalizer)});
      break;
    }
    case StateKind::p_max:
      impl->physical = false;
      break;
    case StateKind::fock_mixture: {
      if (s.params.empty()) throw ParameterError("fock_mixture needs weights");
      double total = 0.0;
      int kmax = 0;
      for (const auto& [name, w] : s.params) {
        if (name.size() < 2 || name[0] != 'p') {
          throw ParameterError("fock_mixture parameters are named p<k>");
        }
        const int k = as_index(std::stod(name.substr(1)), "fock_mixture index");
        if (!(w >= 0.0)) throw ParameterError("fock_mixture weights must be >= 0");
        total += w;
        kmax = std::max(kmax, k);
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw ParameterError("fock_mixture weights must sum to 1");
      }
      impl->default_cutoff = kmax;
      if (kmax == 0) {
        impl->p_form = PForm::atomic;
        impl->atoms.push_back({{0.0, 0.0}, 1.0});
      }
      break;
    }
    case StateKind::fock_matrix:
      throw ParameterError("fock_matrix states are built from a FockMatrix");
  }

  if (!s.modifier.is_identity()) {
    const cplx rot = std::polar(1.0, s.modifier.rotation);
    for (auto& a : impl->atoms) {
      a.location = PhasePoint::from_complex(rot * a.location.value() +
                                            s.modifier.displacement);
    }
  }
  return State(std::move(impl));
}

State make_state(FockMatrix fock) {
  if (!fock.is_hermitian(1e-12)) {
    throw ParameterError("Fock matrix must be Hermitian");
  }
  if (std::abs(fock.trace() - 1.0) > 1e-9) {
    throw ParameterError("Fock matrix must have unit trace");
  }
  auto impl = std::make_shared<State::Impl>();
  impl->spec.kind = StateKind::fock_matrix;
  impl->physical = fock.min_eigenvalue() >= -1e-10;
  impl->default_cutoff = fock.cutoff();
  // A matrix that is only nonzero in the vacuum entry is the vacuum.
  bool only_vacuum = true;
  for (int m = 0; m <= fock.cutoff(); ++m) {
    for (int n = 0; n <= fock.cutoff(); ++n) {
      if ((m || n) && fock(m, n) != cplx{0.0, 0.0}) only_vacuum = false;
    }
  }
  if (only_vacuum) {
    impl->p_form = PForm::atomic;
    impl->atoms.push_back({{0.0, 0.0}, 1.0});
  }
  impl->explicit_fock = std::move(fock);
  return State(std::move(impl));
}

FockMatrix fock_matrix(const State& state, int cutoff) {
  if (cutoff < 0) throw ParameterError("cutoff must be >= 0");
  const auto& s = state.spec();
  if (!state.has_fock()) {
    throw UnsupportedError(std::string(to_string(s.kind)) +
                           (s.kind == StateKind::p_max
                                ? ": use deltaseries::fock_diagonal"
                                : ": displaced states have no Fock form here"));
  }
  const int dim = cutoff + 1;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  double loss = 0.0;

  switch (s.kind) {
    case StateKind::fock_element: {
      const int m = static_cast<int>(s.params.at("m"));
      const int n = static_cast<int>(s.params.at("n"));
      if (m <= cutoff && n <= cutoff) {
        rho(m, n) = 1.0;
      } else if (m == n) {
        loss = 1.0;
      }
      break;
    }
    case StateKind::thermal:
    case StateKind::spats:
      for (int k = 0; k <= cutoff; ++k) rho(k, k) = closed_diagonal(s, k);
      loss = population_tail(s, cutoff);
      break;
    case StateKind::squeezed: {
      const double xi = s.params.at("xi");
      // ψ_{2j} = (1/√coshξ)(−tanhξ/2)^j √((2j)!)/j!
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
      for (int j = 0; 2 * j <= cutoff; ++j) {
        const double mag = std::exp(0.5 * squeezed_log_prob(xi, j));
        psi(2 * j) = (j % 2 == 0) ? mag : -mag;
      }
      rho = psi * psi.adjoint();
      loss = population_tail(s, cutoff);
      break;
    }
    case StateKind::photon_vacuum_mix: {
      const double eta = s.params.at("eta");
      rho(0, 0) = 1.0 - eta;
      if (cutoff >= 1) {
        rho(1, 1) = eta;
      } else {
        loss = eta;
      }
      break;
    }
    case StateKind::cauchy_lorentz:
    case StateKind::cauchy_lorentz_ncl: {
      const double t = s.params.at("t");
      const bool ncl = s.kind == StateKind::cauchy_lorentz_ncl;
      const double norm = ncl ? state.ncl_normalizer() : 0.0;
      double trace = 0.0;
      for (int k = 0; k <= cutoff; ++k) {
        double v = (ncl && k == 0) ? norm : cauchy_lorentz_diagonal(t, k);
        if (ncl) v = (k == 0 ? v - norm : v) / (1.0 - norm);
        rho(k, k) = v;
        trace += v;
      }
      loss = std::max(0.0, 1.0 - trace);
      break;
    }
    case StateKind::fock_mixture: {
      double trace = 0.0;
      for (const auto& [name, w] : s.params) {
        const int k = std::stoi(name.substr(1));
        if (k <= cutoff) {
          rho(k, k) += w;
          trace += w;
        }
      }
      loss = std::max(0.0, 1.0 - trace);
      break;
    }
    case StateKind::fock_matrix: {
      const auto& src = state.impl_->explicit_fock->matrix();
      const int keep = std::min<int>(dim, static_cast<int>(src.rows()));
      rho.topLeftCorner(keep, keep) = src.topLeftCorner(keep, keep);
      double dropped = 0.0;
      for (int k = keep; k < src.rows(); ++k) dropped += src(k, k).real();
      loss = dropped;
      break;
    }
    case StateKind::p_max:
      break;
  }

  if (s.modifier.rotation != 0.0) {
    for (int m = 0; m < dim; ++m) {
      for (int n = 0; n < dim; ++n) {
        rho(m, n) *= std::polar(1.0, s.modifier.rotation * (m - n));
      }
    }
  }
  return FockMatrix(std::move(rho), loss);
}

}  // namespace phasespace
