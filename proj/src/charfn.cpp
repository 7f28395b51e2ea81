#include "phasespace/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "phasespace/errors.hpp"
#include "phasespace/parallel.hpp"

namespace phasespace {

namespace {

double lfact(int k) { return std::lgamma(k + 1.0); }

double cauchy_lorentz_phi(double t, double b) {
  if (b == 0.0) return 1.0;
  const double x = 2.0 * b;
  if (x > 700.0) return 0.0;
  return 2.0 * std::exp(t * std::log(b) - std::lgamma(t)) *
         std::cyl_bessel_k(t, x);
}

cplx phi_unmodified(const State& state, cplx beta) {
  const auto& s = state.spec();
  const double b2 = std::norm(beta);
  switch (s.kind) {
    case StateKind::fock_element:
      return phi_fock_element(static_cast<int>(s.params.at("m")),
                              static_cast<int>(s.params.at("n")), beta);
    case StateKind::thermal:
      return std::exp(-s.params.at("nbar") * b2);
    case StateKind::squeezed: {
      const double xi = s.params.at("xi");
      const double sh = std::sinh(xi);
      const double ch = std::cosh(xi);
      const double re2 = (beta * beta).real();  // (β² + β*²)/2
      return std::exp(-sh * sh * b2 - ch * sh * re2);
    }
    case StateKind::spats: {
      const double nbar = s.params.at("nbar");
      return (1.0 - (nbar + 1.0) * b2) * std::exp(-nbar * b2);
    }
    case StateKind::photon_vacuum_mix:
      return 1.0 - s.params.at("eta") * b2;
    case StateKind::cauchy_lorentz:
      return cauchy_lorentz_phi(s.params.at("t"), std::sqrt(b2));
    case StateKind::cauchy_lorentz_ncl: {
      const double n = state.ncl_normalizer();
      return (cauchy_lorentz_phi(s.params.at("t"), std::sqrt(b2)) - n) /
             (1.0 - n);
    }
    case StateKind::p_max:
      return std::exp(0.5 * b2);
    case StateKind::fock_mixture: {
      cplx sum = 0.0;
      for (const auto& [name, w] : s.params) {
        const int k = std::stoi(name.substr(1));
        sum += w * phi_fock_element(k, k, beta);
      }
      return sum;
    }
    case StateKind::fock_matrix:
      return phi_fock(state, beta);
  }
  return 0.0;
}

}  // namespace

cplx phi_fock_element(int m, int n, cplx beta) {
  if (m < 0 || n < 0) throw ParameterError("Fock indices must be >= 0");
  if (m > kMaxFockIndex || n > kMaxFockIndex) {
    throw OverflowError("Fock index beyond " + std::to_string(kMaxFockIndex));
  }
  const int kmax = std::min(m, n);
  if (beta == cplx{0.0, 0.0}) return m == n ? 1.0 : 0.0;

  const double lb = std::log(std::abs(beta));
  const double arg = std::arg(beta);
  const double half = 0.5 * (lfact(m) + lfact(n));
  struct Term {
    double logmag;
    cplx phase;
  };
  std::vector<Term> terms;
  terms.reserve(kmax + 1);
  for (int k = 0; k <= kmax; ++k) {
    const int a = n - k;  // power of β
    const int c = m - k;  // power of −β*
    const double logmag =
        half + (a + c) * lb - lfact(k) - lfact(c) - lfact(a);
    // β^a (−β*)^c = |β|^{a+c} e^{i(a−c)θ} (−1)^c
    const double sign = (c % 2 == 0) ? 1.0 : -1.0;
    terms.push_back({logmag, sign * std::polar(1.0, (a - c) * arg)});
  }
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return x.logmag > y.logmag; });
  cplx sum = 0.0;
  for (const auto& t : terms) sum += std::exp(t.logmag) * t.phase;
  if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag())) {
    throw OverflowError("Fock characteristic function overflowed");
  }
  return sum;
}

double fock_validity_band(int cutoff) { return std::sqrt(double(cutoff)) / 3.0; }

cplx phi_fock(const State& state, cplx beta, int cutoff) {
  const FockMatrix local =
      cutoff < 0 ? FockMatrix{} : fock_matrix(state, cutoff);
  const FockMatrix& rho = cutoff < 0 ? state.fock() : local;
  if (rho.truncation_loss() >= 1e-6) {
    throw TruncationError("Fock truncation loss " +
                          std::to_string(rho.truncation_loss()) +
                          " too large; raise the cutoff");
  }
  if (!rho.exact() && std::abs(beta) > fock_validity_band(rho.cutoff())) {
    throw TruncationError("|beta| beyond the Fock validity band sqrt(cutoff)/3");
  }
  cplx sum = 0.0;
  for (int m = 0; m <= rho.cutoff(); ++m) {
    for (int n = 0; n <= rho.cutoff(); ++n) {
      const cplx r = rho(m, n);
      if (r != cplx{0.0, 0.0}) sum += r * phi_fock_element(m, n, beta);
    }
  }
  return sum;
}

cplx phi(const State& state, cplx beta) {
  const auto& mod = state.spec().modifier;
  if (state.kind() == StateKind::fock_matrix || mod.is_identity()) {
    // Rotation of an explicit matrix is already folded into its entries.
    return phi_unmodified(state, beta);
  }
  const cplx a0 = mod.displacement;
  const cplx shift = std::exp(beta * std::conj(a0) - std::conj(beta) * a0);
  return shift * phi_unmodified(state, beta * std::polar(1.0, -mod.rotation));
}

cplx phi_s(const State& state, cplx beta, double s) {
  return std::exp(-0.5 * (1.0 - s) * std::norm(beta)) * phi(state, beta);
}

PhaseField CharFn::field(const PhaseGrid& grid) const {
  CharFn self = *this;
  return PhaseField::closed_form(Domain::beta,
                                 [self](PhasePoint b) { return self(b); }, grid);
}

GridScan scan_max(const PhaseGrid& grid, const std::function<double(cplx)>& g) {
  const int n = grid.resolution();
  std::vector<double> vals(grid.size());
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    for (int j = 0; j < n; ++j) {
      vals[grid.index(int(i), j)] = g(grid.point(int(i), j).value());
    }
  });
  GridScan out{-std::numeric_limits<double>::infinity(), {}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = vals[grid.index(i, j)];
      if (v > out.value) out = {v, grid.point(i, j)};
    }
  }
  return out;
}

GridScan quantum_bound_check(const State& state, const PhaseGrid& grid) {
  return scan_max(grid, [&](cplx b) {
    return std::abs(phi(state, b)) * std::exp(-0.5 * std::norm(b));
  });
}

GridScan classicality_violation(const State& state, const PhaseGrid& grid) {
  return scan_max(grid, [&](cplx b) { return std::abs(phi(state, b)) - 1.0; });
}

}  // namespace phasespace
