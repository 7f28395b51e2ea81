#include "phasespace/deltaseries.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "phasespace/errors.hpp"

namespace phasespace {

namespace {

double lfact(int k) { return std::lgamma(k + 1.0); }

// Signed γⁿ/n! without overflow.
double generator_coefficient(double gamma, int n) {
  if (n == 0) return 1.0;
  if (gamma == 0.0) return 0.0;
  const double mag = std::exp(n * std::log(std::abs(gamma)) - lfact(n));
  return (gamma < 0.0 && n % 2 == 1) ? -mag : mag;
}

// γⁿ b_{n,n}: the n-th term of a generator pairing.
cplx generator_term(double gamma, int n, cplx b) {
  if (n == 0) return b;
  if (gamma == 0.0 || b == cplx{0.0, 0.0}) return 0.0;
  const double mag = std::exp(n * std::log(std::abs(gamma)));
  return ((gamma < 0.0 && n % 2 == 1) ? -mag : mag) * b;
}

}  // namespace

DeltaSeries::DeltaSeries(std::map<Key, cplx> coefficients, int order)
    : coeffs_(std::move(coefficients)), order_(order) {
  if (order < 0) throw ParameterError("series order must be >= 0");
}

DeltaSeries DeltaSeries::generator_form(double gamma, int order) {
  if (order < 0) throw ParameterError("series order must be >= 0");
  DeltaSeries s;
  s.order_ = order;
  s.gamma_ = gamma;
  return s;
}

cplx DeltaSeries::coeff(int q, int r) const {
  if (gamma_) {
    if (q != r || q < 0 || q > order_) return 0.0;
    return generator_coefficient(*gamma_, q);
  }
  auto it = coeffs_.find({q, r});
  return it == coeffs_.end() ? cplx{0.0, 0.0} : it->second;
}

// ---------------------------------------------------------------------------

TaylorField::TaylorField(std::string name, Normalized normalized, int max_order,
                         bool diagonal, PhaseField::Evaluator closed_form)
    : name_(std::move(name)),
      b_(std::move(normalized)),
      max_order_(max_order),
      diagonal_(diagonal),
      eval_(std::move(closed_form)) {
  if (max_order < 0) throw ParameterError("test function order must be >= 0");
}

TaylorField TaylorField::from_derivatives(
    std::string name, const std::map<std::pair<int, int>, cplx>& a, int max_order) {
  std::map<std::pair<int, int>, cplx> b;
  bool diagonal = true;
  for (const auto& [key, value] : a) {
    const auto [m, n] = key;
    if (m < 0 || n < 0) throw ParameterError("derivative orders must be >= 0");
    if (m != n && value != cplx{0.0, 0.0}) diagonal = false;
    b[key] = value * std::exp(-0.5 * (lfact(m) + lfact(n)));
  }
  return TaylorField(
      std::move(name),
      [b](int m, int n) -> cplx {
        auto it = b.find({m, n});
        return it == b.end() ? cplx{0.0, 0.0} : it->second;
      },
      max_order, diagonal);
}

TaylorField TaylorField::gaussian(double sigma2, int max_order) {
  if (!(sigma2 > 0.0)) throw ParameterError("gaussian width must be positive");
  return TaylorField(
      "gaussian",
      [sigma2](int m, int n) -> cplx {
        if (m != n) return 0.0;
        const double mag = std::exp(-n * std::log(sigma2));
        return n % 2 ? -mag : mag;
      },
      max_order, true,
      [sigma2](PhasePoint a) -> cplx { return std::exp(-a.norm2() / sigma2); });
}

TaylorField TaylorField::exp_abs2(int max_order) {
  return TaylorField(
      "exp_abs2", [](int m, int n) -> cplx { return m == n ? 1.0 : 0.0; },
      max_order, true, [](PhasePoint a) -> cplx { return std::exp(a.norm2()); });
}

TaylorField TaylorField::abs2_power(int k) {
  if (k < 0) throw ParameterError("power must be >= 0");
  TaylorField f(
      "abs2_power",
      [k](int m, int n) -> cplx {
        return (m == k && n == k) ? std::exp(lfact(k)) : 0.0;
      },
      std::max(k, 1) * 4, true,
      [k](PhasePoint a) -> cplx { return std::pow(a.norm2(), k); });
  f.degree_ = k;
  return f;
}

TaylorField TaylorField::fock_projector(int k, int max_order) {
  if (k < 0) throw ParameterError("Fock index must be >= 0");
  const double lk = lfact(k);
  return TaylorField(
      "fock_projector",
      [k, lk](int m, int n) -> cplx {
        if (m != n || n < k) return 0.0;
        const double mag = std::exp(lfact(n) - lk - lfact(n - k));
        return (n - k) % 2 ? -mag : mag;
      },
      max_order, true,
      [k, lk](PhasePoint a) -> cplx {
        const double u = a.norm2();
        if (u == 0.0) return k == 0 ? 1.0 : 0.0;
        return std::exp(-u + k * std::log(u) - lk);
      });
}

TaylorField TaylorField::radial_polynomial(std::vector<double> b) {
  const int degree = static_cast<int>(b.size()) - 1;
  if (degree < 0) throw ParameterError("polynomial needs a coefficient");
  TaylorField f(
      "radial_polynomial",
      [b](int m, int n) -> cplx {
        if (m != n || n >= static_cast<int>(b.size())) return 0.0;
        return b[n] * std::exp(lfact(n));
      },
      std::max(degree, 1) * 4, true,
      [b](PhasePoint a) -> cplx {
        double sum = 0.0;
        for (auto it = b.rbegin(); it != b.rend(); ++it) sum = sum * a.norm2() + *it;
        return sum;
      });
  f.degree_ = degree;
  return f;
}

cplx TaylorField::normalized(int m, int n) const {
  if (m < 0 || n < 0) return 0.0;
  if (degree_ && (m > *degree_ || n > *degree_)) return 0.0;
  if (m > max_order_ || n > max_order_) {
    throw ParameterError("derivative order beyond the test function's data");
  }
  return b_(m, n);
}

cplx TaylorField::derivative(int m, int n) const {
  return normalized(m, n) * std::exp(0.5 * (lfact(m) + lfact(n)));
}

cplx TaylorField::operator()(PhasePoint alpha) const {
  if (!eval_) throw UnsupportedError("test function has no closed form");
  return eval_(alpha);
}

// ---------------------------------------------------------------------------

DeltaSeries series_from_fock(const FockMatrix& fock, int order_cutoff) {
  if (order_cutoff < 0) throw ParameterError("order cutoff must be >= 0");
  if (order_cutoff > fock.cutoff()) {
    throw ParameterError("series order exceeds the Fock cutoff");
  }
  if (!fock.is_hermitian(1e-12)) throw ParameterError("Fock matrix must be Hermitian");
  const int cut = fock.cutoff();
  std::map<DeltaSeries::Key, cplx> coeffs;
  double tail = 0.0;
  for (int q = 0; q <= order_cutoff; ++q) {
    for (int r = 0; r <= order_cutoff; ++r) {
      cplx c = 0.0;
      cplx last = 0.0;
      for (int k = 0; q + k <= cut && r + k <= cut; ++k) {
        const cplx rho = fock(q + k, r + k);
        if (rho == cplx{0.0, 0.0}) {
          last = 0.0;
          continue;
        }
        const double scale =
            std::exp(0.5 * (lfact(q + k) + lfact(r + k)) - lfact(k) - lfact(q) - lfact(r));
        last = rho * scale;
        c += last;
      }
      if ((q + r) % 2) c = -c;
      // The last retained k-term bounds the size of what the cutoff drops.
      if (!fock.exact()) tail = std::max(tail, std::abs(last));
      if (c != cplx{0.0, 0.0}) coeffs[{q, r}] = c;
    }
  }
  DeltaSeries s(std::move(coeffs), order_cutoff);
  s.tail_ = tail;
  return s;
}

DeltaSeries exp_laplace_series(double gamma, int order) {
  return DeltaSeries::generator_form(gamma, order);
}

PairResult pair(const DeltaSeries& series, const TaylorField& f) {
  PairResult out;
  if (!series.generator()) {
    for (const auto& [key, c] : series.coefficients()) {
      const auto [q, r] = key;
      const cplx b = f.normalized(q, r);
      if (b == cplx{0.0, 0.0}) continue;
      const cplx term = c * b * std::exp(0.5 * (lfact(q) + lfact(r)));
      out.value += ((q + r) % 2) ? -term : term;
      ++out.terms;
    }
    return out;
  }

  const double gamma = *series.generator();
  if (f.degree() && *f.degree() <= series.order()) {
    for (int n = 0; n <= *f.degree(); ++n) out.value += generator_term(gamma, n, f.normalized(n, n));
    out.terms = *f.degree() + 1;
    return out;
  }
  const int n_max = std::min(series.order(), f.max_order());
  constexpr int kWindow = 10;
  constexpr double kRatioLimit = 0.95;
  std::deque<double> recent;  // magnitudes of the last nonzero terms
  int quiet = 0;
  cplx last = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const cplx t = generator_term(gamma, n, f.normalized(n, n));
    out.value += t;
    out.terms = n + 1;
    if (!std::isfinite(std::abs(out.value))) {
      throw DivergenceError("pairing partial sums overflow");
    }
    if (t != cplx{0.0, 0.0}) {
      last = t;
      recent.push_back(std::abs(t));
      if (static_cast<int>(recent.size()) > kWindow + 1) recent.pop_front();
    }
    if (std::abs(t) <= 1e-17 * std::abs(out.value)) {
      ++quiet;
      // Exact zeros may be gaps in a sparse field, so only tiny nonzero
      // terms end the sum early.
      if (quiet >= kWindow && t != cplx{0.0, 0.0}) break;
    } else {
      quiet = 0;
    }
  }
  if (quiet >= kWindow) {
    out.last_term_ratio = std::abs(last) / std::max(std::abs(out.value), 1e-300);
    return out;
  }
  // Order exhausted before the terms died out: apply the ratio test.
  if (static_cast<int>(recent.size()) < kWindow + 1) {
    throw DivergenceError("pairing: too few terms to establish convergence");
  }
  for (std::size_t i = 1; i < recent.size(); ++i) {
    if (recent[i] / recent[i - 1] >= kRatioLimit) {
      throw DivergenceError("pairing: term ratio " +
                            std::to_string(recent[i] / recent[i - 1]) +
                            " fails the convergence test");
    }
  }
  out.last_term_ratio = std::abs(last) / std::max(std::abs(out.value), 1e-300);
  return out;
}

FockDiagonalReport fock_diagonal(const DeltaSeries& series, int k_max) {
  if (!series.generator()) {
    throw UnsupportedError("Fock diagonal needs a generator-form series");
  }
  if (k_max < 0) throw ParameterError("k_max must be >= 0");
  FockDiagonalReport rep;
  rep.gamma = *series.generator();
  if (std::abs(rep.gamma) >= 1.0) {
    throw DivergenceError("pairing with Fock projectors diverges for |gamma| >= 1");
  }
  for (int k = 0; k <= k_max; ++k) {
    rep.pairing.push_back(pair(series, TaylorField::fock_projector(k)).value.real());
  }
  RadialSpec radial;
  radial.radially_symmetric = true;
  radial.tolerance = 1e-12;
  rep.routes_agree = true;
  for (int k = 0; k <= std::min(k_max, 3); ++k) {
    const double g = rep.gamma;
    const double v =
        quad2d([g, k](PhasePoint b) -> cplx {
          const double u = b.norm2();
          return std::exp(-(g + 1.0) * u) * std::laguerre(k, u) / kPi;
        }, radial).value.real();
    rep.fourier.push_back(v);
    if (std::abs(v - rep.pairing[k]) > 1e-6) rep.routes_agree = false;
  }
  if (rep.gamma == -0.5) {
    for (int k = 0; k <= k_max; ++k) {
      const double v = 2.0 * ((k % 2) ? -1.0 : 1.0) / std::pow(3.0, k + 1);
      rep.quoted.push_back(v);
      if (std::abs(v - rep.pairing[k]) > 1e-6) rep.quoted_mismatch = true;
    }
  }
  return rep;
}

STransformResult s_transform(const DeltaSeries& series, double s) {
  if (!series.generator()) {
    throw UnsupportedError("s-transform needs a generator-form series");
  }
  STransformResult out;
  out.gamma = *series.generator() + 0.5 * (1.0 - s);
  if (std::abs(out.gamma) < 1e-15) out.gamma = 0.0;
  out.series = DeltaSeries::generator_form(out.gamma, series.order());
  if (out.gamma > 0.0) {
    const double g = out.gamma;
    out.regular = [g](PhasePoint a) -> cplx {
      return std::exp(-a.norm2() / g) / (kPi * g);
    };
  }
  return out;
}

GeneratorClass expansive_contractive_classify(double gamma) {
  GeneratorClass c;
  if (gamma == 0.0) return c;
  c.map = gamma > 0.0 ? GeneratorMap::contractive : GeneratorMap::expansive;
  c.regular_dual = gamma > 0.0;
  c.multiplier_bounded = gamma > 0.0;
  return c;
}

std::string_view to_string(GeneratorMap map) {
  switch (map) {
    case GeneratorMap::identity: return "identity";
    case GeneratorMap::contractive: return "contractive";
    case GeneratorMap::expansive: return "expansive";
  }
  return "unknown";
}

DeltaSeries generator_series(const State& state, int order) {
  const auto g = state.generator();
  if (!g) {
    throw UnsupportedError(std::string(to_string(state.kind())) +
                           " has no exponential-Laplace generator");
  }
  return exp_laplace_series(*g, order);
}

}  // namespace phasespace
