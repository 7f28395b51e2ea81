#include "phasespace/witness.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "phasespace/charfn.hpp"
#include "phasespace/errors.hpp"

namespace phasespace {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool displaced(const State& s) {
  return s.spec().modifier.displacement != cplx{0.0, 0.0};
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double lfact(int n) { return std::lgamma(n + 1.0); }

// ∫d²α P_reg |α|^{2n} for a radial regular part, one decade of r at a time.
// Past each decade the integrand is modelled as r^s from its values at R/10
// and R; s ≥ −1 means the remaining integral is infinite.
Moment radial_moment(const State& s, int n) {
  auto f = [&](double r) {
    return 2.0 * kPi * std::pow(r, 2 * n + 1) * s.regular_p({r, 0.0});
  };
  auto integrate = [&](double a, double b) {
    return quad1d([&](double r) -> cplx { return f(r); }, a, b, 1e-13).value.real();
  };
  double inner = integrate(0.0, 1.0);
  double previous = kNaN;
  for (double R = 10.0; R <= 1e8; R *= 10.0) {
    inner += integrate(R / 10.0, R);
    const double fR = f(R);
    double estimate = inner;
    if (fR > 0.0) {
      const double slope = std::log10(fR / f(R / 10.0));
      if (slope >= -1.0 - 1e-3) return {true, std::numeric_limits<double>::infinity()};
      estimate -= R * fR / (slope + 1.0);
    }
    if (std::abs(estimate - previous) <= 1e-10 * std::abs(estimate)) return {false, estimate};
    previous = estimate;
  }
  throw NonConvergence("radial moment did not settle by r = 1e8");
}

double atom_sum(const std::vector<Atom>& atoms, const std::function<double(PhasePoint)>& g) {
  double sum = 0.0;
  for (const auto& a : atoms) sum += (a.weight * g(a.location)).real();
  return sum;
}

// |b| ≤ M (C)^{n+m} (n! m!)^{e/2} in log form; e = 0 for the admissible
// class, e = 1 for the analytic bound.
AdmissibleResult scan_bound(const TaylorField& f, double logM, double C, double e, int N) {
  if (N < 0) throw ParameterError("order must be >= 0");
  const double logC = C > 0.0 ? std::log(C) : kNegInf;
  for (int total = 0; total <= 2 * N; ++total) {
    for (int n = std::max(0, total - N); n <= std::min(total, N); ++n) {
      const int m = total - n;
      const double b = std::abs(f.normalized(n, m));
      if (b == 0.0) continue;
      const double scale = total == 0 ? 0.0 : total * logC;
      const double limit = logM + scale + 0.5 * e * (lfact(n) + lfact(m));
      if (std::log(b) > limit + 1e-12) return {false, std::pair{n, m}};
    }
  }
  return {};
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::nonclassical_certified:
      return "nonclassical-certified";
    case Verdict::consistent_with_classical:
      return "consistent-with-classical";
    case Verdict::inapplicable:
      return "inapplicable/diverged";
  }
  return "unknown";
}

Verdict NonclassicalityReport::overall() const {
  return certifications() > 0 ? Verdict::nonclassical_certified
                              : Verdict::consistent_with_classical;
}

int NonclassicalityReport::certifications() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const auto& e) {
    return e.verdict == Verdict::nonclassical_certified;
  }));
}

const CriterionEntry* NonclassicalityReport::find(std::string_view criterion) const {
  for (const auto& e : entries) {
    if (e.criterion == criterion) return &e;
  }
  return nullptr;
}

double vacuum_probability(const State& state) {
  if (auto g = state.generator()) return 1.0 / (1.0 + *g);
  auto gauss = [](PhasePoint a) { return std::exp(-a.norm2()); };
  switch (state.p_form()) {
    case PForm::atomic:
      return atom_sum(state.atoms(), gauss);
    case PForm::regular: {
      RadialSpec spec;
      spec.radially_symmetric = !displaced(state);
      const double reg =
          quad2d([&](PhasePoint a) -> cplx { return state.regular_p(a) * gauss(a); }, spec)
              .value.real();
      return reg + atom_sum(state.atoms(), gauss);
    }
    case PForm::singular:
      break;
  }
  if (state.has_fock()) return state.fock()(0, 0).real();
  throw UnsupportedError("no route to the vacuum probability of " +
                         std::string(to_string(state.kind())));
}

Moment normal_moment(const State& state, int n) {
  if (n < 0) throw ParameterError("moment order must be >= 0");
  if (n == 0) return {false, 1.0};
  if (auto g = state.generator()) {
    return {false, pair(exp_laplace_series(*g, 4096), TaylorField::abs2_power(n)).value.real()};
  }
  auto power = [n](PhasePoint a) { return std::pow(a.norm2(), n); };
  switch (state.p_form()) {
    case PForm::atomic:
      return {false, atom_sum(state.atoms(), power)};
    case PForm::regular: {
      if (displaced(state)) {
        throw UnsupportedError("moments of displaced regular states are not implemented");
      }
      Moment m = radial_moment(state, n);
      if (!m.diverged) m.value += atom_sum(state.atoms(), power);
      return m;
    }
    case PForm::singular:
      break;
  }
  if (state.has_fock()) {
    const FockMatrix& rho = state.fock();
    double sum = 0.0;
    for (int k = n; k <= rho.cutoff(); ++k) {
      const double p = rho(k, k).real();
      if (p != 0.0) sum += p * std::exp(lfact(k) - lfact(k - n));
    }
    return {false, sum};
  }
  throw UnsupportedError("no route to normally ordered moments of " +
                         std::string(to_string(state.kind())));
}

CriterionEntry moment_matrix_test(const State& state, int order) {
  if (order < 0) throw ParameterError("moment matrix order must be >= 0");
  CriterionEntry e;
  e.criterion = "moment-matrix";
  std::vector<double> m(2 * order + 1);
  for (int k = 0; k <= 2 * order; ++k) {
    Moment mk;
    try {
      mk = normal_moment(state, k);
    } catch (const UnsupportedError& err) {
      e.verdict = Verdict::inapplicable;
      e.value = kNaN;
      e.note = err.what();
      return e;
    }
    if (mk.diverged) {
      e.verdict = Verdict::inapplicable;
      e.value = kNaN;
      e.note = "normally ordered moment of order " + std::to_string(k) + " diverges";
      return e;
    }
    m[k] = mk.value;
  }
  Eigen::MatrixXd M(order + 1, order + 1);
  for (int j = 0; j <= order; ++j)
    for (int k = 0; k <= order; ++k) M(j, k) = m[j + k];
  const double min_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues()(0);
  e.value = min_eig;
  e.note = "order " + std::to_string(order);
  e.verdict = min_eig < -kCertificationMargin * std::max(1.0, M.norm())
                  ? Verdict::nonclassical_certified
                  : Verdict::consistent_with_classical;
  return e;
}

Extremum negativity_scan(const PhaseField& field) {
  const PhaseGrid& g = field.grid();
  Extremum out{std::numeric_limits<double>::infinity(), {}};
  for (int i = 0; i < g.resolution(); ++i) {
    for (int j = 0; j < g.resolution(); ++j) {
      const cplx v = field.at(i, j);
      if (std::abs(v.imag()) > 1e-9) {
        throw ComplexResidueError("field is not real at node (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
      }
      if (v.real() < out.value) out = {v.real(), g.point(i, j)};
    }
  }
  return out;
}

AdmissibleResult admissible_check(const TaylorField& f, double C, int N) {
  if (C < 0.0) throw ParameterError("C must be >= 0");
  return scan_bound(f, 0.0, std::sqrt(2.0) * C, 0.0, N);
}

AdmissibleResult analytic_bound_check(const TaylorField& f, double M, double C, int N) {
  if (M < 0.0 || C < 0.0) throw ParameterError("M and C must be >= 0");
  return scan_bound(f, M > 0.0 ? std::log(M) : kNegInf, C, 1.0, N);
}

double admissible_constant(const TaylorField& f, int N) {
  if (std::abs(f.normalized(0, 0)) > 1.0 + 1e-12) return std::numeric_limits<double>::infinity();
  double c = 0.0;
  for (int n = 0; n <= N; ++n) {
    for (int m = 0; m <= N; ++m) {
      if (n + m == 0) continue;
      const double b = std::abs(f.normalized(n, m));
      if (b > 0.0) c = std::max(c, std::exp(std::log(b) / (n + m)) / std::sqrt(2.0));
    }
  }
  return c;
}

double pmax_pairing_bound(double C) {
  if (!(C >= 0.0 && C < 1.0)) throw ParameterError("pairing bound needs 0 <= C < 1");
  return 1.0 / (1.0 - C * C);
}

std::vector<RadiusPoint> radius_estimate(double C, const std::vector<int>& orders) {
  if (C < 0.0) throw ParameterError("C must be >= 0");
  std::vector<RadiusPoint> out;
  for (int l : orders) {
    if (l < 1) throw ParameterError("radius orders must be >= 1");
    RadiusPoint pt{l, 0.0, 0.0};
    if (C > 0.0) {
      double log_sum = kNegInf;
      for (int n = 0; n <= l; ++n) log_sum = log_add(log_sum, -0.5 * (lfact(l - n) + lfact(n)));
      pt.estimate = std::sqrt(2.0) * C * std::exp(log_sum / l);
      pt.bound = 2.0 * C * std::exp(-lfact(l - 1) / (2.0 * l));
    }
    out.push_back(pt);
  }
  return out;
}

double DivergenceDemo::partial_sum(int n) const {
  return std::exp(log_partial_sums.at(static_cast<std::size_t>(n)));
}

int DivergenceDemo::first_exceeding(double threshold) const {
  const double lt = std::log(threshold);
  for (std::size_t n = 0; n < log_partial_sums.size(); ++n) {
    if (log_partial_sums[n] > lt) return static_cast<int>(n);
  }
  return -1;
}

DivergenceDemo analytic_divergence_demo(double C, int N, double M) {
  if (C < 0.0 || M <= 0.0 || N < 0) throw ParameterError("demo needs C >= 0, M > 0, N >= 0");
  DivergenceDemo d;
  d.C = C;
  d.M = M;
  const double log_q = C > 0.0 ? std::log(C * C / 2.0) : kNegInf;
  double acc = kNegInf;
  for (int k = 0; k <= N; ++k) {
    const double log_term = k == 0 ? 0.0 : lfact(k) + k * log_q;
    acc = log_add(acc, log_term);
    d.log_partial_sums.push_back(std::log(M) + acc);
  }
  return d;
}

NonclassicalityReport classify(const State& state, const ClassifyOptions& opts) {
  NonclassicalityReport rep;
  rep.state = std::string(to_string(state.kind()));

  {
    CriterionEntry e{"characteristic-function", Verdict::consistent_with_classical, 0.0, {}, ""};
    try {
      const GridScan scan = classicality_violation(state, opts.beta_grid);
      e.value = scan.value;
      e.location = scan.argmax;
      e.note = "max |Phi| - 1";
      if (scan.value > kViolationMargin) e.verdict = Verdict::nonclassical_certified;
    } catch (const Error& err) {
      e.verdict = Verdict::inapplicable;
      e.value = kNaN;
      e.note = err.what();
    }
    rep.entries.push_back(e);
  }

  {
    CriterionEntry e{"vacuum-probability", Verdict::consistent_with_classical, 0.0, {}, ""};
    try {
      e.value = vacuum_probability(state);
      e.note = "<0|rho|0>";
      if (e.value <= kCertificationMargin) e.verdict = Verdict::nonclassical_certified;
    } catch (const Error& err) {
      e.verdict = Verdict::inapplicable;
      e.value = kNaN;
      e.note = err.what();
    }
    rep.entries.push_back(e);
  }

  {
    // Heavy-tailed states lose high moments first, so fall back to lower
    // orders while the matrix is out of reach; order 1 decides.
    CriterionEntry e;
    for (int order = opts.moment_order; order >= 1; --order) {
      e = moment_matrix_test(state, order);
      if (e.verdict != Verdict::inapplicable) break;
    }
    rep.entries.push_back(e);
  }

  {
    CriterionEntry e{"filtered-negativity", Verdict::consistent_with_classical, 0.0, {}, ""};
    try {
      const auto filtered = filtered_p_numeric(state, FilterKernel::box(opts.w), opts.alpha_grid);
      const Extremum ext = negativity_scan(filtered.field);
      e.value = ext.value;
      e.location = ext.location;
      e.note = "min P_Omega";
      if (ext.value < -kCertificationMargin) e.verdict = Verdict::nonclassical_certified;
    } catch (const Error& err) {
      e.verdict = Verdict::inapplicable;
      e.value = kNaN;
      e.note = err.what();
    }
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace phasespace
