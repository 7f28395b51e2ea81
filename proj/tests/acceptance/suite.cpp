#include "suite.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "oracles.hpp"
#include "phasespace/charfn.hpp"
#include "phasespace/deltaseries.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/filters.hpp"
#include "phasespace/numerics.hpp"
#include "phasespace/states.hpp"
#include "phasespace/witness.hpp"

namespace acceptance {
namespace {

using namespace phasespace;

/// `digits` significant digits, locale independent.
std::string num(double v, int digits = 3) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

struct Timed {
  std::ostream* log;
  const char* label;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  ~Timed() {
    if (log) *log << "criterion " << label << ": " << num(seconds()) << " s\n";
  }
};

double radial_integral(const std::function<double(PhasePoint)>& f) {
  RadialSpec spec;
  spec.radially_symmetric = true;
  return quad2d([&](PhasePoint a) -> cplx { return f(a); }, spec).value.real();
}

CriterionResult c1_fock_elements(std::ostream* log) {
  Timed t{log, "1"};
  constexpr int kMax = 10;
  double worst = 0.0;
  for (const cplx beta : oracle::random_points(50, 3.0)) {
    const Eigen::MatrixXcd d = oracle::normal_displacement(beta, 60);
    for (int m = 0; m <= kMax; ++m)
      for (int n = 0; n <= kMax; ++n)
        worst = std::max(worst, std::abs(phi_fock_element(m, n, beta) - d(n, m)));
  }
  const bool fast = t.seconds() < 10.0;
  return {1, "Fock-element characteristic functions", worst < 1e-8 && fast,
          "max error " + num(worst) + " over m,n<=10 and 50 points |beta|<=3" +
              (fast ? "" : "; over the 10 s budget")};
}

CriterionResult c2_thermal_duality(std::ostream* log) {
  Timed t{log, "2"};
  double worst = 0.0;
  for (auto [nbar, sigma2] : {std::pair{0.25, 1.0}, std::pair{0.5, 1.0}, std::pair{0.5, 2.0},
                              std::pair{1.0, 4.0}}) {
    const auto f = TaylorField::gaussian(sigma2);
    const double singular = pair(exp_laplace_series(nbar, 4096), f).value.real();
    const State th = make_state(StateSpec::thermal(nbar));
    const double regular = radial_integral([&](PhasePoint a) { return th.regular_p(a) * f(a).real(); });
    const double exact = sigma2 / (sigma2 + nbar);
    worst = std::max({worst, std::abs(singular - exact), std::abs(regular - exact),
                      std::abs(singular - regular)});
  }
  return {2, "thermal generator duality", worst < 1e-8,
          "max deviation " + num(worst) + " across pairing, quadrature and closed form"};
}

CriterionResult c3_fock_diagonal(std::ostream* log) {
  Timed t{log, "3"};
  const auto rep = fock_diagonal(exp_laplace_series(-0.5, 4096), 3);
  const double pairing = rep.pairing.at(0);
  const double fourier = rep.fourier.at(0);
  const bool ok = std::abs(pairing - fourier) < 1e-6 && std::abs(pairing - 2.0) < 1e-6;
  std::string detail = "k=0 pairing " + num(pairing, 10) + ", Fourier " + num(fourier, 10);
  detail += "; computed k=0..3:";
  for (double v : rep.pairing) detail += " " + num(v, 6);
  detail += "; quoted:";
  for (double v : rep.quoted) detail += " " + num(v, 6);
  CriterionResult r{3, "P_max Fock diagonal, two routes", ok, detail};
  r.known_discrepancy = rep.quoted_mismatch;
  return r;
}

std::vector<std::pair<std::string, StateSpec>> physical_catalog() {
  return {{"vacuum", StateSpec::vacuum()},
          {"coherent(1+0.5i)", StateSpec::coherent({1.0, 0.5})},
          {"fock(1)", StateSpec::fock_element(1, 1)},
          {"fock(3)", StateSpec::fock_element(3, 3)},
          {"thermal(0.5)", StateSpec::thermal(0.5)},
          {"thermal(2)", StateSpec::thermal(2.0)},
          {"squeezed(0.5)", StateSpec::squeezed(0.5)},
          {"squeezed(1.4)", StateSpec::squeezed(1.4)},
          {"spats(1)", StateSpec::spats(1.0)},
          {"mix(0.5)", StateSpec::photon_vacuum_mix(0.5)},
          {"mix(1)", StateSpec::photon_vacuum_mix(1.0)},
          {"cl(1)", StateSpec::cauchy_lorentz(1.0)},
          {"cl(3)", StateSpec::cauchy_lorentz(3.0)},
          {"ncl(1)", StateSpec::cauchy_lorentz_ncl(1.0)},
          {"ncl(3)", StateSpec::cauchy_lorentz_ncl(3.0)},
          {"fock_mixture", StateSpec::fock_mixture({{0, 0.2}, {1, 0.5}, {4, 0.3}})}};
}

CriterionResult c4_quantum_bound(std::ostream* log) {
  Timed t{log, "4"};
  const PhaseGrid grid(4.0, 161);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, spec] : physical_catalog()) {
    const State s = make_state(spec);
    // Restrict to the disc |β| ≤ 4.
    const GridScan scan = scan_max(grid, [&](cplx b) {
      return std::norm(b) <= 16.0 ? std::abs(phi(s, b)) * std::exp(-0.5 * std::norm(b)) : 0.0;
    });
    if (scan.value > worst) {
      worst = scan.value;
      worst_name = name;
    }
  }
  const State sq5 = make_state(StateSpec::squeezed(5.0));
  const cplx beta{0.0, 4.0};
  const double ratio = std::abs(phi(sq5, beta)) * std::exp(-0.5 * std::norm(beta));
  const double threshold = std::exp(-std::exp(-10.0) * 8.0);
  // The ratio equals the threshold exactly; accept it up to rounding.
  const bool edge = ratio >= threshold * (1.0 - 1e-12);
  return {4, "quantum bound on |Phi|", worst <= 1.0 + 1e-9 && edge,
          "max ratio " + num(worst, 12) + " (" + worst_name + "); squeezed(5) at 4i: " +
              num(ratio, 10) + " vs " + num(threshold, 10)};
}

CriterionResult c5_T(std::ostream* log) {
  Timed t{log, "5"};
  double worst = 0.0;
  for (double g : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    for (int k = -100; k <= 100; ++k) {
      const double y = 0.1 * k;
      const double quad =
          2.0 / kPi *
          quad1d([&](double z) { return std::exp(cplx{-g * z * z, 2.0 * y * z}) * (1.0 - z); }, 0.0,
                 1.0, 1e-14)
              .value.real();
      worst = std::max(worst, std::abs(T(y, g) - quad));
    }
  }
  bool exact = T(0.0, 0.0) == 1.0 / kPi;
  for (double y : {-7.3, -1.0, 0.25, 3.0, 10.0}) {
    const double ref = std::sin(y) * std::sin(y) / (kPi * y * y);
    exact = exact && std::abs(T(y, 0.0) - ref) <= 1e-15 * ref;
  }
  return {5, "T(y;g) closed form", worst < 1e-10 && exact,
          "max error " + num(worst) + "; g=0 form " +
              (exact ? "matches sin^2(y)/(pi y^2) to rounding" : "off the analytic form")};
}

std::vector<double> cut_at_p0(const PhaseField& f) {
  const int n = f.grid().resolution();
  std::vector<double> cut(n);
  for (int i = 0; i < n; ++i) cut[i] = f.at(i, (n - 1) / 2).real();
  return cut;
}

std::vector<double> unit(std::vector<double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (double& x : v) x /= s;
  return v;
}

CriterionResult c6_figure(std::ostream* log) {
  Timed t{log, "6"};
  const double w = 2.0;
  const PhaseGrid grid(4.0, 321);
  const FilterKernel box = FilterKernel::box(w);
  auto field = [&](const StateSpec& s) { return filtered_p_numeric(make_state(s), box, grid).field; };

  const auto vac = field(StateSpec::vacuum());
  double vac_err = 0.0, vac_min = 0.0, vac_exact_min = 0.0;
  for (int i = 0; i < grid.resolution(); ++i) {
    for (int j = 0; j < grid.resolution(); ++j) {
      const PhasePoint a = grid.point(i, j);
      const double v = vac.at(i, j).real();
      vac_err = std::max(vac_err, std::abs(v - omega_sinc(a, w)));
      vac_min = std::min(vac_min, v);
      vac_exact_min = std::min(vac_exact_min, filtered_p_gaussian({0.0, 0.0}, w, a));
    }
  }
  // Rounding in the numeric route leaves ~1e-16 dips at the sinc zeros.
  const bool a_ok = vac_err < 1e-8 && vac_exact_min >= 0.0 && vac_min >= -1e-12;

  const double kernel_peak = omega_sinc({0.0, 0.0}, w);
  const auto pmax = field(StateSpec::p_max());
  const double pmax_min = negativity_scan(pmax).value / kernel_peak;
  const bool b_ok = pmax_min < -1e-3;

  const double th_min = negativity_scan(field(StateSpec::thermal(0.5))).value;
  const bool c_ok = th_min >= -1e-9;

  const auto sq_cut = cut_at_p0(field(StateSpec::squeezed(1.4)));
  const double sq_min = *std::min_element(sq_cut.begin(), sq_cut.end());
  const auto a = unit(sq_cut);
  const auto b = unit(cut_at_p0(pmax));
  double dev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dev += (a[i] - b[i]) * (a[i] - b[i]);
  dev = std::sqrt(dev);
  const bool d_ok = sq_min < 0.0 && dev < 0.15;

  const bool fast = t.seconds() < 120.0;
  return {6, "filtered P at w=2", a_ok && b_ok && c_ok && d_ok && fast,
          "(a) vacuum error " + num(vac_err) + ", min " + num(vac_min) + "; (b) P_max min " +
              num(pmax_min) + " of kernel peak; (c) thermal(0.5) min " + num(th_min) +
              "; (d) squeezed(1.4) cut min " + num(sq_min) + ", shape deviation from P_max " +
              num(dev) + (fast ? "" : "; over the 2 min budget")};
}

CriterionResult c7_normalization(std::ostream* log) {
  Timed t{log, "7"};
  double worst = 0.0;
  for (const auto& spec : {StateSpec::vacuum(), StateSpec::p_max(), StateSpec::thermal(0.5),
                           StateSpec::squeezed(1.4)}) {
    const GaussianCF cf = gaussian_cf(make_state(spec));
    for (double w : {1.0, 2.0, 4.0}) worst = std::max(worst, std::abs(filtered_mass(cf, w) - 1.0));
  }
  return {7, "filtered P normalization", worst < 1e-6, "max |mass - 1| " + num(worst)};
}

CriterionResult c8_battery(std::ostream* log) {
  Timed t{log, "8"};
  bool ok = true;
  std::string detail;
  auto run = [&](const std::string& name, const StateSpec& spec, bool expect_certified) {
    const auto rep = classify(make_state(spec));
    const int n = rep.certifications();
    ok = ok && (expect_certified ? n >= 1 : n == 0);
    detail += (detail.empty() ? "" : ", ") + name + "=" + std::to_string(n);
    return rep;
  };
  run("vacuum", StateSpec::vacuum(), false);
  run("thermal(0.5)", StateSpec::thermal(0.5), false);
  run("cl(3)", StateSpec::cauchy_lorentz(3.0), false);
  run("squeezed(1.4)", StateSpec::squeezed(1.4), true);
  run("spats(1)", StateSpec::spats(1.0), true);
  run("mix(1)", StateSpec::photon_vacuum_mix(1.0), true);
  run("p_max", StateSpec::p_max(), true);
  const auto ncl = run("ncl(1)", StateSpec::cauchy_lorentz_ncl(1.0), true);
  const auto* vac = ncl.find("vacuum-probability");
  const auto* mom = ncl.find("moment-matrix");
  const bool via_vacuum = vac && vac->verdict == Verdict::nonclassical_certified;
  const bool mom_diverged = mom && mom->verdict == Verdict::inapplicable &&
                            mom->note.find("diverges") != std::string::npos;
  ok = ok && via_vacuum && mom_diverged;
  detail += std::string("; ncl(1) vacuum route ") + (via_vacuum ? "certifies" : "does not certify") +
            ", moment route " + (mom_diverged ? "diverged" : "did not diverge");
  return {8, "nonclassicality battery", ok, "certifications " + detail};
}

CriterionResult c9_cl_moments(std::ostream* log) {
  Timed t{log, "9"};
  const double m31 = normal_moment(make_state(StateSpec::cauchy_lorentz(3.0)), 1).value;
  bool pattern = true;
  int cells = 0;
  for (double t_param : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const State s = make_state(StateSpec::cauchy_lorentz(t_param));
    for (int n = 0; n <= 2; ++n) {
      const Moment m = normal_moment(s, n);
      const bool expect = n > 0 && t_param <= n;
      pattern = pattern && m.diverged == expect;
      ++cells;
    }
  }
  return {9, "Cauchy-Lorentz moments", std::abs(m31 - 0.5) < 1e-6 && pattern,
          "t=3 n=1 moment " + num(m31, 10) + "; divergence pattern over " + std::to_string(cells) +
              " cells " + (pattern ? "matches t<=n" : "mismatched")};
}

CriterionResult c10_dual_space(std::ostream* log) {
  Timed t{log, "10"};
  const auto g = TaylorField::gaussian(1.0);
  const bool pass75 = admissible_check(g, 0.75, 60).admissible;
  const auto fail70 = admissible_check(g, 0.70, 60);
  const bool first = !fail70.admissible && fail70.first_failure == std::pair{1, 1};

  const auto pmax = exp_laplace_series(-0.5, 4096);
  double worst_ratio = 0.0;
  for (const auto& f : {TaylorField::gaussian(1.0), TaylorField::gaussian(3.0),
                        TaylorField::exp_abs2(), TaylorField::fock_projector(0),
                        TaylorField::fock_projector(3), TaylorField::radial_polynomial({1.0, -0.3})}) {
    const double C = std::max(admissible_constant(f, 60), 1e-3) + 1e-9;
    if (C >= 1.0) continue;
    worst_ratio = std::max(worst_ratio, std::abs(pair(pmax, f).value) / pmax_pairing_bound(C));
  }
  const bool bounded = worst_ratio <= 1.0 + 1e-12;

  const auto pts = radius_estimate(0.9, {50, 100, 200});
  bool radius_ok = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    radius_ok = radius_ok && pts[i].estimate < pts[i].bound;
    if (i > 0) radius_ok = radius_ok && pts[i].estimate < pts[i - 1].estimate;
  }
  std::string radii;
  for (const auto& p : pts) radii += " " + num(p.estimate, 5) + "/" + num(p.bound, 5);
  return {10, "dual-space admissibility", pass75 && first && bounded && radius_ok,
          std::string("C=0.75 ") + (pass75 ? "passes" : "fails") + ", C=0.70 " +
              (first ? "first fails at (1,1)" : "unexpected") + "; max pairing/bound " +
              num(worst_ratio, 6) + "; radius estimate/bound at l=50,100,200:" + radii};
}

}  // namespace

std::vector<CriterionResult> run_criteria(std::ostream* timing_log) {
  using Runner = CriterionResult (*)(std::ostream*);
  static constexpr std::pair<int, const char*> kNames[] = {
      {1, "Fock-element characteristic functions"}, {2, "thermal generator duality"},
      {3, "P_max Fock diagonal, two routes"},       {4, "quantum bound on |Phi|"},
      {5, "T(y;g) closed form"},                    {6, "filtered P at w=2"},
      {7, "filtered P normalization"},              {8, "nonclassicality battery"},
      {9, "Cauchy-Lorentz moments"},                {10, "dual-space admissibility"}};
  static constexpr Runner kRunners[] = {c1_fock_elements, c2_thermal_duality, c3_fock_diagonal,
                                        c4_quantum_bound, c5_T,               c6_figure,
                                        c7_normalization, c8_battery,         c9_cl_moments,
                                        c10_dual_space};
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < std::size(kRunners); ++i) {
    try {
      out.push_back(kRunners[i](timing_log));
    } catch (const std::exception& e) {
      out.push_back({kNames[i].first, kNames[i].second, false, std::string("error: ") + e.what()});
    }
  }
  return out;
}

CriterionResult determinism(const std::string& first, const std::string& second) {
  const bool same = first == second;
  return {11, "determinism", same,
          same ? "two runs produced identical reports (" + std::to_string(first.size()) + " bytes)"
               : "reports differ between runs"};
}

std::vector<CriterionResult> run_suite(std::ostream* timing_log) {
  auto results = run_criteria(timing_log);
  const auto again = run_criteria(timing_log);
  results.push_back(determinism(format_report(results), format_report(again)));
  return results;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream out;
  out << (r.pass ? "PASS" : "FAIL") << ' ' << (r.id < 10 ? " " : "") << r.id << "  " << r.name
      << ": " << r.detail;
  if (r.known_discrepancy) out << " [KNOWN-DISCREPANCY with quoted values]";
  return out.str();
}

std::string format_report(const std::vector<CriterionResult>& results) {
  std::string s;
  for (const auto& r : results) s += format_line(r) + '\n';
  return s;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

}  // namespace acceptance
