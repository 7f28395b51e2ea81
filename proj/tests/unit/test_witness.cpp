#include <cmath>

#include "doctest.h"
#include "phasespace/charfn.hpp"
#include "phasespace/deltaseries.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/filters.hpp"
#include "phasespace/witness.hpp"

using namespace phasespace;

namespace {

double beta_fn(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

ClassifyOptions quick() {
  ClassifyOptions o;
  o.alpha_grid = PhaseGrid(4.0, 81);
  o.beta_grid = PhaseGrid(4.0, 81);
  return o;
}

}  // namespace

TEST_CASE("vacuum probability") {
  CHECK(std::abs(vacuum_probability(make_state(StateSpec::cauchy_lorentz_ncl(3.0)))) < 1e-9);
  CHECK(vacuum_probability(make_state(StateSpec::thermal(0.5))) == doctest::Approx(2.0 / 3.0));
  CHECK(vacuum_probability(make_state(StateSpec::vacuum())) == 1.0);
  CHECK(vacuum_probability(make_state(StateSpec::p_max())) == doctest::Approx(2.0));
  CHECK(vacuum_probability(make_state(StateSpec::photon_vacuum_mix(0.3))) ==
        doctest::Approx(0.7));
  CHECK(vacuum_probability(make_state(StateSpec::coherent({0.6, -0.8}))) ==
        doctest::Approx(std::exp(-1.0)));
  CHECK(vacuum_probability(make_state(StateSpec::squeezed(0.5))) ==
        doctest::Approx(1.0 / std::cosh(0.5)).epsilon(1e-10));

  // SPATS: P(r) = ((1+n̄) r² − n̄) e^{−r²/n̄} / (π n̄³), integrated against e^{−r²}.
  const double nbar = 1.0;
  const double oracle =
      quad1d([&](double r) -> cplx {
        return 2.0 * r * ((1 + nbar) * r * r - nbar) * std::exp(-r * r / nbar - r * r) /
               (nbar * nbar * nbar);
      }, 0.0, std::numeric_limits<double>::infinity(), 1e-14).value.real();
  CHECK(std::abs(oracle) < 1e-12);
  CHECK(std::abs(vacuum_probability(make_state(StateSpec::spats(nbar)))) < 1e-8);
  CHECK(vacuum_probability(make_state(StateSpec::spats(0.5))) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("normally ordered moments") {
  const Moment m = normal_moment(make_state(StateSpec::cauchy_lorentz(3.0)), 1);
  CHECK_FALSE(m.diverged);
  CHECK(std::abs(m.value - 3.0 * beta_fn(2.0, 2.0)) < 1e-6);
  CHECK(std::abs(m.value - 0.5) < 1e-6);
  CHECK(normal_moment(make_state(StateSpec::cauchy_lorentz(1.0)), 1).diverged);

  for (double t : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const State s = make_state(StateSpec::cauchy_lorentz(t));
    for (int n : {0, 1, 2}) {
      const Moment mn = normal_moment(s, n);
      CHECK_MESSAGE(mn.diverged == (n > 0 && t <= n), "t=" << t << " n=" << n);
      if (!mn.diverged) CHECK(std::abs(mn.value - t * beta_fn(n + 1.0, t - n)) < 1e-6);
    }
  }

  CHECK(normal_moment(make_state(StateSpec::thermal(0.5)), 3).value == doctest::Approx(6 * 0.125));
  CHECK(normal_moment(make_state(StateSpec::p_max()), 3).value == doctest::Approx(-0.125 * 6));
  CHECK(normal_moment(make_state(StateSpec::fock_element(3, 3)), 2).value == doctest::Approx(6.0));
  CHECK(normal_moment(make_state(StateSpec::coherent({1.0, 1.0})), 2).value == doctest::Approx(4.0));
  CHECK(normal_moment(make_state(StateSpec::spats(0.5)), 1).value ==
        doctest::Approx(2.0 * 0.5 + 1.0).epsilon(1e-8));
  const double sh = std::sinh(0.7);
  CHECK(normal_moment(make_state(StateSpec::squeezed(0.7)), 1).value ==
        doctest::Approx(sh * sh).epsilon(1e-10));
  // ncl(3): the atom at the origin leaves n ≥ 1 moments scaled by 1/(1 − N).
  const State ncl = make_state(StateSpec::cauchy_lorentz_ncl(3.0));
  CHECK(normal_moment(ncl, 1).value ==
        doctest::Approx(0.5 / (1.0 - ncl.ncl_normalizer())).epsilon(1e-6));
  CHECK(normal_moment(ncl, 0).value == 1.0);

  StateSpec shifted = StateSpec::thermal(0.5);
  shifted.modifier.displacement = {1.0, 0.0};
  CHECK_THROWS_AS(normal_moment(make_state(shifted), 1), UnsupportedError);
  CHECK_THROWS_AS(normal_moment(make_state(StateSpec::thermal(0.5)), -1), ParameterError);
}

TEST_CASE("moment matrix") {
  // Moments of |1><1| from the delta-series pairing.
  const auto series = series_from_fock(make_state(StateSpec::fock_element(1, 1)).fock(), 1);
  const double m1 = pair(series, TaylorField::abs2_power(1)).value.real();
  const double m2 = pair(series, TaylorField::abs2_power(2)).value.real();
  CHECK(m1 == doctest::Approx(1.0));
  CHECK(m2 == 0.0);
  const auto e = moment_matrix_test(make_state(StateSpec::fock_element(1, 1)), 1);
  CHECK(e.value == doctest::Approx((1.0 - std::sqrt(5.0)) / 2.0));
  CHECK(e.verdict == Verdict::nonclassical_certified);

  const State th = make_state(StateSpec::thermal(0.5));
  for (int order = 1; order <= 3; ++order) {
    const auto t = moment_matrix_test(th, order);
    CHECK(t.verdict == Verdict::consistent_with_classical);
    CHECK(t.value >= -1e-12);
  }

  const auto ncl = moment_matrix_test(make_state(StateSpec::cauchy_lorentz_ncl(1.0)), 1);
  CHECK(ncl.verdict == Verdict::inapplicable);
  CHECK(ncl.note.find("diverges") != std::string::npos);
}

TEST_CASE("negativity scan") {
  const PhaseGrid grid(2.0, 41);
  const auto spats = filtered_p_numeric(make_state(StateSpec::spats(1.0)), FilterKernel::box(2.0), grid);
  const Extremum s = negativity_scan(spats.field);
  CHECK(s.value < -1e-3);
  CHECK(std::hypot(s.location.x, s.location.p) < 0.5);

  const auto vac = filtered_p_numeric(make_state(StateSpec::vacuum()), FilterKernel::box(2.0), grid);
  CHECK(negativity_scan(vac.field).value >= -1e-12);
  const auto pm = filtered_p_numeric(make_state(StateSpec::p_max()), FilterKernel::box(2.0), grid);
  CHECK(negativity_scan(pm.field).value < 0.0);

  const auto complex_field = PhaseField::closed_form(
      Domain::alpha, [](PhasePoint a) { return cplx{a.x, 0.1}; }, grid);
  CHECK_THROWS_AS(negativity_scan(complex_field), ComplexResidueError);
}

TEST_CASE("admissible test functions") {
  const auto g = TaylorField::gaussian(1.0);
  CHECK(admissible_check(g, 0.75, 60).admissible);
  const auto fail = admissible_check(g, 0.70, 60);
  CHECK_FALSE(fail.admissible);
  REQUIRE(fail.first_failure);
  CHECK(*fail.first_failure == std::pair{1, 1});
  CHECK(admissible_check(g, 1.0 / std::sqrt(2.0) + 1e-9, 200).admissible);
  CHECK_FALSE(admissible_check(g, 1.0 / std::sqrt(2.0) - 1e-6, 200).admissible);
  CHECK(admissible_constant(g, 60) == doctest::Approx(1.0 / std::sqrt(2.0)));

  CHECK(admissible_check(TaylorField::radial_polynomial({1.0}), 0.0, 10).admissible);
  // e^{|α|²} has a_{n,n} = n!, the same size as e^{−|α|²}: the class
  // boundary is C = 1/√2 for both.
  CHECK(admissible_check(TaylorField::exp_abs2(), 0.75, 60).admissible);
  CHECK(*admissible_check(TaylorField::exp_abs2(), 0.70, 60).first_failure == std::pair{1, 1});
  CHECK_FALSE(admissible_check(TaylorField::gaussian(0.2), 0.99, 60).admissible);

  // The admissible class sits inside the analytic class with M=1, C' = √2 C.
  for (const auto& f : {TaylorField::gaussian(1.0), TaylorField::gaussian(2.0),
                        TaylorField::exp_abs2(), TaylorField::fock_projector(2)}) {
    for (double C : {0.75, 0.9, 0.95}) {
      if (admissible_check(f, C, 40).admissible) {
        CHECK(analytic_bound_check(f, 1.0, std::sqrt(2.0) * C, 40).admissible);
      }
    }
  }
  CHECK_FALSE(analytic_bound_check(TaylorField::gaussian(1.0), 1.0, 0.5, 10).admissible);
}

TEST_CASE("P_max pairing bound") {
  CHECK(pmax_pairing_bound(0.0) == 1.0);
  CHECK(pmax_pairing_bound(1.0 / std::sqrt(2.0)) == doctest::Approx(2.0));
  CHECK(pmax_pairing_bound(0.9) == doctest::Approx(1.0 / 0.19));
  CHECK_THROWS_AS(pmax_pairing_bound(1.0), ParameterError);

  const auto pmax = exp_laplace_series(-0.5, 4096);
  for (const auto& f : {TaylorField::gaussian(1.0), TaylorField::gaussian(3.0), TaylorField::exp_abs2(),
                        TaylorField::fock_projector(0), TaylorField::fock_projector(3),
                        TaylorField::radial_polynomial({1.0, -0.3})}) {
    const double C = std::max(admissible_constant(f, 60), 1e-3) + 1e-9;
    if (C >= 1.0) continue;
    CHECK(admissible_check(f, C, 60).admissible);
    CHECK(std::abs(pair(pmax, f).value) <= pmax_pairing_bound(C) * (1.0 + 1e-12));
  }
  // e^{−|α|²} saturates the bound at C = 1/√2.
  CHECK(pair(pmax, TaylorField::gaussian(1.0)).value.real() ==
        doctest::Approx(pmax_pairing_bound(1.0 / std::sqrt(2.0))));

  // Alternating family a_{n,n} = (−2C²θ)ⁿ n! approaches the bound as θ → 1.
  const double C = 0.8;
  double last = 0.0;
  for (double theta : {0.5, 0.9, 0.99, 0.999, 0.9999}) {
    const double v = pair(pmax, TaylorField::gaussian(1.0 / (2.0 * C * C * theta))).value.real();
    CHECK(v > last);
    CHECK(v <= pmax_pairing_bound(C));
    last = v;
  }
  CHECK(last == doctest::Approx(pmax_pairing_bound(C)).epsilon(1e-3));
}

TEST_CASE("radius of convergence estimates") {
  const auto pts = radius_estimate(0.9, {50, 100, 200});
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].estimate == doctest::Approx(0.41967).epsilon(1e-4));
  CHECK(pts[0].bound == doctest::Approx(0.42406).epsilon(1e-4));
  CHECK(pts[1].estimate == doctest::Approx(0.29676).epsilon(1e-4));
  CHECK(pts[1].bound == doctest::Approx(0.29883).epsilon(1e-4));
  CHECK(pts[2].bound == doctest::Approx(2.0 * 0.9 * std::exp(-std::lgamma(200.0) / 400.0)));
  CHECK(pts[2].bound == doctest::Approx(0.21).epsilon(0.01));
  for (const auto& p : pts) CHECK(p.estimate < p.bound);
  CHECK(pts[1].estimate < pts[0].estimate);
  CHECK(pts[2].estimate < pts[1].estimate);

  for (const auto& p : radius_estimate(0.0, {1, 5, 10})) CHECK(p.estimate == 0.0);
  const auto half = radius_estimate(0.5, {50, 100, 200});
  CHECK(half[0].estimate > half[1].estimate);
  CHECK(half[1].estimate > half[2].estimate);
}

TEST_CASE("analytic-class divergence") {
  const auto d = analytic_divergence_demo(1.0, 40);
  CHECK(d.term_ratio(10) == doctest::Approx(5.0));
  for (double s : analytic_divergence_demo(0.0, 20, 2.5).log_partial_sums) {
    CHECK(std::exp(s) == doctest::Approx(2.5));
  }
  // Long-double oracle for C = 0.5.
  long double sum = 0.0L, term = 1.0L;
  int cross = -1;
  for (int n = 0; n <= 60; ++n) {
    if (n > 0) term *= n * 0.125L;
    sum += term;
    if (cross < 0 && sum > 1e6L) cross = n;
  }
  const auto half = analytic_divergence_demo(0.5, 60);
  CHECK(half.first_exceeding(1e6) == cross);
  CHECK(cross == 31);
  CHECK(half.partial_sum(60) == doctest::Approx(static_cast<double>(sum)).epsilon(1e-12));
  CHECK(analytic_divergence_demo(0.5, 2000).log_partial_sums.back() > 1000.0);
}

TEST_CASE("classification battery") {
  const auto opts = quick();
  for (const auto& spec : {StateSpec::vacuum(), StateSpec::thermal(0.5), StateSpec::cauchy_lorentz(3.0),
                           StateSpec::coherent({0.8, -0.4})}) {
    const auto rep = classify(make_state(spec), opts);
    CHECK_MESSAGE(rep.certifications() == 0, rep.state);
    CHECK(rep.overall() == Verdict::consistent_with_classical);
    CHECK(rep.entries.size() == 4);
  }

  const auto sq = classify(make_state(StateSpec::squeezed(1.4)), opts);
  CHECK(sq.find("characteristic-function")->verdict == Verdict::nonclassical_certified);
  CHECK(sq.find("filtered-negativity")->verdict == Verdict::nonclassical_certified);

  const auto ncl = classify(make_state(StateSpec::cauchy_lorentz_ncl(1.0)), opts);
  CHECK(ncl.find("vacuum-probability")->verdict == Verdict::nonclassical_certified);
  CHECK(ncl.find("moment-matrix")->verdict == Verdict::inapplicable);
  CHECK(ncl.overall() == Verdict::nonclassical_certified);

  for (const auto& spec : {StateSpec::spats(1.0), StateSpec::photon_vacuum_mix(1.0), StateSpec::p_max()}) {
    CHECK(classify(make_state(spec), opts).certifications() >= 1);
  }
  CHECK(to_string(Verdict::consistent_with_classical) == "consistent-with-classical");
}
