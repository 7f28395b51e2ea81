#pragma once

// Nonclassicality criteria and the test-function side of P_max pairings.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phasespace/deltaseries.hpp"
#include "phasespace/filters.hpp"
#include "phasespace/numerics.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

/// Margin a witness must clear before it certifies anything.
inline constexpr double kCertificationMargin = 1e-9;

enum class Verdict { nonclassical_certified, consistent_with_classical, inapplicable };
std::string_view to_string(Verdict v);

struct CriterionEntry {
  std::string criterion;
  Verdict verdict = Verdict::consistent_with_classical;
  double value = 0.0;
  std::optional<PhasePoint> location;
  std::string note;
};

struct NonclassicalityReport {
  std::string state;
  std::vector<CriterionEntry> entries;

  /// Certified as soon as one criterion certifies; never "classical".
  Verdict overall() const;
  int certifications() const;
  const CriterionEntry* find(std::string_view criterion) const;
};

/// ⟨0|ρ|0⟩ = ∫d²α P(α) e^{−|α|²}, through the generator, point masses, ρ₀₀ or
/// quadrature of the regular part, whichever applies first.
double vacuum_probability(const State& state);

struct Moment {
  bool diverged = false;
  double value = 0.0;
};

/// ⟨:(a†a)ⁿ:⟩ = ∫d²α P(α)|α|^{2n}. Regular parts are integrated decade by
/// decade; when the integrand's tail r^s has s ≥ −1 the moment is Diverged.
/// UnsupportedError for displaced states with a regular part.
Moment normal_moment(const State& state, int n);

/// Minimal eigenvalue of the Hankel matrix M_jk = ⟨:(a†a)^{j+k}:⟩, j,k ≤ order.
CriterionEntry moment_matrix_test(const State& state, int order);

struct Extremum {
  double value = 0.0;
  PhasePoint location;
};

/// Minimum of a real field over its grid; ComplexResidueError when some
/// sample carries an imaginary part above 1e-9.
Extremum negativity_scan(const PhaseField& field);

struct AdmissibleResult {
  bool admissible = true;
  std::optional<std::pair<int, int>> first_failure;
};

/// |a_{n,m}| ≤ (√2 C)^{n+m} √(n! m!) for n, m ≤ N, scanned by total order.
AdmissibleResult admissible_check(const TaylorField& f, double C, int N);
/// |a_{n,m}| ≤ M C^{n+m} n! m! for n, m ≤ N.
AdmissibleResult analytic_bound_check(const TaylorField& f, double M, double C, int N);
/// Smallest C for which admissible_check passes up to order N.
double admissible_constant(const TaylorField& f, int N);

/// 1/(1 − C²); ParameterError unless 0 ≤ C < 1.
double pmax_pairing_bound(double C);

struct RadiusPoint {
  int order = 0;
  double estimate = 0.0;  // c_l^{1/l}
  double bound = 0.0;     // 2C [(l−1)!]^{−1/(2l)}
};

/// Root-test estimates of 1/R for the majorant Σ c_k |α|^k of an admissible
/// test function with constant C.
std::vector<RadiusPoint> radius_estimate(double C, const std::vector<int>& orders);

struct DivergenceDemo {
  double C = 0.0;
  double M = 1.0;
  /// log of M Σ_{k≤n} k!(C²/2)^k for n = 0..N.
  std::vector<double> log_partial_sums;

  /// t_n / t_{n−1} = n C²/2.
  double term_ratio(int n) const { return n * C * C / 2.0; }
  double partial_sum(int n) const;
  /// First n with partial sum above `threshold`, or −1.
  int first_exceeding(double threshold) const;
};

/// Partial sums of the analytic-class bound on P_max pairings.
DivergenceDemo analytic_divergence_demo(double C, int N, double M = 1.0);

struct ClassifyOptions {
  double w = 2.0;
  PhaseGrid alpha_grid{4.0, 321};
  PhaseGrid beta_grid{4.0, 161};
  int moment_order = 2;
};

/// Runs the |Φ| > 1 scan, vacuum probability, moment matrix and filtered-P
/// negativity in that order.
NonclassicalityReport classify(const State& state, const ClassifyOptions& opts = {});

}  // namespace phasespace
