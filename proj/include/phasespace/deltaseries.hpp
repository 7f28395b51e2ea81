#pragma once

// Singular P distributions as formal series Σ c_{q,r} ∂_α^q ∂_{α*}^r δ(α),
// their pairing with smooth test functions and the exponential-Laplace
// generators exp(γ ∂_α∂_{α*}) δ.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phasespace/numerics.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

class DeltaSeries {
 public:
  using Key = std::pair<int, int>;

  DeltaSeries() = default;
  /// Sparse finite series.
  DeltaSeries(std::map<Key, cplx> coefficients, int order);
  /// exp(γ ∂∂*) δ: c_{n,n} = γⁿ/n!, nothing off the diagonal.
  static DeltaSeries generator_form(double gamma, int order);

  /// c_{q,r}; zero when absent. Generator series evaluate on demand.
  cplx coeff(int q, int r) const;
  const std::map<Key, cplx>& coefficients() const { return coeffs_; }
  int order() const { return order_; }
  const std::optional<double>& generator() const { return gamma_; }

  /// Largest neglected k-tail term met while building from a Fock matrix.
  double tail_contribution() const { return tail_; }
  bool truncation_warning() const { return tail_ > 1e-8; }

 private:
  friend DeltaSeries series_from_fock(const FockMatrix& fock, int order_cutoff);

  std::map<Key, cplx> coeffs_;
  int order_ = 0;
  std::optional<double> gamma_;
  double tail_ = 0.0;
};

/// Derivative data of a test function F at the origin. Values are stored
/// normalized, b_{m,n} = a_{m,n} / √(m! n!) with a_{m,n} = [∂_α^m ∂_{α*}^n F]₀,
/// so that high orders stay in range.
class TaylorField {
 public:
  using Normalized = std::function<cplx(int m, int n)>;

  TaylorField(std::string name, Normalized normalized, int max_order,
              bool diagonal, PhaseField::Evaluator closed_form = {});
  /// Explicit raw derivatives a_{m,n}; missing entries are zero.
  static TaylorField from_derivatives(std::string name,
                                      const std::map<std::pair<int, int>, cplx>& a,
                                      int max_order);

  /// e^{−|α|²/σ²}: a_{n,n} = (−1/σ²)ⁿ n!.
  static TaylorField gaussian(double sigma2, int max_order = 4096);
  /// e^{+|α|²}: a_{n,n} = n!.
  static TaylorField exp_abs2(int max_order = 4096);
  /// |α|^{2k}: a_{k,k} = (k!)².
  static TaylorField abs2_power(int k);
  /// e^{−|α|²}|α|^{2k}/k!: a_{n,n} = (−1)^{n−k}(n!)²/((n−k)! k!), n ≥ k.
  static TaylorField fock_projector(int k, int max_order = 4096);
  /// Σ_j b_j |α|^{2j}: a_{j,j} = b_j (j!)².
  static TaylorField radial_polynomial(std::vector<double> b);

  const std::string& name() const { return name_; }
  int max_order() const { return max_order_; }
  bool diagonal() const { return diagonal_; }

  cplx normalized(int m, int n) const;
  /// a_{m,n}; may overflow to infinity at large orders.
  cplx derivative(int m, int n) const;

  bool has_closed_form() const { return static_cast<bool>(eval_); }
  cplx operator()(PhasePoint alpha) const;

  /// Polynomials: no derivative data beyond this total order m, n ≤ degree.
  const std::optional<int>& degree() const { return degree_; }

 private:
  std::string name_;
  Normalized b_;
  int max_order_;
  bool diagonal_;
  PhaseField::Evaluator eval_;
  std::optional<int> degree_;
};

/// c_{q,r} = Σ_k ρ_{q+k,r+k} √((q+k)!(r+k)!) (−1)^{q+r} / (k! q! r!).
DeltaSeries series_from_fock(const FockMatrix& fock, int order_cutoff);
DeltaSeries exp_laplace_series(double gamma, int order);

struct PairResult {
  cplx value;
  /// |last term| / |partial sum| at termination.
  double last_term_ratio = 0.0;
  int terms = 0;
};

/// Σ c_{q,r} (−1)^{q+r} a_{q,r}. Generator series sum γⁿ a_{n,n}/n! until the
/// terms die out; if the available order runs out first, consecutive term
/// ratios over the last 10 terms must stay below 0.95, else DivergenceError.
PairResult pair(const DeltaSeries& series, const TaylorField& f);

struct FockDiagonalReport {
  double gamma = 0.0;
  /// ⟨k|μ̂|k⟩ by pairing with e^{−|α|²}|α|^{2k}/k!, k ≤ k_max.
  std::vector<double> pairing;
  /// Same values from (1/π)∫d²β e^{−γ|β|²} e^{−|β|²} L_k(|β|²), k ≤ min(k_max, 3).
  std::vector<double> fourier;
  bool routes_agree = false;
  /// Values quoted in the literature for γ = −1/2, 2(−1)^k/3^{k+1}; empty
  /// for other generators.
  std::vector<double> quoted;
  bool quoted_mismatch = false;
};

/// Requires a generator series; DivergenceError when |γ| ≥ 1.
FockDiagonalReport fock_diagonal(const DeltaSeries& series, int k_max);

struct STransformResult {
  double gamma = 0.0;  // γ' = γ + (1 − s)/2
  DeltaSeries series;
  /// (1/(πγ')) e^{−|α|²/γ'} when γ' > 0, the regular dual of the series.
  std::optional<PhaseField::Evaluator> regular;
};

/// s-parametrized counterpart of a generator series. UnsupportedError for
/// other series.
STransformResult s_transform(const DeltaSeries& series, double s);

enum class GeneratorMap { identity, contractive, expansive };

struct GeneratorClass {
  GeneratorMap map = GeneratorMap::identity;
  /// A regular Gaussian representation exists (γ > 0).
  bool regular_dual = false;
  /// Fourier multiplier e^{−γ|β|²} bounded by one.
  bool multiplier_bounded = true;
};

/// exp(γ∂∂*) multiplies the characteristic function by e^{−γ|β|²}: γ > 0
/// contracts, γ < 0 expands.
GeneratorClass expansive_contractive_classify(double gamma);
std::string_view to_string(GeneratorMap map);

/// Generator series of a state with a known generator (thermal, vacuum,
/// P_max); UnsupportedError otherwise.
DeltaSeries generator_series(const State& state, int order = 4096);

}  // namespace phasespace
