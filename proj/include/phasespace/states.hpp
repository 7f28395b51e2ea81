#pragma once

// Catalog of single-mode states and pseudo-states with the closed forms the
// rest of the library relies on: Fock coefficients, regular P functions and
// exact point masses.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phasespace/numerics.hpp"

namespace phasespace {

enum class StateKind {
  fock_element,
  thermal,
  squeezed,
  spats,
  photon_vacuum_mix,
  cauchy_lorentz,
  cauchy_lorentz_ncl,
  p_max,
  fock_mixture,
  fock_matrix,  // explicit user-supplied FockMatrix
};

std::string_view to_string(StateKind kind);
StateKind state_kind_from_string(std::string_view name);

/// α → e^{iφ}α + α₀ applied to the closed forms of a catalog state.
struct PhaseModifier {
  double rotation = 0.0;
  cplx displacement{0.0, 0.0};

  bool is_identity() const {
    return rotation == 0.0 && displacement == cplx{0.0, 0.0};
  }
};

/// Catalog entry plus its numeric parameters. Parameter names:
///   fock_element: m, n       thermal / spats: nbar     squeezed: xi
///   photon_vacuum_mix: eta   cauchy_lorentz[_ncl]: t   p_max: (none)
///   fock_mixture: p<k> = weight of |k><k|
struct StateSpec {
  StateKind kind = StateKind::fock_element;
  std::map<std::string, double> params;
  PhaseModifier modifier;

  static StateSpec fock_element(int m, int n);
  static StateSpec vacuum() { return fock_element(0, 0); }
  static StateSpec coherent(cplx alpha0);
  static StateSpec thermal(double nbar);
  static StateSpec squeezed(double xi);
  static StateSpec spats(double nbar);
  static StateSpec photon_vacuum_mix(double eta);
  static StateSpec cauchy_lorentz(double t);
  static StateSpec cauchy_lorentz_ncl(double t);
  static StateSpec p_max();
  static StateSpec fock_mixture(const std::vector<std::pair<int, double>>& weights);

  /// Throws ParameterError when the parameter is missing.
  double param(const std::string& name) const;
};

/// Truncated density-matrix coefficients ρ_{m,n}, m, n ≤ cutoff.
class FockMatrix {
 public:
  FockMatrix() = default;
  /// `truncation_loss` = 1 − trace for truncated physical states, 0 when the
  /// matrix is exact.
  FockMatrix(Eigen::MatrixXcd coefficients, double truncation_loss);

  int cutoff() const { return static_cast<int>(rho_.rows()) - 1; }
  /// ρ_{m,n}; zero outside the stored block.
  cplx operator()(int m, int n) const;
  const Eigen::MatrixXcd& matrix() const { return rho_; }

  double truncation_loss() const { return loss_; }
  /// Loss above 1e-6.
  bool truncation_warning() const { return loss_ > 1e-6; }
  /// Zero truncation loss: the block is the whole operator.
  bool exact() const { return loss_ == 0.0; }

  cplx trace() const { return rho_.trace(); }
  bool is_hermitian(double tol = 1e-12) const;
  /// Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;

 private:
  Eigen::MatrixXcd rho_;
  double loss_ = 0.0;
};

/// Shape of the state's P representation as far as closed forms go.
enum class PForm {
  regular,   // regular function, possibly plus point masses
  atomic,    // point masses only (vacuum, coherent states)
  singular,  // derivatives of δ only; handled through Fock data or generators
};

class State {
 public:
  const StateSpec& spec() const;
  StateKind kind() const { return spec().kind; }
  bool physical() const;
  PForm p_form() const;

  bool has_regular_p() const { return p_form() == PForm::regular; }
  /// Regular part of P at α (modifier applied). Throws NoRegularFormError.
  double regular_p(PhasePoint alpha) const;
  /// Point masses accompanying the regular part, or the whole P for atomic
  /// states (modifier applied).
  const std::vector<Atom>& atoms() const;

  /// True when a Fock matrix can be produced for this state.
  bool has_fock() const;
  /// Fock matrix at the state's default cutoff, built once on first use.
  const FockMatrix& fock() const;
  int default_cutoff() const;

  /// N_t = ∫d²α P_cl(α;t) e^{-|α|²} for cauchy_lorentz_ncl, computed by
  /// radial quadrature at construction.
  double ncl_normalizer() const;

  /// γ of P = exp(γ ∂_α∂_{α*}) δ(α) for thermal (n̄), vacuum (0) and P_max
  /// (−1/2); empty otherwise or when a modifier is active.
  std::optional<double> generator() const;

 private:
  struct Impl;
  explicit State(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  friend State make_state(const StateSpec& spec);
  friend State make_state(FockMatrix fock);
  friend FockMatrix fock_matrix(const State& state, int cutoff);

  std::shared_ptr<Impl> impl_;
};

/// Validates parameters (ParameterError) and attaches every closed form.
State make_state(const StateSpec& spec);
/// State from an explicit, Hermitian, unit-trace Fock matrix.
State make_state(FockMatrix fock);

/// Fock matrix at an explicit cutoff. Cauchy-Lorentz diagonals come from
/// ρ_{k,k} = ∫d²α P(α) e^{-|α|²}|α|^{2k}/k! by quadrature.
FockMatrix fock_matrix(const State& state, int cutoff);

/// Free-function form of State::regular_p.
inline double regular_p(const State& state, PhasePoint alpha) {
  return state.regular_p(alpha);
}

/// Single-photon-added thermal state P at |α|² = r2 (unmodified).
double spats_p(double nbar, double r2);
/// Cauchy-Lorentz family P_cl(α;t) at |α|² = r2.
double cauchy_lorentz_p(double t, double r2);

}  // namespace phasespace
