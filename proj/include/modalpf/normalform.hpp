#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "modalpf/model.hpp"
#include "modalpf/multi_index.hpp"
#include "modalpf/spectrum.hpp"
#include "modalpf/trajectory.hpp"

namespace modalpf {

/// Coefficients keyed by (target mode i, canonical mode tuple).
using CoefficientTable = std::map<TermKey, cplx>;

struct ResonantTerm {
  int target = 0;
  MultiIndex tuple;
  cplx c;       // y-space coefficient retained for the secular term
  cplx defect;  // sum(lambda_tuple) - lambda_target
};

/// Normal-form data up to order N.
///
/// For every order d = 2..N, `C[d]` holds the y-space coefficients of
/// dy_i/dt = lambda_i y_i + sum_T C^i_T y^T (T canonical), and `H[d]` the
/// coefficients of y_i = z_i + sum_T h^i_T z^T with
/// h^i_T = C^i_T / (sum(lambda_T) - lambda_i) for non-resonant keys.
/// Resonant keys are left out of H and listed in `resonant[d]`.
struct NormalFormExpansion {
  Eigen::VectorXcd lambdas;
  int order = 2;
  double tolerance = 0.0;
  /// True when built from the unit-norm references (h-hat).
  bool from_references = false;
  std::map<int, CoefficientTable> C;
  std::map<int, CoefficientTable> H;
  std::map<int, std::vector<ResonantTerm>> resonant;

  int n() const { return static_cast<int>(lambdas.size()); }

  /// h^i_T, or nullopt if absent (zero or resonant).
  std::optional<cplx> h(int target, const MultiIndex& tuple) const;
  const ResonantTerm* find_resonant(int target, const MultiIndex& tuple) const;

  /// Transformation polynomial y = z + H(z), evaluated at complex z.
  Eigen::VectorXcd transform(const Eigen::VectorXcd& z) const;
  /// Only the nonlinear part H(z).
  Eigen::VectorXcd nonlinear_part(const Eigen::VectorXcd& z) const;
};

/// y-space coefficients of order d: the order-d tensor contracted with rows
/// of Psi and columns of Phi, collected on canonical mode tuples. Empty when
/// the system has no order-d terms.
CoefficientTable y_coefficients(const PolynomialSystem& sys, const Eigen::MatrixXcd& Phi,
                                const Eigen::MatrixXcd& Psi, int order);

/// Divides C by the resonance defects; keys with |defect| <= tol are
/// recorded as resonant instead.
NormalFormExpansion h_coefficients(const std::map<int, CoefficientTable>& C,
                                   const Eigen::VectorXcd& lambdas, int order, double tol);

struct ExpansionOptions {
  int order = 2;
  /// Resonance tolerance; default_resonance_tol(lambdas) when unset.
  std::optional<double> tolerance;
};

/// C and H for orders 2..N from the scaled eigenvectors of `basis`.
NormalFormExpansion build_expansion(const PolynomialSystem& sys, const ModalBasis& basis,
                                    const ExpansionOptions& opts = {});

/// Same, from the unit-norm references (h-hat).
NormalFormExpansion build_reference_expansion(const PolynomialSystem& sys, const ModalBasis& basis,
                                              const ExpansionOptions& opts = {});

/// Same, from arbitrary matched eigenvector matrices.
NormalFormExpansion build_expansion(const PolynomialSystem& sys, const Eigen::MatrixXcd& Phi,
                                    const Eigen::MatrixXcd& Psi, const Eigen::VectorXcd& lambdas,
                                    const ExpansionOptions& opts = {});

/// z-space initial condition for x0 = alpha e_k.
struct ZInitial {
  int k = 0;
  cplx alpha;
  Eigen::VectorXcd mu;
  int order = 2;
};

enum class Inversion {
  /// z0 = y0 - H(y0): one substitution, the usual truncation.
  single_pass,
  /// Fixed-point iteration of z = y0 - H(z). Diagnostic only.
  fixed_point,
};

ZInitial z_initial(const NormalFormExpansion& expansion, const Eigen::MatrixXcd& Psi, int k,
                   cplx alpha, Inversion method = Inversion::single_pass);

/// z0 for a general initial state: y0 = Psi x0, then inverted as above.
Eigen::VectorXcd z_from_state(const NormalFormExpansion& expansion, const Eigen::MatrixXcd& Psi,
                              const Eigen::VectorXcd& x0,
                              Inversion method = Inversion::single_pass);

/// Closed-form x(t) (real part) together with the largest imaginary residue.
struct Reconstruction {
  Trajectory trajectory;
  double max_imag = 0.0;
  /// |selected complex component| per sample and state; only filled by
  /// mode_component (the oscillation envelope).
  std::vector<Eigen::VectorXd> envelope;
};

/// x_k(t) = sum_i Phi_ki z_i(t) + non-resonant h terms at exp(sum(lambda) t)
///          + resonant C terms at (1+t) exp(lambda_i t).
Reconstruction reconstruct(const NormalFormExpansion& expansion, const Eigen::MatrixXcd& Phi,
                           const Eigen::VectorXcd& z0, const TimeGrid& grid);

/// Only the exponential at sum(lambda_selector), plus its conjugate partner
/// when that differs. A selector of length 1 is a linear mode.
Reconstruction mode_component(const NormalFormExpansion& expansion, const Eigen::MatrixXcd& Phi,
                              const Eigen::VectorXcd& z0, const MultiIndex& selector,
                              const TimeGrid& grid);

/// Canonical tuple made of the conjugate mates of `tuple`.
MultiIndex conjugate_tuple(const Eigen::VectorXcd& lambdas, const MultiIndex& tuple);

}  // namespace modalpf
