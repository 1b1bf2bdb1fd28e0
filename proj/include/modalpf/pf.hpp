#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modalpf/normalform.hpp"
#include "modalpf/spectrum.hpp"

namespace modalpf {

/// P = Phi o Psi^T (row k = state, column i = mode).
Eigen::MatrixXcd linear_pf(const Eigen::MatrixXcd& Phi, const Eigen::MatrixXcd& Psi);

struct NonlinearPF {
  cplx value;
  /// Terms of the sum that were skipped because (tuple; target) is resonant.
  std::vector<ResonantTerm> skipped;
};

/// Nonlinear participation factor of state k (0-based) in the mode given by
/// `tuple` (length 1: linear mode, length M >= 2: combination mode) for the
/// perturbation x0 = alpha e_k:
///   M = 1:  Phi_ki mu_ik
///   M >= 2: sum_i Phi_ki h^i_tuple prod_{l in tuple} mu_lk
NonlinearPF nonlinear_pf(const NormalFormExpansion& expansion, const Eigen::MatrixXcd& Phi,
                         const Eigen::MatrixXcd& Psi, int k, const MultiIndex& tuple, cplx alpha);

/// Same quantity written purely in terms of the references, the h-hat
/// expansion and a theta-vector. Equals nonlinear_pf for every (sigma, xi)
/// with xi_i sigma_i cos_delta_i = theta_i.
NonlinearPF nonlinear_pf_theta(const ModalBasis& references,
                               const NormalFormExpansion& reference_expansion,
                               const Eigen::VectorXcd& theta, int k, const MultiIndex& tuple,
                               cplx alpha);

/// target - nonlinear_pf_theta(theta, ...).
cplx theta_residual(const Eigen::VectorXcd& theta, cplx target, const ModalBasis& references,
                    const NormalFormExpansion& reference_expansion, int k, const MultiIndex& tuple,
                    cplx alpha);

/// Divides by the largest-magnitude entry (first on ties); that entry becomes
/// exactly 1. Throws ParseError on an all-zero vector.
Eigen::VectorXcd normalize_pf(const Eigen::VectorXcd& values);

/// One table entry of a PF report.
struct PFEntry {
  int state = 0;  // 0-based
  MultiIndex tuple;
  cplx value;
};

struct PFReport {
  Eigen::MatrixXcd linear;
  std::vector<PFEntry> nonlinear;
  Eigen::VectorXcd alpha;
  std::vector<ResonantTerm> skipped_resonant;
  std::string scheme;  // "I", "II", "III" or "theta"
  Eigen::VectorXcd theta;
  bool normalized = false;
};

struct PFRequest {
  bool include_linear = true;
  /// Mode tuples (0-based) to evaluate for every state.
  std::vector<MultiIndex> tuples;
  /// Per-state perturbation amplitude; empty means all ones.
  Eigen::VectorXcd alpha;
  /// Normalize each column / tuple over states.
  bool normalize = false;
};

PFReport build_pf_report(const NormalFormExpansion& expansion, const ModalBasis& basis,
                         const PFRequest& request, const std::string& scheme_label);

/// `state,mode_tuple,re,im,magnitude[,phase]`, 1-based indices.
std::string pf_csv(const PFReport& report, bool with_phase = false);
std::string pf_json(const PFReport& report);

}  // namespace modalpf
