#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>

#include "modalpf/koopman.hpp"
#include "modalpf/normalform.hpp"
#include "modalpf/sampling.hpp"
#include "modalpf/spectrum.hpp"

namespace modalpf {

/// Monte Carlo estimate of a PF variant.
struct Estimate {
  std::complex<double> value;
  /// Standard error of the complex mean: sqrt((var_re + var_im) / admitted).
  double std_error = 0.0;
  std::size_t admitted = 0;
  std::size_t rejected = 0;
  std::uint64_t seed = 0;

  double rejection_rate() const;
};

/// Probability mode-in-state PF: E{(Psi_i x0) Phi_ki / x_k0}.
Estimate pmispf(const ModalBasis& basis, const InitialDistribution& dist, int i, int k);

/// Probability state-in-mode PF. Real lambda_i: E{Psi_ik x_k0 / z_i0};
/// complex lambda_i: E{(Psi_ik + Psi_ik^*) x_k0 / (z_i0 + z_i0^*)}.
/// z0 = Psi x0 when `expansion` is null, else the normal-form corrected value.
Estimate psimpf(const ModalBasis& basis, const NormalFormExpansion* expansion,
                const InitialDistribution& dist, int i, int k);

/// Nonlinear PMISPF: E{z_i0 Phi_ki / x_k(0)} with corrected z0.
Estimate nonlinear_pmispf(const ModalBasis& basis, const NormalFormExpansion& expansion,
                          const InitialDistribution& dist, int i, int k);

/// Modified PSIMPF, E{2 Re((Psi_ik x_k0)^* z_i0)} / (2 E{|z_i0|^2}), as a
/// ratio of two means over the same samples. The value is real.
Estimate modified_psimpf(const ModalBasis& basis, const NormalFormExpansion* expansion,
                         const InitialDistribution& dist, int i, int k);

/// Data-driven PF: E{(u_i gamma0) v_ki / gamma_k0} on a fitted Koopman basis.
Estimate datadriven_pf(const KoopmanBasis& koopman, const InitialDistribution& dist, int i, int k);

/// `{"estimate":[re,im],"stderr":..,"admitted":..,"rejected":..,"seed":..}`.
std::string estimate_json(const Estimate& e, const std::string& which, int i, int k);

}  // namespace modalpf
