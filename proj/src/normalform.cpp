#include "modalpf/normalform.hpp"

#include <cmath>
#include <sstream>

#include "modalpf/errors.hpp"

namespace modalpf {

namespace {

// Calls fn(t) for every ordered tuple in [0, n)^order.
template <typename Fn>
void for_each_ordered(int n, int order, Fn&& fn) {
  MultiIndex t(static_cast<std::size_t>(order), 0);
  while (true) {
    fn(t);
    int pos = order - 1;
    while (pos >= 0 && ++t[static_cast<std::size_t>(pos)] == n) {
      t[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) return;
  }
}

cplx monomial(const Eigen::VectorXcd& z, const MultiIndex& tuple) {
  cplx p = 1.0;
  for (int v : tuple) p *= z[v];
  return p;
}

cplx lambda_sum(const Eigen::VectorXcd& lambdas, const MultiIndex& tuple) {
  cplx s = 0.0;
  for (int v : tuple) s += lambdas[v];
  return s;
}

int mate_of(const Eigen::VectorXcd& lambdas, int i) {
  if (lambdas[i].imag() == 0.0) return i;
  const cplx target = std::conj(lambdas[i]);
  int best = i;
  double best_dist = std::abs(lambdas[i] - target);
  for (int j = 0; j < lambdas.size(); ++j) {
    const double d = std::abs(lambdas[j] - target);
    if (d < best_dist) {
      best = j;
      best_dist = d;
    }
  }
  return best;
}

void check_tuple(const MultiIndex& tuple, int n) {
  if (tuple.empty()) throw ParseError("empty mode tuple");
  for (int v : tuple) {
    if (v < 0 || v >= n) throw ParseError("mode index out of range");
  }
}

}  // namespace

std::optional<cplx> NormalFormExpansion::h(int target, const MultiIndex& tuple) const {
  auto table = H.find(static_cast<int>(tuple.size()));
  if (table == H.end()) return std::nullopt;
  auto it = table->second.find(TermKey{target, tuple});
  if (it == table->second.end()) return std::nullopt;
  return it->second;
}

const ResonantTerm* NormalFormExpansion::find_resonant(int target, const MultiIndex& tuple) const {
  auto list = resonant.find(static_cast<int>(tuple.size()));
  if (list == resonant.end()) return nullptr;
  for (const auto& r : list->second) {
    if (r.target == target && r.tuple == tuple) return &r;
  }
  return nullptr;
}

Eigen::VectorXcd NormalFormExpansion::nonlinear_part(const Eigen::VectorXcd& z) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n());
  for (const auto& [order, table] : H) {
    for (const auto& [key, h] : table) out[key.row] += h * monomial(z, key.index);
  }
  return out;
}

Eigen::VectorXcd NormalFormExpansion::transform(const Eigen::VectorXcd& z) const {
  return z + nonlinear_part(z);
}

CoefficientTable y_coefficients(const PolynomialSystem& sys, const Eigen::MatrixXcd& Phi,
                                const Eigen::MatrixXcd& Psi, int order) {
  const int n = sys.n();
  CoefficientTable C;
  const SparseTensor& tensor = sys.tensor(order);
  if (tensor.empty()) return C;

  // G[tuple](j): coefficient of y^tuple in equation j of g(Phi y).
  std::map<MultiIndex, Eigen::VectorXcd> G;
  for (const auto& [key, a] : tensor) {
    for_each_ordered(n, order, [&](const MultiIndex& t) {
      cplx v = a;
      for (std::size_t l = 0; l < t.size(); ++l) v *= Phi(key.index[l], t[l]);
      if (v == cplx(0.0)) return;
      auto [it, inserted] = G.try_emplace(canonical(t), Eigen::VectorXcd::Zero(n));
      it->second[key.row] += v;
    });
  }
  for (const auto& [tuple, g] : G) {
    const Eigen::VectorXcd projected = Psi * g;
    for (int i = 0; i < n; ++i) C[TermKey{i, tuple}] = projected[i];
  }
  return C;
}

NormalFormExpansion h_coefficients(const std::map<int, CoefficientTable>& C,
                                   const Eigen::VectorXcd& lambdas, int order, double tol) {
  if (order < 1) throw ParseError("normal form order must be >= 1");
  NormalFormExpansion e;
  e.lambdas = lambdas;
  e.order = order;
  e.tolerance = tol;
  for (const auto& [d, table] : C) {
    if (d < 2 || d > order) continue;
    auto& H = e.H[d];
    auto& res = e.resonant[d];
    e.C[d] = table;
    for (const auto& [key, c] : table) {
      const cplx defect = lambda_sum(lambdas, key.index) - lambdas[key.row];
      if (std::abs(defect) <= tol) {
        res.push_back({key.row, key.index, c, defect});
      } else {
        H[key] = c / defect;
      }
    }
  }
  return e;
}

NormalFormExpansion build_expansion(const PolynomialSystem& sys, const Eigen::MatrixXcd& Phi,
                                    const Eigen::MatrixXcd& Psi, const Eigen::VectorXcd& lambdas,
                                    const ExpansionOptions& opts) {
  std::map<int, CoefficientTable> C;
  for (int d = 2; d <= opts.order; ++d) C[d] = y_coefficients(sys, Phi, Psi, d);
  const double tol = opts.tolerance.value_or(default_resonance_tol(lambdas));
  return h_coefficients(C, lambdas, opts.order, tol);
}

NormalFormExpansion build_expansion(const PolynomialSystem& sys, const ModalBasis& basis,
                                    const ExpansionOptions& opts) {
  return build_expansion(sys, basis.Phi(), basis.Psi(), basis.eigenvalues, opts);
}

NormalFormExpansion build_reference_expansion(const PolynomialSystem& sys, const ModalBasis& basis,
                                              const ExpansionOptions& opts) {
  NormalFormExpansion e = build_expansion(sys, basis.phi_hat, basis.psi_hat, basis.eigenvalues, opts);
  e.from_references = true;
  return e;
}

Eigen::VectorXcd z_from_state(const NormalFormExpansion& expansion, const Eigen::MatrixXcd& Psi,
                              const Eigen::VectorXcd& x0, Inversion method) {
  const Eigen::VectorXcd y0 = Psi * x0;
  Eigen::VectorXcd z = y0 - expansion.nonlinear_part(y0);
  if (method == Inversion::fixed_point) {
    const double scale = std::max(y0.norm(), 1e-300);
    for (int iter = 0; iter < 200; ++iter) {
      const Eigen::VectorXcd next = y0 - expansion.nonlinear_part(z);
      const double change = (next - z).norm();
      z = next;
      if (change <= 1e-15 * scale) break;
    }
  }
  return z;
}

ZInitial z_initial(const NormalFormExpansion& expansion, const Eigen::MatrixXcd& Psi, int k,
                   cplx alpha, Inversion method) {
  const int n = expansion.n();
  if (k < 0 || k >= n) throw ParseError("perturbed state index out of range");
  Eigen::VectorXcd x0 = Eigen::VectorXcd::Zero(n);
  x0[k] = alpha;
  return ZInitial{k, alpha, z_from_state(expansion, Psi, x0, method), expansion.order};
}

Reconstruction reconstruct(const NormalFormExpansion& expansion, const Eigen::MatrixXcd& Phi,
                           const Eigen::VectorXcd& z0, const TimeGrid& grid) {
  if (grid.count == 0) throw ParseError("empty time grid");
  const int n = expansion.n();
  const auto& lambdas = expansion.lambdas;

  // Secular terms: Phi_i C^i_T z0^T (1 + t) exp(lambda_i t).
  Eigen::VectorXcd secular = Eigen::VectorXcd::Zero(n);
  for (const auto& [order, list] : expansion.resonant) {
    for (const auto& r : list) secular[r.target] += r.c * monomial(z0, r.tuple);
  }

  Reconstruction out;
  out.trajectory.t0 = grid.t0;
  out.trajectory.dt = grid.dt;
  out.trajectory.provenance = Provenance::reconstructed;
  out.trajectory.samples.reserve(grid.count);
  for (std::size_t j = 0; j < grid.count; ++j) {
    const double t = grid.at(j);
    Eigen::VectorXcd z(n);
    Eigen::VectorXcd sec(n);
    for (int i = 0; i < n; ++i) {
      const cplx e = std::exp(lambdas[i] * t);
      z[i] = z0[i] * e;
      sec[i] = secular[i] * (1.0 + t) * e;
    }
    const Eigen::VectorXcd x = Phi * (expansion.transform(z) + sec);
    out.max_imag = std::max(out.max_imag, x.imag().cwiseAbs().maxCoeff());
    out.trajectory.samples.push_back(x.real());
  }
  return out;
}

MultiIndex conjugate_tuple(const Eigen::VectorXcd& lambdas, const MultiIndex& tuple) {
  MultiIndex out;
  out.reserve(tuple.size());
  for (int v : tuple) out.push_back(mate_of(lambdas, v));
  return canonical(std::move(out));
}

Reconstruction mode_component(const NormalFormExpansion& expansion, const Eigen::MatrixXcd& Phi,
                              const Eigen::VectorXcd& z0, const MultiIndex& selector,
                              const TimeGrid& grid) {
  if (grid.count == 0) throw ParseError("empty time grid");
  const int n = expansion.n();
  check_tuple(selector, n);
  const MultiIndex sel = canonical(selector);
  const MultiIndex partner = conjugate_tuple(expansion.lambdas, sel);

  // Amplitude vector (over states) of exp(sum(lambda_T) t) for tuple T.
  auto amplitude = [&](const MultiIndex& T) -> Eigen::VectorXcd {
    if (T.size() == 1) return Phi.col(T[0]) * z0[T[0]];
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(n);
    const cplx zprod = monomial(z0, T);
    for (int i = 0; i < n; ++i) {
      if (const ResonantTerm* r = expansion.find_resonant(i, T); r && r->c != cplx(0.0)) {
        std::ostringstream msg;
        msg << "combination (" << format_one_based(T, ',') << ") is resonant with mode " << i + 1
            << ": defect " << std::abs(r->defect) << ", C = " << r->c.real() << "+"
            << r->c.imag() << "j";
        throw ResonantComponentError(msg.str());
      }
      if (auto h = expansion.h(i, T)) amp += Phi.col(i) * (*h * zprod);
    }
    return amp;
  };

  const Eigen::VectorXcd amp_sel = amplitude(sel);
  const cplx rate_sel = lambda_sum(expansion.lambdas, sel);
  Eigen::VectorXcd amp_partner;
  cplx rate_partner = 0.0;
  const bool with_partner = partner != sel;
  if (with_partner) {
    amp_partner = amplitude(partner);
    rate_partner = lambda_sum(expansion.lambdas, partner);
  }

  Reconstruction out;
  out.trajectory.t0 = grid.t0;
  out.trajectory.dt = grid.dt;
  out.trajectory.provenance = Provenance::mode_component;
  out.trajectory.samples.reserve(grid.count);
  out.envelope.reserve(grid.count);
  for (std::size_t j = 0; j < grid.count; ++j) {
    const double t = grid.at(j);
    const Eigen::VectorXcd own = amp_sel * std::exp(rate_sel * t);
    Eigen::VectorXcd x = own;
    if (with_partner) x += amp_partner * std::exp(rate_partner * t);
    out.max_imag = std::max(out.max_imag, x.imag().cwiseAbs().maxCoeff());
    out.trajectory.samples.push_back(x.real());
    out.envelope.push_back(own.cwiseAbs());
  }
  return out;
}

}  // namespace modalpf
