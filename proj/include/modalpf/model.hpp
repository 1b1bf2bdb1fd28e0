#pragma once

#include <map>
#include <string>

#include <Eigen/Dense>

#include "modalpf/multi_index.hpp"

namespace modalpf {

/// Sparse symmetric coefficient table for one Taylor order: the value at
/// {k, m} is the total coefficient of the monomial prod_j x_{m_j} in
/// equation k.
using SparseTensor = std::map<TermKey, double>;

/// Polynomial vector field dx/dt = A x + sum_d f^(d)(x) about an equilibrium
/// at the origin. Immutable once built.
class PolynomialSystem {
 public:
  /// Linear system. Throws ParseError unless A is square and finite.
  explicit PolynomialSystem(Eigen::MatrixXd A);

  /// Adds coefficient `coeff` to monomial `index` (any order of state indices,
  /// 0-based) in equation `k`. Non-canonical indices fold onto the canonical
  /// key by summation.
  PolynomialSystem& add_term(int k, MultiIndex index, double coeff);

  int n() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixXd& A() const { return A_; }

  /// Highest order with a nonempty table, or 1.
  int max_order() const;

  /// Table for order d (empty if absent).
  const SparseTensor& tensor(int order) const;
  const std::map<int, SparseTensor>& tensors() const { return tensors_; }

  /// A x plus every tensor monomial.
  Eigen::VectorXd evaluate_rhs(const Eigen::VectorXd& x) const;

  /// Only the order >= 2 part of the right-hand side.
  Eigen::VectorXd evaluate_nonlinear(const Eigen::VectorXd& x) const;

  /// Same field with a different linear part (used for detuning studies).
  PolynomialSystem with_linear_part(Eigen::MatrixXd A) const;

 private:
  Eigen::MatrixXd A_;
  std::map<int, SparseTensor> tensors_;
};

/// Parses the model JSON document (1-based indices).
PolynomialSystem parse_model(const std::string& text);
PolynomialSystem load_model(const std::string& path);

/// Writes the canonical JSON form; parse_model(serialize_model(s)) == s.
std::string serialize_model(const PolynomialSystem& sys);

bool operator==(const PolynomialSystem& a, const PolynomialSystem& b);

}  // namespace modalpf
