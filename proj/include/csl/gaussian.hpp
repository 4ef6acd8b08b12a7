#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace csl::gaussian {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// exp(-1/2 z^T A z + b^T z + c) over `dim` real variables, with A complex
/// symmetric. The constant c is a complex logarithm, so prefactors are
/// carried as log magnitudes plus phase.
class ComplexGaussian {
 public:
  /// The unit function (A = 0, b = 0, c = 0).
  explicit ComplexGaussian(Index dim = 0);
  /// A is symmetrized on construction.
  ComplexGaussian(CMatrix A, CVector b, Complex c);

  Index dim() const { return b_.size(); }
  const CMatrix& quadratic() const { return A_; }
  const CVector& linear() const { return b_; }
  Complex constant() const { return c_; }

  /// The exponent -1/2 z^T A z + b^T z + c.
  Complex log_value(const RVector& z) const;
  Complex value(const RVector& z) const { return std::exp(log_value(z)); }

  /// Multiplies by a constant factor.
  ComplexGaussian scaled(Complex factor) const;

 private:
  CMatrix A_;
  CVector b_;
  Complex c_{0.0, 0.0};
};

/// Sparse real linear form: sum of coefficient * z[index].
using LinearForm = std::vector<std::pair<Index, double>>;

/// Accumulates an exponent written as a polynomial of degree two,
/// E(z) = sum coeff * (u.z)(v.z) + sum l.z + c, and converts it into a
/// ComplexGaussian with value exp(E(z)).
class ExponentBuilder {
 public:
  explicit ExponentBuilder(Index dim);

  ExponentBuilder& add_square(Complex coeff, const LinearForm& u);
  ExponentBuilder& add_product(Complex coeff, const LinearForm& u, const LinearForm& v);
  ExponentBuilder& add_linear(Complex coeff, const LinearForm& u);
  ExponentBuilder& add_constant(Complex c);

  ComplexGaussian build() const;

 private:
  CMatrix Q_;  // E = z^T Q z + l^T z + c, Q symmetric
  CVector l_;
  Complex c_{0.0, 0.0};
};

/// Ordered list of terms of equal dimension. Empty sum is the zero function.
class GaussianSum {
 public:
  explicit GaussianSum(Index dim = 0) : dim_(dim) {}
  GaussianSum(Index dim, std::vector<ComplexGaussian> terms);

  Index dim() const { return dim_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<ComplexGaussian>& terms() const { return terms_; }
  const ComplexGaussian& operator[](std::size_t i) const { return terms_[i]; }

  void add(ComplexGaussian term);
  GaussianSum scaled(Complex factor) const;

 private:
  Index dim_;
  std::vector<ComplexGaussian> terms_;
};

/// Pointwise product; (A, b, c) add componentwise.
ComplexGaussian multiply(const ComplexGaussian& g1, const ComplexGaussian& g2);

/// Analytic integral over the variables in `vars` (each in [0, dim)). The
/// result is a Gaussian over the remaining variables, kept in their
/// original relative order. Throws ConvergenceError when the real part of
/// the quadratic block over `vars` is not positive definite.
ComplexGaussian integrate_out(const ComplexGaussian& g, std::span<const Index> vars);
ComplexGaussian integrate_out(const ComplexGaussian& g, std::initializer_list<Index> vars);

/// Integral over every variable.
Complex integrate_all(const ComplexGaussian& g);

/// Affine change of variables: returns w -> g(M w + shift), M is dim x n.
ComplexGaussian substitute(const ComplexGaussian& g, const RMatrix& M, const CVector& shift);
ComplexGaussian substitute(const ComplexGaussian& g, const RMatrix& M);

/// Re-embeds g into `new_dim` variables, variable i of g becoming variable
/// positions[i]. The result is constant along the other variables.
ComplexGaussian embed(const ComplexGaussian& g, Index new_dim, std::span<const Index> positions);
ComplexGaussian embed(const ComplexGaussian& g, Index new_dim, std::initializer_list<Index> positions);

/// det(A)^(1/2) on the branch obtained by continuation from the identity
/// through matrices with positive definite real part: the product of the
/// principal square roots of the eigenvalues.
Complex sqrt_det(const CMatrix& A);

Complex evaluate(const ComplexGaussian& g, const RVector& z);
Complex evaluate(const GaussianSum& s, const RVector& z);

/// Applies f term by term.
template <class F>
GaussianSum transform_terms(const GaussianSum& s, Index new_dim, F&& f) {
  GaussianSum out(new_dim);
  for (const auto& t : s.terms()) out.add(f(t));
  return out;
}

}  // namespace csl::gaussian
