#include "csl/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "csl/errors.hpp"

namespace csl::gaussian {

namespace {

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw DomainError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                      std::to_string(b) + ")");
  }
}

// log det(A)^(1/2): magnitude from the LU factors, branch from the
// eigenvalue arguments (each in (-pi/2, pi/2) when Re A > 0).
Complex log_sqrt_det(const CMatrix& A) {
  if (A.rows() == 0) return {0.0, 0.0};
  Eigen::PartialPivLU<CMatrix> lu(A);
  const CMatrix& LU = lu.matrixLU();
  double log_abs = 0.0;
  double lu_phase = 0.0;
  for (Index i = 0; i < LU.rows(); ++i) {
    log_abs += std::log(std::abs(LU(i, i)));
    lu_phase += std::arg(LU(i, i));
  }
  if (lu.permutationP().determinant() < 0) lu_phase += std::numbers::pi;

  Eigen::ComplexEigenSolver<CMatrix> es(A, /*computeEigenvectors=*/false);
  double target = 0.0;
  for (Index i = 0; i < A.rows(); ++i) target += 0.5 * std::arg(es.eigenvalues()(i));

  // Any representative of lu_phase/2 modulo pi; move it next to target.
  double half = 0.5 * lu_phase;
  half += std::numbers::pi * std::round((target - half) / std::numbers::pi);
  return {0.5 * log_abs, half};
}

std::vector<Index> complement(Index dim, std::span<const Index> vars) {
  std::vector<bool> taken(static_cast<std::size_t>(dim), false);
  for (Index v : vars) {
    if (v < 0 || v >= dim) throw DomainError("integrate_out: variable index out of range");
    if (taken[static_cast<std::size_t>(v)]) throw DomainError("integrate_out: repeated variable index");
    taken[static_cast<std::size_t>(v)] = true;
  }
  std::vector<Index> rest;
  for (Index i = 0; i < dim; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) rest.push_back(i);
  }
  return rest;
}

CMatrix block(const CMatrix& A, std::span<const Index> rows, std::span<const Index> cols) {
  CMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(static_cast<Index>(i), static_cast<Index>(j)) = A(rows[i], cols[j]);
  }
  return out;
}

CVector pick(const CVector& b, std::span<const Index> idx) {
  CVector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = b(idx[i]);
  return out;
}

}  // namespace

ComplexGaussian::ComplexGaussian(Index dim) : A_(CMatrix::Zero(dim, dim)), b_(CVector::Zero(dim)) {}

ComplexGaussian::ComplexGaussian(CMatrix A, CVector b, Complex c) : A_(std::move(A)), b_(std::move(b)), c_(c) {
  if (A_.rows() != A_.cols() || A_.rows() != b_.size()) {
    throw DomainError("ComplexGaussian: A must be square and match the size of b");
  }
  A_ = (0.5 * (A_ + A_.transpose())).eval();
}

Complex ComplexGaussian::log_value(const RVector& z) const {
  require_same_dim(dim(), z.size(), "ComplexGaussian::log_value");
  const CVector zc = z.cast<Complex>();
  // dot() conjugates its left argument, which is real here
  return -0.5 * zc.dot(A_ * zc) + zc.dot(b_) + c_;
}

ComplexGaussian ComplexGaussian::scaled(Complex factor) const {
  ComplexGaussian out = *this;
  out.c_ += std::log(factor);
  return out;
}

ExponentBuilder::ExponentBuilder(Index dim) : Q_(CMatrix::Zero(dim, dim)), l_(CVector::Zero(dim)) {}

ExponentBuilder& ExponentBuilder::add_square(Complex coeff, const LinearForm& u) {
  return add_product(coeff, u, u);
}

ExponentBuilder& ExponentBuilder::add_product(Complex coeff, const LinearForm& u, const LinearForm& v) {
  for (const auto& [i, ui] : u) {
    for (const auto& [j, vj] : v) {
      // coeff * ui * vj * z_i z_j, split symmetrically
      Q_(i, j) += 0.5 * coeff * ui * vj;
      Q_(j, i) += 0.5 * coeff * ui * vj;
    }
  }
  return *this;
}

ExponentBuilder& ExponentBuilder::add_linear(Complex coeff, const LinearForm& u) {
  for (const auto& [i, ui] : u) l_(i) += coeff * ui;
  return *this;
}

ExponentBuilder& ExponentBuilder::add_constant(Complex c) {
  c_ += c;
  return *this;
}

ComplexGaussian ExponentBuilder::build() const { return ComplexGaussian(-2.0 * Q_, l_, c_); }

GaussianSum::GaussianSum(Index dim, std::vector<ComplexGaussian> terms) : dim_(dim) {
  for (auto& t : terms) add(std::move(t));
}

void GaussianSum::add(ComplexGaussian term) {
  require_same_dim(dim_, term.dim(), "GaussianSum::add");
  terms_.push_back(std::move(term));
}

GaussianSum GaussianSum::scaled(Complex factor) const {
  GaussianSum out(dim_);
  for (const auto& t : terms_) out.add(t.scaled(factor));
  return out;
}

ComplexGaussian multiply(const ComplexGaussian& g1, const ComplexGaussian& g2) {
  require_same_dim(g1.dim(), g2.dim(), "multiply");
  return ComplexGaussian(g1.quadratic() + g2.quadratic(), g1.linear() + g2.linear(),
                         g1.constant() + g2.constant());
}

ComplexGaussian integrate_out(const ComplexGaussian& g, std::span<const Index> vars) {
  const Index dim = g.dim();
  const std::vector<Index> rest = complement(dim, vars);
  if (vars.empty()) return g;

  const CMatrix& A = g.quadratic();
  const CMatrix Ass = block(A, vars, vars);
  const CMatrix Asr = block(A, vars, rest);
  const CMatrix Arr = block(A, rest, rest);
  const CVector bs = pick(g.linear(), vars);
  const CVector br = pick(g.linear(), rest);

  const double scale = Ass.norm();
  Eigen::SelfAdjointEigenSolver<RMatrix> re_eig(Ass.real(), Eigen::EigenvaluesOnly);
  const double min_eig = re_eig.eigenvalues().minCoeff();
  if (!(min_eig > 1e-12 * scale)) {
    std::ostringstream os;
    os << "integrate_out: non-integrable direction, real part of the quadratic block has eigenvalue "
       << min_eig << " (threshold " << 1e-12 * scale << ")";
    throw ConvergenceError(os.str(), min_eig);
  }

  Eigen::PartialPivLU<CMatrix> lu(Ass);
  const CVector inv_bs = lu.solve(bs);
  const CMatrix inv_Asr = lu.solve(Asr);

  const CMatrix A_new = Arr - Asr.transpose() * inv_Asr;
  const CVector b_new = br - Asr.transpose() * inv_bs;
  const double n = static_cast<double>(vars.size());
  const Complex c_new = g.constant() + 0.5 * (bs.transpose() * inv_bs)(0) +
                        0.5 * n * std::log(2.0 * std::numbers::pi) - log_sqrt_det(Ass);
  return ComplexGaussian(A_new, b_new, c_new);
}

ComplexGaussian integrate_out(const ComplexGaussian& g, std::initializer_list<Index> vars) {
  return integrate_out(g, std::span<const Index>(vars.begin(), vars.size()));
}

Complex integrate_all(const ComplexGaussian& g) {
  std::vector<Index> all(static_cast<std::size_t>(g.dim()));
  for (Index i = 0; i < g.dim(); ++i) all[static_cast<std::size_t>(i)] = i;
  return std::exp(integrate_out(g, all).constant());
}

ComplexGaussian substitute(const ComplexGaussian& g, const RMatrix& M, const CVector& shift) {
  require_same_dim(g.dim(), M.rows(), "substitute");
  require_same_dim(g.dim(), shift.size(), "substitute");
  const CMatrix Mc = M.cast<Complex>();
  const CMatrix& A = g.quadratic();
  const CVector& b = g.linear();
  const CMatrix A_new = Mc.transpose() * A * Mc;
  const CVector b_new = Mc.transpose() * (b - A * shift);
  const Complex c_new = g.constant() + (b.transpose() * shift)(0) - 0.5 * (shift.transpose() * A * shift)(0);
  return ComplexGaussian(A_new, b_new, c_new);
}

ComplexGaussian substitute(const ComplexGaussian& g, const RMatrix& M) {
  return substitute(g, M, CVector::Zero(g.dim()));
}

ComplexGaussian embed(const ComplexGaussian& g, Index new_dim, std::span<const Index> positions) {
  require_same_dim(g.dim(), static_cast<Index>(positions.size()), "embed");
  RMatrix M = RMatrix::Zero(g.dim(), new_dim);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] < 0 || positions[i] >= new_dim) throw DomainError("embed: position out of range");
    M(static_cast<Index>(i), positions[i]) = 1.0;
  }
  return substitute(g, M);
}

ComplexGaussian embed(const ComplexGaussian& g, Index new_dim, std::initializer_list<Index> positions) {
  return embed(g, new_dim, std::span<const Index>(positions.begin(), positions.size()));
}

Complex sqrt_det(const CMatrix& A) { return std::exp(log_sqrt_det(A)); }

Complex evaluate(const ComplexGaussian& g, const RVector& z) { return g.value(z); }

Complex evaluate(const GaussianSum& s, const RVector& z) {
  require_same_dim(s.dim(), z.size(), "evaluate");
  Complex total{0.0, 0.0};
  for (const auto& t : s.terms()) total += t.value(z);
  return total;
}

}  // namespace csl::gaussian
