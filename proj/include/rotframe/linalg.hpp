#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace rotframe {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;

/// Dense complex matrix over an arbitrary real scalar.
template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when a numerical self-check fails (unitarity, trace preservation,
/// invariance residual above threshold).
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

template <typename A, typename B>
auto commutator(const Eigen::MatrixBase<A> &a, const Eigen::MatrixBase<B> &b) {
  using M = Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  M out = a * b;
  out.noalias() -= b * a;
  return out;
}

template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A> &a, const Eigen::MatrixBase<B> &b) {
  using M = Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// tr_B of an operator on A (x) B, with the A index major.
template <typename D>
auto partial_trace_second(const Eigen::MatrixBase<D> &m, Index dim_a, Index dim_b) {
  using M = Eigen::Matrix<typename D::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  M out = M::Zero(dim_a, dim_a);
  for (Index i = 0; i < dim_a; ++i)
    for (Index j = 0; j < dim_a; ++j)
      for (Index b = 0; b < dim_b; ++b) out(i, j) += m(i * dim_b + b, j * dim_b + b);
  return out;
}

/// tr_A of an operator on A (x) B, with the A index major.
template <typename D>
auto partial_trace_first(const Eigen::MatrixBase<D> &m, Index dim_a, Index dim_b) {
  using M = Eigen::Matrix<typename D::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  M out = M::Zero(dim_b, dim_b);
  for (Index a = 0; a < dim_a; ++a) out += m.block(a * dim_b, a * dim_b, dim_b, dim_b);
  return out;
}

/// exp(i t H) for Hermitian H.
template <typename D>
ComplexMatrix<typename D::RealScalar> hermitian_exp(const Eigen::MatrixBase<D> &h, typename D::RealScalar t) {
  using Real = typename D::RealScalar;
  using M = ComplexMatrix<Real>;
  Eigen::SelfAdjointEigenSolver<M> es(M(h.template cast<std::complex<Real>>()));
  const auto &v = es.eigenvectors();
  Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> phases(v.cols());
  for (Index k = 0; k < v.cols(); ++k)
    phases(k) = std::exp(std::complex<Real>(0, t * es.eigenvalues()(k)));
  return v * phases.asDiagonal() * v.adjoint();
}

template <typename D>
typename D::RealScalar hermiticity_residual(const Eigen::MatrixBase<D> &m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename D>
typename D::RealScalar unitarity_residual(const Eigen::MatrixBase<D> &u) {
  using M = Eigen::Matrix<typename D::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (u.size() == 0) return 0;
  return (u.adjoint() * u - M::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

/// Largest singular value.
template <typename D>
typename D::RealScalar spectral_norm(const Eigen::MatrixBase<D> &m) {
  if (m.size() == 0) return 0;
  using M = Eigen::Matrix<typename D::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<M> svd(M(m), Eigen::NoQRPreconditioner);
  return svd.singularValues()(0);
}

/// Sum of |eigenvalues| of a Hermitian matrix.
template <typename D>
typename D::RealScalar hermitian_trace_norm(const Eigen::MatrixBase<D> &m) {
  using M = Eigen::Matrix<typename D::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<M> es(M(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

/// Operator-norm distance between two matrices after removing the global
/// phase that best aligns b with a (phase from tr(b^dagger a)).
template <typename A, typename B>
double phase_aligned_distance(const Eigen::MatrixBase<A> &a, const Eigen::MatrixBase<B> &b) {
  const cplx overlap = (b.adjoint() * a).trace();
  const cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1, 0);
  return spectral_norm(cmat(a - phase * b));
}

} // namespace rotframe
