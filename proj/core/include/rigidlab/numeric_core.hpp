#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace rigidlab {

using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

struct Tolerances {
  /// Eigenvalues with |λ| ≤ zero_eig_rel · max|λ| count as zero.
  double zero_eig_rel = 1e-8;
  /// Central-difference step, scaled per coordinate by max(1, |x_i|).
  double fd_step = 1e-6;
  /// Residual bound for algebraic identities.
  double identity_tol = 1e-9;

  void validate() const;
};

/// Real symmetric matrix. The upper triangle of the source is authoritative:
/// construction mirrors it into the lower triangle.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int order);
  explicit SymMatrix(const MatX& source);

  /// Builds from a nearly symmetric matrix as (M + Mᵀ)/2.
  static SymMatrix symmetrized(const MatX& source);

  int order() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double value);
  void add(int i, int j, double value);

  const MatX& dense() const { return m_; }
  double max_abs() const;
  double quadratic_form(const VecX& x) const { return x.dot(m_ * x); }
  double bilinear_form(const VecX& x, const VecX& y) const { return x.dot(m_ * y); }
  VecX operator*(const VecX& x) const { return m_ * x; }
  SymMatrix scaled(double factor) const;

 private:
  MatX m_;
};

struct EigenPairs {
  VecX values;   // ascending
  MatX vectors;  // column k pairs with values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations. Converges for every symmetric input; intended for
/// orders up to a few hundred.
EigenPairs jacobi_eigen(const SymMatrix& m);

struct SpectrumSummary {
  std::vector<double> eigenvalues;  // ascending
  MatX eigenvectors;                // columns aligned with eigenvalues
  int n_pos = 0;
  int n_zero = 0;
  int n_neg = 0;
  int corank = 0;
  double threshold = 0.0;
  MatX kernel_basis;  // orthonormal columns, one per zero eigenvalue

  int order() const { return static_cast<int>(eigenvalues.size()); }
};

/// Counts eigenvalues against τ = zero_eig_rel·max|λ| (τ = zero_eig_rel when
/// the spectrum is identically zero).
SpectrumSummary corank_signature(const SymMatrix& m, const Tolerances& tol);
SpectrumSummary eigen_sym(const SymMatrix& m);

/// Orthonormal basis of the column span (modified Gram-Schmidt with
/// re-orthogonalization). Columns below `rank_tol` after projection are dropped.
MatX orthonormalize(const MatX& columns, double rank_tol = 1e-12);

/// Largest principal angle between two subspaces given by spanning columns.
/// Returns π/2 if the dimensions differ.
double subspace_angle(const MatX& a, const MatX& b);

/// Projects `x` onto the orthogonal complement of the columns of `basis`
/// (which must be orthonormal).
VecX project_out(const VecX& x, const MatX& basis);

using ScalarField = std::function<double(const VecX&)>;
using VectorField = std::function<VecX(const VecX&)>;

VecX fd_gradient(const ScalarField& f, const VecX& x, const Tolerances& tol);

/// Second differences of function values. The step is fd_step^(2/3)·scale,
/// which balances truncation and cancellation for value-only Hessians.
SymMatrix fd_hessian(const ScalarField& f, const VecX& x, const Tolerances& tol);

/// Central-difference Jacobian of a vector field, column j = ∂g/∂x_j.
MatX fd_jacobian(const VectorField& g, const VecX& x, const Tolerances& tol);

/// Central-difference directional derivative d/dt g(x + t·dir) at t = 0.
VecX fd_directional(const VectorField& g, const VecX& x, const VecX& dir, double step);

/// Relative max-entry deviation ‖a − b‖_max / max(‖a‖_max, floor).
double rel_max_deviation(const MatX& a, const MatX& b, double floor = 1e-300);

}  // namespace rigidlab
