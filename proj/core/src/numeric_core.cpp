#include "rigidlab/numeric_core.hpp"

#include "rigidlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rigidlab {

void Tolerances::validate() const {
  if (!(zero_eig_rel > 0.0) || !(fd_step > 0.0) || !(identity_tol > 0.0)) {
    throw Error(Errc::InvalidInput, "tolerances must be strictly positive");
  }
}

SymMatrix::SymMatrix(int order) : m_(MatX::Zero(order, order)) {
  if (order < 1) throw Error(Errc::InvalidMatrix, "order must be >= 1");
}

SymMatrix::SymMatrix(const MatX& source) {
  if (source.rows() != source.cols() || source.rows() < 1) {
    throw Error(Errc::InvalidMatrix, "matrix must be square with order >= 1");
  }
  m_ = source.triangularView<Eigen::Upper>();
  m_.triangularView<Eigen::StrictlyLower>() = m_.transpose().triangularView<Eigen::StrictlyLower>();
}

SymMatrix SymMatrix::symmetrized(const MatX& source) {
  if (source.rows() != source.cols()) throw Error(Errc::InvalidMatrix, "matrix must be square");
  return SymMatrix(MatX(0.5 * (source + source.transpose())));
}

void SymMatrix::set(int i, int j, double value) {
  m_(i, j) = value;
  m_(j, i) = value;
}

void SymMatrix::add(int i, int j, double value) {
  m_(i, j) += value;
  if (i != j) m_(j, i) += value;
}

double SymMatrix::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

SymMatrix SymMatrix::scaled(double factor) const { return SymMatrix(MatX(factor * m_)); }

EigenPairs jacobi_eigen(const SymMatrix& m) {
  const int n = m.order();
  MatX a = m.dense();
  if (!a.allFinite()) throw Error(Errc::InvalidMatrix, "non-finite entries");

  MatX v = MatX::Identity(n, n);
  const double scale = a.norm();
  int sweep = 0;
  constexpr int kMaxSweeps = 100;

  auto off_norm = [&a, n] {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
    return std::sqrt(2.0 * s);
  };

  while (sweep < kMaxSweeps && off_norm() > 1e-15 * scale) {
    ++sweep;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rutishauser's form of the rotation: t = tan θ with |θ| ≤ π/4.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
          a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
        }
        for (int r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&a](int x, int y) { return a(x, x) < a(y, y); });

  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  out.sweeps = sweep;
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

SpectrumSummary corank_signature(const SymMatrix& m, const Tolerances& tol) {
  tol.validate();
  const EigenPairs pairs = jacobi_eigen(m);
  const int n = m.order();

  SpectrumSummary s;
  s.eigenvalues.assign(pairs.values.data(), pairs.values.data() + n);
  s.eigenvectors = pairs.vectors;
  const double max_abs = pairs.values.cwiseAbs().maxCoeff();
  s.threshold = max_abs > 0.0 ? tol.zero_eig_rel * max_abs : tol.zero_eig_rel;

  std::vector<int> zero_cols;
  for (int k = 0; k < n; ++k) {
    const double lambda = pairs.values[k];
    if (std::abs(lambda) <= s.threshold) {
      ++s.n_zero;
      zero_cols.push_back(k);
    } else if (lambda > 0) {
      ++s.n_pos;
    } else {
      ++s.n_neg;
    }
  }
  s.corank = s.n_zero;
  s.kernel_basis.resize(n, static_cast<int>(zero_cols.size()));
  for (size_t c = 0; c < zero_cols.size(); ++c) s.kernel_basis.col(c) = pairs.vectors.col(zero_cols[c]);
  return s;
}

SpectrumSummary eigen_sym(const SymMatrix& m) { return corank_signature(m, Tolerances{}); }

MatX orthonormalize(const MatX& columns, double rank_tol) {
  std::vector<VecX> kept;
  for (int c = 0; c < columns.cols(); ++c) {
    VecX v = columns.col(c);
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const VecX& u : kept) v -= u.dot(v) * u;
    const double norm = v.norm();
    if (norm <= rank_tol * std::max(1.0, norm0)) continue;
    kept.push_back(v / norm);
  }
  MatX q(columns.rows(), static_cast<int>(kept.size()));
  for (size_t c = 0; c < kept.size(); ++c) q.col(c) = kept[c];
  return q;
}

double subspace_angle(const MatX& a, const MatX& b) {
  const MatX qa = orthonormalize(a);
  const MatX qb = orthonormalize(b);
  if (qa.cols() != qb.cols()) return M_PI / 2;
  if (qa.cols() == 0) return 0.0;
  // sin of the largest principal angle = ‖(I − Q_b Q_bᵀ) Q_a‖₂.
  const MatX residual = qa - qb * (qb.transpose() * qa);
  const MatX gram = residual.transpose() * residual;
  Eigen::SelfAdjointEigenSolver<MatX> es(gram, Eigen::EigenvaluesOnly);
  const double sin2 = std::max(0.0, es.eigenvalues().maxCoeff());
  return std::asin(std::min(1.0, std::sqrt(sin2)));
}

VecX project_out(const VecX& x, const MatX& basis) {
  VecX y = x;
  for (int c = 0; c < basis.cols(); ++c) y -= basis.col(c).dot(y) * basis.col(c);
  return y;
}

namespace {

double step_for(double xi, double base) { return base * std::max(1.0, std::abs(xi)); }

}  // namespace

VecX fd_gradient(const ScalarField& f, const VecX& x, const Tolerances& tol) {
  VecX g(x.size());
  VecX xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = step_for(x[i], tol.fd_step);
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

SymMatrix fd_hessian(const ScalarField& f, const VecX& x, const Tolerances& tol) {
  const int n = static_cast<int>(x.size());
  const double base = std::cbrt(tol.fd_step * tol.fd_step);
  MatX h(n, n);
  VecX xp = x;
  const double f0 = f(x);
  for (int i = 0; i < n; ++i) {
    const double hi = step_for(x[i], base);
    xp[i] = x[i] + hi;
    const double fp = f(xp);
    xp[i] = x[i] - hi;
    const double fm = f(xp);
    xp[i] = x[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (int j = i + 1; j < n; ++j) {
      const double hj = step_for(x[j], base);
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          xp[i] = x[i] + si * hi;
          xp[j] = x[j] + sj * hj;
          acc += si * sj * f(xp);
        }
      }
      xp[i] = x[i];
      xp[j] = x[j];
      h(i, j) = h(j, i) = acc / (4.0 * hi * hj);
    }
  }
  return SymMatrix::symmetrized(h);
}

MatX fd_jacobian(const VectorField& g, const VecX& x, const Tolerances& tol) {
  VecX xp = x;
  MatX jac;
  for (int j = 0; j < x.size(); ++j) {
    const double h = step_for(x[j], tol.fd_step);
    xp[j] = x[j] + h;
    const VecX gp = g(xp);
    xp[j] = x[j] - h;
    const VecX gm = g(xp);
    xp[j] = x[j];
    if (j == 0) jac.resize(gp.size(), x.size());
    jac.col(j) = (gp - gm) / (2.0 * h);
  }
  return jac;
}

VecX fd_directional(const VectorField& g, const VecX& x, const VecX& dir, double step) {
  return (g(x + step * dir) - g(x - step * dir)) / (2.0 * step);
}

double rel_max_deviation(const MatX& a, const MatX& b, double floor) {
  const double denom = std::max(a.cwiseAbs().maxCoeff(), floor);
  return (a - b).cwiseAbs().maxCoeff() / denom;
}

}  // namespace rigidlab
