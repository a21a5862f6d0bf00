#include "cloak/sparse.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "cloak/error.hpp"

namespace cloak {

struct SparseLU::Impl {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  SparseMatrix A;
  double norm = 0.0;
  std::function<std::string(int)> describe;
};

SparseLU::SparseLU() : impl_(std::make_unique<Impl>()) {}
SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

int SparseLU::rows() const { return static_cast<int>(impl_->A.rows()); }

namespace {

std::string name_of(const std::function<std::string(int)>& describe, int i) {
  return describe ? describe(i) : "dof " + std::to_string(i);
}

}  // namespace

void SparseLU::factorize(const SparseMatrix& A, double pivot_tol, const std::function<std::string(int)>& describe) {
  if (A.rows() != A.cols()) throw solver_error("sparse LU: matrix is not square");
  impl_->A = A;
  impl_->A.makeCompressed();
  impl_->describe = describe;
  impl_->norm = inf_norm(A);
  // Empty or negligible columns make the matrix singular regardless of pivoting order.
  for (int j = 0; j < A.cols(); ++j) {
    double colmax = 0.0;
    for (SparseMatrix::InnerIterator it(impl_->A, j); it; ++it) colmax = std::max(colmax, std::abs(it.value()));
    if (colmax <= pivot_tol * impl_->norm) {
      throw solver_error("singular matrix: zero pivot at " + name_of(describe, j));
    }
  }
  impl_->lu.analyzePattern(impl_->A);
  impl_->lu.factorize(impl_->A);
  if (impl_->lu.info() != Eigen::Success) {
    throw solver_error("singular matrix: " + impl_->lu.lastErrorMessage());
  }
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != impl_->A.rows()) throw solver_error("sparse LU: right-hand side has wrong length");
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  if (!x.allFinite()) throw solver_error("singular matrix: non-finite solution");
  const Eigen::VectorXd r = impl_->A * x - rhs;
  const double bound = 1e-10 * (impl_->norm * x.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>());
  if (r.lpNorm<Eigen::Infinity>() > bound) {
    // One step of iterative refinement before declaring numerical singularity.
    x -= impl_->lu.solve(r);
    const Eigen::VectorXd r2 = impl_->A * x - rhs;
    if (r2.lpNorm<Eigen::Infinity>() > bound) {
      Eigen::Index worst = 0;
      r2.cwiseAbs().maxCoeff(&worst);
      throw solver_error("numerically singular matrix: residual check failed at " +
                         name_of(impl_->describe, static_cast<int>(worst)));
    }
  }
  return x;
}

SparseLU sparse_lu(const SparseMatrix& A, double pivot_tol, const std::function<std::string(int)>& describe) {
  SparseLU lu;
  lu.factorize(A, pivot_tol, describe);
  return lu;
}

Eigen::VectorXd back_solve(const SparseLU& lu, const Eigen::VectorXd& rhs) { return lu.solve(rhs); }

double inf_norm(const SparseMatrix& A) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (int j = 0; j < A.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) rows(it.row()) += std::abs(it.value());
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

void write_matrix_market(const SparseMatrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  out << std::setprecision(17);
  for (int j = 0; j < A.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
      out << it.row() + 1 << " " << j + 1 << " " << it.value() << "\n";
    }
  }
  if (!out) throw io_error("failed writing " + path);
}

}  // namespace cloak
