#pragma once

#include <functional>
#include <memory>
#include <string>

#include <Eigen/SparseCore>

namespace cloak {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Sparse LU with a fill-reducing column ordering and partial pivoting.
class SparseLU {
 public:
  SparseLU();
  ~SparseLU();
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;

  /// `describe` turns a DOF index into a human-readable name for singularity reports.
  void factorize(const SparseMatrix& A, double pivot_tol = 1e-14,
                 const std::function<std::string(int)>& describe = {});
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  int rows() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SparseLU sparse_lu(const SparseMatrix& A, double pivot_tol = 1e-14,
                   const std::function<std::string(int)>& describe = {});
Eigen::VectorXd back_solve(const SparseLU& lu, const Eigen::VectorXd& rhs);

/// Max-norm of a sparse matrix (largest absolute row sum).
double inf_norm(const SparseMatrix& A);

/// MatrixMarket coordinate (general, real) export.
void write_matrix_market(const SparseMatrix& A, const std::string& path);

}  // namespace cloak
