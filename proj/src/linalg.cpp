// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hdgmd {

SparseSystem::SparseSystem(int dim) : dim_(dim), rhs_(Eigen::VectorXd::Zero(dim)) {}

void SparseSystem::add(int row, int col, double value) {
  if (row < 0 || row >= dim_ || col < 0 || col >= dim_)
    throw Error("SparseSystem::add: index out of range");
  if (!std::isfinite(value)) throw Error("SparseSystem::add: non-finite value");
  triplets_.push_back({row, col, value});
}

void SparseSystem::finalize() {
  // Canonical summation order: (row, col, value). This makes the result
  // bit-identical for any insertion order of the same triplet multiset.
  std::sort(triplets_.begin(), triplets_.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.value < b.value;
  });
  std::vector<int> outer(dim_ + 1, 0);
  std::vector<int> inner;
  std::vector<double> values;
  inner.reserve(triplets_.size());
  values.reserve(triplets_.size());
  for (size_t i = 0; i < triplets_.size();) {
    size_t j = i;
    double sum = 0.0;
    while (j < triplets_.size() && triplets_[j].row == triplets_[i].row &&
           triplets_[j].col == triplets_[i].col) {
      sum += triplets_[j].value;
      ++j;
    }
    inner.push_back(triplets_[i].col);
    values.push_back(sum);
    outer[triplets_[i].row + 1] += 1;
    i = j;
  }
  for (int r = 0; r < dim_; ++r) outer[r + 1] += outer[r];

  matrix_.resize(dim_, dim_);
  matrix_ = Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>>(
      dim_, dim_, static_cast<int>(values.size()), outer.data(), inner.data(), values.data());
  matrix_.makeCompressed();
  finalized_ = true;
  triplets_.clear();
  triplets_.shrink_to_fit();
}

const Eigen::SparseMatrix<double>& SparseSystem::matrix() const {
  if (!finalized_) throw Error("SparseSystem: matrix() before finalize()");
  return matrix_;
}

Eigen::VectorXd solve_sparse(const SparseSystem& system,
                             const std::optional<Eigen::VectorXd>& nullspace) {
  if (!system.finalized()) throw Error("solve_sparse: system not finalized");
  const auto& A = system.matrix();
  const Eigen::VectorXd& b = system.rhs();
  const double bnorm = b.norm();

  // One factorization plus a few steps of iterative refinement; high
  // coefficient contrasts (permeability jumps of 1e6) leave the plain
  // solve slightly above the residual contract.
  auto refined_solve = [](const Eigen::SparseMatrix<double>& mat, const Eigen::VectorXd& rhs) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(mat);
    if (lu.info() != Eigen::Success)
      throw SolverError("solve_sparse: factorization failed (singular matrix?)");
    Eigen::VectorXd sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw SolverError("solve_sparse: solve failed");
    const double rhs_norm = std::max(rhs.norm(), 1e-300);
    for (int pass = 0; pass < 3; ++pass) {
      const Eigen::VectorXd residual = rhs - mat * sol;
      if (residual.norm() <= 1e-13 * rhs_norm) break;
      sol += lu.solve(residual);
    }
    return sol;
  };

  Eigen::VectorXd x;
  if (!nullspace) {
    x = refined_solve(A, b);
  } else {
    const Eigen::VectorXd& z = *nullspace;
    if (z.size() != A.rows()) throw Error("solve_sparse: nullspace vector has wrong size");
    const double znorm = z.norm();
    const double defect = std::abs(z.dot(b)) / znorm;
    if (defect > 1e-9 * std::max(bnorm, 1e-300))
      throw SolverError("solve_sparse: incompatible right-hand side, kernel component " +
                        std::to_string(defect) + " exceeds 1e-9 * ||rhs||");
    // Deflation by reduction: with z spanning both the kernel and the
    // cokernel, dropping one degree of freedom yields a nonsingular
    // system whose solution solves the full one exactly; the returned
    // vector is then orthogonalized against z. (A bordered system would
    // densify the factorization with a full row/column.)
    const int n = static_cast<int>(A.rows());
    int pivot = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(z[i]) > std::abs(z[pivot])) pivot = i;
    Eigen::SparseMatrix<double> reduced(n - 1, n - 1);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(A.nonZeros());
    for (int k = 0; k < A.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
        const int r = static_cast<int>(it.row());
        const int c = static_cast<int>(it.col());
        if (r == pivot || c == pivot) continue;
        entries.emplace_back(r > pivot ? r - 1 : r, c > pivot ? c - 1 : c, it.value());
      }
    }
    reduced.setFromTriplets(entries.begin(), entries.end());
    Eigen::VectorXd rhs(n - 1);
    for (int i = 0; i < n; ++i) {
      if (i == pivot) continue;
      rhs[i > pivot ? i - 1 : i] = b[i];
    }
    Eigen::VectorXd xr;
    try {
      xr = refined_solve(reduced, rhs);
    } catch (const SolverError&) {
      throw SolverError("solve_sparse: deflated factorization failed (kernel beyond constants?)");
    }
    x.resize(n);
    for (int i = 0; i < n; ++i) x[i] = i == pivot ? 0.0 : xr[i > pivot ? i - 1 : i];
    // Exact orthogonality against the kernel vector.
    x -= (z.dot(x) / z.squaredNorm()) * z;
  }

  const double res = (A * x - b).norm();
  if (bnorm > 0.0 && !(res <= 1e-9 * bnorm)) {
    std::ostringstream msg;
    msg << "solve_sparse: relative residual " << res / bnorm << " exceeds 1e-9";
    throw SolverError(msg.str());
  }
  return x;
}

CondensedSystem::CondensedSystem(int num_faces, int face_dim)
    : num_faces_(num_faces), face_dim_(face_dim) {}

void CondensedSystem::reserve(int num_elements) {
  blocks_.resize(num_elements);
  schur_.resize(num_elements);
  schur_rhs_.resize(num_elements);
}

void CondensedSystem::set_element(int element, const std::array<int, 3>& faces,
                                  const Eigen::MatrixXd& interior, const Eigen::MatrixXd& coupling,
                                  const Eigen::MatrixXd& trace_rows,
                                  const Eigen::MatrixXd& trace_block,
                                  const Eigen::VectorXd& interior_rhs,
                                  const Eigen::VectorXd& trace_rhs) {
  LocalBlock& blk = blocks_[element];
  blk.faces = faces;
  blk.lu.compute(interior);
  blk.coupling = coupling;
  blk.rhs = interior_rhs;
  const Eigen::MatrixXd ainv_c = blk.lu.solve(coupling);
  const Eigen::VectorXd ainv_f = blk.lu.solve(interior_rhs);
  // Factorization sanity: scaled residual of a probe solve; a healthy LU
  // sits at machine precision regardless of the block's conditioning.
  const Eigen::VectorXd probe = Eigen::VectorXd::Ones(interior.rows());
  const Eigen::VectorXd ainv_probe = blk.lu.solve(probe);
  const double scale = interior.cwiseAbs().rowwise().sum().maxCoeff() * ainv_probe.norm();
  const double check = (interior * ainv_probe - probe).norm();
  if (!(check <= 1e-10 * (scale + probe.norm())))
    throw SolverError("condensation: singular local block at element " + std::to_string(element));
  schur_[element] = trace_block - trace_rows * ainv_c;
  schur_rhs_[element] = trace_rhs - trace_rows * ainv_f;
}

SparseSystem CondensedSystem::assemble_trace() const {
  SparseSystem system(num_faces_ * face_dim_);
  for (size_t e = 0; e < blocks_.size(); ++e) {
    const auto& faces = blocks_[e].faces;
    const Eigen::MatrixXd& s = schur_[e];
    const Eigen::VectorXd& g = schur_rhs_[e];
    for (int a = 0; a < 3; ++a) {
      for (int i = 0; i < face_dim_; ++i) {
        const int row = trace_index(faces[a], i);
        system.add_rhs(row, g[a * face_dim_ + i]);
        for (int b = 0; b < 3; ++b)
          for (int j = 0; j < face_dim_; ++j)
            system.add(row, trace_index(faces[b], j), s(a * face_dim_ + i, b * face_dim_ + j));
      }
    }
  }
  system.finalize();
  return system;
}

Eigen::VectorXd CondensedSystem::recover_interior(int element,
                                                  const Eigen::VectorXd& trace_solution) const {
  const LocalBlock& blk = blocks_[element];
  Eigen::VectorXd local_trace(3 * face_dim_);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < face_dim_; ++i)
      local_trace[a * face_dim_ + i] = trace_solution[trace_index(blk.faces[a], i)];
  return blk.recover(local_trace);
}

} // namespace hdgmd
