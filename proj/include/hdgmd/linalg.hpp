// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_LINALG_HPP
#define HDGMD_LINALG_HPP

#include "hdgmd/common.hpp"

#include <Eigen/Sparse>

#include <array>
#include <optional>
#include <vector>

namespace hdgmd {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Global sparse system assembled from per-element triplets. Finalization
/// is deterministic: duplicates are summed in a canonical (row, col,
/// value) order, so the compressed matrix does not depend on the element
/// visitation order.
class SparseSystem {
public:
  explicit SparseSystem(int dim);

  int dim() const { return dim_; }
  void add(int row, int col, double value);
  void add_rhs(int row, double value) { rhs_[row] += value; }
  Eigen::VectorXd& rhs() { return rhs_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }

  /// Build the compressed matrix; no further add() calls allowed.
  void finalize();
  bool finalized() const { return finalized_; }
  const Eigen::SparseMatrix<double>& matrix() const;

private:
  int dim_;
  bool finalized_ = false;
  std::vector<Triplet> triplets_;
  Eigen::VectorXd rhs_;
  Eigen::SparseMatrix<double> matrix_;
};

/// Direct sparse LU solve. If `nullspace` is given the matrix has that
/// one-dimensional kernel (typically the constant function); the rhs must
/// be compatible (orthogonal to it within 1e-9 relative) and the returned
/// solution is orthogonal to the kernel vector. The relative residual is
/// checked against 1e-9.
Eigen::VectorXd solve_sparse(const SparseSystem& system,
                             const std::optional<Eigen::VectorXd>& nullspace = std::nullopt);

/// Dense factorization of one element's interior block together with the
/// data needed to recover interior unknowns from trace values.
struct LocalBlock {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::MatrixXd coupling;   // interior x trace
  Eigen::VectorXd rhs;        // interior right-hand side
  std::array<int, 3> faces{}; // global face indices of this element

  Eigen::VectorXd recover(const Eigen::VectorXd& trace_values) const {
    return lu.solve(rhs - coupling * trace_values);
  }
};

/// Facet Schur system plus per-element back-substitution data.
class CondensedSystem {
public:
  CondensedSystem(int num_faces, int face_dim);

  int face_dim() const { return face_dim_; }
  int trace_index(int face, int mode) const { return face * face_dim_ + mode; }

  /// Condense one element: interior block A, coupling C (interior x
  /// 3*face_dim), trace rows D (3*face_dim x interior), trace block E,
  /// interior rhs F and trace rhs G. Thread-safe across distinct
  /// elements after reserve().
  void reserve(int num_elements);
  void set_element(int element, const std::array<int, 3>& faces, const Eigen::MatrixXd& interior,
                   const Eigen::MatrixXd& coupling, const Eigen::MatrixXd& trace_rows,
                   const Eigen::MatrixXd& trace_block, const Eigen::VectorXd& interior_rhs,
                   const Eigen::VectorXd& trace_rhs);

  /// Assemble the global trace system from all condensed elements.
  SparseSystem assemble_trace() const;

  /// Interior unknowns of one element given the global trace solution.
  Eigen::VectorXd recover_interior(int element, const Eigen::VectorXd& trace_solution) const;

  const LocalBlock& block(int element) const { return blocks_[element]; }

private:
  int num_faces_;
  int face_dim_;
  std::vector<LocalBlock> blocks_;
  std::vector<Eigen::MatrixXd> schur_;     // per element: E - D A^{-1} C
  std::vector<Eigen::VectorXd> schur_rhs_; // per element: G - D A^{-1} F
};

} // namespace hdgmd

#endif
