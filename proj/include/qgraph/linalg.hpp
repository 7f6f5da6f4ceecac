#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qgraph/error.hpp"

namespace qgraph {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kDefaultTol = 1e-9;

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Row-major flattening: v[i*cols + j] = m(i, j).
CVector flatten(const CMatrix& m);
CMatrix unflatten(const CVector& v, Index rows, Index cols);

// <a, b> = trace(a^H b)
Complex hs_inner(const CMatrix& a, const CMatrix& b);
bool all_finite(const CMatrix& m);
CMatrix unit_matrix(Index rows, Index cols, Index i, Index j);

// Rank from singular values above tol * s_max.
Index numerical_rank(const CMatrix& a, double tol = kDefaultTol);
// Orthonormal basis of the column span.
CMatrix orth(const CMatrix& columns, double tol = kDefaultTol);
// Orthonormal basis of the span of singular directions with s > threshold.
CMatrix orth_absolute(const CMatrix& columns, double threshold);
// Orthonormal basis of ker(a).
CMatrix null_space(const CMatrix& a, double tol = kDefaultTol);
// Kernel from singular values at or below an absolute threshold.
CMatrix null_space_absolute(const CMatrix& a, double threshold);
// Orthonormal basis of range(q)^perp for q with orthonormal columns.
CMatrix complement_basis(const CMatrix& q, double tol = kDefaultTol);
// Greedy Gram-Schmidt over the columns of q q^H; depends only on range(q).
CMatrix canonical_basis(const CMatrix& q);

// Subspace of rows x cols matrices, stored as orthonormal flattened columns.
class Subspace {
public:
    Subspace() = default;

    static Subspace zero(Index rows, Index cols, double tol = kDefaultTol);
    static Subspace full(Index rows, Index cols, double tol = kDefaultTol);
    // q must already have orthonormal columns.
    static Subspace from_orthonormal(Index rows, Index cols, CMatrix q, double tol = kDefaultTol);
    static Subspace from_columns(Index rows, Index cols, const CMatrix& columns,
                                 double tol = kDefaultTol);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    Index ambient_size() const { return rows_ * cols_; }
    Index dim() const { return q_.cols(); }
    double tol() const { return tol_; }

    const CMatrix& columns() const { return q_; }
    CMatrix basis(Index k) const;
    std::vector<CMatrix> basis_matrices() const;

    CVector coordinates(const CMatrix& v) const;
    CMatrix project(const CMatrix& v) const;
    double distance(const CMatrix& v) const;
    bool contains(const CMatrix& v) const;
    bool contains(const CMatrix& v, double tol) const;

    Subspace with_tol(double tol) const;

private:
    void check_shape(const CMatrix& v) const;

    Index rows_ = 0;
    Index cols_ = 0;
    CMatrix q_;
    double tol_ = kDefaultTol;
};

Subspace span(const std::vector<CMatrix>& vectors, double tol = kDefaultTol);
Subspace span(Index rows, Index cols, const std::vector<CMatrix>& vectors,
              double tol = kDefaultTol);

bool subspace_contains(const Subspace& s, const CMatrix& v);
// b is a subset of a
bool subspace_includes(const Subspace& a, const Subspace& b);
Subspace subspace_sum(const Subspace& a, const Subspace& b);
Subspace orthogonal_complement(const Subspace& a);
Subspace subspace_intersect(const Subspace& a, const Subspace& b);
bool subspace_equal(const Subspace& a, const Subspace& b);

// Index grid whose entries all share one shape; products of entries are kron products.
class BlockMatrix {
public:
    BlockMatrix(Index rows, Index cols, std::vector<CMatrix> entries);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    Index entry_rows() const { return entries_.front().rows(); }
    Index entry_cols() const { return entries_.front().cols(); }
    const CMatrix& at(Index i, Index j) const { return entries_[i * cols_ + j]; }

private:
    Index rows_;
    Index cols_;
    std::vector<CMatrix> entries_;
};

// (x1 ⊙ x2)[i, l] = sum_k x1[i, k] ⊗ x2[k, l]
BlockMatrix mult_product(const BlockMatrix& x1, const BlockMatrix& x2);

}  // namespace qgraph
