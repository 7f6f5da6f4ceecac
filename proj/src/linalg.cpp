#include "qgraph/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qgraph {

namespace {

std::string shape_str(Index r, Index c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVector flatten(const CMatrix& m) {
    CVector v(m.size());
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
    return v;
}

CMatrix unflatten(const CVector& v, Index rows, Index cols) {
    if (v.size() != rows * cols)
        throw DimensionError("cannot reshape vector of length " + std::to_string(v.size()) +
                             " to " + shape_str(rows, cols));
    CMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
    return m;
}

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("hs_inner shape mismatch");
    return (a.conjugate().cwiseProduct(b)).sum();
}

bool all_finite(const CMatrix& m) {
    for (Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

CMatrix unit_matrix(Index rows, Index cols, Index i, Index j) {
    CMatrix e = CMatrix::Zero(rows, cols);
    e(i, j) = 1.0;
    return e;
}

Index numerical_rank(const CMatrix& a, double tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    Index r = 0;
    while (r < s.size() && s(r) > tol * s(0)) ++r;
    return r;
}

CMatrix orth(const CMatrix& columns, double tol) {
    if (columns.size() == 0) return CMatrix(columns.rows(), 0);
    Eigen::JacobiSVD<CMatrix> svd(columns, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Index r = 0;
    if (s.size() > 0 && s(0) > 0.0)
        while (r < s.size() && s(r) > tol * s(0)) ++r;
    return svd.matrixU().leftCols(r);
}

CMatrix orth_absolute(const CMatrix& columns, double threshold) {
    if (columns.size() == 0) return CMatrix(columns.rows(), 0);
    Eigen::JacobiSVD<CMatrix> svd(columns, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > threshold) ++r;
    return svd.matrixU().leftCols(r);
}

CMatrix null_space(const CMatrix& a, double tol) {
    const Index n = a.cols();
    if (a.rows() == 0) return CMatrix::Identity(n, n);
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Index r = 0;
    if (s.size() > 0 && s(0) > 0.0)
        while (r < s.size() && s(r) > tol * s(0)) ++r;
    return svd.matrixV().rightCols(n - r);
}

CMatrix null_space_absolute(const CMatrix& a, double threshold) {
    const Index n = a.cols();
    if (a.rows() == 0) return CMatrix::Identity(n, n);
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > threshold) ++r;
    return svd.matrixV().rightCols(n - r);
}

CMatrix complement_basis(const CMatrix& q, double tol) {
    if (q.cols() == 0) return CMatrix::Identity(q.rows(), q.rows());
    return null_space(q.adjoint(), tol);
}

CMatrix canonical_basis(const CMatrix& q) {
    const Index n = q.rows();
    const Index k = q.cols();
    CMatrix out(n, k);
    Index found = 0;
    for (Index c = 0; c < n && found < k; ++c) {
        CVector v = q * q.row(c).adjoint();
        for (int pass = 0; pass < 2; ++pass)
            v -= out.leftCols(found) * (out.leftCols(found).adjoint() * v);
        const double nv = v.norm();
        if (nv * nv > 1e-6) {
            // first entry of largest modulus made real positive
            Index arg = 0;
            for (Index i = 0; i < n; ++i)
                if (std::abs(v(i)) > std::abs(v(arg)) * (1.0 + 1e-9)) arg = i;
            const Complex phase = std::conj(v(arg)) / std::abs(v(arg));
            out.col(found++) = v * phase / nv;
        }
    }
    if (found != k) throw NumericalError("canonical basis extraction lost rank");
    return out;
}

// ---------------------------------------------------------------------------
// Subspace

Subspace Subspace::zero(Index rows, Index cols, double tol) {
    Subspace s;
    s.rows_ = rows;
    s.cols_ = cols;
    s.q_ = CMatrix(rows * cols, 0);
    s.tol_ = tol;
    return s;
}

Subspace Subspace::full(Index rows, Index cols, double tol) {
    Subspace s = zero(rows, cols, tol);
    s.q_ = CMatrix::Identity(rows * cols, rows * cols);
    return s;
}

Subspace Subspace::from_orthonormal(Index rows, Index cols, CMatrix q, double tol) {
    if (q.rows() != rows * cols) throw DimensionError("orthonormal basis has wrong length");
    if (q.cols() > 0) {
        const double err = (q.adjoint() * q - CMatrix::Identity(q.cols(), q.cols())).norm();
        if (err > 1e-8) throw ValidationError("basis is not orthonormal (residual " +
                                              std::to_string(err) + ")");
    }
    Subspace s = zero(rows, cols, tol);
    s.q_ = std::move(q);
    return s;
}

Subspace Subspace::from_columns(Index rows, Index cols, const CMatrix& columns, double tol) {
    if (columns.rows() != rows * cols) throw DimensionError("column vectors have wrong length");
    if (!all_finite(columns)) throw ValidationError("non-finite entries in spanning set");
    Subspace s = zero(rows, cols, tol);
    s.q_ = orth(columns, tol);
    return s;
}

CMatrix Subspace::basis(Index k) const { return unflatten(q_.col(k), rows_, cols_); }

std::vector<CMatrix> Subspace::basis_matrices() const {
    std::vector<CMatrix> out;
    out.reserve(static_cast<size_t>(dim()));
    for (Index k = 0; k < dim(); ++k) out.push_back(basis(k));
    return out;
}

void Subspace::check_shape(const CMatrix& v) const {
    if (v.rows() != rows_ || v.cols() != cols_)
        throw DimensionError("expected " + shape_str(rows_, cols_) + " matrix, got " +
                             shape_str(v.rows(), v.cols()));
}

CVector Subspace::coordinates(const CMatrix& v) const {
    check_shape(v);
    return q_.adjoint() * flatten(v);
}

CMatrix Subspace::project(const CMatrix& v) const {
    check_shape(v);
    const CVector f = flatten(v);
    return unflatten(q_ * (q_.adjoint() * f), rows_, cols_);
}

double Subspace::distance(const CMatrix& v) const {
    check_shape(v);
    const CVector f = flatten(v);
    return (f - q_ * (q_.adjoint() * f)).norm();
}

bool Subspace::contains(const CMatrix& v) const { return contains(v, tol_); }

bool Subspace::contains(const CMatrix& v, double tol) const {
    const double nv = v.norm();
    // a numerically zero vector lies in every subspace
    return nv <= 1e-13 || distance(v) <= tol * nv;
}

Subspace Subspace::with_tol(double tol) const {
    Subspace s = *this;
    s.tol_ = tol;
    return s;
}

Subspace span(const std::vector<CMatrix>& vectors, double tol) {
    if (vectors.empty()) return Subspace::zero(0, 0, tol);
    return span(vectors.front().rows(), vectors.front().cols(), vectors, tol);
}

Subspace span(Index rows, Index cols, const std::vector<CMatrix>& vectors, double tol) {
    CMatrix cols_m(rows * cols, static_cast<Index>(vectors.size()));
    for (size_t k = 0; k < vectors.size(); ++k) {
        if (vectors[k].rows() != rows || vectors[k].cols() != cols)
            throw DimensionError("span: vector " + std::to_string(k) + " has shape " +
                                 shape_str(vectors[k].rows(), vectors[k].cols()) +
                                 ", expected " + shape_str(rows, cols));
        cols_m.col(static_cast<Index>(k)) = flatten(vectors[k]);
    }
    return Subspace::from_columns(rows, cols, cols_m, tol);
}

namespace {

void check_same_ambient(const Subspace& a, const Subspace& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("subspaces live in different ambient spaces (" +
                             shape_str(a.rows(), a.cols()) + " vs " +
                             shape_str(b.rows(), b.cols()) + ")");
}

}  // namespace

bool subspace_contains(const Subspace& s, const CMatrix& v) { return s.contains(v); }

bool subspace_includes(const Subspace& a, const Subspace& b) {
    check_same_ambient(a, b);
    if (b.dim() == 0) return true;
    const CMatrix& qa = a.columns();
    const CMatrix& qb = b.columns();
    const double tol = std::max(a.tol(), b.tol());
    for (Index k = 0; k < qb.cols(); ++k) {
        const CVector r = qb.col(k) - qa * (qa.adjoint() * qb.col(k));
        if (r.norm() > tol) return false;
    }
    return true;
}

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
    check_same_ambient(a, b);
    CMatrix both(a.ambient_size(), a.dim() + b.dim());
    both << a.columns(), b.columns();
    return Subspace::from_columns(a.rows(), a.cols(), both, std::max(a.tol(), b.tol()));
}

Subspace orthogonal_complement(const Subspace& a) {
    return Subspace::from_orthonormal(a.rows(), a.cols(), complement_basis(a.columns(), a.tol()),
                                      a.tol());
}

Subspace subspace_intersect(const Subspace& a, const Subspace& b) {
    check_same_ambient(a, b);
    return orthogonal_complement(subspace_sum(orthogonal_complement(a), orthogonal_complement(b)));
}

bool subspace_equal(const Subspace& a, const Subspace& b) {
    check_same_ambient(a, b);
    return a.dim() == b.dim() && subspace_includes(a, b) && subspace_includes(b, a);
}

// ---------------------------------------------------------------------------
// BlockMatrix

BlockMatrix::BlockMatrix(Index rows, Index cols, std::vector<CMatrix> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows <= 0 || cols <= 0 || static_cast<Index>(entries_.size()) != rows * cols)
        throw DimensionError("block matrix needs rows*cols entries");
    for (const auto& e : entries_)
        if (e.rows() != entries_.front().rows() || e.cols() != entries_.front().cols())
            throw DimensionError("block matrix entries must share one shape");
}

BlockMatrix mult_product(const BlockMatrix& x1, const BlockMatrix& x2) {
    if (x1.cols() != x2.rows())
        throw DimensionError("multiplicative product: inner index sets differ (" +
                             std::to_string(x1.cols()) + " vs " + std::to_string(x2.rows()) + ")");
    std::vector<CMatrix> out;
    out.reserve(static_cast<size_t>(x1.rows() * x2.cols()));
    for (Index i = 0; i < x1.rows(); ++i)
        for (Index l = 0; l < x2.cols(); ++l) {
            CMatrix acc = CMatrix::Zero(x1.entry_rows() * x2.entry_rows(),
                                        x1.entry_cols() * x2.entry_cols());
            for (Index k = 0; k < x1.cols(); ++k) acc += kron(x1.at(i, k), x2.at(k, l));
            out.push_back(std::move(acc));
        }
    return BlockMatrix(x1.rows(), x2.cols(), std::move(out));
}

}  // namespace qgraph
