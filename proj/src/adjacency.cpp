#include "qgraph/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qgraph/error.hpp"

namespace qgraph {

namespace {

using Triplet = Eigen::Triplet<Complex>;

SparseMatrix sparse_identity(Index n) {
    SparseMatrix s(n, n);
    s.setIdentity();
    return s;
}

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<Triplet> t;
    t.reserve(size_t(a.nonZeros() * b.nonZeros()));
    for (Index ka = 0; ka < a.outerSize(); ++ka)
        for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia)
            for (Index kb = 0; kb < b.outerSize(); ++kb)
                for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib)
                    t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                   ia.value() * ib.value());
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

double sparse_max_abs(const SparseMatrix& s) {
    double r = 0.0;
    for (Index k = 0; k < s.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(s, k); it; ++it) r = std::max(r, std::abs(it.value()));
    return r;
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void check_square(const SSFA& s, const CMatrix& a, const char* what) {
    if (a.rows() != s.dim() || a.cols() != s.dim())
        throw DimensionError(std::string(what) + " must be " + std::to_string(s.dim()) + "x" +
                             std::to_string(s.dim()));
}

// e_a · Z, with Z read as a d x d coefficient matrix whose rows are algebra coordinates.
CMatrix left_rows(const MultiMatrixAlgebra& m, Index a, const CMatrix& z) {
    const auto ua = m.unit_of(a);
    CMatrix out = CMatrix::Zero(z.rows(), z.cols());
    for (Index s = 0; s < m.block_dim(ua.block); ++s)
        out.row(m.coord(ua.block, ua.row, s)) = z.row(m.coord(ua.block, ua.col, s));
    return out;
}

// Z with e_b multiplied on the right of its column index.
CMatrix right_cols(const MultiMatrixAlgebra& m, Index b, const CMatrix& z) {
    const auto ub = m.unit_of(b);
    CMatrix out = CMatrix::Zero(z.rows(), z.cols());
    for (Index r = 0; r < m.block_dim(ub.block); ++r)
        out.col(m.coord(ub.block, r, ub.col)) = z.col(m.coord(ub.block, r, ub.row));
    return out;
}

CVector flatten_tensor(const CMatrix& y) { return flatten(y); }

CMatrix cup_inverse(const SSFA& s) {
    const MultiMatrixAlgebra& m = s.algebra;
    CMatrix out = CMatrix::Zero(m.dim(), m.dim());
    for (Index a = 0; a < m.dim(); ++a) {
        const auto ua = m.unit_of(a);
        out(m.coord(ua.block, ua.col, ua.row), a) = s.weights[size_t(ua.block)];
    }
    return out;
}

}  // namespace

Eigen::VectorXd SSFA::gram() const { return coordinate_weights(algebra, weights); }

SSFA ssfa_structure(const MultiMatrixAlgebra& m, const std::optional<Weights>& weights) {
    SSFA s;
    s.algebra = m;
    s.weights = weights ? *weights : plancherel_weights(m);
    if (Index(s.weights.size()) != m.num_blocks())
        throw DimensionError("expected " + std::to_string(m.num_blocks()) + " weights, got " +
                             std::to_string(s.weights.size()));
    for (double w : s.weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("weights must be positive");
    const Index d = m.dim();
    std::vector<Triplet> tm, td;
    for (Index i = 0; i < m.num_blocks(); ++i) {
        const Index n = m.block_dim(i);
        const double w = s.weights[size_t(i)];
        for (Index p = 0; p < n; ++p)
            for (Index q = 0; q < n; ++q)
                for (Index r = 0; r < n; ++r) {
                    const Index pair = m.coord(i, p, q) * d + m.coord(i, q, r);
                    tm.emplace_back(m.coord(i, p, r), pair, 1.0);
                    td.emplace_back(pair, m.coord(i, p, r), 1.0 / w);
                }
    }
    s.m.resize(d, d * d);
    s.m.setFromTriplets(tm.begin(), tm.end());
    s.m_dagger.resize(d * d, d);
    s.m_dagger.setFromTriplets(td.begin(), td.end());
    s.u = m.unit();
    s.u_dagger = s.u.adjoint() * s.gram().cast<Complex>().asDiagonal();
    s.cup = CMatrix::Zero(d, d);
    for (Index a = 0; a < d; ++a)
        if (s.u(a) != Complex(0.0)) s.cup += s.u(a) * comultiply(s, a);
    const CMatrix cap_row = s.u_dagger * s.m;
    s.cap = unflatten(cap_row.transpose(), d, d);
    return s;
}

SsfaResiduals ssfa_residuals(const SSFA& s) {
    const Index d = s.dim();
    SsfaResiduals r;
    if (d == 0) return r;
    const SparseMatrix id = sparse_identity(d);
    const SparseMatrix u = s.u.sparseView();
    const SparseMatrix m_i = sparse_kron(s.m, id), i_m = sparse_kron(id, s.m);
    r.associativity = sparse_max_abs(SparseMatrix(s.m * m_i - s.m * i_m));
    r.unitality = std::max(sparse_max_abs(SparseMatrix(s.m * sparse_kron(id, u) - id)),
                           sparse_max_abs(SparseMatrix(s.m * sparse_kron(u, id) - id)));
    const SparseMatrix mdm = s.m_dagger * s.m;
    const SparseMatrix left = m_i * sparse_kron(id, s.m_dagger);
    const SparseMatrix right = i_m * sparse_kron(s.m_dagger, id);
    r.frobenius = std::max(sparse_max_abs(SparseMatrix(left - mdm)), sparse_max_abs(SparseMatrix(right - mdm)));
    r.special = sparse_max_abs(SparseMatrix(s.m * s.m_dagger - id));
    r.symmetric = max_abs(s.cap - s.cap.transpose());
    return r;
}

SSFA ssfa_build(const MultiMatrixAlgebra& m, const std::optional<Weights>& weights, double tol) {
    SSFA s = ssfa_structure(m, weights);
    const SsfaResiduals r = ssfa_residuals(s);
    const auto fail = [](const std::string& axiom, double res) {
        throw ValidationError(axiom + " axiom fails (residual " + std::to_string(res) + ")");
    };
    if (r.associativity > tol) fail("associativity", r.associativity);
    if (r.unitality > tol) fail("unitality", r.unitality);
    if (r.frobenius > tol) fail("Frobenius", r.frobenius);
    if (r.special > tol) fail("special: m∘m† is not the identity;", r.special);
    if (r.symmetric > tol) fail("symmetric", r.symmetric);
    return s;
}

CMatrix comultiply(const SSFA& s, Index b) {
    const MultiMatrixAlgebra& m = s.algebra;
    const auto ub = m.unit_of(b);
    const double w = s.weights[size_t(ub.block)];
    CMatrix out = CMatrix::Zero(m.dim(), m.dim());
    for (Index q = 0; q < m.block_dim(ub.block); ++q)
        out(m.coord(ub.block, ub.row, q), m.coord(ub.block, q, ub.col)) = 1.0 / w;
    return out;
}

CVector multiply_tensor(const SSFA& s, const CMatrix& z) {
    const MultiMatrixAlgebra& m = s.algebra;
    if (z.rows() != m.dim() || z.cols() != m.dim()) throw DimensionError("tensor has the wrong shape");
    CVector out = CVector::Zero(m.dim());
    for (Index a = 0; a < m.dim(); ++a) {
        const auto ua = m.unit_of(a);
        for (Index q = 0; q < m.block_dim(ua.block); ++q)
            out(a) += z(m.coord(ua.block, ua.row, q), m.coord(ua.block, q, ua.col));
    }
    return out;
}

CMatrix schur_square(const SSFA& s, const CMatrix& a) {
    check_square(s, a, "adjacency operator");
    const Index d = s.dim();
    CMatrix out(d, d);
    const CMatrix at = a.transpose();
    for (Index x = 0; x < d; ++x) out.col(x) = multiply_tensor(s, a * comultiply(s, x) * at);
    return out;
}

CMatrix snake_composite(const SSFA& s, const CMatrix& a) {
    check_square(s, a, "adjacency operator");
    return s.cup * a.transpose() * s.cap;
}

CMatrix weighted_adjoint(const SSFA& s, const CMatrix& a) {
    check_square(s, a, "operator");
    const Eigen::VectorXd g = s.gram();
    CMatrix out = a.adjoint();
    for (Index r = 0; r < out.rows(); ++r) out.row(r) /= g(r);
    for (Index c = 0; c < out.cols(); ++c) out.col(c) *= g(c);
    return out;
}

AdjacencyReport check_quantum_adjacency(const SSFA& s, const CMatrix& a, double tol) {
    AdjacencyReport r;
    const double scale = std::max(1.0, max_abs(a));
    r.schur_residual = max_abs(schur_square(s, a) - a);
    r.snake_residual = max_abs(snake_composite(s, a) - a);
    r.adjoint_residual = max_abs(weighted_adjoint(s, a) - a);
    r.schur = r.schur_residual <= tol * scale;
    r.snake = r.snake_residual <= tol * scale;
    r.self_adjoint = r.adjoint_residual <= tol * scale;
    return r;
}

CMatrix projector_from_adjacency(const SSFA& s, const CMatrix& a, double tol) {
    check_square(s, a, "adjacency operator");
    const MultiMatrixAlgebra& m = s.algebra;
    const Index d = s.dim();
    CMatrix p1(d * d, d * d), p2(d * d, d * d);
    const CMatrix at = a.transpose();
    std::vector<CMatrix> co(static_cast<size_t>(d));
    for (Index b = 0; b < d; ++b) co[size_t(b)] = comultiply(s, b);
    for (Index x = 0; x < d; ++x) {
        const CMatrix t_at = co[size_t(x)] * at;
        for (Index y = 0; y < d; ++y) {
            p1.col(x * d + y) = flatten_tensor(left_rows(m, x, a * co[size_t(y)]));
            p2.col(x * d + y) = flatten_tensor(right_cols(m, y, t_at));
        }
    }
    const double diff = max_abs(p1 - p2);
    if (diff > tol * std::max(1.0, max_abs(p1)))
        throw ConsistencyError("the two projector composites differ (residual " + std::to_string(diff) +
                               "); the adjacency operator is not self-transpose");
    return p1;
}

CMatrix right_multiplication(const SSFA& s, const TensorElement& p) {
    const MultiMatrixAlgebra& m = s.algebra;
    const Index d = s.dim();
    if (p.coeffs.rows() != d || p.coeffs.cols() != d) throw DimensionError("projection has the wrong shape");
    CMatrix out(d * d, d * d);
    for (Index x = 0; x < d; ++x) {
        const CMatrix lp = left_rows(m, x, p.coeffs);
        for (Index y = 0; y < d; ++y) out.col(x * d + y) = flatten_tensor(right_cols(m, y, lp));
    }
    return out;
}

TensorElement projection_from_projector(const SSFA& s, const CMatrix& projector, double tol) {
    const Index d = s.dim();
    if (projector.rows() != d * d || projector.cols() != d * d)
        throw DimensionError("projector must be " + std::to_string(d * d) + "x" + std::to_string(d * d));
    const CMatrix one = s.u * s.u.transpose();
    TensorElement p{unflatten(projector * flatten(one), d, d)};
    const double r = max_abs(right_multiplication(s, p) - projector);
    if (r > tol * std::max(1.0, max_abs(projector)))
        throw NumericalError("right multiplication by P(1⊗1) does not reproduce P (residual " +
                             std::to_string(r) + ")");
    return p;
}

CMatrix adjacency_from_projection(const SSFA& s, const TensorElement& p) {
    check_square(s, p.coeffs, "projection");
    return p.coeffs * cup_inverse(s);
}

TensorElement projection_from_adjacency(const SSFA& s, const CMatrix& a) {
    check_square(s, a, "adjacency operator");
    return {a * s.cup};
}

QuantumGraph adjacency_to_graph(const SSFA& s, const CMatrix& a, double tol) {
    const AdjacencyReport r = check_quantum_adjacency(s, a, tol);
    if (!r.schur)
        throw ValidationError("adjacency operator is not Schur idempotent (residual " +
                              std::to_string(r.schur_residual) + ")");
    const MultiMatrixAlgebra& m = s.algebra;
    TensorElement p;
    if (r.snake) {
        p = projection_from_projector(s, projector_from_adjacency(s, a, tol), tol);
    } else {
        // only the first composite is defined without self-transposition
        p = projection_from_adjacency(s, a);
    }
    const Index n = m.ambient_dim();
    std::vector<CMatrix> image;
    for (Index x = 0; x < n; ++x)
        for (Index y = 0; y < n; ++y) image.push_back(phi_apply(m, p, unit_matrix(n, n, x, y)));
    return QuantumGraph(m, span(n, n, image, tol));
}

CMatrix graph_to_adjacency(const QuantumGraph& g, const SSFA& s, double tol) {
    if (g.algebra() != s.algebra) throw DimensionError("graph and Frobenius structure use different algebras");
    const TensorElement p = projection_of_graph(g);
    const MultiMatrixAlgebra& m = s.algebra;
    const double diamond = max_abs(tensor_diamond(m, p).coeffs - p.coeffs);
    if (diamond > 1e-7)
        throw ConsistencyError("graph projection is not ◇-self-adjoint (residual " + std::to_string(diamond) + ")");
    const CMatrix a = adjacency_from_projection(s, p);
    const AdjacencyReport r = check_quantum_adjacency(s, a, std::max(tol, 1e-8));
    if (!r.schur)
        throw ConsistencyError("weights are inconsistent with the graph projection: Schur idempotence fails (residual " +
                               std::to_string(r.schur_residual) + ")");
    return a;
}

CMatrix classical_adjacency_matrix(const ClassicalGraph& g) {
    CMatrix a = CMatrix::Zero(g.size(), g.size());
    for (const auto& [v, w] : g.edges) a(v, w) = 1.0;
    return a;
}

}  // namespace qgraph
