#pragma once

#include <optional>

#include <Eigen/SparseCore>

#include "qgraph/qgraph.hpp"

namespace qgraph {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

// Frobenius structure on a multi-matrix algebra with the weighted inner product
// <a, b> = Σ_i d_i tr(a_i^† b_i). Maps act on coordinates; M ⊗ M is indexed a*d + b.
struct SSFA {
    MultiMatrixAlgebra algebra;
    Weights weights;
    SparseMatrix m;         // d x d^2
    SparseMatrix m_dagger;  // d^2 x d
    CVector u;              // d x 1
    CMatrix u_dagger;       // 1 x d
    CMatrix cup;            // coefficients of m†(u(1))
    CMatrix cap;            // cap(a, b) = u†(m(e_a ⊗ e_b))

    Index dim() const { return algebra.dim(); }
    // Gram diagonal of the inner product on coordinates.
    Eigen::VectorXd gram() const;
};

struct SsfaResiduals {
    double associativity = 0.0;
    double unitality = 0.0;
    double frobenius = 0.0;
    double special = 0.0;
    double symmetric = 0.0;
};

// Builds the structure maps without validating them.
SSFA ssfa_structure(const MultiMatrixAlgebra& m, const std::optional<Weights>& weights = std::nullopt);
SsfaResiduals ssfa_residuals(const SSFA& s);
// Weights default to d_i = n_i. Throws ValidationError naming the first failing axiom.
SSFA ssfa_build(const MultiMatrixAlgebra& m, const std::optional<Weights>& weights = std::nullopt,
                double tol = kDefaultTol);

// Coefficient matrix of m†(e_b).
CMatrix comultiply(const SSFA& s, Index b);
// m applied to a coefficient matrix Σ z_ab e_a ⊗ e_b.
CVector multiply_tensor(const SSFA& s, const CMatrix& z);

struct AdjacencyReport {
    bool schur = false;
    bool snake = false;
    bool self_adjoint = false;
    double schur_residual = 0.0;
    double snake_residual = 0.0;
    double adjoint_residual = 0.0;

    bool adjacency() const { return schur && snake; }
};

// m ∘ (A ⊗ A) ∘ m†
CMatrix schur_square(const SSFA& s, const CMatrix& a);
// (I ⊗ cap) ∘ (I ⊗ A ⊗ I) ∘ (cup ⊗ I); the transpose of A for the classical structure.
CMatrix snake_composite(const SSFA& s, const CMatrix& a);
CMatrix weighted_adjoint(const SSFA& s, const CMatrix& a);
AdjacencyReport check_quantum_adjacency(const SSFA& s, const CMatrix& a, double tol = kDefaultTol);

struct QAdjacency {
    SSFA ssfa;
    CMatrix a;

    AdjacencyReport report(double tol = kDefaultTol) const { return check_quantum_adjacency(ssfa, a, tol); }
};

// Both composites (m ⊗ I)(I ⊗ A ⊗ I)(I ⊗ m†) and (I ⊗ m)(I ⊗ A ⊗ I)(m† ⊗ I) as d^2 x d^2
// matrices; throws ConsistencyError if they differ.
CMatrix projector_from_adjacency(const SSFA& s, const CMatrix& a, double tol = kDefaultTol);
// The map z ↦ z p on M ⊗ M^op as a d^2 x d^2 matrix.
CMatrix right_multiplication(const SSFA& s, const TensorElement& p);
// p = P(1 ⊗ 1); checks that right multiplication by p reproduces P.
TensorElement projection_from_projector(const SSFA& s, const CMatrix& projector,
                                        double tol = kDefaultTol);
// A with P(1 ⊗ 1) = p, i.e. p = A · cup.
CMatrix adjacency_from_projection(const SSFA& s, const TensorElement& p);
TensorElement projection_from_adjacency(const SSFA& s, const CMatrix& a);

// The image of Φ_p for p from the projector of A; A must be Schur idempotent.
QuantumGraph adjacency_to_graph(const SSFA& s, const CMatrix& a, double tol = kDefaultTol);
// Inverse direction through projection_of_graph; throws ConsistencyError if the
// result is not a quantum adjacency operator for the chosen weights.
CMatrix graph_to_adjacency(const QuantumGraph& g, const SSFA& s, double tol = kDefaultTol);

// 0/1 matrix with entry (v, w) = 1 for each edge (v, w).
CMatrix classical_adjacency_matrix(const ClassicalGraph& g);

}  // namespace qgraph
