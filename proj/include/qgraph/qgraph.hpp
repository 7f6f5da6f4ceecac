#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/tensor.hpp"

namespace qgraph {

// Subspace of B(C^N) closed under the commutant on both sides.
class QuantumGraph {
public:
    QuantumGraph(MultiMatrixAlgebra algebra, Subspace space);

    const MultiMatrixAlgebra& algebra() const { return algebra_; }
    const Subspace& space() const { return space_; }
    double tol() const { return space_.tol(); }

private:
    MultiMatrixAlgebra algebra_;
    Subspace space_;
};

// Largest HS distance of a' s and s b' from the space, over commutant and space bases.
double bimodule_residual(const MultiMatrixAlgebra& m, const Subspace& s);

struct ClassicalGraph {
    std::vector<std::string> vertices;
    std::vector<std::pair<Index, Index>> edges;  // sorted, unique

    static ClassicalGraph make(Index n, std::vector<std::pair<Index, Index>> edges);
    Index size() const { return static_cast<Index>(vertices.size()); }
    bool has_edge(Index v, Index w) const;
};

// Left ideal of M ⊗ M^op. In block (i, j) the ideal is M_{n_i n_j} · Q Q^†, so the ideal is
// stored through orthonormal Q per block pair.
class AnnihilatorIdeal {
public:
    AnnihilatorIdeal(MultiMatrixAlgebra algebra, std::vector<CMatrix> supports,
                     double tol = kDefaultTol);

    // Left ideal generated by the given elements.
    static AnnihilatorIdeal generated_by(const MultiMatrixAlgebra& m,
                                         const std::vector<TensorElement>& elements,
                                         double tol = kDefaultTol);
    // The span of the elements; throws if that span is not a left ideal.
    static AnnihilatorIdeal from_basis(const MultiMatrixAlgebra& m,
                                       const std::vector<TensorElement>& elements,
                                       double tol = kDefaultTol);

    const MultiMatrixAlgebra& algebra() const { return algebra_; }
    const CMatrix& support(Index i, Index j) const;
    double tol() const { return tol_; }
    Index dim() const;

    bool contains(const TensorElement& z) const;
    bool contains(const TensorElement& z, double tol) const;
    bool includes(const AnnihilatorIdeal& other) const;
    bool equals(const AnnihilatorIdeal& other) const;

    // One projection per nonzero block pair; they generate the ideal.
    std::vector<TensorElement> generators() const;
    // Orthonormal basis of coefficient matrices (Frobenius inner product).
    std::vector<TensorElement> basis() const;
    // ⊕ Q Q^†: an idempotent with ideal = (M ⊗ M^op) · projection.
    TensorElement projection() const;
    AnnihilatorIdeal dagger() const;

private:
    MultiMatrixAlgebra algebra_;
    std::vector<CMatrix> q_;
    double tol_;
};

QuantumGraph quantize_classical(const ClassicalGraph& g, double tol = kDefaultTol);
QuantumGraph bimodule_closure(const MultiMatrixAlgebra& m, const std::vector<CMatrix>& generators,
                              double tol = kDefaultTol);
AnnihilatorIdeal annihilator(const QuantumGraph& g);
QuantumGraph graph_from_annihilator(const MultiMatrixAlgebra& m, const AnnihilatorIdeal& ideal);
QuantumGraph graph_from_annihilator(const MultiMatrixAlgebra& m,
                                    const std::vector<TensorElement>& ideal_basis,
                                    double tol = kDefaultTol);
// HS-orthogonal complement, again a quantum graph.
QuantumGraph graph_complement(const QuantumGraph& g);

// p with Φ_p the HS projection onto the space; checks Φ_p on the space and the identities
// Ann(S) = (M⊗M^op)(1⊗1 − p), Ann(S^⊥) = (M⊗M^op) p.
TensorElement projection_of_graph(const QuantumGraph& g);

struct RouteVerdicts {
    bool direct;
    bool annihilator;
};
RouteVerdicts reflexive_routes(const QuantumGraph& g);
RouteVerdicts symmetric_routes(const QuantumGraph& g);
bool is_reflexive(const QuantumGraph& g);
bool is_symmetric(const QuantumGraph& g);
bool is_transitive(const QuantumGraph& g);

struct Connectivity {
    bool connected;
    Index generated_dim;
    std::optional<CMatrix> witness;  // projection p in M with (1-p) S p = 0
};
// Basis of the unital algebra generated by the space and the commutant.
Subspace generated_algebra(const QuantumGraph& g);
Connectivity is_strongly_connected(const QuantumGraph& g);
std::vector<CMatrix> components(const QuantumGraph& g);

bool graphs_equal(const QuantumGraph& a, const QuantumGraph& b);

}  // namespace qgraph
