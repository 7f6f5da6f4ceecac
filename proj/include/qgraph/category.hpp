#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/morphism.hpp"

namespace qgraph {

// ---------------------------------------------------------------------------
// Quantum graph diagrams

struct DiagramArrow {
    Index from;
    Index to;
    StarHom hom;  // algebra(from) → algebra(to)
};

// Finite directed poset generated by the arrows; θ_{j,k} exists for j ≤ k.
struct QGraphDiagram {
    std::vector<QuantumGraph> objects;
    std::vector<DiagramArrow> arrows;
};

// objects[0] ≤ objects[1] ≤ ...; links[j] : algebra(j) → algebra(j + 1).
QGraphDiagram chain_diagram(std::vector<QuantumGraph> objects, std::vector<StarHom> links);

// All composites θ_{j,k} for j < k, after checking functoriality, the morphism condition on
// every arrow and the existence of a maximum.
class ResolvedDiagram {
public:
    explicit ResolvedDiagram(const QGraphDiagram& d, double tol = kDefaultTol);

    Index size() const { return static_cast<Index>(objects_.size()); }
    Index top() const { return top_; }
    const QuantumGraph& object(Index j) const { return objects_[size_t(j)]; }
    const AnnihilatorIdeal& annihilator_of(Index j) const { return anns_[size_t(j)]; }
    bool leq(Index j, Index k) const;
    // Identity when j == k.
    const StarHom& hom(Index j, Index k) const;
    std::vector<std::pair<Index, Index>> order_pairs() const;  // j < k

private:
    std::vector<QuantumGraph> objects_;
    std::vector<AnnihilatorIdeal> anns_;
    std::vector<std::vector<std::optional<StarHom>>> homs_;
    Index top_ = 0;
};

struct QGraphLimit {
    QuantumGraph graph;
    AnnihilatorIdeal ideal;
    Index top;
    std::vector<StarHom> legs;  // θ_{j,∞} : algebra(j) → algebra(limit)
};

QGraphLimit qgraph_limit(const QGraphDiagram& d, double tol = kDefaultTol);
QGraphLimit qgraph_limit(const ResolvedDiagram& d, double tol = kDefaultTol);

struct Cone {
    QuantumGraph apex;
    std::vector<StarHom> legs;  // ψ_j : algebra(j) → algebra(apex)
};

struct ConeVerdict {
    bool commutes = false;     // ψ_k ∘ θ_{j,k} = ψ_j
    bool legs_morphic = false;  // every ψ_j is a graph morphism
    std::optional<StarHom> mediating;  // μ with μ ∘ θ_{j,∞} = ψ_j
    bool unique = false;
    double residual = 0.0;
};

ConeVerdict verify_cone(const ResolvedDiagram& d, const QGraphLimit& limit, const Cone& cone,
                        double tol = 1e-8);
ConeVerdict verify_cone(const QGraphDiagram& d, const Cone& cone, double tol = 1e-8);

struct TruncationStage {
    Index length;
    Index algebra_dim;
    Index ideal_dim;
    Index graph_dim;
};
// Limits of the prefixes 0..t of a chain.
std::vector<TruncationStage> truncation_report(const std::vector<QuantumGraph>& objects,
                                               const std::vector<StarHom>& links,
                                               double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Operator spaces

// Linear map between stored subspaces in orthonormal coordinates.
struct LinearMap {
    Subspace domain;
    Subspace codomain;
    CMatrix matrix;  // dim(codomain) x dim(domain)

    CMatrix apply(const CMatrix& x) const;
};

LinearMap linear_map(const Subspace& domain, const Subspace& codomain,
                     const std::function<CMatrix(const CMatrix&)>& f);
LinearMap identity_map(const Subspace& s);
LinearMap compose(const LinearMap& g, const LinearMap& f);

enum class SumNorm { linf, l1 };

struct OpSpSum {
    Subspace space;
    SumNorm norm;
    std::vector<Index> row_offsets;
    std::vector<Index> col_offsets;
    std::vector<LinearMap> projections;
    std::vector<LinearMap> injections;

    CMatrix assemble(const std::vector<CMatrix>& components) const;
    CMatrix component(const CMatrix& x, Index i) const;
};

OpSpSum opsp_product(const std::vector<Subspace>& spaces);
OpSpSum opsp_coproduct(const std::vector<Subspace>& spaces);
// X → ⊕ S_i from maps X → S_i.
LinearMap sum_factor(const OpSpSum& sum, const std::vector<LinearMap>& cone);
// ⊕ S_i → T from maps S_i → T.
LinearMap sum_cofactor(const OpSpSum& sum, const std::vector<LinearMap>& cocone);

struct OpSpEqualizer {
    Subspace space;
    LinearMap inclusion;
};
struct OpSpCoequalizer {
    Subspace space;
    LinearMap quotient;
};

OpSpEqualizer opsp_equalizer(const LinearMap& f, const LinearMap& g, double tol = kDefaultTol);
OpSpCoequalizer opsp_coequalizer(const LinearMap& f, const LinearMap& g,
                                 double tol = kDefaultTol);
// h : X → S with f h = g h gives u : X → equalizer with inclusion ∘ u = h.
LinearMap equalizer_factor(const OpSpEqualizer& eq, const LinearMap& h);
// h : T → Y with h f = h g gives u : quotient → Y with u ∘ q = h.
LinearMap coequalizer_factor(const OpSpCoequalizer& coeq, const LinearMap& h);

// ---------------------------------------------------------------------------
// C*-graphs

// Bimodule over the algebra; action matrices per algebra basis unit, in space coordinates.
struct CStarGraph {
    MultiMatrixAlgebra algebra;
    Subspace space;
    std::vector<CMatrix> left;
    std::vector<CMatrix> right;

    CMatrix left_action(const CVector& a) const;
    CMatrix right_action(const CVector& a) const;
};

// S ⊆ B(C^N) closed under embed(a) · s · embed(b).
CStarGraph cstar_graph(const MultiMatrixAlgebra& m, const Subspace& s, double tol = 1e-8);
// ℓ∞(V) acting on span{|v⟩⟨w| : (v, w) ∈ E}.
CStarGraph cstar_graph_classical(const ClassicalGraph& g);
// Largest violation of the bimodule axioms.
double cstar_module_residual(const CStarGraph& g);

// From cg2 to cg1: π : A_1 → A_2 and e : S_2 → S_1.
struct CStarMorphism {
    LinearMap e;
    StarHom pi;
};

bool cstar_morphism_check(const LinearMap& e, const StarHom& pi, const CStarGraph& cg1,
                          const CStarGraph& cg2, double tol = 1e-8);
// max ‖e(s)‖ / ‖s‖ in operator norm over basis elements and seeded random elements.
double contractivity_estimate(const LinearMap& e, int samples = 64);
// e(|v⟩⟨w|) = |f(v)⟩⟨f(w)|; throws ValidationError when f is not a graph morphism.
CStarMorphism classical_cstar_morphism(const VertexMap& f, const ClassicalGraph& g1,
                                       const ClassicalGraph& g2);

// objects[j] with links[j] from objects[j + 1] to objects[j].
struct CStarDiagram {
    std::vector<CStarGraph> objects;
    std::vector<CStarMorphism> links;
};

struct CStarLimit {
    CStarGraph graph;
    OpSpSum product;                   // ambient ∏ S_j
    std::vector<CStarMorphism> legs;   // (e^{j,∞}, π_{j,∞})
    double well_definedness = 0.0;     // largest disagreement between evaluation paths
};

CStarLimit cstar_limit(const CStarDiagram& chain, double tol = 1e-8);

}  // namespace qgraph
