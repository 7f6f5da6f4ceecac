#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/adjacency.hpp"

namespace qgraph {

// f : V_2 → V_1 as a list of images, one per vertex of G_2.
using VertexMap = std::vector<Index>;

bool is_classical_morphism(const VertexMap& f, const ClassicalGraph& g1, const ClassicalGraph& g2);
// θ(χ_u) = Σ_{f(v) = u} χ_v from ℓ∞(V_1) to ℓ∞(V_2).
StarHom theta_from_vertex_map(const VertexMap& f, Index n1, Index n2);

struct RouteResult {
    bool holds = true;
    // first violating element: (θ⊗θ)(z) for the annihilator route, K_i s K_j^† for the CP route,
    // the failing column of the operator equation for the projector route
    std::optional<TensorElement> tensor_witness;
    std::optional<CMatrix> operator_witness;
    std::optional<Index> column_witness;
};

// θ : algebra(g1) → algebra(g2); (θ⊗θ)(Ann S_1) ⊆ Ann S_2.
RouteResult annihilator_route(const StarHom& theta, const QuantumGraph& g1, const QuantumGraph& g2,
                              double tol = 1e-8);
bool check_annihilator_route(const StarHom& theta, const QuantumGraph& g1, const QuantumGraph& g2,
                             double tol = 1e-8);
// Same check against precomputed annihilators.
RouteResult annihilator_route(const StarHom& theta, const AnnihilatorIdeal& ann1,
                              const AnnihilatorIdeal& ann2, double tol = 1e-8);

// span{K_i s K_j^† : s ∈ S_2} ⊆ S_1 with K_i : C^{N_2} → C^{N_1}.
RouteResult cp_route(const KrausForm& kraus, const QuantumGraph& g1, const QuantumGraph& g2,
                     double tol = 1e-8);
bool check_cp_route(const KrausForm& kraus, const QuantumGraph& g1, const QuantumGraph& g2,
                    double tol = 1e-8);

struct ProjectorRouteResult {
    RouteResult operator_form;    // (θ†⊗θ†) P_2 = P_1 (θ†⊗θ†) P_2
    bool projection_form = true;  // p_2 = (θ⊗θ)(p_1) p_2
};
// A1, A2 must be self-transpose quantum adjacency operators for the two structures.
ProjectorRouteResult projector_route(const StarHom& theta, const SSFA& s1, const SSFA& s2,
                                     const CMatrix& a1, const CMatrix& a2, double tol = 1e-8);
bool check_projector_route(const StarHom& theta, const SSFA& s1, const SSFA& s2, const CMatrix& a1,
                           const CMatrix& a2, double tol = 1e-8);

struct MorphismReport {
    RouteResult annihilator;
    RouteResult cp;
    std::optional<RouteResult> projector;
    std::string projector_note;  // why the projector route was skipped

    bool annihilator_route() const { return annihilator.holds; }
    bool cp_route() const { return cp.holds; }
    std::optional<bool> projector_route() const {
        return projector ? std::optional<bool>(projector->holds) : std::nullopt;
    }
    bool verdict() const { return annihilator.holds; }
};

// Runs the annihilator and CP routes, and the projector route when weights are given and both
// graphs are symmetric. Throws ConsistencyError when the routes disagree.
MorphismReport morphism_report(const StarHom& theta, const QuantumGraph& g1, const QuantumGraph& g2,
                               const std::optional<std::pair<Weights, Weights>>& weights = std::nullopt,
                               double tol = 1e-8);

struct PositivitySides {
    bool left_zero;   // (K_i^† A K_i) T (K_j^† B K_j) = 0
    bool right_zero;  // (A K_i) T (K_j^† B) = 0
    bool holds() const { return left_zero == right_zero; }
};
PositivitySides positivity_sides(const CMatrix& a, const CMatrix& b, const CMatrix& t,
                                 const CMatrix& ki, const CMatrix& kj, double tol = 1e-8);
bool check_positivity_lemma(const CMatrix& a, const CMatrix& b, const CMatrix& t, const CMatrix& ki,
                            const CMatrix& kj, double tol = 1e-8);

// Ann(S_1^⊥) ⊇ (θ†⊗θ†)(Ann(S_2^⊥)) with counting weights.
bool classical_perp_route(const VertexMap& f, const ClassicalGraph& g1, const ClassicalGraph& g2,
                          double tol = 1e-8);
// perp1 ⊇ (θ†⊗θ†)(perp2) for a coordinate matrix θ†.
bool perp_containment(const CMatrix& theta_dagger, const AnnihilatorIdeal& perp1,
                      const AnnihilatorIdeal& perp2, double tol = 1e-8);

}  // namespace qgraph
