#include "qgraph/morphism.hpp"

#include <algorithm>
#include <cmath>

#include "qgraph/error.hpp"

namespace qgraph {

namespace {

void check_map(const VertexMap& f, Index n1, Index n2) {
    if (Index(f.size()) != n2)
        throw ValidationError("vertex map has " + std::to_string(f.size()) + " images for " +
                              std::to_string(n2) + " vertices");
    for (size_t v = 0; v < f.size(); ++v)
        if (f[v] < 0 || f[v] >= n1)
            throw ValidationError("vertex " + std::to_string(v) + " maps outside the target vertex set");
}

void check_endpoints(const StarHom& theta, const QuantumGraph& g1, const QuantumGraph& g2) {
    if (theta.source() != g1.algebra())
        throw DimensionError("θ starts at " + theta.source().describe() + ", graph 1 lives on " +
                             g1.algebra().describe());
    if (theta.target() != g2.algebra())
        throw DimensionError("θ ends at " + theta.target().describe() + ", graph 2 lives on " +
                             g2.algebra().describe());
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_psd(const CMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, max_abs(a));
    if (max_abs(a - a.adjoint()) > tol * scale) return false;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().size() == 0 || es.eigenvalues()(0) >= -tol * scale;
}

}  // namespace

bool is_classical_morphism(const VertexMap& f, const ClassicalGraph& g1, const ClassicalGraph& g2) {
    check_map(f, g1.size(), g2.size());
    for (const auto& [v, w] : g2.edges)
        if (!g1.has_edge(f[size_t(v)], f[size_t(w)])) return false;
    return true;
}

StarHom theta_from_vertex_map(const VertexMap& f, Index n1, Index n2) {
    check_map(f, n1, n2);
    StarHom::Bratteli b(size_t(n2), std::vector<Index>(size_t(n1), 0));
    for (Index v = 0; v < n2; ++v) b[size_t(v)][size_t(f[size_t(v)])] = 1;
    return star_hom(diagonal_algebra(n1), diagonal_algebra(n2), b);
}

RouteResult annihilator_route(const StarHom& theta, const QuantumGraph& g1, const QuantumGraph& g2,
                              double tol) {
    check_endpoints(theta, g1, g2);
    return annihilator_route(theta, annihilator(g1), annihilator(g2), tol);
}

RouteResult annihilator_route(const StarHom& theta, const AnnihilatorIdeal& ann1,
                              const AnnihilatorIdeal& ann2, double tol) {
    if (theta.source() != ann1.algebra() || theta.target() != ann2.algebra())
        throw DimensionError("annihilators do not match the endpoints of θ");
    RouteResult r;
    // (θ⊗θ)((a⊗b) g) = (θ(a)⊗θ(b)) (θ⊗θ)(g), so the generators decide
    for (const auto& g : ann1.generators()) {
        TensorElement image = pushforward(theta, g);
        if (!ann2.contains(image, tol)) {
            r.holds = false;
            r.tensor_witness = std::move(image);
            return r;
        }
    }
    return r;
}

bool check_annihilator_route(const StarHom& theta, const QuantumGraph& g1, const QuantumGraph& g2,
                             double tol) {
    return annihilator_route(theta, g1, g2, tol).holds;
}

RouteResult cp_route(const KrausForm& kraus, const QuantumGraph& g1, const QuantumGraph& g2,
                     double tol) {
    const Index n1 = g1.algebra().ambient_dim(), n2 = g2.algebra().ambient_dim();
    for (size_t i = 0; i < kraus.operators.size(); ++i)
        if (kraus.operators[i].rows() != n1 || kraus.operators[i].cols() != n2)
            throw DimensionError("Kraus operator " + std::to_string(i) + " must be " + std::to_string(n1) +
                                 "x" + std::to_string(n2));
    RouteResult r;
    const auto basis = g2.space().basis_matrices();
    for (const auto& ki : kraus.operators)
        for (const auto& kj : kraus.operators) {
            const double scale = ki.norm() * kj.norm();
            for (const auto& s : basis) {
                CMatrix x = ki * s * kj.adjoint();
                if (x.norm() <= 1e-12 * scale) continue;
                if (!g1.space().contains(x, tol)) {
                    r.holds = false;
                    r.operator_witness = std::move(x);
                    return r;
                }
            }
        }
    return r;
}

bool check_cp_route(const KrausForm& kraus, const QuantumGraph& g1, const QuantumGraph& g2, double tol) {
    return cp_route(kraus, g1, g2, tol).holds;
}

ProjectorRouteResult projector_route(const StarHom& theta, const SSFA& s1, const SSFA& s2,
                                     const CMatrix& a1, const CMatrix& a2, double tol) {
    if (theta.source() != s1.algebra || theta.target() != s2.algebra)
        throw DimensionError("Frobenius structures do not match the endpoints of θ");
    const CMatrix p1 = projector_from_adjacency(s1, a1, tol);
    const CMatrix p2 = projector_from_adjacency(s2, a2, tol);
    const CMatrix td = theta_adjoint(theta, s1.weights, s2.weights);
    const CMatrix tt = kron(td, td);
    const CMatrix lhs = tt * p2;
    const CMatrix rhs = p1 * lhs;
    ProjectorRouteResult out;
    const double scale = std::max(1.0, max_abs(lhs));
    for (Index c = 0; c < lhs.cols(); ++c) {
        if ((lhs.col(c) - rhs.col(c)).cwiseAbs().maxCoeff() > tol * scale) {
            out.operator_form.holds = false;
            out.operator_form.column_witness = c;
            out.operator_form.operator_witness = (lhs.col(c) - rhs.col(c)).eval();
            break;
        }
    }
    const MultiMatrixAlgebra& m2 = s2.algebra;
    const TensorElement q1 = projection_from_adjacency(s1, a1);
    const TensorElement q2 = projection_from_adjacency(s2, a2);
    const TensorElement prod = tensor_multiply(m2, pushforward(theta, q1), q2);
    out.projection_form = max_abs(prod.coeffs - q2.coeffs) <= tol * std::max(1.0, max_abs(q2.coeffs));
    if (out.projection_form != out.operator_form.holds)
        throw ConsistencyError("projector route: operator equation and projection equation disagree");
    return out;
}

bool check_projector_route(const StarHom& theta, const SSFA& s1, const SSFA& s2, const CMatrix& a1,
                           const CMatrix& a2, double tol) {
    return projector_route(theta, s1, s2, a1, a2, tol).operator_form.holds;
}

MorphismReport morphism_report(const StarHom& theta, const QuantumGraph& g1, const QuantumGraph& g2,
                               const std::optional<std::pair<Weights, Weights>>& weights, double tol) {
    MorphismReport rep;
    rep.annihilator = annihilator_route(theta, g1, g2, tol);
    rep.cp = cp_route(kraus_decompose(theta), g1, g2, tol);
    if (rep.cp.holds != rep.annihilator.holds)
        throw ConsistencyError("annihilator route says " + std::string(rep.annihilator.holds ? "true" : "false") +
                               " but the CP route says " + (rep.cp.holds ? "true" : "false"));
    if (!weights) {
        rep.projector_note = "no Frobenius weights given";
        return rep;
    }
    if (!is_symmetric(g1) || !is_symmetric(g2)) {
        rep.projector_note = "adjacency operators of non-symmetric graphs are not self-transpose";
        return rep;
    }
    const SSFA s1 = ssfa_build(g1.algebra(), weights->first);
    const SSFA s2 = ssfa_build(g2.algebra(), weights->second);
    const CMatrix a1 = graph_to_adjacency(g1, s1);
    const CMatrix a2 = graph_to_adjacency(g2, s2);
    rep.projector = projector_route(theta, s1, s2, a1, a2, tol).operator_form;
    if (rep.projector->holds != rep.annihilator.holds)
        throw ConsistencyError("projector route disagrees with the annihilator route");
    return rep;
}

PositivitySides positivity_sides(const CMatrix& a, const CMatrix& b, const CMatrix& t, const CMatrix& ki,
                                 const CMatrix& kj, double tol) {
    if (!is_psd(a, tol)) throw ValidationError("A is not positive semidefinite");
    if (!is_psd(b, tol)) throw ValidationError("B is not positive semidefinite");
    if (ki.rows() != a.rows() || kj.rows() != b.rows() || t.rows() != ki.cols() || t.cols() != kj.cols())
        throw DimensionError("positivity lemma: incompatible shapes");
    const CMatrix l1 = ki.adjoint() * a * ki, l2 = kj.adjoint() * b * kj;
    const CMatrix left = l1 * t * l2;
    const CMatrix r1 = a * ki, r2 = kj.adjoint() * b;
    const CMatrix right = r1 * t * r2;
    PositivitySides out;
    out.left_zero = left.norm() <= tol * std::max(l1.norm() * t.norm() * l2.norm(), 1e-300);
    out.right_zero = right.norm() <= tol * std::max(r1.norm() * t.norm() * r2.norm(), 1e-300);
    return out;
}

bool check_positivity_lemma(const CMatrix& a, const CMatrix& b, const CMatrix& t, const CMatrix& ki,
                            const CMatrix& kj, double tol) {
    return positivity_sides(a, b, t, ki, kj, tol).holds();
}

bool classical_perp_route(const VertexMap& f, const ClassicalGraph& g1, const ClassicalGraph& g2,
                          double tol) {
    const StarHom theta = theta_from_vertex_map(f, g1.size(), g2.size());
    const auto& l1 = theta.source();
    const auto& l2 = theta.target();
    const CMatrix td = theta_adjoint(theta, counting_weights(l1), counting_weights(l2));
    return perp_containment(td, annihilator(graph_complement(quantize_classical(g1))),
                            annihilator(graph_complement(quantize_classical(g2))), tol);
}

bool perp_containment(const CMatrix& theta_dagger, const AnnihilatorIdeal& perp1,
                      const AnnihilatorIdeal& perp2, double tol) {
    if (theta_dagger.rows() != perp1.algebra().dim() || theta_dagger.cols() != perp2.algebra().dim())
        throw DimensionError("θ† does not match the ideals");
    // θ† is not multiplicative, so the whole basis is pushed
    for (const auto& z : perp2.basis())
        if (!perp1.contains(TensorElement{theta_dagger * z.coeffs * theta_dagger.transpose()}, tol))
            return false;
    return true;
}

}  // namespace qgraph
