#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qgraph/morphism.hpp"
#include "support.hpp"

using namespace qgraph;
using namespace testing_support;

namespace {

ClassicalGraph k2() { return ClassicalGraph::make(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}); }
ClassicalGraph loop1() { return ClassicalGraph::make(1, {{0, 0}}); }

ClassicalGraph graph_from_mask(Index n, Index mask) {
    std::vector<std::pair<Index, Index>> e;
    for (Index b = 0; b < n * n; ++b)
        if ((mask >> b) & 1) e.emplace_back(b / n, b % n);
    return ClassicalGraph::make(n, e);
}

// Largest graph over θ's target making θ a morphism from g1, optionally shrunk.
QuantumGraph target_graph(Rng& rng, const StarHom& theta, const QuantumGraph& g1, bool shrink) {
    std::vector<TensorElement> pushed;
    for (const auto& g : annihilator(g1).generators()) pushed.push_back(pushforward(theta, g));
    const auto& m2 = theta.target();
    const QuantumGraph top = graph_from_annihilator(m2, AnnihilatorIdeal::generated_by(m2, pushed));
    if (!shrink || top.space().dim() == 0) return top;
    const auto basis = top.space().basis_matrices();
    return bimodule_closure(m2, {basis[size_t(uniform_int(rng, 0, Index(basis.size()) - 1))]});
}

}  // namespace

TEST_CASE("is_classical_morphism") {
    CHECK(is_classical_morphism({0, 1}, k2(), k2()));
    CHECK(is_classical_morphism({0, 0}, loop1(), k2()));
    CHECK(!is_classical_morphism({0, 0}, ClassicalGraph::make(1, {}), k2()));
    CHECK_THROWS_AS(is_classical_morphism({0}, loop1(), k2()), ValidationError);
    CHECK_THROWS_AS(is_classical_morphism({0, 3}, loop1(), k2()), ValidationError);
}

TEST_CASE("theta_from_vertex_map") {
    const StarHom collapse = theta_from_vertex_map({0, 0}, 1, 2);
    CHECK((collapse.apply(diagonal_algebra(1).basis_vector(0)) - CVector::Ones(2)).norm() == 0.0);
    const StarHom id = theta_from_vertex_map({0, 1, 2}, 3, 3);
    CHECK((id.action() - CMatrix::Identity(3, 3)).norm() == 0.0);
    const StarHom onto_first = theta_from_vertex_map({0}, 2, 1);
    CHECK(onto_first.apply(diagonal_algebra(2).basis_vector(1)).norm() == 0.0);
    CHECK((onto_first.apply(diagonal_algebra(2).unit()) - CVector::Ones(1)).norm() == 0.0);
}

TEST_CASE("annihilator route examples") {
    const QuantumGraph g = quantize_classical(k2());
    CHECK(check_annihilator_route(StarHom::identity(g.algebra()), g, g));
    const QuantumGraph one = quantize_classical(loop1());
    const StarHom collapse = theta_from_vertex_map({0, 0}, 1, 2);
    CHECK(check_annihilator_route(collapse, one, g));
    const QuantumGraph empty1 = quantize_classical(ClassicalGraph::make(1, {}));
    const RouteResult r = annihilator_route(collapse, empty1, g);
    CHECK(!r.holds);
    CHECK(r.tensor_witness.has_value());
    CHECK_THROWS_AS(check_annihilator_route(collapse, g, g), DimensionError);
}

TEST_CASE("classical sweep: annihilator and perp routes match the definition") {
    for (Index n1 = 1; n1 <= 2; ++n1)
        for (Index n2 = 1; n2 <= 2; ++n2) {
            std::vector<VertexMap> maps;
            Index count = 1;
            for (Index v = 0; v < n2; ++v) count *= n1;
            for (Index code = 0; code < count; ++code) {
                VertexMap f;
                Index c = code;
                for (Index v = 0; v < n2; ++v) {
                    f.push_back(c % n1);
                    c /= n1;
                }
                maps.push_back(f);
            }
            for (Index m1 = 0; m1 < (Index(1) << (n1 * n1)); ++m1)
                for (Index m2 = 0; m2 < (Index(1) << (n2 * n2)); ++m2) {
                    const ClassicalGraph g1 = graph_from_mask(n1, m1), g2 = graph_from_mask(n2, m2);
                    for (const auto& f : maps) {
                        const bool expect = is_classical_morphism(f, g1, g2);
                        const StarHom th = theta_from_vertex_map(f, n1, n2);
                        CHECK(check_annihilator_route(th, quantize_classical(g1), quantize_classical(g2)) == expect);
                        CHECK(classical_perp_route(f, g1, g2) == expect);
                    }
                }
        }
    Rng rng(61);
    for (int t = 0; t < 200; ++t) {
        const Index n1 = uniform_int(rng, 1, 4), n2 = uniform_int(rng, 1, 4);
        const ClassicalGraph g1 = random_classical_graph(rng, n1, 0.7), g2 = random_classical_graph(rng, n2, 0.3);
        VertexMap f;
        for (Index v = 0; v < n2; ++v) f.push_back(uniform_int(rng, 0, n1 - 1));
        const bool expect = is_classical_morphism(f, g1, g2);
        const StarHom th = theta_from_vertex_map(f, n1, n2);
        CHECK(check_annihilator_route(th, quantize_classical(g1), quantize_classical(g2)) == expect);
        CHECK(classical_perp_route(f, g1, g2) == expect);
        CHECK(check_cp_route(kraus_decompose(th), quantize_classical(g1), quantize_classical(g2)) == expect);
    }
}

TEST_CASE("CP route") {
    const QuantumGraph g = quantize_classical(k2());
    CHECK(check_cp_route(KrausForm{{CMatrix::Identity(2, 2)}}, g, g));

    // vertex-map Kraus operators |f(v)><v|
    const ClassicalGraph g1 = ClassicalGraph::make(2, {{0, 0}, {0, 1}});
    const ClassicalGraph g2 = ClassicalGraph::make(3, {{0, 1}, {2, 2}});
    const VertexMap good = {0, 1, 0}, bad = {1, 0, 1};
    for (const auto& f : {good, bad}) {
        KrausForm k;
        for (Index v = 0; v < 3; ++v) k.operators.push_back(unit_matrix(2, 3, f[size_t(v)], v));
        CHECK(check_cp_route(k, quantize_classical(g1), quantize_classical(g2)) == is_classical_morphism(f, g1, g2));
    }
    CHECK(is_classical_morphism(good, g1, g2));
    CHECK(!is_classical_morphism(bad, g1, g2));
    CHECK_THROWS_AS(check_cp_route(KrausForm{{CMatrix::Identity(3, 3)}}, g, g), DimensionError);
}

TEST_CASE("Kraus-choice independence") {
    Rng rng(62);
    for (int t = 0; t < 20; ++t) {
        const auto m1 = random_algebra(rng, 3);
        const StarHom th = random_star_hom(rng, m1, 6);
        const QuantumGraph g1 = random_quantum_graph(rng, m1);
        const QuantumGraph g2 = target_graph(rng, th, g1, uniform01(rng) < 0.5);
        const KrausForm k = kraus_decompose(th);
        // K'_i = Σ_j U_ij K_j for a unitary U, padded with zero operators
        const Index r = Index(k.operators.size()) + 1;
        const CMatrix u = random_unitary(rng, r);
        KrausForm k2;
        for (Index i = 0; i < r; ++i) {
            CMatrix acc = CMatrix::Zero(k.operators[0].rows(), k.operators[0].cols());
            for (Index j = 0; j + 1 < r; ++j) acc += u(i, j) * k.operators[size_t(j)];
            k2.operators.push_back(acc);
        }
        CHECK(kraus_residual(k2, th) < 1e-8);
        CHECK(check_cp_route(k, g1, g2) == check_cp_route(k2, g1, g2));
        // also against a random graph pair
        const QuantumGraph h2 = random_quantum_graph(rng, th.target());
        CHECK(check_cp_route(k, g1, h2) == check_cp_route(k2, g1, h2));
    }
}

TEST_CASE("projector route") {
    const auto l2 = diagonal_algebra(2);
    const SSFA s = ssfa_build(l2);
    const QuantumGraph g = quantize_classical(k2());
    const CMatrix a = graph_to_adjacency(g, s);
    CHECK(check_projector_route(StarHom::identity(l2), s, s, a, a));

    const auto l1 = diagonal_algebra(1);
    const SSFA s1 = ssfa_build(l1);
    const StarHom collapse = theta_from_vertex_map({0, 0}, 1, 2);
    CHECK(check_projector_route(collapse, s1, s, classical_adjacency_matrix(loop1()), a));

    // swapping the vertices of a symmetric directed-free graph with one loop is not a morphism
    const ClassicalGraph one_loop = ClassicalGraph::make(2, {{0, 0}});
    const StarHom swap = theta_from_vertex_map({1, 0}, 2, 2);
    const CMatrix al = classical_adjacency_matrix(one_loop);
    const ProjectorRouteResult r = projector_route(swap, s, s, al, al);
    CHECK(!r.operator_form.holds);
    CHECK(!r.projection_form);
    CHECK(r.operator_form.column_witness.has_value());
    CHECK(!is_classical_morphism({1, 0}, one_loop, one_loop));
}

TEST_CASE("morphism_report") {
    const QuantumGraph one = quantize_classical(loop1());
    const QuantumGraph g = quantize_classical(k2());
    const StarHom collapse = theta_from_vertex_map({0, 0}, 1, 2);
    const auto w = std::make_pair(counting_weights(one.algebra()), counting_weights(g.algebra()));
    const MorphismReport yes = morphism_report(collapse, one, g, w);
    CHECK(yes.annihilator_route());
    CHECK(yes.cp_route());
    REQUIRE(yes.projector_route().has_value());
    CHECK(*yes.projector_route());

    const QuantumGraph empty1 = quantize_classical(ClassicalGraph::make(1, {}));
    const MorphismReport no = morphism_report(collapse, empty1, g, w);
    CHECK(!no.annihilator_route());
    CHECK(!no.cp_route());
    REQUIRE(no.projector_route().has_value());
    CHECK(!*no.projector_route());
    CHECK(no.cp.operator_witness.has_value());

    const MorphismReport skipped = morphism_report(collapse, one, g);
    CHECK(!skipped.projector_route().has_value());
    CHECK(!skipped.projector_note.empty());

    const QuantumGraph directed = quantize_classical(ClassicalGraph::make(2, {{0, 1}}));
    const MorphismReport dir = morphism_report(StarHom::identity(directed.algebra()), directed, directed, w);
    CHECK(dir.verdict());
    CHECK(!dir.projector_route().has_value());
}

TEST_CASE("route equivalence on random multi-matrix instances") {
    Rng rng(63);
    int yes = 0, no = 0;
    for (int t = 0; t < 60; ++t) {
        const auto m1 = random_algebra(rng, 3);
        const StarHom th = random_star_hom(rng, m1, 6);
        const auto& m2 = th.target();
        const QuantumGraph g1 = symmetrize(random_quantum_graph(rng, m1));
        const double roll = uniform01(rng);
        const QuantumGraph g2 = symmetrize(roll < 0.45 ? target_graph(rng, th, g1, roll < 0.25)
                                                      : random_quantum_graph(rng, m2));
        const auto w = std::make_pair(plancherel_weights(m1), plancherel_weights(m2));
        MorphismReport rep;
        REQUIRE_NOTHROW(rep = morphism_report(th, g1, g2, w));
        REQUIRE(rep.projector_route().has_value());
        CHECK(rep.cp_route() == rep.annihilator_route());
        CHECK(*rep.projector_route() == rep.annihilator_route());
        (rep.verdict() ? yes : no)++;
    }
    CHECK(yes > 5);
    CHECK(no > 5);
}

TEST_CASE("composition of morphisms") {
    Rng rng(64);
    for (int t = 0; t < 20; ++t) {
        const auto m1 = random_algebra(rng, 3);
        const StarHom f = random_star_hom(rng, m1, 5);
        const StarHom g = random_star_hom(rng, f.target(), 8);
        const QuantumGraph s1 = random_quantum_graph(rng, m1);
        const QuantumGraph s2 = target_graph(rng, f, s1, true);
        const QuantumGraph s3 = target_graph(rng, g, s2, true);
        REQUIRE(check_annihilator_route(f, s1, s2));
        REQUIRE(check_annihilator_route(g, s2, s3));
        CHECK(check_annihilator_route(compose(g, f), s1, s3));
    }
}

TEST_CASE("positivity lemma") {
    Rng rng(65);
    const CMatrix id = CMatrix::Identity(3, 3);
    for (int t = 0; t < 10; ++t) {
        const CMatrix ki = random_matrix(rng, 3, 2), kj = random_matrix(rng, 3, 2);
        CHECK(check_positivity_lemma(id, id, random_matrix(rng, 2, 2), ki, kj));
    }
    int vanishing = 0;
    for (int t = 0; t < 100; ++t) {
        const Index n = uniform_int(rng, 2, 4), k = uniform_int(rng, 2, 4);
        const CMatrix a = random_psd(rng, n, uniform_int(rng, 1, n));
        const CMatrix b = random_psd(rng, n, uniform_int(rng, 1, n));
        const CMatrix ki = random_matrix(rng, n, k), kj = random_matrix(rng, n, k);
        // T in the kernel of the left side: range orthogonal to ker-complement on both sides
        const CMatrix l1 = ki.adjoint() * a * ki, l2 = kj.adjoint() * b * kj;
        const CMatrix z1 = null_space(l1, 1e-10), z2 = null_space(l2.adjoint(), 1e-10);
        CMatrix t_mat = random_matrix(rng, k, k);
        if (z1.cols() > 0 && z2.cols() > 0 && uniform01(rng) < 0.7) {
            t_mat = z1 * random_matrix(rng, z1.cols(), z2.cols()) * z2.adjoint();
            ++vanishing;
        }
        const PositivitySides sides = positivity_sides(a, b, t_mat, ki, kj);
        CHECK(sides.holds());
    }
    CHECK(vanishing > 20);
    CMatrix neg = CMatrix::Identity(2, 2);
    neg(1, 1) = -1.0;
    CHECK_THROWS_AS(check_positivity_lemma(neg, CMatrix::Identity(2, 2), CMatrix::Identity(2, 2),
                                           CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)),
                    ValidationError);
}

TEST_CASE("classical perp route examples") {
    CHECK(classical_perp_route({0, 1}, k2(), k2()));
    CHECK(classical_perp_route({0, 0}, loop1(), k2()));
    CHECK(!classical_perp_route({0, 0}, ClassicalGraph::make(1, {}), k2()));
}
