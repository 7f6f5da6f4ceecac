#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qgraph/category.hpp"
#include "support.hpp"

using namespace qgraph;
using namespace testing_support;

namespace {

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

ClassicalGraph loop1() { return ClassicalGraph::make(1, {{0, 0}}); }
ClassicalGraph k2() { return ClassicalGraph::make(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}); }
ClassicalGraph c4() {
    return ClassicalGraph::make(4, {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 0}, {0, 3}});
}

// 1 ← 2 ← 4 vertices, each step collapsing pairs
struct CollapseChain {
    std::vector<ClassicalGraph> graphs{loop1(), k2(), c4()};
    std::vector<VertexMap> maps{{0, 0}, {0, 0, 1, 1}};

    QGraphDiagram diagram() const {
        std::vector<QuantumGraph> objs;
        for (const auto& g : graphs) objs.push_back(quantize_classical(g));
        std::vector<StarHom> links;
        for (size_t j = 0; j < maps.size(); ++j)
            links.push_back(theta_from_vertex_map(maps[j], graphs[j].size(), graphs[j + 1].size()));
        return chain_diagram(objs, links);
    }
};

QGraphDiagram random_chain(Rng& rng, int length) {
    MultiMatrixAlgebra m = random_algebra(rng, 2);
    std::vector<QuantumGraph> objs{random_quantum_graph(rng, m)};
    std::vector<StarHom> links;
    for (int j = 1; j < length; ++j) {
        links.push_back(random_star_hom(rng, objs.back().algebra(), 5));
        objs.push_back(largest_target_graph(links.back(), objs.back()));
    }
    return chain_diagram(objs, links);
}

Cone random_cone(Rng& rng, const ResolvedDiagram& d) {
    const Index t = d.top();
    const StarHom psi_top = random_star_hom(rng, d.object(t).algebra(), 6);
    Cone c{largest_target_graph(psi_top, d.object(t)), {}};
    for (Index j = 0; j < d.size(); ++j) c.legs.push_back(compose(psi_top, d.hom(j, t)));
    return c;
}

Subspace random_subspace(Rng& rng, Index r, Index c, Index k) {
    return Subspace::from_columns(r, c, random_matrix(rng, r * c, k));
}

LinearMap random_map(Rng& rng, const Subspace& a, const Subspace& b) {
    return {a, b, random_matrix(rng, b.dim(), a.dim())};
}

CStarDiagram collapse_cstar_chain() {
    CollapseChain c;
    CStarDiagram d;
    for (const auto& g : c.graphs) d.objects.push_back(cstar_graph_classical(g));
    for (size_t j = 0; j < c.maps.size(); ++j)
        d.links.push_back(classical_cstar_morphism(c.maps[j], c.graphs[j], c.graphs[j + 1]));
    return d;
}

}  // namespace

TEST_CASE("single object diagram is its own limit") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const MultiMatrixAlgebra m = random_algebra(rng, 3);
        const QuantumGraph g = random_quantum_graph(rng, m);
        const QGraphLimit lim = qgraph_limit(QGraphDiagram{{g}, {}});
        CHECK(graphs_equal(lim.graph, g));
        CHECK(lim.ideal.equals(annihilator(g)));
        // idempotence
        const QGraphLimit again = qgraph_limit(QGraphDiagram{{lim.graph}, {}});
        CHECK(subspace_equal(again.graph.space(), lim.graph.space()));
    }
}

TEST_CASE("identity chain gives the top graph") {
    const QuantumGraph g = quantize_classical(c4());
    const StarHom id = StarHom::identity(g.algebra());
    const QGraphLimit lim = qgraph_limit(chain_diagram({g, g}, {id}));
    CHECK(graphs_equal(lim.graph, g));
    CHECK(lim.top == 1);
}

TEST_CASE("collapse chain limit and cones") {
    const QGraphDiagram d = CollapseChain{}.diagram();
    const ResolvedDiagram r(d);
    const QGraphLimit lim = qgraph_limit(r);
    CHECK(lim.top == 2);
    CHECK(lim.ideal.equals(annihilator(r.object(2))));
    CHECK(graphs_equal(lim.graph, r.object(2)));
    for (Index j = 0; j < 3; ++j) CHECK(check_annihilator_route(lim.legs[size_t(j)], r.object(j), lim.graph));

    // the limit's own cone
    const ConeVerdict own = verify_cone(r, lim, Cone{lim.graph, lim.legs});
    CHECK(own.commutes);
    CHECK(own.legs_morphic);
    REQUIRE(own.mediating);
    CHECK(max_abs(own.mediating->action() - CMatrix::Identity(4, 4)) < 1e-10);
    CHECK(own.unique);

    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Cone cone = random_cone(rng, r);
        const ConeVerdict v = verify_cone(r, lim, cone);
        CHECK(v.commutes);
        CHECK(v.legs_morphic);
        INFO("residual ", v.residual);
        REQUIRE(v.mediating);
        CHECK(v.unique);
        CHECK(max_abs(v.mediating->action() - cone.legs[2].action()) < 1e-8);
    }
}

TEST_CASE("broken cone does not commute") {
    const QGraphDiagram d = CollapseChain{}.diagram();
    const ResolvedDiagram r(d);
    const QGraphLimit lim = qgraph_limit(r);
    Rng rng(8);
    Cone cone = random_cone(rng, r);
    // move the middle leg by an inner automorphism that fixes nothing
    const MultiMatrixAlgebra& apex = cone.apex.algebra();
    const StarHom& mid = cone.legs[1];
    StarHom::Bratteli b = mid.bratteli();
    std::vector<CMatrix> us;
    for (Index j = 0; j < apex.num_blocks(); ++j) us.push_back(random_unitary(rng, apex.block_dim(j)));
    const StarHom moved = star_hom(mid.source(), apex, b, us);
    if (max_abs(moved.action() - mid.action()) > 1e-6) {
        cone.legs[1] = moved;
        const ConeVerdict v = verify_cone(r, lim, cone);
        CHECK(!v.commutes);
        CHECK(!v.mediating);
    }
}

TEST_CASE("random quantum chains") {
    Rng rng(21);
    for (int trial = 0; trial < 15; ++trial) {
        const QGraphDiagram d = random_chain(rng, 3);
        const ResolvedDiagram r(d);
        const QGraphLimit lim = qgraph_limit(r);
        CHECK(lim.ideal.equals(annihilator(r.object(r.top()))));
        for (Index j = 0; j < r.size(); ++j)
            CHECK(check_annihilator_route(lim.legs[size_t(j)], r.object(j), lim.graph));
        const Cone cone = random_cone(rng, r);
        const ConeVerdict v = verify_cone(r, lim, cone);
        CHECK(v.commutes);
        CHECK(v.mediating.has_value());
        CHECK(v.unique);
    }
}

TEST_CASE("diagram validation") {
    const QuantumGraph g = quantize_classical(k2());
    const StarHom id = StarHom::identity(g.algebra());
    const StarHom swap = theta_from_vertex_map({1, 0}, 2, 2);
    QGraphDiagram d{{g, g, g}, {{0, 1, id}, {1, 2, id}, {0, 2, swap}}};
    try {
        ResolvedDiagram r(d);
        FAIL("expected a functoriality error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("(0, 1, 2)") != std::string::npos);
    }
    // consistent diamond: 0 → 1 → 3 and 0 → 2 → 3 agree
    QGraphDiagram diamond{{g, g, g, g}, {{0, 1, swap}, {0, 2, swap}, {1, 3, id}, {2, 3, id}}};
    const ResolvedDiagram r(diamond);
    CHECK(r.top() == 3);
    CHECK(r.leq(1, 3));
    CHECK(!r.leq(1, 2));

    // two maximal elements
    QGraphDiagram vee{{g, g, g}, {{0, 1, id}, {0, 2, id}}};
    CHECK_THROWS_AS(ResolvedDiagram{vee}, ValidationError);
    QGraphDiagram cycle{{g, g}, {{0, 1, id}, {1, 0, id}}};
    CHECK_THROWS_AS(ResolvedDiagram{cycle}, ValidationError);

    // an arrow that is not a morphism: everything onto a loopless vertex pair
    const QuantumGraph empty = quantize_classical(ClassicalGraph::make(2, {}));
    QGraphDiagram bad{{empty, g}, {{0, 1, id}}};
    try {
        ResolvedDiagram rb(bad);
        FAIL("expected a morphism error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
    }
}

TEST_CASE("truncation report") {
    CollapseChain c;
    const QGraphDiagram d = c.diagram();
    std::vector<QuantumGraph> objs = d.objects;
    std::vector<StarHom> links;
    for (const auto& a : d.arrows) links.push_back(a.hom);
    const auto rep = truncation_report(objs, links);
    REQUIRE(rep.size() == 3);
    CHECK(rep[0].algebra_dim == 1);
    CHECK(rep[1].algebra_dim == 2);
    CHECK(rep[2].algebra_dim == 4);
    CHECK(rep[2].graph_dim == 8);
    CHECK(rep[2].ideal_dim == annihilator(objs[2]).dim());
}

TEST_CASE("operator space sums") {
    Rng rng(3);
    const Subspace s = random_subspace(rng, 2, 3, 4);
    const OpSpSum p = opsp_product({s, Subspace::zero(1, 1)});
    CHECK(p.space.dim() == 4);
    CHECK(p.norm == SumNorm::linf);
    CHECK(opsp_coproduct({s}).norm == SumNorm::l1);
    const OpSpSum two = opsp_product({random_subspace(rng, 2, 2, 1), random_subspace(rng, 1, 3, 1)});
    CHECK(two.space.dim() == 2);
    CHECK(two.space.rows() == 3);
    CHECK(two.space.cols() == 5);

    for (int trial = 0; trial < 20; ++trial) {
        const Index k = uniform_int(rng, 1, 3);
        std::vector<Subspace> spaces;
        for (Index i = 0; i < k; ++i)
            spaces.push_back(random_subspace(rng, uniform_int(rng, 1, 3), uniform_int(rng, 1, 3), 1 + i));
        const Subspace x = random_subspace(rng, 2, 2, 3);
        std::vector<LinearMap> cone;
        for (const auto& sp : spaces) cone.push_back(random_map(rng, x, sp));
        for (const OpSpSum& sum : {opsp_product(spaces), opsp_coproduct(spaces)}) {
            const LinearMap u = sum_factor(sum, cone);
            for (size_t i = 0; i < spaces.size(); ++i)
                CHECK(max_abs(compose(sum.projections[i], u).matrix - cone[i].matrix) < 1e-10);
            std::vector<LinearMap> cocone;
            for (const auto& sp : spaces) cocone.push_back(random_map(rng, sp, x));
            const LinearMap w = sum_cofactor(sum, cocone);
            for (size_t i = 0; i < spaces.size(); ++i)
                CHECK(max_abs(compose(w, sum.injections[i]).matrix - cocone[i].matrix) < 1e-10);
            // an element survives the round trip through its components
            const CMatrix el = sum.space.basis(0);
            std::vector<CMatrix> comps;
            for (Index i = 0; i < k; ++i) comps.push_back(sum.component(el, i));
            CHECK(max_abs(sum.assemble(comps) - el) == 0.0);
        }
    }
}

TEST_CASE("operator space equalizers") {
    Rng rng(4);
    const Subspace s = random_subspace(rng, 2, 2, 3);
    const LinearMap id = identity_map(s);
    const LinearMap zero{s, s, CMatrix::Zero(3, 3)};
    CHECK(opsp_equalizer(id, id).space.dim() == 3);
    CHECK(opsp_coequalizer(id, id).space.dim() == 3);
    CHECK(opsp_equalizer(id, zero).space.dim() == 0);
    CHECK(opsp_coequalizer(id, zero).space.dim() == 0);

    for (int trial = 0; trial < 30; ++trial) {
        const Subspace a = random_subspace(rng, 2, 3, uniform_int(rng, 1, 5));
        const Subspace b = random_subspace(rng, 3, 2, uniform_int(rng, 1, 5));
        // f − g of random rank
        const Index rank = uniform_int(rng, 0, std::min(a.dim(), b.dim()));
        const LinearMap f = random_map(rng, a, b);
        const LinearMap g{a, b, f.matrix - random_matrix(rng, b.dim(), rank) *
                                               random_matrix(rng, rank, a.dim())};
        const OpSpEqualizer eq = opsp_equalizer(f, g);
        const OpSpCoequalizer co = opsp_coequalizer(f, g);
        CHECK(eq.space.dim() == a.dim() - rank);
        CHECK(co.space.dim() == b.dim() - rank);
        CHECK(max_abs(compose(f, eq.inclusion).matrix - compose(g, eq.inclusion).matrix) < 1e-9);
        CHECK(max_abs(compose(co.quotient, f).matrix - compose(co.quotient, g).matrix) < 1e-9);

        const Subspace x = random_subspace(rng, 1, 2, 2);
        const LinearMap h = compose(eq.inclusion, random_map(rng, x, eq.space));
        const LinearMap u = equalizer_factor(eq, h);
        CHECK(max_abs(compose(eq.inclusion, u).matrix - h.matrix) < 1e-9);
        const LinearMap k = compose(random_map(rng, co.space, x), co.quotient);
        const LinearMap v = coequalizer_factor(co, k);
        CHECK(max_abs(compose(v, co.quotient).matrix - k.matrix) < 1e-9);
        if (rank > 0) {
            CHECK_THROWS_AS(equalizer_factor(eq, random_map(rng, x, a)), ValidationError);
        }
    }
}

TEST_CASE("C*-graph morphism check") {
    const CStarGraph c4g = cstar_graph_classical(c4());
    CHECK(cstar_module_residual(c4g) < 1e-12);
    CHECK(cstar_morphism_check(identity_map(c4g.space), StarHom::identity(c4g.algebra), c4g, c4g));

    const CStarMorphism m = classical_cstar_morphism({0, 0, 1, 1}, k2(), c4());
    CHECK(cstar_morphism_check(m.e, m.pi, cstar_graph_classical(k2()), c4g));
    // e is not contractive: e(χ_0 ⊕ χ_1 block) doubles a norm
    CHECK(contractivity_estimate(m.e) > 1.0 + 1e-6);
    CHECK(contractivity_estimate(identity_map(c4g.space)) < 1.0 + 1e-12);

    CHECK_THROWS_AS(classical_cstar_morphism({0, 0, 1, 1}, ClassicalGraph::make(2, {{0, 1}}), c4()),
                    ValidationError);

    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const LinearMap e{c4g.space, c4g.space, random_matrix(rng, 8, 8)};
        CHECK(!cstar_morphism_check(e, StarHom::identity(c4g.algebra), c4g, c4g));
    }

    // a quantum example: M_2 acting on itself
    const MultiMatrixAlgebra m2 = full_algebra(2);
    const CStarGraph full = cstar_graph(m2, Subspace::full(2, 2));
    CHECK(cstar_module_residual(full) < 1e-12);
    CHECK_THROWS_AS(cstar_graph(m2, span(2, 2, {unit_matrix(2, 2, 0, 1)})), ValidationError);
}

TEST_CASE("C*-graph limits") {
    // constant chain
    const CStarGraph g = cstar_graph_classical(c4());
    const CStarMorphism id{identity_map(g.space), StarHom::identity(g.algebra)};
    const CStarLimit constant = cstar_limit(CStarDiagram{{g, g, g}, {id, id}});
    CHECK(constant.graph.space.dim() == g.space.dim());
    CHECK(constant.well_definedness < 1e-12);
    for (Index a = 0; a < g.algebra.dim(); ++a) {
        const CMatrix& leg = constant.legs[2].e.matrix;
        CHECK(max_abs(leg * constant.graph.left[size_t(a)] - g.left[size_t(a)] * leg) < 1e-10);
    }

    // diagonals inside M_2 with the compression
    const MultiMatrixAlgebra diag = diagonal_algebra(2);
    const MultiMatrixAlgebra m2 = full_algebra(2);
    const CStarGraph low = cstar_graph(diag, span(2, 2, {unit_matrix(2, 2, 0, 0), unit_matrix(2, 2, 1, 1)}));
    const CStarGraph high = cstar_graph(m2, Subspace::full(2, 2));
    const StarHom incl = star_hom(diag, m2, {{1, 1}});
    const LinearMap compress = linear_map(high.space, low.space, [](const CMatrix& x) -> CMatrix {
        return x.diagonal().asDiagonal();
    });
    REQUIRE(cstar_morphism_check(compress, incl, low, high));
    const CStarLimit two = cstar_limit(CStarDiagram{{low, high}, {{compress, incl}}});
    CHECK(two.graph.space.dim() == 4);
    for (Index r = 0; r < 2; ++r)
        for (Index c = 0; c < 2; ++c) {
            const CMatrix s = unit_matrix(2, 2, r, c);
            CMatrix d = CMatrix::Zero(2, 2);
            if (r == c) d = s;
            CHECK(two.graph.space.contains(two.product.assemble({d, s}), 1e-10));
        }
    CHECK(!two.graph.space.contains(two.product.assemble({CMatrix::Zero(2, 2), CMatrix::Identity(2, 2)}), 1e-6));

    // three-step collapse chain and the joint equalizer
    const CStarDiagram chain = collapse_cstar_chain();
    const CStarLimit lim = cstar_limit(chain);
    CHECK(lim.well_definedness < 1e-10);
    CHECK(lim.graph.space.dim() == chain.objects[2].space.dim());
    std::vector<Subspace> lower;
    for (size_t j = 0; j + 1 < chain.objects.size(); ++j) lower.push_back(chain.objects[j].space);
    const OpSpSum target = opsp_product(lower);
    const Subspace& prod = lim.product.space;
    const LinearMap drop = linear_map(prod, target.space, [&](const CMatrix& x) -> CMatrix {
        std::vector<CMatrix> c;
        for (Index j = 0; j + 1 < Index(chain.objects.size()); ++j) c.push_back(lim.product.component(x, j));
        return target.assemble(c);
    });
    const LinearMap shift = linear_map(prod, target.space, [&](const CMatrix& x) -> CMatrix {
        std::vector<CMatrix> c;
        for (Index j = 0; j + 1 < Index(chain.objects.size()); ++j)
            c.push_back(chain.links[size_t(j)].e.apply(lim.product.component(x, j + 1)));
        return target.assemble(c);
    });
    const OpSpEqualizer eq = opsp_equalizer(drop, shift);
    CHECK(subspace_equal(eq.space, lim.graph.space));
}
