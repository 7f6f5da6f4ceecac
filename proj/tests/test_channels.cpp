#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qgraph/channels.hpp"
#include "support.hpp"

using namespace qgraph;
using namespace testing_support;

namespace {

RMatrix random_stochastic(Rng& rng, Index outputs, Index inputs, double zero_prob) {
    RMatrix p(outputs, inputs);
    for (Index a = 0; a < inputs; ++a) {
        for (Index b = 0; b < outputs; ++b) p(b, a) = uniform01(rng) < zero_prob ? 0.0 : uniform01(rng);
        if (p.col(a).sum() == 0.0) p(uniform_int(rng, 0, outputs - 1), a) = 1.0;
        p.col(a) /= p.col(a).sum();
    }
    return p;
}

}  // namespace

TEST_CASE("channel validation") {
    CHECK_THROWS_AS(ClassicalChannel::make(RMatrix::Constant(2, 2, 0.3)), ValidationError);
    RMatrix neg(2, 1);
    neg << 1.5, -0.5;
    CHECK_THROWS_AS(ClassicalChannel::make(neg), ValidationError);
    CHECK_THROWS_AS(ClassicalChannel::make(RMatrix::Identity(2, 2), {"a"}), DimensionError);
    CHECK_THROWS_AS(QuantumChannel::make({CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)}),
                    ValidationError);
    CHECK_THROWS_AS(QuantumChannel::make({CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)}),
                    DimensionError);
    const ClassicalChannel id = identity_channel(3);
    CHECK(id.inputs == std::vector<std::string>{"0", "1", "2"});
}

TEST_CASE("classical confusability") {
    const ClassicalGraph loops = classical_confusability(identity_channel(2));
    CHECK(loops.edges == std::vector<std::pair<Index, Index>>{{0, 0}, {1, 1}});

    const ClassicalGraph complete =
        classical_confusability(ClassicalChannel::make(RMatrix::Constant(3, 3, 1.0 / 3.0)));
    CHECK(complete.edges.size() == 9);

    RMatrix bsc(2, 2);
    bsc << 0.9, 0.1, 0.1, 0.9;
    CHECK(classical_confusability(ClassicalChannel::make(bsc)).edges.size() == 4);

    // labels carry over
    const ClassicalChannel lab =
        ClassicalChannel::make(RMatrix::Identity(2, 2), {"x", "y"}, {"u", "v"});
    CHECK(classical_confusability(lab).vertices == std::vector<std::string>{"x", "y"});
}

TEST_CASE("Kraus lift of a classical channel") {
    const QuantumChannel id = channel_from_classical(identity_channel(2));
    REQUIRE(id.kraus.size() == 2);
    CHECK(id.kraus[0] == unit_matrix(2, 2, 0, 0));
    CHECK(id.kraus[1] == unit_matrix(2, 2, 1, 1));

    const QuantumChannel uni = channel_from_classical(ClassicalChannel::make(RMatrix::Constant(2, 2, 0.5)));
    REQUIRE(uni.kraus.size() == 4);
    for (const auto& k : uni.kraus) CHECK(std::abs(k.cwiseAbs().maxCoeff() - std::sqrt(0.5)) < 1e-15);

    Rng rng(1);
    for (int trial = 0; trial < 30; ++trial) {
        const RMatrix p = random_stochastic(rng, uniform_int(rng, 1, 5), uniform_int(rng, 1, 5), 0.3);
        const QuantumChannel q = channel_from_classical(ClassicalChannel::make(p));
        CHECK(q.trace_preservation_residual() < 1e-12);
        // diagonal inputs go to the classical output distribution
        const Index a = uniform_int(rng, 0, p.cols() - 1);
        const CMatrix out = q.apply(unit_matrix(p.cols(), p.cols(), a, a));
        for (Index b = 0; b < p.rows(); ++b) CHECK(std::abs(out(b, b) - p(b, a)) < 1e-12);
    }
}

TEST_CASE("quantum confusability graphs") {
    const QuantumGraph id = confusability_graph(channel_from_classical(identity_channel(2)), diagonal_algebra(2));
    CHECK(subspace_equal(id.space(), span(2, 2, {unit_matrix(2, 2, 0, 0), unit_matrix(2, 2, 1, 1)})));

    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const RMatrix p = random_stochastic(rng, uniform_int(rng, 1, 5), uniform_int(rng, 1, 5), 0.5);
        const ClassicalChannel n = ClassicalChannel::make(p);
        const QuantumGraph a = quantize_classical(classical_confusability(n));
        const QuantumGraph b = confusability_graph(channel_from_classical(n), diagonal_algebra(p.cols()));
        CHECK(graphs_equal(a, b));
    }

    // random TP channels on M_d: reflexive and symmetric
    for (int trial = 0; trial < 20; ++trial) {
        const Index d = uniform_int(rng, 2, 3);
        const Index r = uniform_int(rng, 1, 3);
        CMatrix stacked = random_matrix(rng, d * r, d);
        Eigen::HouseholderQR<CMatrix> qr(stacked);
        const CMatrix iso = qr.householderQ() * CMatrix::Identity(d * r, d);
        std::vector<CMatrix> kraus;
        for (Index i = 0; i < r; ++i) kraus.push_back(iso.middleRows(i * d, d));
        const QuantumChannel q = QuantumChannel::make(kraus);
        const QuantumGraph g = confusability_graph(q, full_algebra(d));
        CHECK(g.space().contains(CMatrix::Identity(d, d)));
        CHECK(is_reflexive(g));
        CHECK(is_symmetric(g));
    }
}

TEST_CASE("independent projections") {
    // 0 isolated with a loop; 1 and 2 joined
    const QuantumGraph g = quantize_classical(ClassicalGraph::make(3, {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {2, 1}}));
    const IndependenceVerdict one = verify_independent_projection(unit_matrix(3, 3, 0, 0), g);
    CHECK(one.holds);
    CHECK(!one.degenerate);
    CHECK(!verify_independent_projection(CMatrix::Identity(3, 3), g).holds);
    const IndependenceVerdict zero = verify_independent_projection(CMatrix::Zero(3, 3), g);
    CHECK(zero.holds);
    CHECK(zero.degenerate);
    CHECK_THROWS_AS(verify_independent_projection(2.0 * unit_matrix(3, 3, 0, 0), g), ValidationError);

    // complete graph with loops on M_2 has only C·I when compressed by a rank-one projection
    const QuantumGraph full = confusability_graph(QuantumChannel::make({CMatrix::Identity(2, 2)}), full_algebra(2));
    CVector v(2);
    v << 0.6, Complex(0.0, 0.8);
    CHECK(verify_independent_projection(v * v.adjoint(), full).holds);
    CHECK(verify_independent_projection(CMatrix::Identity(2, 2), full).holds);
}

TEST_CASE("independence number") {
    CHECK(independence_number(ClassicalGraph::make(4, {{0, 0}, {1, 1}, {2, 2}, {3, 3}})).size == 4);
    const ClassicalGraph c5 = ClassicalGraph::make(5, {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2},
                                                       {3, 4}, {4, 3}, {4, 0}, {0, 4}});
    const IndependentSet s = independence_number(c5);
    CHECK(s.size == 2);
    for (Index a : s.vertices)
        for (Index b : s.vertices)
            if (a != b) CHECK(!c5.has_edge(a, b));
    CHECK_THROWS_AS(independence_number(ClassicalGraph::make(13, {})), ValidationError);
}
