#pragma once

#include <string>
#include <vector>

#include "qgraph/qgraph.hpp"

namespace qgraph {

// N(b|a) stored as probs(b, a); columns sum to one.
struct ClassicalChannel {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    RMatrix probs;

    // Labels default to 0, 1, ...
    static ClassicalChannel make(RMatrix probs, std::vector<std::string> inputs = {},
                                 std::vector<std::string> outputs = {}, double tol = 1e-9);
    Index num_inputs() const { return probs.cols(); }
    Index num_outputs() const { return probs.rows(); }
};

// T ↦ Σ K_i T K_i^† with K_i : C^{d_in} → C^{d_out}.
struct QuantumChannel {
    std::vector<CMatrix> kraus;
    Index d_in = 0;
    Index d_out = 0;

    static QuantumChannel make(std::vector<CMatrix> kraus, double tol = 1e-9);
    CMatrix apply(const CMatrix& t) const;
    // ‖Σ K_i^† K_i − I‖_max
    double trace_preservation_residual() const;
};

ClassicalChannel identity_channel(Index n);

ClassicalGraph classical_confusability(const ClassicalChannel& n, double tol = 1e-12);
// K_ab = √N(b|a) |b⟩⟨a|, skipping probabilities at or below tol.
QuantumChannel channel_from_classical(const ClassicalChannel& n, double tol = 1e-12);
// bimodule closure of span{K_i^† K_j} over the commutant of m
QuantumGraph confusability_graph(const QuantumChannel& q, const MultiMatrixAlgebra& m,
                                 double tol = kDefaultTol);

struct IndependenceVerdict {
    bool holds = false;
    bool degenerate = false;  // P = 0
    double residual = 0.0;   // largest distance of P s P from C·P
};

// P S P ⊆ C·P on a basis of the graph; throws ValidationError if p is not a projection.
IndependenceVerdict verify_independent_projection(const CMatrix& p, const QuantumGraph& g,
                                                  double tol = 1e-8);

struct IndependentSet {
    Index size = 0;
    std::vector<Index> vertices;
};
// Largest set of vertices with no edges between distinct members; |V| ≤ 12.
IndependentSet independence_number(const ClassicalGraph& g);

}  // namespace qgraph
