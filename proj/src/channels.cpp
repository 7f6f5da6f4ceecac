#include "qgraph/channels.hpp"

#include <algorithm>
#include <cmath>

#include "qgraph/error.hpp"

namespace qgraph {

namespace {

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::vector<std::string> default_labels(Index n) {
    std::vector<std::string> out;
    for (Index i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

}  // namespace

ClassicalChannel ClassicalChannel::make(RMatrix probs, std::vector<std::string> inputs,
                                        std::vector<std::string> outputs, double tol) {
    if (probs.rows() == 0 || probs.cols() == 0) throw ValidationError("channel has no symbols");
    if (!probs.allFinite()) throw ValidationError("channel has non-finite entries");
    if (inputs.empty()) inputs = default_labels(probs.cols());
    if (outputs.empty()) outputs = default_labels(probs.rows());
    if (Index(inputs.size()) != probs.cols() || Index(outputs.size()) != probs.rows())
        throw DimensionError("label counts do not match the probability matrix");
    for (Index a = 0; a < probs.cols(); ++a) {
        for (Index b = 0; b < probs.rows(); ++b)
            if (probs(b, a) < -tol || probs(b, a) > 1.0 + tol)
                throw ValidationError("N(" + outputs[size_t(b)] + "|" + inputs[size_t(a)] +
                                      ") is not a probability");
        if (std::abs(probs.col(a).sum() - 1.0) > tol)
            throw ValidationError("column " + inputs[size_t(a)] + " does not sum to 1");
    }
    return {std::move(inputs), std::move(outputs), std::move(probs)};
}

QuantumChannel QuantumChannel::make(std::vector<CMatrix> kraus, double tol) {
    if (kraus.empty()) throw ValidationError("channel needs at least one Kraus operator");
    const Index dout = kraus.front().rows();
    const Index din = kraus.front().cols();
    for (size_t i = 0; i < kraus.size(); ++i) {
        if (kraus[i].rows() != dout || kraus[i].cols() != din)
            throw DimensionError("Kraus operator " + std::to_string(i) + " has a different shape");
        if (!all_finite(kraus[i]))
            throw ValidationError("Kraus operator " + std::to_string(i) + " is not finite");
    }
    QuantumChannel q{std::move(kraus), din, dout};
    if (q.trace_preservation_residual() > tol)
        throw ValidationError("Kraus operators do not satisfy Σ K†K = I");
    return q;
}

CMatrix QuantumChannel::apply(const CMatrix& t) const {
    if (t.rows() != d_in || t.cols() != d_in) throw DimensionError("input has the wrong size");
    CMatrix out = CMatrix::Zero(d_out, d_out);
    for (const auto& k : kraus) out += k * t * k.adjoint();
    return out;
}

double QuantumChannel::trace_preservation_residual() const {
    CMatrix s = -CMatrix::Identity(d_in, d_in);
    for (const auto& k : kraus) s += k.adjoint() * k;
    return max_abs(s);
}

ClassicalChannel identity_channel(Index n) {
    return ClassicalChannel::make(RMatrix::Identity(n, n));
}

ClassicalGraph classical_confusability(const ClassicalChannel& n, double tol) {
    const Index na = n.num_inputs();
    std::vector<std::pair<Index, Index>> edges;
    for (Index a1 = 0; a1 < na; ++a1)
        for (Index a2 = 0; a2 < na; ++a2)
            for (Index b = 0; b < n.num_outputs(); ++b)
                if (n.probs(b, a1) * n.probs(b, a2) > tol) {
                    edges.emplace_back(a1, a2);
                    break;
                }
    ClassicalGraph g = ClassicalGraph::make(na, std::move(edges));
    g.vertices = n.inputs;
    return g;
}

QuantumChannel channel_from_classical(const ClassicalChannel& n, double tol) {
    std::vector<CMatrix> kraus;
    for (Index a = 0; a < n.num_inputs(); ++a)
        for (Index b = 0; b < n.num_outputs(); ++b) {
            const double p = n.probs(b, a);
            if (p <= tol) continue;
            CMatrix k = CMatrix::Zero(n.num_outputs(), n.num_inputs());
            k(b, a) = std::sqrt(p);
            kraus.push_back(std::move(k));
        }
    // dropped terms shift the column sums by at most |B|·tol
    return QuantumChannel::make(std::move(kraus), std::max(1e-9, 4.0 * tol * double(n.num_outputs())));
}

QuantumGraph confusability_graph(const QuantumChannel& q, const MultiMatrixAlgebra& m, double tol) {
    if (q.d_in != m.ambient_dim())
        throw DimensionError("channel input dimension " + std::to_string(q.d_in) +
                             " does not match the algebra on C^" + std::to_string(m.ambient_dim()));
    std::vector<CMatrix> products;
    for (const auto& ki : q.kraus)
        for (const auto& kj : q.kraus) products.push_back(ki.adjoint() * kj);
    return bimodule_closure(m, products, tol);
}

IndependenceVerdict verify_independent_projection(const CMatrix& p, const QuantumGraph& g,
                                                  double tol) {
    const Index n = g.algebra().ambient_dim();
    if (p.rows() != n || p.cols() != n)
        throw DimensionError("projection must be " + std::to_string(n) + "x" + std::to_string(n));
    if (max_abs(p - p.adjoint()) > tol || max_abs(p * p - p) > tol)
        throw ValidationError("P is not an orthogonal projection");
    IndependenceVerdict v;
    const double pn = p.norm();
    if (pn <= tol) {
        v.holds = true;
        v.degenerate = true;
        return v;
    }
    // distance of P s P from the line C·P
    for (const auto& s : g.space().basis_matrices()) {
        const CMatrix x = p * s * p;
        const Complex c = hs_inner(p, x) / (pn * pn);
        v.residual = std::max(v.residual, (x - c * p).norm());
    }
    v.holds = v.residual <= tol;
    return v;
}

IndependentSet independence_number(const ClassicalGraph& g) {
    const Index n = g.size();
    if (n > 12) throw ValidationError("brute-force independence needs at most 12 vertices");
    std::vector<unsigned> conflict(size_t(n), 0);
    for (const auto& [v, w] : g.edges)
        if (v != w) {
            conflict[size_t(v)] |= 1u << w;
            conflict[size_t(w)] |= 1u << v;
        }
    unsigned best = 0;
    int best_size = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        const int sz = __builtin_popcount(mask);
        if (sz <= best_size) continue;
        bool ok = true;
        for (Index v = 0; v < n && ok; ++v)
            if ((mask >> v) & 1u) ok = (conflict[size_t(v)] & mask) == 0;
        if (ok) {
            best = mask;
            best_size = sz;
        }
    }
    IndependentSet out;
    out.size = best_size;
    for (Index v = 0; v < n; ++v)
        if ((best >> v) & 1u) out.vertices.push_back(v);
    return out;
}

}  // namespace qgraph
