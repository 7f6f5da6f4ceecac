#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qgraph/algebra.hpp"
#include "qgraph/qgraph.hpp"

namespace testing_support {

using namespace qgraph;

using Rng = std::mt19937_64;

inline Complex gauss_c(Rng& rng) {
    std::normal_distribution<double> nd;
    return {nd(rng), nd(rng)};
}

inline Index uniform_int(Rng& rng, Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline CMatrix random_matrix(Rng& rng, Index r, Index c) {
    CMatrix m(r, c);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = gauss_c(rng);
    return m;
}

inline CVector random_vector(Rng& rng, Index n) { return random_matrix(rng, n, 1); }

inline CMatrix random_unitary(Rng& rng, Index n) {
    Eigen::HouseholderQR<CMatrix> qr(random_matrix(rng, n, n));
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR();
    for (Index i = 0; i < n; ++i) {
        const Complex d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

inline CMatrix random_psd(Rng& rng, Index n, Index rank) {
    const CMatrix x = random_matrix(rng, n, rank);
    return x * x.adjoint();
}

// Random multi-matrix algebra with ambient dimension at most max_n.
inline MultiMatrixAlgebra random_algebra(Rng& rng, Index max_n) {
    for (;;) {
        const Index k = uniform_int(rng, 1, 3);
        std::vector<Index> dims, mults;
        Index total = 0;
        for (Index i = 0; i < k; ++i) {
            const Index n = uniform_int(rng, 1, 3);
            const Index m = uniform01(rng) < 0.7 ? 1 : uniform_int(rng, 2, 3);
            dims.push_back(n);
            mults.push_back(m);
            total += n * m;
        }
        if (total <= max_n) return build_algebra(dims, mults);
    }
}

// Operator supported on block pair (i, j) with rank-one reshaped form v w^T.
inline CMatrix random_pair_generator(Rng& rng, const MultiMatrixAlgebra& m, Index i, Index j) {
    const Index n = m.ambient_dim();
    const CMatrix r = random_vector(rng, m.block_dim(i) * m.block_dim(j)) *
                      random_vector(rng, m.multiplicity(i) * m.multiplicity(j)).transpose();
    CMatrix t = CMatrix::Zero(n, n);
    set_operator_block(m, t, i, j, r);
    return t;
}

inline QuantumGraph random_quantum_graph(Rng& rng, const MultiMatrixAlgebra& m) {
    std::vector<CMatrix> gens;
    const Index count = uniform_int(rng, 0, 4);
    for (Index g = 0; g < count; ++g) {
        if (uniform01(rng) < 0.15) {
            gens.push_back(random_matrix(rng, m.ambient_dim(), m.ambient_dim()));
        } else {
            const Index i = uniform_int(rng, 0, m.num_blocks() - 1);
            const Index j = uniform_int(rng, 0, m.num_blocks() - 1);
            gens.push_back(random_pair_generator(rng, m, i, j));
        }
    }
    if (gens.empty()) return QuantumGraph(m, Subspace::zero(m.ambient_dim(), m.ambient_dim()));
    return bimodule_closure(m, gens);
}

inline QuantumGraph symmetrize(const QuantumGraph& g) {
    std::vector<CMatrix> gens;
    for (const auto& s : g.space().basis_matrices()) {
        gens.push_back(s);
        gens.push_back(s.adjoint());
    }
    if (gens.empty()) return g;
    return bimodule_closure(g.algebra(), gens);
}

inline ClassicalGraph random_classical_graph(Rng& rng, Index n, double p) {
    std::vector<std::pair<Index, Index>> edges;
    for (Index v = 0; v < n; ++v)
        for (Index w = 0; w < n; ++w)
            if (uniform01(rng) < p) edges.emplace_back(v, w);
    return ClassicalGraph::make(n, edges);
}

// Random unital *-homomorphism from source into a target of ambient dimension ≤ max_n.
inline StarHom random_star_hom(Rng& rng, const MultiMatrixAlgebra& source, Index max_n,
                               bool random_unitaries = true) {
    for (;;) {
        const Index kt = uniform_int(rng, 1, 3);
        StarHom::Bratteli b(size_t(kt), std::vector<Index>(size_t(source.num_blocks()), 0));
        std::vector<Index> dims, mults;
        Index total = 0;
        bool ok = true;
        for (Index j = 0; j < kt; ++j) {
            Index nj = 0;
            for (Index i = 0; i < source.num_blocks(); ++i) {
                const Index c = uniform_int(rng, 0, 2);
                b[size_t(j)][size_t(i)] = c;
                nj += c * source.block_dim(i);
            }
            if (nj == 0) ok = false;
            dims.push_back(nj);
            mults.push_back(uniform01(rng) < 0.75 ? 1 : 2);
            total += nj * mults.back();
        }
        if (!ok || total > max_n) continue;
        const MultiMatrixAlgebra target(dims, mults);
        std::vector<CMatrix> us;
        if (random_unitaries)
            for (Index j = 0; j < kt; ++j) us.push_back(random_unitary(rng, dims[size_t(j)]));
        return star_hom(source, target, b, us);
    }
}

inline std::vector<TensorElement> random_multipliers(Rng& rng, const MultiMatrixAlgebra& m,
                                                     int count) {
    std::vector<TensorElement> out;
    for (int c = 0; c < count; ++c)
        out.push_back(elementary(random_vector(rng, m.dim()), random_vector(rng, m.dim())));
    return out;
}

// Largest graph over θ's target for which θ is a morphism from g1.
inline QuantumGraph largest_target_graph(const StarHom& theta, const QuantumGraph& g1) {
    std::vector<TensorElement> pushed;
    for (const auto& g : annihilator(g1).generators()) pushed.push_back(pushforward(theta, g));
    return graph_from_annihilator(theta.target(),
                                  AnnihilatorIdeal::generated_by(theta.target(), pushed));
}

}  // namespace testing_support
