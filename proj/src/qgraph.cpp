#include "qgraph/qgraph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace qgraph {

namespace {

std::string idx(Index i) { return std::to_string(i); }

std::string unit_label(const MultiMatrixAlgebra& m, Index a) {
    const auto u = m.unit_of(a);
    return "e[" + idx(u.block) + "](" + idx(u.row) + "," + idx(u.col) + ")";
}

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

// Linear map vec(X) ↦ vec(XB − BX) in row-major flattening.
CMatrix commutator_matrix(const CMatrix& b) {
    const Index n = b.rows();
    return kron(identity(n), b.transpose()) - kron(b, identity(n));
}

}  // namespace

// ---------------------------------------------------------------------------
// QuantumGraph

double bimodule_residual(const MultiMatrixAlgebra& m, const Subspace& s) {
    const Subspace c = commutant(m);
    double r = 0.0;
    for (Index k = 0; k < s.dim(); ++k) {
        const CMatrix x = s.basis(k);
        for (Index l = 0; l < c.dim(); ++l) {
            const CMatrix a = c.basis(l);
            r = std::max(r, s.distance(a * x));
            r = std::max(r, s.distance(x * a));
        }
    }
    return r;
}

QuantumGraph::QuantumGraph(MultiMatrixAlgebra algebra, Subspace space)
    : algebra_(std::move(algebra)), space_(std::move(space)) {
    const Index n = algebra_.ambient_dim();
    if (space_.rows() != n || space_.cols() != n)
        throw DimensionError("graph space must consist of " + idx(n) + "x" + idx(n) + " matrices");
    const double r = bimodule_residual(algebra_, space_);
    if (r > std::max(space_.tol(), 1e-10) * 10.0)
        throw ValidationError("space is not a bimodule over the commutant (residual " +
                              std::to_string(r) + ")");
}

ClassicalGraph ClassicalGraph::make(Index n, std::vector<std::pair<Index, Index>> edges) {
    ClassicalGraph g;
    for (Index v = 0; v < n; ++v) g.vertices.push_back(std::to_string(v));
    for (const auto& [v, w] : edges)
        if (v < 0 || w < 0 || v >= n || w >= n)
            throw ValidationError("edge (" + idx(v) + "," + idx(w) + ") out of range");
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.edges = std::move(edges);
    return g;
}

bool ClassicalGraph::has_edge(Index v, Index w) const {
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(v, w));
}

// ---------------------------------------------------------------------------
// AnnihilatorIdeal

AnnihilatorIdeal::AnnihilatorIdeal(MultiMatrixAlgebra algebra, std::vector<CMatrix> supports,
                                   double tol)
    : algebra_(std::move(algebra)), q_(std::move(supports)), tol_(tol) {
    const Index k = algebra_.num_blocks();
    if (static_cast<Index>(q_.size()) != k * k) throw DimensionError("need one support per block pair");
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) {
            const CMatrix& q = q_[size_t(i * k + j)];
            const Index sz = algebra_.block_dim(i) * algebra_.block_dim(j);
            if (q.rows() != sz) throw DimensionError("support has the wrong length");
            if (q.cols() && (q.adjoint() * q - identity(q.cols())).norm() > 1e-8)
                throw ValidationError("support basis is not orthonormal");
        }
}

const CMatrix& AnnihilatorIdeal::support(Index i, Index j) const {
    return q_[size_t(i * algebra_.num_blocks() + j)];
}

Index AnnihilatorIdeal::dim() const {
    Index d = 0;
    for (Index i = 0; i < algebra_.num_blocks(); ++i)
        for (Index j = 0; j < algebra_.num_blocks(); ++j)
            d += support(i, j).rows() * support(i, j).cols();
    return d;
}

AnnihilatorIdeal AnnihilatorIdeal::generated_by(const MultiMatrixAlgebra& m,
                                                const std::vector<TensorElement>& elements,
                                                double tol) {
    const Index k = m.num_blocks();
    double scale = 0.0;
    for (const auto& z : elements) scale = std::max(scale, z.coeffs.norm());
    std::vector<std::vector<CMatrix>> per(size_t(k * k));
    for (const auto& z : elements) {
        auto blocks = to_pair_blocks(m, z);
        for (size_t b = 0; b < blocks.size(); ++b) per[b].push_back(blocks[b].adjoint());
    }
    std::vector<CMatrix> supports;
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) {
            const Index sz = m.block_dim(i) * m.block_dim(j);
            const auto& list = per[size_t(i * k + j)];
            CMatrix cols(sz, sz * static_cast<Index>(list.size()));
            for (size_t e = 0; e < list.size(); ++e) cols.middleCols(Index(e) * sz, sz) = list[e];
            supports.push_back(scale > 0.0 ? orth_absolute(cols, tol * scale) : CMatrix(sz, 0));
        }
    return AnnihilatorIdeal(m, std::move(supports), tol);
}

AnnihilatorIdeal AnnihilatorIdeal::from_basis(const MultiMatrixAlgebra& m,
                                              const std::vector<TensorElement>& elements,
                                              double tol) {
    AnnihilatorIdeal gen = generated_by(m, elements, tol);
    const Index d = m.dim();
    CMatrix cols(d * d, static_cast<Index>(elements.size()));
    for (size_t e = 0; e < elements.size(); ++e) cols.col(Index(e)) = flatten(elements[e].coeffs);
    const Subspace sp = Subspace::from_columns(d * d, 1, cols, tol);
    if (sp.dim() == gen.dim()) return gen;
    for (size_t e = 0; e < elements.size(); ++e)
        for (Index a = 0; a < d; ++a)
            for (Index b = 0; b < d; ++b) {
                const TensorElement prod =
                    tensor_multiply(m, elementary(m.basis_vector(a), m.basis_vector(b)), elements[e]);
                if (!sp.contains(flatten(prod.coeffs), std::max(tol, 1e-10) * 10.0))
                    throw ValidationError("not a left ideal: (" + unit_label(m, a) + " ⊗ " +
                                          unit_label(m, b) + ") * element " + idx(Index(e)) +
                                          " leaves the span");
            }
    throw NumericalError("left ideal check inconclusive");
}

bool AnnihilatorIdeal::contains(const TensorElement& z) const { return contains(z, tol_); }

bool AnnihilatorIdeal::contains(const TensorElement& z, double tol) const {
    if (z.coeffs.norm() <= 1e-13) return true;
    const auto blocks = to_pair_blocks(algebra_, z);
    double err = 0.0;
    for (size_t b = 0; b < blocks.size(); ++b) {
        const CMatrix& q = q_[b];
        const CMatrix r = blocks[b] - (blocks[b] * q) * q.adjoint();
        err += r.squaredNorm();
    }
    return std::sqrt(err) <= tol * z.coeffs.norm();
}

bool AnnihilatorIdeal::includes(const AnnihilatorIdeal& other) const {
    if (other.algebra_ != algebra_) throw DimensionError("ideals over different algebras");
    const double tol = std::max(tol_, other.tol_);
    for (size_t b = 0; b < q_.size(); ++b) {
        const CMatrix& q = q_[b];
        const CMatrix& o = other.q_[b];
        if (o.cols() == 0) continue;
        const CMatrix r = o - q * (q.adjoint() * o);
        for (Index c = 0; c < r.cols(); ++c)
            if (r.col(c).norm() > tol) return false;
    }
    return true;
}

bool AnnihilatorIdeal::equals(const AnnihilatorIdeal& other) const {
    return dim() == other.dim() && includes(other) && other.includes(*this);
}

std::vector<TensorElement> AnnihilatorIdeal::generators() const {
    const Index k = algebra_.num_blocks();
    std::vector<TensorElement> out;
    for (Index b = 0; b < k * k; ++b) {
        const CMatrix& q = q_[size_t(b)];
        if (q.cols() == 0) continue;
        std::vector<CMatrix> blocks;
        for (Index c = 0; c < k * k; ++c) {
            const Index sz = q_[size_t(c)].rows();
            blocks.push_back(c == b ? CMatrix(q * q.adjoint()) : CMatrix(CMatrix::Zero(sz, sz)));
        }
        out.push_back(from_pair_blocks(algebra_, blocks));
    }
    return out;
}

std::vector<TensorElement> AnnihilatorIdeal::basis() const {
    const Index k = algebra_.num_blocks();
    std::vector<TensorElement> out;
    for (Index b = 0; b < k * k; ++b) {
        const CMatrix& q = q_[size_t(b)];
        for (Index r = 0; r < q.rows(); ++r)
            for (Index c = 0; c < q.cols(); ++c) {
                std::vector<CMatrix> blocks;
                for (Index o = 0; o < k * k; ++o) {
                    const Index sz = q_[size_t(o)].rows();
                    blocks.push_back(CMatrix::Zero(sz, sz));
                }
                blocks[size_t(b)].row(r) = q.col(c).adjoint();
                out.push_back(from_pair_blocks(algebra_, blocks));
            }
    }
    return out;
}

TensorElement AnnihilatorIdeal::projection() const {
    std::vector<CMatrix> blocks;
    for (const auto& q : q_) blocks.push_back(q * q.adjoint());
    return from_pair_blocks(algebra_, blocks);
}

AnnihilatorIdeal AnnihilatorIdeal::dagger() const {
    const Index k = algebra_.num_blocks();
    std::vector<CMatrix> out(q_.size());
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) {
            const Index ni = algebra_.block_dim(i), nj = algebra_.block_dim(j);
            const CMatrix& q = support(i, j);
            CMatrix p(ni * nj, q.cols());
            for (Index a = 0; a < ni; ++a)
                for (Index b = 0; b < nj; ++b) p.row(b * ni + a) = q.row(a * nj + b).conjugate();
            out[size_t(j * k + i)] = p;
        }
    return AnnihilatorIdeal(algebra_, std::move(out), tol_);
}

// ---------------------------------------------------------------------------
// Constructions

QuantumGraph quantize_classical(const ClassicalGraph& g, double tol) {
    const Index n = g.size();
    CMatrix cols(n * n, static_cast<Index>(g.edges.size()));
    for (size_t e = 0; e < g.edges.size(); ++e) {
        cols.col(Index(e)).setZero();
        cols(g.edges[e].first * n + g.edges[e].second, Index(e)) = 1.0;
    }
    return QuantumGraph(diagonal_algebra(n), Subspace::from_orthonormal(n, n, cols, tol));
}

QuantumGraph bimodule_closure(const MultiMatrixAlgebra& m, const std::vector<CMatrix>& generators,
                              double tol) {
    const Index n = m.ambient_dim();
    const auto comm = commutant(m).basis_matrices();
    std::vector<CMatrix> left;
    for (const auto& g : generators) {
        if (g.rows() != n || g.cols() != n)
            throw DimensionError("generator must be " + idx(n) + "x" + idx(n));
        for (const auto& a : comm) left.push_back(a * g);
    }
    const Subspace l = span(n, n, left, tol);
    std::vector<CMatrix> both;
    for (Index k = 0; k < l.dim(); ++k) {
        const CMatrix x = l.basis(k);
        for (const auto& b : comm) both.push_back(x * b);
    }
    return QuantumGraph(m, span(n, n, both, tol));
}

AnnihilatorIdeal annihilator(const QuantumGraph& g) {
    const MultiMatrixAlgebra& m = g.algebra();
    const Index k = m.num_blocks();
    const auto basis = g.space().basis_matrices();
    std::vector<CMatrix> supports;
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) {
            const Index sz = m.block_dim(i) * m.block_dim(j);
            const Index w = m.multiplicity(i) * m.multiplicity(j);
            CMatrix cols(sz, w * static_cast<Index>(basis.size()));
            for (size_t s = 0; s < basis.size(); ++s)
                cols.middleCols(Index(s) * w, w) = operator_block(m, basis[s], i, j);
            const CMatrix v = orth_absolute(cols, g.tol());
            supports.push_back(complement_basis(v, g.tol()));
        }
    return AnnihilatorIdeal(m, std::move(supports), g.tol());
}

QuantumGraph graph_from_annihilator(const MultiMatrixAlgebra& m, const AnnihilatorIdeal& ideal) {
    if (ideal.algebra() != m) throw DimensionError("ideal lives over a different algebra");
    const Index n = m.ambient_dim();
    const Index k = m.num_blocks();
    std::vector<CVector> cols;
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) {
            const CMatrix v = complement_basis(ideal.support(i, j), ideal.tol());
            const Index w = m.multiplicity(i) * m.multiplicity(j);
            for (Index c = 0; c < v.cols(); ++c)
                for (Index e = 0; e < w; ++e) {
                    CMatrix r = CMatrix::Zero(v.rows(), w);
                    r.col(e) = v.col(c);
                    CMatrix t = CMatrix::Zero(n, n);
                    set_operator_block(m, t, i, j, r);
                    cols.push_back(flatten(t));
                }
        }
    CMatrix q(n * n, static_cast<Index>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c) q.col(Index(c)) = cols[c];
    return QuantumGraph(m, Subspace::from_orthonormal(n, n, std::move(q), ideal.tol()));
}

QuantumGraph graph_from_annihilator(const MultiMatrixAlgebra& m,
                                    const std::vector<TensorElement>& ideal_basis, double tol) {
    return graph_from_annihilator(m, AnnihilatorIdeal::from_basis(m, ideal_basis, tol));
}

QuantumGraph graph_complement(const QuantumGraph& g) {
    return QuantumGraph(g.algebra(), orthogonal_complement(g.space()));
}

TensorElement projection_of_graph(const QuantumGraph& g) {
    const MultiMatrixAlgebra& m = g.algebra();
    const AnnihilatorIdeal ann = annihilator(g);
    const Index k = m.num_blocks();
    std::vector<CMatrix> blocks;
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) {
            const CMatrix& q = ann.support(i, j);
            blocks.push_back(identity(q.rows()) - q * q.adjoint());
        }
    const TensorElement p = from_pair_blocks(m, blocks);
    const double tol = std::max(g.tol(), 1e-10) * 10.0;
    for (Index s = 0; s < g.space().dim(); ++s) {
        const CMatrix x = g.space().basis(s);
        if ((phi_apply(m, p, x) - x).norm() > tol)
            throw NumericalError("projection does not fix the graph (basis element " + idx(s) + ")");
    }
    const TensorElement one_minus = tensor_unit(m) - p;
    if (!AnnihilatorIdeal::generated_by(m, {one_minus}, g.tol()).equals(ann))
        throw NumericalError("(M⊗M^op)(1⊗1 - p) differs from the annihilator");
    const AnnihilatorIdeal ann_perp = annihilator(graph_complement(g));
    if (!AnnihilatorIdeal::generated_by(m, {p}, g.tol()).equals(ann_perp))
        throw NumericalError("(M⊗M^op) p differs from the annihilator of the complement");
    return p;
}

// ---------------------------------------------------------------------------
// Properties

RouteVerdicts reflexive_routes(const QuantumGraph& g) {
    const MultiMatrixAlgebra& m = g.algebra();
    RouteVerdicts v{subspace_includes(g.space(), commutant(m, g.tol())), true};
    const double tol = std::max(g.tol(), 1e-12) * double(std::max<Index>(1, m.ambient_dim()));
    for (const auto& z : annihilator(g).generators())
        if (mult_map(m, z).norm() > tol * std::max(1.0, z.coeffs.norm())) {
            v.annihilator = false;
            break;
        }
    return v;
}

RouteVerdicts symmetric_routes(const QuantumGraph& g) {
    RouteVerdicts v{true, true};
    for (Index s = 0; s < g.space().dim(); ++s)
        if (!g.space().contains(g.space().basis(s).adjoint())) {
            v.direct = false;
            break;
        }
    const AnnihilatorIdeal ann = annihilator(g);
    v.annihilator = ann.dagger().equals(ann);
    return v;
}

bool is_reflexive(const QuantumGraph& g) {
    const auto v = reflexive_routes(g);
    if (v.direct != v.annihilator)
        throw ConsistencyError("reflexivity routes disagree (commutant inclusion " +
                               std::string(v.direct ? "true" : "false") + ", annihilator " +
                               (v.annihilator ? "true" : "false") + ")");
    return v.direct;
}

bool is_symmetric(const QuantumGraph& g) {
    const auto v = symmetric_routes(g);
    if (v.direct != v.annihilator)
        throw ConsistencyError("symmetry routes disagree (adjoint closure " +
                               std::string(v.direct ? "true" : "false") + ", involution " +
                               (v.annihilator ? "true" : "false") + ")");
    return v.direct;
}

bool is_transitive(const QuantumGraph& g) {
    const auto basis = g.space().basis_matrices();
    for (const auto& x : basis)
        for (const auto& y : basis)
            if (!g.space().contains(x * y)) return false;
    return true;
}

namespace {

std::vector<CMatrix> generating_set(const QuantumGraph& g) {
    auto gens = g.space().basis_matrices();
    for (const auto& c : commutant(g.algebra()).basis_matrices()) gens.push_back(c);
    return gens;
}

CMatrix kernel_of_commutators(const std::vector<CMatrix>& gens, Index n, double tol) {
    CMatrix stacked(static_cast<Index>(gens.size()) * n * n, n * n);
    for (size_t k = 0; k < gens.size(); ++k)
        stacked.middleRows(Index(k) * n * n, n * n) = commutator_matrix(gens[k]);
    return null_space_absolute(stacked, tol);
}

}  // namespace

Subspace generated_algebra(const QuantumGraph& g) {
    const Index n = g.algebra().ambient_dim();
    const auto gens = generating_set(g);
    std::vector<CMatrix> start = gens;
    start.push_back(identity(n));
    Subspace b = span(n, n, start, g.tol());
    for (Index iter = 0; iter <= n * n; ++iter) {
        if (b.dim() == n * n) return b;
        std::vector<CMatrix> next = b.basis_matrices();
        for (Index k = 0; k < b.dim(); ++k) {
            const CMatrix x = b.basis(k);
            for (const auto& y : gens) next.push_back(x * y);
        }
        Subspace grown = span(n, n, next, g.tol());
        if (grown.dim() == b.dim()) return grown;
        b = std::move(grown);
    }
    throw NumericalError("generated algebra did not stabilize");
}

Connectivity is_strongly_connected(const QuantumGraph& g) {
    const MultiMatrixAlgebra& m = g.algebra();
    const Index n = m.ambient_dim();
    const Subspace b = generated_algebra(g);
    Connectivity out{b.dim() == n * n, b.dim(), std::nullopt};
    if (out.connected || n == 0) return out;

    // Invariant subspace of b: the range of its radical, or else an eigenspace of its commutant.
    const auto basis = b.basis_matrices();
    const Index d = b.dim();
    CMatrix trace_form(d, d);
    for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l)
            trace_form(k, l) = (basis[size_t(k)] * basis[size_t(l)]).trace();
    const CMatrix rad = null_space(trace_form, 1e-9);
    CMatrix w;
    if (rad.cols() > 0) {
        CMatrix cols(n, n * rad.cols());
        for (Index r = 0; r < rad.cols(); ++r) {
            CMatrix x = CMatrix::Zero(n, n);
            for (Index l = 0; l < d; ++l) x += rad(l, r) * basis[size_t(l)];
            cols.middleCols(r * n, n) = x;
        }
        w = orth(cols, 1e-8);
    } else {
        const CMatrix comm = kernel_of_commutators(generating_set(g), n, 1e-8);
        std::mt19937_64 rng(0xc0ffeeULL);
        std::normal_distribution<double> nd;
        for (int attempt = 0; attempt < 8 && (w.cols() == 0 || w.cols() == n); ++attempt) {
            CVector c(comm.cols());
            for (Index l = 0; l < c.size(); ++l) c(l) = Complex(nd(rng), nd(rng));
            const CMatrix x = unflatten(comm * c, n, n);
            Eigen::ComplexEigenSolver<CMatrix> es(x);
            const Complex lambda = es.eigenvalues()(0);
            w = null_space_absolute(x - lambda * identity(n), 1e-7 * std::max(1.0, x.norm()));
        }
    }
    if (w.cols() == 0 || w.cols() == n) throw NumericalError("no invariant subspace found");
    const CMatrix p = w * w.adjoint();
    const CMatrix q = identity(n) - p;
    const double tol = 1e-7;
    if (algebra_span(m).distance(p) > tol)
        throw NumericalError("witness projection is not in the algebra");
    for (Index s = 0; s < g.space().dim(); ++s)
        if ((q * g.space().basis(s) * p).norm() > tol)
            throw NumericalError("witness projection fails (1-p) S p = 0");
    out.witness = p;
    return out;
}

std::vector<CMatrix> components(const QuantumGraph& g) {
    if (!is_symmetric(g)) throw ValidationError("components are defined for symmetric graphs only");
    const Index n = g.algebra().ambient_dim();
    if (n == 0) return {};
    const CMatrix comm = kernel_of_commutators(generating_set(g), n, 1e-8);
    std::vector<CMatrix> mats;
    for (Index c = 0; c < comm.cols(); ++c) mats.push_back(unflatten(comm.col(c), n, n));
    std::vector<CMatrix> out;
    for (const auto& summand : decompose_star_algebra(mats, g.tol()))
        for (Index p = 0; p < summand.size; ++p) out.push_back(summand.unit(p, p));
    return out;
}

bool graphs_equal(const QuantumGraph& a, const QuantumGraph& b) {
    return a.algebra() == b.algebra() && subspace_equal(a.space(), b.space());
}

}  // namespace qgraph
