#include "qgraph/category.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qgraph/error.hpp"

namespace qgraph {

namespace {

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::string pair_name(Index j, Index k) {
    return "(" + std::to_string(j) + ", " + std::to_string(k) + ")";
}

bool same_action(const StarHom& a, const StarHom& b, double tol) {
    const CMatrix& x = a.action();
    const CMatrix& y = b.action();
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    return max_abs(x - y) <= tol * std::max(1.0, max_abs(x));
}

double op_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

void check_same_space(const Subspace& a, const Subspace& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.dim() != b.dim() ||
        !subspace_equal(a, b))
        throw DimensionError(std::string(what) + " do not match");
}

}  // namespace

// ---------------------------------------------------------------------------
// Quantum graph diagrams

QGraphDiagram chain_diagram(std::vector<QuantumGraph> objects, std::vector<StarHom> links) {
    if (objects.empty() || links.size() + 1 != objects.size())
        throw DimensionError("a chain of " + std::to_string(objects.size()) + " objects needs " +
                             std::to_string(objects.empty() ? 0 : objects.size() - 1) + " links");
    QGraphDiagram d;
    d.objects = std::move(objects);
    for (size_t j = 0; j < links.size(); ++j)
        d.arrows.push_back({Index(j), Index(j + 1), std::move(links[j])});
    return d;
}

ResolvedDiagram::ResolvedDiagram(const QGraphDiagram& d, double tol) : objects_(d.objects) {
    const Index n = size();
    if (n == 0) throw ValidationError("diagram has no objects");
    for (const auto& a : d.arrows) {
        if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n)
            throw ValidationError("arrow " + pair_name(a.from, a.to) + " leaves the index set");
        if (a.from == a.to)
            throw ValidationError("arrow " + pair_name(a.from, a.to) + " is a loop");
        if (a.hom.source() != object(a.from).algebra() || a.hom.target() != object(a.to).algebra())
            throw DimensionError("arrow " + pair_name(a.from, a.to) +
                                 " does not connect the algebras of its endpoints");
    }

    // Kahn order; a cycle means the arrows do not generate a partial order
    std::vector<Index> indeg(size_t(n), 0);
    for (const auto& a : d.arrows) ++indeg[size_t(a.to)];
    std::vector<Index> order;
    std::vector<Index> ready;
    for (Index j = 0; j < n; ++j)
        if (indeg[size_t(j)] == 0) ready.push_back(j);
    while (!ready.empty()) {
        const Index j = ready.front();
        ready.erase(ready.begin());
        order.push_back(j);
        for (const auto& a : d.arrows)
            if (a.from == j && --indeg[size_t(a.to)] == 0) ready.push_back(a.to);
    }
    if (Index(order.size()) != n) throw ValidationError("diagram arrows form a cycle");

    anns_.reserve(size_t(n));
    for (Index j = 0; j < n; ++j) anns_.push_back(annihilator(object(j)));

    for (const auto& a : d.arrows)
        if (!annihilator_route(a.hom, anns_[size_t(a.from)], anns_[size_t(a.to)], 1e-8).holds)
            throw ValidationError("arrow " + pair_name(a.from, a.to) +
                                  " is not a quantum graph morphism");

    homs_.assign(size_t(n), std::vector<std::optional<StarHom>>(size_t(n)));
    for (Index j = 0; j < n; ++j) homs_[size_t(j)][size_t(j)] = StarHom::identity(object(j).algebra());

    const double ftol = std::max(tol, 1e-8);
    // via[i][k]: middle index of the path that first produced θ_{i,k}
    std::vector<std::vector<Index>> via(static_cast<size_t>(n), std::vector<Index>(static_cast<size_t>(n), -1));
    auto settle = [&](Index i, Index j, Index k, const StarHom& h) {
        auto& slot = homs_[size_t(i)][size_t(k)];
        if (!slot) {
            slot = h;
            via[size_t(i)][size_t(k)] = j;
        } else if (!same_action(*slot, h, ftol)) {
            const Index mid = j != i ? j : via[size_t(i)][size_t(k)];
            if (mid == i)
                throw ValidationError("parallel arrows " + pair_name(i, k) + " disagree");
            throw ValidationError("functoriality fails at (" + std::to_string(i) + ", " +
                                  std::to_string(mid) + ", " + std::to_string(k) + ")");
        }
    };
    for (Index k : order)
        for (const auto& a : d.arrows) {
            if (a.to != k) continue;
            const Index j = a.from;
            for (Index i = 0; i < n; ++i) {
                const auto& left = homs_[size_t(i)][size_t(j)];
                if (!left) continue;
                settle(i, j, k, i == j ? a.hom : compose(a.hom, *left));
            }
        }

    top_ = -1;
    for (Index t = 0; t < n && top_ < 0; ++t) {
        bool all = true;
        for (Index j = 0; j < n; ++j) all = all && homs_[size_t(j)][size_t(t)].has_value();
        if (all) top_ = t;
    }
    if (top_ < 0) throw ValidationError("diagram has no maximum index");
}

bool ResolvedDiagram::leq(Index j, Index k) const { return homs_[size_t(j)][size_t(k)].has_value(); }

const StarHom& ResolvedDiagram::hom(Index j, Index k) const {
    const auto& h = homs_.at(size_t(j)).at(size_t(k));
    if (!h) throw ValidationError("indices " + pair_name(j, k) + " are not ordered");
    return *h;
}

std::vector<std::pair<Index, Index>> ResolvedDiagram::order_pairs() const {
    std::vector<std::pair<Index, Index>> out;
    for (Index j = 0; j < size(); ++j)
        for (Index k = 0; k < size(); ++k)
            if (j != k && leq(j, k)) out.emplace_back(j, k);
    return out;
}

QGraphLimit qgraph_limit(const QGraphDiagram& d, double tol) {
    return qgraph_limit(ResolvedDiagram(d, tol), tol);
}

QGraphLimit qgraph_limit(const ResolvedDiagram& d, double tol) {
    const Index t = d.top();
    const MultiMatrixAlgebra& m = d.object(t).algebra();
    std::vector<StarHom> legs;
    std::vector<TensorElement> gens;
    for (Index j = 0; j < d.size(); ++j) {
        legs.push_back(d.hom(j, t));
        for (const auto& g : d.annihilator_of(j).generators())
            gens.push_back(pushforward(legs.back(), g));
    }
    AnnihilatorIdeal ideal = AnnihilatorIdeal::generated_by(m, gens, tol);
    QuantumGraph graph = graph_from_annihilator(m, ideal);

    for (const auto& [j, k] : d.order_pairs()) {
        const CMatrix diff = legs[size_t(k)].action() * d.hom(j, k).action() -
                             legs[size_t(j)].action();
        if (max_abs(diff) > 1e-8)
            throw ConsistencyError("limit legs do not commute with θ" + pair_name(j, k));
    }
    for (Index j = 0; j < d.size(); ++j)
        if (!annihilator_route(legs[size_t(j)], d.annihilator_of(j), ideal, 1e-8).holds)
            throw ConsistencyError("limit leg " + std::to_string(j) + " is not a morphism");
    return {std::move(graph), std::move(ideal), t, std::move(legs)};
}

ConeVerdict verify_cone(const QGraphDiagram& d, const Cone& cone, double tol) {
    ResolvedDiagram r(d);
    return verify_cone(r, qgraph_limit(r), cone, tol);
}

ConeVerdict verify_cone(const ResolvedDiagram& d, const QGraphLimit& limit, const Cone& cone,
                        double tol) {
    const Index n = d.size();
    if (Index(cone.legs.size()) != n)
        throw DimensionError("cone has " + std::to_string(cone.legs.size()) + " legs for " +
                             std::to_string(n) + " objects");
    const MultiMatrixAlgebra& apex = cone.apex.algebra();
    for (Index j = 0; j < n; ++j) {
        const StarHom& psi = cone.legs[size_t(j)];
        if (psi.source() != d.object(j).algebra() || psi.target() != apex)
            throw DimensionError("cone leg " + std::to_string(j) + " has the wrong endpoints");
    }

    ConeVerdict v;
    v.commutes = true;
    for (const auto& [j, k] : d.order_pairs()) {
        const CMatrix& pj = cone.legs[size_t(j)].action();
        const CMatrix diff = cone.legs[size_t(k)].action() * d.hom(j, k).action() - pj;
        if (max_abs(diff) > tol * std::max(1.0, max_abs(pj))) v.commutes = false;
    }
    const AnnihilatorIdeal ann_apex = annihilator(cone.apex);
    v.legs_morphic = true;
    for (Index j = 0; j < n && v.legs_morphic; ++j)
        v.legs_morphic =
            annihilator_route(cone.legs[size_t(j)], d.annihilator_of(j), ann_apex, tol).holds;

    // μ [Θ_0 ... Θ_n] = [Ψ_0 ... Ψ_n]
    const Index dl = limit.graph.algebra().dim();
    Index total = 0;
    for (Index j = 0; j < n; ++j) total += d.object(j).algebra().dim();
    CMatrix theta(dl, total);
    CMatrix psi(apex.dim(), total);
    Index off = 0;
    for (Index j = 0; j < n; ++j) {
        const Index dj = d.object(j).algebra().dim();
        theta.middleCols(off, dj) = limit.legs[size_t(j)].action();
        psi.middleCols(off, dj) = cone.legs[size_t(j)].action();
        off += dj;
    }
    const CMatrix mu =
        theta.transpose().completeOrthogonalDecomposition().solve(psi.transpose()).transpose();
    v.residual = max_abs(mu * theta - psi);
    const bool solvable = v.residual <= tol * std::max(1.0, max_abs(psi));
    if (solvable && v.commutes) {
        try {
            StarHom h = StarHom::from_action(limit.graph.algebra(), apex, mu, tol);
            if (annihilator_route(h, limit.ideal, ann_apex, tol).holds) v.mediating = std::move(h);
        } catch (const Error&) {
        }
    }
    v.unique = v.mediating.has_value() && numerical_rank(theta) == dl;
    return v;
}

std::vector<TruncationStage> truncation_report(const std::vector<QuantumGraph>& objects,
                                               const std::vector<StarHom>& links, double tol) {
    if (objects.empty() || links.size() + 1 != objects.size())
        throw DimensionError("chain lengths do not match");
    std::vector<TruncationStage> out;
    for (size_t t = 1; t <= objects.size(); ++t) {
        std::vector<QuantumGraph> objs(objects.begin(), objects.begin() + long(t));
        std::vector<StarHom> ls(links.begin(), links.begin() + long(t - 1));
        const QGraphLimit lim = qgraph_limit(chain_diagram(std::move(objs), std::move(ls)), tol);
        out.push_back({Index(t), lim.graph.algebra().dim(), lim.ideal.dim(),
                       lim.graph.space().dim()});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Operator spaces

CMatrix LinearMap::apply(const CMatrix& x) const {
    const CVector y = codomain.columns() * (matrix * domain.coordinates(x));
    return unflatten(y, codomain.rows(), codomain.cols());
}

LinearMap linear_map(const Subspace& domain, const Subspace& codomain,
                     const std::function<CMatrix(const CMatrix&)>& f) {
    CMatrix m(codomain.dim(), domain.dim());
    for (Index k = 0; k < domain.dim(); ++k) {
        const CMatrix y = f(domain.basis(k));
        if (y.rows() != codomain.rows() || y.cols() != codomain.cols())
            throw DimensionError("map output has the wrong shape");
        if (!codomain.contains(y, 1e-8)) throw ValidationError("map leaves the codomain");
        m.col(k) = codomain.coordinates(y);
    }
    return {domain, codomain, m};
}

LinearMap identity_map(const Subspace& s) {
    return {s, s, CMatrix::Identity(s.dim(), s.dim())};
}

LinearMap compose(const LinearMap& g, const LinearMap& f) {
    check_same_space(f.codomain, g.domain, "composed spaces");
    // bases may differ by a unitary when the spaces were built separately
    const CMatrix change = g.domain.columns().adjoint() * f.codomain.columns();
    return {f.domain, g.codomain, g.matrix * change * f.matrix};
}

namespace {

OpSpSum direct_sum(const std::vector<Subspace>& spaces, SumNorm norm) {
    OpSpSum s;
    s.norm = norm;
    Index rows = 0;
    Index cols = 0;
    Index dim = 0;
    for (const auto& sp : spaces) {
        s.row_offsets.push_back(rows);
        s.col_offsets.push_back(cols);
        rows += sp.rows();
        cols += sp.cols();
        dim += sp.dim();
    }
    CMatrix q = CMatrix::Zero(rows * cols, dim);
    Index c = 0;
    for (size_t i = 0; i < spaces.size(); ++i)
        for (Index k = 0; k < spaces[i].dim(); ++k) {
            CMatrix big = CMatrix::Zero(rows, cols);
            big.block(s.row_offsets[i], s.col_offsets[i], spaces[i].rows(), spaces[i].cols()) =
                spaces[i].basis(k);
            q.col(c++) = flatten(big);
        }
    s.space = Subspace::from_orthonormal(rows, cols, q);
    Index off = 0;
    for (const auto& sp : spaces) {
        CMatrix p = CMatrix::Zero(sp.dim(), dim);
        p.middleCols(off, sp.dim()) = CMatrix::Identity(sp.dim(), sp.dim());
        s.projections.push_back({s.space, sp, p});
        s.injections.push_back({sp, s.space, p.adjoint()});
        off += sp.dim();
    }
    return s;
}

}  // namespace

CMatrix OpSpSum::assemble(const std::vector<CMatrix>& components) const {
    if (components.size() != projections.size())
        throw DimensionError("wrong number of components");
    CMatrix out = CMatrix::Zero(space.rows(), space.cols());
    for (size_t i = 0; i < components.size(); ++i) {
        const Subspace& sp = projections[i].codomain;
        if (components[i].rows() != sp.rows() || components[i].cols() != sp.cols())
            throw DimensionError("component " + std::to_string(i) + " has the wrong shape");
        out.block(row_offsets[i], col_offsets[i], sp.rows(), sp.cols()) = components[i];
    }
    return out;
}

CMatrix OpSpSum::component(const CMatrix& x, Index i) const {
    const Subspace& sp = projections.at(size_t(i)).codomain;
    return x.block(row_offsets[size_t(i)], col_offsets[size_t(i)], sp.rows(), sp.cols());
}

OpSpSum opsp_product(const std::vector<Subspace>& spaces) {
    return direct_sum(spaces, SumNorm::linf);
}

OpSpSum opsp_coproduct(const std::vector<Subspace>& spaces) {
    return direct_sum(spaces, SumNorm::l1);
}

LinearMap sum_factor(const OpSpSum& sum, const std::vector<LinearMap>& cone) {
    if (cone.size() != sum.projections.size()) throw DimensionError("cone size mismatch");
    if (cone.empty()) return {Subspace(), sum.space, CMatrix(sum.space.dim(), 0)};
    const Subspace& x = cone.front().domain;
    CMatrix m(sum.space.dim(), x.dim());
    Index off = 0;
    for (size_t i = 0; i < cone.size(); ++i) {
        check_same_space(cone[i].domain, x, "cone domains");
        const LinearMap leg = compose(identity_map(sum.projections[i].codomain), cone[i]);
        m.middleRows(off, leg.matrix.rows()) = leg.matrix;
        off += leg.matrix.rows();
    }
    return {x, sum.space, m};
}

LinearMap sum_cofactor(const OpSpSum& sum, const std::vector<LinearMap>& cocone) {
    if (cocone.size() != sum.injections.size()) throw DimensionError("cocone size mismatch");
    if (cocone.empty()) return {sum.space, Subspace(), CMatrix(0, sum.space.dim())};
    const Subspace& t = cocone.front().codomain;
    CMatrix m(t.dim(), sum.space.dim());
    Index off = 0;
    for (size_t i = 0; i < cocone.size(); ++i) {
        check_same_space(cocone[i].codomain, t, "cocone codomains");
        const LinearMap leg = compose(cocone[i], identity_map(sum.injections[i].domain));
        m.middleCols(off, leg.matrix.cols()) = leg.matrix;
        off += leg.matrix.cols();
    }
    return {sum.space, t, m};
}

namespace {

CMatrix difference(const LinearMap& f, const LinearMap& g) {
    check_same_space(f.domain, g.domain, "domains");
    check_same_space(f.codomain, g.codomain, "codomains");
    const CMatrix in = g.domain.columns().adjoint() * f.domain.columns();
    const CMatrix out = f.codomain.columns().adjoint() * g.codomain.columns();
    return f.matrix - out * g.matrix * in;
}

}  // namespace

OpSpEqualizer opsp_equalizer(const LinearMap& f, const LinearMap& g, double tol) {
    const CMatrix d = difference(f, g);
    const CMatrix k = null_space_absolute(d, tol * std::max(1.0, d.norm()));
    Subspace s = Subspace::from_orthonormal(f.domain.rows(), f.domain.cols(),
                                            f.domain.columns() * k);
    return {s, {s, f.domain, k}};
}

OpSpCoequalizer opsp_coequalizer(const LinearMap& f, const LinearMap& g, double tol) {
    const CMatrix d = difference(f, g);
    const CMatrix image = orth_absolute(d, tol * std::max(1.0, d.norm()));
    const CMatrix c = complement_basis(image);
    Subspace s = Subspace::from_orthonormal(f.codomain.rows(), f.codomain.cols(),
                                            f.codomain.columns() * c);
    return {s, {f.codomain, s, c.adjoint()}};
}

LinearMap equalizer_factor(const OpSpEqualizer& eq, const LinearMap& h) {
    const LinearMap hh = compose(identity_map(eq.inclusion.codomain), h);
    const CMatrix& k = eq.inclusion.matrix;
    const CMatrix u = k.adjoint() * hh.matrix;
    if (max_abs(k * u - hh.matrix) > 1e-8 * std::max(1.0, max_abs(hh.matrix)))
        throw ValidationError("map does not equalize the pair");
    return {h.domain, eq.space, u};
}

LinearMap coequalizer_factor(const OpSpCoequalizer& coeq, const LinearMap& h) {
    const LinearMap hh = compose(h, identity_map(coeq.quotient.domain));
    const CMatrix c = coeq.quotient.matrix.adjoint();
    const CMatrix u = hh.matrix * c;
    if (max_abs(u * c.adjoint() - hh.matrix) > 1e-8 * std::max(1.0, max_abs(hh.matrix)))
        throw ValidationError("map does not coequalize the pair");
    return {coeq.space, h.codomain, u};
}

// ---------------------------------------------------------------------------
// C*-graphs

CMatrix CStarGraph::left_action(const CVector& a) const {
    CMatrix out = CMatrix::Zero(space.dim(), space.dim());
    for (Index b = 0; b < a.size(); ++b)
        if (a(b) != Complex(0.0)) out += a(b) * left[size_t(b)];
    return out;
}

CMatrix CStarGraph::right_action(const CVector& a) const {
    CMatrix out = CMatrix::Zero(space.dim(), space.dim());
    for (Index b = 0; b < a.size(); ++b)
        if (a(b) != Complex(0.0)) out += a(b) * right[size_t(b)];
    return out;
}

CStarGraph cstar_graph(const MultiMatrixAlgebra& m, const Subspace& s, double tol) {
    if (s.rows() != m.ambient_dim() || s.cols() != m.ambient_dim())
        throw DimensionError("space does not live on C^" + std::to_string(m.ambient_dim()));
    CStarGraph g{m, s, {}, {}};
    const auto basis = s.basis_matrices();
    for (Index b = 0; b < m.dim(); ++b) {
        const CMatrix e = m.basis_matrix(b);
        CMatrix l(s.dim(), s.dim());
        CMatrix r(s.dim(), s.dim());
        for (Index k = 0; k < s.dim(); ++k) {
            const CMatrix x = e * basis[size_t(k)];
            const CMatrix y = basis[size_t(k)] * e;
            if (!s.contains(x, tol) || !s.contains(y, tol))
                throw ValidationError("space is not closed under the algebra action");
            l.col(k) = s.coordinates(x);
            r.col(k) = s.coordinates(y);
        }
        g.left.push_back(std::move(l));
        g.right.push_back(std::move(r));
    }
    return g;
}

CStarGraph cstar_graph_classical(const ClassicalGraph& g) {
    const Index n = g.size();
    std::vector<CMatrix> units;
    for (const auto& [v, w] : g.edges) units.push_back(unit_matrix(n, n, v, w));
    return cstar_graph(diagonal_algebra(n), span(n, n, units));
}

double cstar_module_residual(const CStarGraph& g) {
    const MultiMatrixAlgebra& m = g.algebra;
    const Index d = m.dim();
    const CMatrix id = CMatrix::Identity(g.space.dim(), g.space.dim());
    double r = std::max(max_abs(g.left_action(m.unit()) - id), max_abs(g.right_action(m.unit()) - id));
    for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b) {
            const CVector ab = m.multiply(m.basis_vector(a), m.basis_vector(b));
            const CMatrix& la = g.left[size_t(a)];
            const CMatrix& lb = g.left[size_t(b)];
            const CMatrix& ra = g.right[size_t(a)];
            const CMatrix& rb = g.right[size_t(b)];
            r = std::max(r, max_abs(g.left_action(ab) - la * lb));
            r = std::max(r, max_abs(g.right_action(ab) - rb * ra));
            r = std::max(r, max_abs(la * rb - rb * la));
        }
    return r;
}

bool cstar_morphism_check(const LinearMap& e, const StarHom& pi, const CStarGraph& cg1,
                          const CStarGraph& cg2, double tol) {
    if (pi.source() != cg1.algebra || pi.target() != cg2.algebra)
        throw DimensionError("π does not run from the first algebra to the second");
    check_same_space(e.domain, cg2.space, "e domain and second space");
    check_same_space(e.codomain, cg1.space, "e codomain and first space");
    const LinearMap ee = compose(identity_map(cg1.space),
                                 compose(e, identity_map(cg2.space)));
    const CMatrix& em = ee.matrix;
    const double scale = std::max(1.0, max_abs(em));
    const Index d1 = cg1.algebra.dim();
    std::vector<CMatrix> l2(static_cast<size_t>(d1));
    std::vector<CMatrix> r2(static_cast<size_t>(d1));
    for (Index a = 0; a < d1; ++a) {
        const CVector pa = pi.apply(cg1.algebra.basis_vector(a));
        l2[size_t(a)] = cg2.left_action(pa);
        r2[size_t(a)] = cg2.right_action(pa);
    }
    for (Index a1 = 0; a1 < d1; ++a1)
        for (Index a2 = 0; a2 < d1; ++a2) {
            // all space basis elements at once, one per column
            const CMatrix lhs = cg1.left[size_t(a1)] * cg1.right[size_t(a2)] * em;
            const CMatrix rhs = em * l2[size_t(a1)] * r2[size_t(a2)];
            if (max_abs(lhs - rhs) > tol * scale) return false;
        }
    return true;
}

double contractivity_estimate(const LinearMap& e, int samples) {
    const Index n = e.domain.dim();
    if (n == 0) return 0.0;
    double best = 0.0;
    auto ratio = [&](const CVector& c) {
        const CMatrix s = unflatten(e.domain.columns() * c, e.domain.rows(), e.domain.cols());
        const double ns = op_norm(s);
        if (ns <= 1e-300) return;
        const CMatrix es =
            unflatten(e.codomain.columns() * (e.matrix * c), e.codomain.rows(), e.codomain.cols());
        best = std::max(best, op_norm(es) / ns);
    };
    for (Index k = 0; k < n; ++k) ratio(CVector::Unit(n, k));
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> g;
    for (int i = 0; i < samples; ++i) {
        CVector c(n);
        for (Index k = 0; k < n; ++k) c(k) = Complex(g(rng), g(rng));
        ratio(c);
    }
    return best;
}

CStarMorphism classical_cstar_morphism(const VertexMap& f, const ClassicalGraph& g1,
                                       const ClassicalGraph& g2) {
    if (!is_classical_morphism(f, g1, g2)) {
        for (const auto& [v, w] : g2.edges)
            if (!g1.has_edge(f[size_t(v)], f[size_t(w)]))
                throw ValidationError("edge " + pair_name(v, w) + " maps to the non-edge " +
                                      pair_name(f[size_t(v)], f[size_t(w)]));
    }
    const Index n1 = g1.size();
    const Index n2 = g2.size();
    CMatrix fm = CMatrix::Zero(n1, n2);
    for (Index v = 0; v < n2; ++v) fm(f[size_t(v)], v) = 1.0;
    const CStarGraph c1 = cstar_graph_classical(g1);
    const CStarGraph c2 = cstar_graph_classical(g2);
    LinearMap e = linear_map(c2.space, c1.space,
                             [&](const CMatrix& x) -> CMatrix { return fm * x * fm.transpose(); });
    return {std::move(e), theta_from_vertex_map(f, n1, n2)};
}

CStarLimit cstar_limit(const CStarDiagram& chain, double tol) {
    const auto& objs = chain.objects;
    const Index n = Index(objs.size());
    if (n == 0 || chain.links.size() + 1 != objs.size())
        throw DimensionError("a chain of " + std::to_string(n) + " objects needs " +
                             std::to_string(n == 0 ? 0 : n - 1) + " links");
    for (Index j = 0; j + 1 < n; ++j) {
        const auto& l = chain.links[size_t(j)];
        if (!cstar_morphism_check(l.e, l.pi, objs[size_t(j)], objs[size_t(j + 1)], tol))
            throw ValidationError("link " + std::to_string(j) + " is not a C*-graph morphism");
    }

    // e^{j,k} in space coordinates and π_{j,k} as star homs, j ≤ k
    std::vector<std::vector<CMatrix>> e(static_cast<size_t>(n), std::vector<CMatrix>(static_cast<size_t>(n)));
    std::vector<std::vector<StarHom>> p(static_cast<size_t>(n), std::vector<StarHom>(static_cast<size_t>(n)));
    for (Index j = n - 1; j >= 0; --j) {
        const Index dj = objs[size_t(j)].space.dim();
        e[size_t(j)][size_t(j)] = CMatrix::Identity(dj, dj);
        p[size_t(j)][size_t(j)] = StarHom::identity(objs[size_t(j)].algebra);
        for (Index k = j + 1; k < n; ++k) {
            const auto& l = chain.links[size_t(j)];
            const LinearMap ej = compose(identity_map(objs[size_t(j)].space),
                                         compose(l.e, identity_map(objs[size_t(j + 1)].space)));
            e[size_t(j)][size_t(k)] = ej.matrix * e[size_t(j + 1)][size_t(k)];
        }
    }
    for (Index j = 0; j < n; ++j)
        for (Index k = j + 1; k < n; ++k)
            p[size_t(j)][size_t(k)] = compose(chain.links[size_t(k - 1)].pi, p[size_t(j)][size_t(k - 1)]);

    const Index t = n - 1;
    const CStarGraph& top = objs[size_t(t)];
    std::vector<Subspace> spaces;
    for (const auto& o : objs) spaces.push_back(o.space);
    OpSpSum product = opsp_product(spaces);

    // threads (e^{j,t}(b))_j over a basis b of the top space
    Index total = 0;
    for (const auto& o : objs) total += o.space.dim();
    CMatrix v(total, top.space.dim());
    Index off = 0;
    for (Index j = 0; j < n; ++j) {
        v.middleRows(off, objs[size_t(j)].space.dim()) = e[size_t(j)][size_t(t)];
        off += objs[size_t(j)].space.dim();
    }
    const CMatrix q = orth(v);
    if (q.cols() != v.cols()) throw NumericalError("threads of the top space are dependent");
    const CMatrix c = q.adjoint() * v;
    const CMatrix c_inv = c.inverse();
    Subspace s = Subspace::from_orthonormal(product.space.rows(), product.space.cols(),
                                            product.space.columns() * q);

    // the action of π_{j1,∞}(a) on the j2-th component through every j3 ≥ j1, j2 and every
    // re-expression a ↦ π_{j1,k1}(a) must agree
    double worst = 0.0;
    double scale = 1.0;
    for (Index j1 = 0; j1 < n; ++j1)
        for (Index a = 0; a < objs[size_t(j1)].algebra.dim(); ++a) {
            const CVector x = objs[size_t(j1)].algebra.basis_vector(a);
            for (Index j2 = 0; j2 < n; ++j2) {
                const Index lo = std::max(j1, j2);
                const CVector xt = p[size_t(j1)][size_t(t)].apply(x);
                const CMatrix ref_l = e[size_t(j2)][size_t(t)] * top.left_action(xt);
                const CMatrix ref_r = e[size_t(j2)][size_t(t)] * top.right_action(xt);
                scale = std::max(scale, max_abs(ref_l));
                for (Index k1 = j1; k1 <= lo; ++k1)
                    for (Index j3 = lo; j3 < n; ++j3) {
                        const CVector y = p[size_t(k1)][size_t(j3)].apply(
                            p[size_t(j1)][size_t(k1)].apply(x));
                        const CStarGraph& o = objs[size_t(j3)];
                        const CMatrix via_l =
                            e[size_t(j2)][size_t(j3)] * o.left_action(y) * e[size_t(j3)][size_t(t)];
                        const CMatrix via_r = e[size_t(j2)][size_t(j3)] * o.right_action(y) *
                                              e[size_t(j3)][size_t(t)];
                        worst = std::max({worst, max_abs(via_l - ref_l), max_abs(via_r - ref_r)});
                    }
            }
        }
    if (worst > tol * scale)
        throw ConsistencyError("bimodule action on the limit depends on the chosen index");

    CStarGraph graph{top.algebra, s, {}, {}};
    for (Index a = 0; a < top.algebra.dim(); ++a) {
        graph.left.push_back(c * top.left[size_t(a)] * c_inv);
        graph.right.push_back(c * top.right[size_t(a)] * c_inv);
    }
    if (cstar_module_residual(graph) > tol * scale)
        throw NumericalError("limit action is not a bimodule action");

    std::vector<CStarMorphism> legs;
    for (Index j = 0; j < n; ++j) {
        LinearMap ej{s, objs[size_t(j)].space, e[size_t(j)][size_t(t)] * c_inv};
        if (!cstar_morphism_check(ej, p[size_t(j)][size_t(t)], objs[size_t(j)], graph, tol))
            throw ConsistencyError("limit leg " + std::to_string(j) + " is not a C*-graph morphism");
        legs.push_back({std::move(ej), p[size_t(j)][size_t(t)]});
    }
    return {std::move(graph), std::move(product), std::move(legs), worst};
}

}  // namespace qgraph
