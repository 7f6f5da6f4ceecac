#include "qgraph/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace qgraph {

namespace {

std::string idx(Index i) { return std::to_string(i); }

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Groups sorted values into clusters separated by relative gaps above rel_gap.
std::vector<std::pair<Index, Index>> cluster_sorted(const Eigen::VectorXd& values,
                                                    double rel_gap) {
    std::vector<std::pair<Index, Index>> out;
    if (values.size() == 0) return out;
    const double scale = std::max(values.cwiseAbs().maxCoeff(), 1e-300);
    Index start = 0;
    for (Index i = 1; i <= values.size(); ++i) {
        if (i == values.size() || values(i) - values(i - 1) > rel_gap * scale) {
            out.emplace_back(start, i - start);
            start = i;
        }
    }
    return out;
}

bool is_unitary(const CMatrix& u, double tol) {
    return u.rows() == u.cols() &&
           (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm() <= tol * u.rows();
}

}  // namespace

// ---------------------------------------------------------------------------
// MultiMatrixAlgebra

MultiMatrixAlgebra::MultiMatrixAlgebra(std::vector<Index> block_dims,
                                       std::vector<Index> multiplicities)
    : dims_(std::move(block_dims)), mults_(std::move(multiplicities)) {
    if (dims_.size() != mults_.size())
        throw ValidationError("algebra: " + idx(static_cast<Index>(dims_.size())) +
                              " block dims but " + idx(static_cast<Index>(mults_.size())) +
                              " multiplicities");
    for (size_t i = 0; i < dims_.size(); ++i) {
        if (dims_[i] < 1) throw ValidationError("algebra: block " + idx(Index(i)) + " has dimension " + idx(dims_[i]));
        if (mults_[i] < 1)
            throw ValidationError("algebra: block " + idx(Index(i)) + " has multiplicity " + idx(mults_[i]));
    }
    for (size_t i = 0; i < dims_.size(); ++i) {
        coord_off_.push_back(dim_);
        amb_off_.push_back(ambient_);
        for (Index r = 0; r < dims_[i]; ++r)
            for (Index c = 0; c < dims_[i]; ++c) units_.push_back({Index(i), r, c});
        dim_ += dims_[i] * dims_[i];
        ambient_ += dims_[i] * mults_[i];
    }
}

CVector MultiMatrixAlgebra::unit() const {
    CVector x = CVector::Zero(dim_);
    for (Index i = 0; i < num_blocks(); ++i)
        for (Index r = 0; r < block_dim(i); ++r) x(coord(i, r, r)) = 1.0;
    return x;
}

CVector MultiMatrixAlgebra::block_unit(Index i) const {
    CVector x = CVector::Zero(dim_);
    for (Index r = 0; r < block_dim(i); ++r) x(coord(i, r, r)) = 1.0;
    return x;
}

CVector MultiMatrixAlgebra::basis_vector(Index a) const {
    CVector x = CVector::Zero(dim_);
    x(a) = 1.0;
    return x;
}

std::vector<CMatrix> MultiMatrixAlgebra::to_blocks(const CVector& x) const {
    if (x.size() != dim_) throw DimensionError("coordinate vector has length " + idx(x.size()) + ", algebra dimension is " + idx(dim_));
    std::vector<CMatrix> out;
    for (Index i = 0; i < num_blocks(); ++i)
        out.push_back(unflatten(x.segment(coord_offset(i), block_dim(i) * block_dim(i)),
                                block_dim(i), block_dim(i)));
    return out;
}

CVector MultiMatrixAlgebra::from_blocks(const std::vector<CMatrix>& blocks) const {
    if (static_cast<Index>(blocks.size()) != num_blocks())
        throw DimensionError("wrong number of blocks");
    CVector x(dim_);
    for (Index i = 0; i < num_blocks(); ++i) {
        const CMatrix& b = blocks[size_t(i)];
        if (b.rows() != block_dim(i) || b.cols() != block_dim(i))
            throw DimensionError("block " + idx(i) + " has the wrong shape");
        x.segment(coord_offset(i), b.size()) = flatten(b);
    }
    return x;
}

CMatrix MultiMatrixAlgebra::embed(const CVector& x) const {
    const auto blocks = to_blocks(x);
    CMatrix out = CMatrix::Zero(ambient_, ambient_);
    for (Index i = 0; i < num_blocks(); ++i) {
        const Index n = block_dim(i) * multiplicity(i);
        out.block(ambient_offset(i), ambient_offset(i), n, n) =
            kron(blocks[size_t(i)], CMatrix::Identity(multiplicity(i), multiplicity(i)));
    }
    return out;
}

CMatrix MultiMatrixAlgebra::basis_matrix(Index a) const { return embed(basis_vector(a)); }

CVector MultiMatrixAlgebra::multiply(const CVector& x, const CVector& y) const {
    const auto bx = to_blocks(x);
    const auto by = to_blocks(y);
    std::vector<CMatrix> out;
    for (size_t i = 0; i < bx.size(); ++i) out.push_back(bx[i] * by[i]);
    return from_blocks(out);
}

CVector MultiMatrixAlgebra::adjoint(const CVector& x) const {
    auto bx = to_blocks(x);
    for (auto& b : bx) b = b.adjoint().eval();
    return from_blocks(bx);
}

CVector MultiMatrixAlgebra::coordinates_of(const CMatrix& t) const {
    if (t.rows() != ambient_ || t.cols() != ambient_)
        throw DimensionError("expected " + idx(ambient_) + "x" + idx(ambient_) + " operator");
    CVector x(dim_);
    for (Index i = 0; i < num_blocks(); ++i) {
        const Index n = block_dim(i);
        const Index m = multiplicity(i);
        const Index off = ambient_offset(i);
        for (Index r = 0; r < n; ++r)
            for (Index c = 0; c < n; ++c) {
                Complex acc = 0.0;
                for (Index a = 0; a < m; ++a) acc += t(off + r * m + a, off + c * m + a);
                x(coord(i, r, c)) = acc / double(m);
            }
    }
    return x;
}

std::string MultiMatrixAlgebra::describe() const {
    if (dims_.empty()) return "zero algebra";
    std::ostringstream os;
    for (size_t i = 0; i < dims_.size(); ++i) {
        if (i) os << " + ";
        os << "M_" << dims_[i];
        if (mults_[i] != 1) os << "(x" << mults_[i] << ")";
    }
    return os.str();
}

MultiMatrixAlgebra build_algebra(const std::vector<Index>& block_dims,
                                 const std::vector<Index>& multiplicities) {
    return MultiMatrixAlgebra(block_dims, multiplicities);
}

MultiMatrixAlgebra diagonal_algebra(Index n) {
    return MultiMatrixAlgebra(std::vector<Index>(size_t(n), 1), std::vector<Index>(size_t(n), 1));
}

MultiMatrixAlgebra full_algebra(Index n) { return MultiMatrixAlgebra({n}, {1}); }

Subspace algebra_span(const MultiMatrixAlgebra& m, double tol) {
    const Index n = m.ambient_dim();
    CMatrix q(n * n, m.dim());
    for (Index a = 0; a < m.dim(); ++a) {
        const double norm = std::sqrt(double(m.multiplicity(m.unit_of(a).block)));
        q.col(a) = flatten(m.basis_matrix(a)) / norm;
    }
    return Subspace::from_orthonormal(n, n, std::move(q), tol);
}

Subspace commutant(const MultiMatrixAlgebra& m, double tol) {
    const Index n = m.ambient_dim();
    Index count = 0;
    for (Index i = 0; i < m.num_blocks(); ++i) count += m.multiplicity(i) * m.multiplicity(i);
    CMatrix q(n * n, count);
    Index k = 0;
    for (Index i = 0; i < m.num_blocks(); ++i) {
        const Index bd = m.block_dim(i);
        const Index mu = m.multiplicity(i);
        const Index off = m.ambient_offset(i);
        for (Index a = 0; a < mu; ++a)
            for (Index b = 0; b < mu; ++b) {
                CMatrix x = CMatrix::Zero(n, n);
                x.block(off, off, bd * mu, bd * mu) =
                    kron(CMatrix::Identity(bd, bd), unit_matrix(mu, mu, a, b));
                q.col(k++) = flatten(x) / std::sqrt(double(bd));
            }
    }
    return Subspace::from_orthonormal(n, n, std::move(q), tol);
}

Weights plancherel_weights(const MultiMatrixAlgebra& m) {
    Weights w;
    for (Index d : m.block_dims()) w.push_back(double(d));
    return w;
}

Weights counting_weights(const MultiMatrixAlgebra& m) {
    return Weights(size_t(m.num_blocks()), 1.0);
}

Eigen::VectorXd coordinate_weights(const MultiMatrixAlgebra& m, const Weights& w) {
    if (static_cast<Index>(w.size()) != m.num_blocks())
        throw DimensionError("expected " + idx(m.num_blocks()) + " weights, got " +
                             idx(static_cast<Index>(w.size())));
    Eigen::VectorXd g(m.dim());
    for (Index a = 0; a < m.dim(); ++a) {
        const double d = w[size_t(m.unit_of(a).block)];
        if (!(d > 0.0) || !std::isfinite(d))
            throw ValidationError("weights must be positive and finite");
        g(a) = d;
    }
    return g;
}

// ---------------------------------------------------------------------------
// StarHom

namespace {

void check_bratteli(const MultiMatrixAlgebra& s, const MultiMatrixAlgebra& t,
                    const StarHom::Bratteli& b) {
    if (static_cast<Index>(b.size()) != t.num_blocks())
        throw ValidationError("Bratteli data has " + idx(Index(b.size())) + " rows, target has " +
                              idx(t.num_blocks()) + " blocks");
    for (Index j = 0; j < t.num_blocks(); ++j) {
        const auto& row = b[size_t(j)];
        if (static_cast<Index>(row.size()) != s.num_blocks())
            throw ValidationError("Bratteli row " + idx(j) + " has " + idx(Index(row.size())) +
                                  " entries, source has " + idx(s.num_blocks()) + " blocks");
        Index total = 0;
        for (Index i = 0; i < s.num_blocks(); ++i) {
            if (row[size_t(i)] < 0) throw ValidationError("negative Bratteli multiplicity");
            total += row[size_t(i)] * s.block_dim(i);
        }
        if (total != t.block_dim(j))
            throw ValidationError("Bratteli bookkeeping fails at target block " + idx(j) +
                                  ": sum c_ji n_i = " + idx(total) + " but block dimension is " +
                                  idx(t.block_dim(j)));
    }
}

}  // namespace

StarHom StarHom::from_bratteli(const MultiMatrixAlgebra& source, const MultiMatrixAlgebra& target,
                               const Bratteli& bratteli, const std::vector<CMatrix>& unitaries,
                               double tol) {
    check_bratteli(source, target, bratteli);
    StarHom h;
    h.source_ = source;
    h.target_ = target;
    h.bratteli_ = bratteli;
    if (unitaries.empty()) {
        for (Index j = 0; j < target.num_blocks(); ++j)
            h.unitaries_.push_back(CMatrix::Identity(target.block_dim(j), target.block_dim(j)));
    } else {
        if (static_cast<Index>(unitaries.size()) != target.num_blocks())
            throw ValidationError("need one unitary per target block");
        for (Index j = 0; j < target.num_blocks(); ++j) {
            const CMatrix& u = unitaries[size_t(j)];
            if (u.rows() != target.block_dim(j) || !is_unitary(u, 1e-8))
                throw ValidationError("intertwiner for target block " + idx(j) +
                                      " is not a unitary of size " + idx(target.block_dim(j)));
        }
        h.unitaries_ = unitaries;
    }
    h.action_ = CMatrix::Zero(target.dim(), source.dim());
    for (Index j = 0; j < target.num_blocks(); ++j) {
        const Index nj = target.block_dim(j);
        const CMatrix& u = h.unitaries_[size_t(j)];
        Index off = 0;
        for (Index i = 0; i < source.num_blocks(); ++i) {
            const Index c = bratteli[size_t(j)][size_t(i)];
            const Index ni = source.block_dim(i);
            for (Index p = 0; p < ni && c > 0; ++p)
                for (Index q = 0; q < ni; ++q) {
                    CMatrix blk = CMatrix::Zero(nj, nj);
                    blk.block(off, off, ni * c, ni * c) =
                        kron(unit_matrix(ni, ni, p, q), CMatrix::Identity(c, c));
                    const CMatrix img = u * blk * u.adjoint();
                    h.action_.col(source.coord(i, p, q)).segment(target.coord_offset(j), nj * nj) =
                        flatten(img);
                }
            off += c * ni;
        }
    }
    const double r = h.hom_residual();
    if (r > std::max(tol, 1e-8)) throw NumericalError("constructed map is not a *-homomorphism (residual " + std::to_string(r) + ")");
    return h;
}

StarHom StarHom::from_action(const MultiMatrixAlgebra& source, const MultiMatrixAlgebra& target,
                             const CMatrix& action, double tol) {
    if (action.rows() != target.dim() || action.cols() != source.dim())
        throw DimensionError("action matrix must be " + idx(target.dim()) + "x" + idx(source.dim()));
    StarHom h;
    h.source_ = source;
    h.target_ = target;
    h.action_ = action;
    const double r = h.hom_residual();
    if (r > tol * std::max(1.0, max_abs(action)) * 10.0)
        throw ValidationError("map is not a unital *-homomorphism (residual " + std::to_string(r) + ")");

    h.bratteli_.assign(size_t(target.num_blocks()), std::vector<Index>(size_t(source.num_blocks()), 0));
    for (Index j = 0; j < target.num_blocks(); ++j) {
        const Index nj = target.block_dim(j);
        CMatrix u(nj, nj);
        Index off = 0;
        for (Index i = 0; i < source.num_blocks(); ++i) {
            const auto img = target.to_blocks(h.apply(source.basis_vector(source.coord(i, 0, 0))));
            const CMatrix& pj = img[size_t(j)];
            const double tr = pj.trace().real();
            const Index c = static_cast<Index>(std::llround(tr));
            if (std::abs(tr - double(c)) > 1e-6)
                throw NumericalError("non-integral Bratteli multiplicity");
            h.bratteli_[size_t(j)][size_t(i)] = c;
            if (c == 0) continue;
            Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (pj + pj.adjoint()));
            const CMatrix w = es.eigenvectors().rightCols(c);
            const Index ni = source.block_dim(i);
            for (Index p = 0; p < ni; ++p) {
                const auto ip = target.to_blocks(h.apply(source.basis_vector(source.coord(i, p, 0))));
                u.block(0, off + p * c, nj, c) = ip[size_t(j)] * w;
            }
            off += c * ni;
        }
        if (off != nj) throw NumericalError("Bratteli bookkeeping failed for derived data");
        h.unitaries_.push_back(u);
    }
    return h;
}

StarHom StarHom::identity(const MultiMatrixAlgebra& m) {
    StarHom::Bratteli b(size_t(m.num_blocks()), std::vector<Index>(size_t(m.num_blocks()), 0));
    for (Index i = 0; i < m.num_blocks(); ++i) b[size_t(i)][size_t(i)] = 1;
    return from_bratteli(m, m, b);
}

CMatrix StarHom::intertwiner() const {
    const Index n = target_.ambient_dim();
    CMatrix out = CMatrix::Zero(n, n);
    for (Index j = 0; j < target_.num_blocks(); ++j) {
        const Index mj = target_.multiplicity(j);
        const Index sz = target_.block_dim(j) * mj;
        out.block(target_.ambient_offset(j), target_.ambient_offset(j), sz, sz) =
            kron(unitaries_[size_t(j)], CMatrix::Identity(mj, mj));
    }
    return out;
}

double StarHom::hom_residual() const {
    double r = max_abs(apply(source_.unit()) - target_.unit());
    if (source_.dim() == 0) return target_.dim() == 0 ? 0.0 : 1.0;
    std::vector<std::vector<CMatrix>> images;
    for (Index a = 0; a < source_.dim(); ++a) images.push_back(target_.to_blocks(action_.col(a)));
    for (Index a = 0; a < source_.dim(); ++a) {
        const auto ua = source_.unit_of(a);
        // adjoint of e_(p,q) is e_(q,p)
        const Index adj = source_.coord(ua.block, ua.col, ua.row);
        for (size_t j = 0; j < images[size_t(a)].size(); ++j)
            r = std::max(r, max_abs(images[size_t(a)][j].adjoint() - images[size_t(adj)][j]));
        for (Index b = 0; b < source_.dim(); ++b) {
            const auto ub = source_.unit_of(b);
            const bool nonzero = ua.block == ub.block && ua.col == ub.row;
            const Index prod = nonzero ? source_.coord(ua.block, ua.row, ub.col) : -1;
            for (size_t j = 0; j < images[size_t(a)].size(); ++j) {
                CMatrix lhs = images[size_t(a)][j] * images[size_t(b)][j];
                if (nonzero) lhs -= images[size_t(prod)][j];
                r = std::max(r, max_abs(lhs));
            }
        }
    }
    return r;
}

StarHom star_hom(const MultiMatrixAlgebra& source, const MultiMatrixAlgebra& target,
                 const StarHom::Bratteli& bratteli, const std::vector<CMatrix>& unitaries,
                 double tol) {
    return StarHom::from_bratteli(source, target, bratteli, unitaries, tol);
}

StarHom compose(const StarHom& g, const StarHom& f, double tol) {
    if (f.target() != g.source())
        throw DimensionError("cannot compose: " + f.target().describe() + " vs " +
                             g.source().describe());
    return StarHom::from_action(f.source(), g.target(), g.action() * f.action(), tol);
}

CMatrix theta_adjoint(const StarHom& theta, const Weights& source_weights,
                      const Weights& target_weights) {
    const Eigen::VectorXd gs = coordinate_weights(theta.source(), source_weights);
    const Eigen::VectorXd gt = coordinate_weights(theta.target(), target_weights);
    CMatrix out = theta.action().adjoint();
    for (Index r = 0; r < out.rows(); ++r) out.row(r) /= gs(r);
    for (Index c = 0; c < out.cols(); ++c) out.col(c) *= gt(c);
    return out;
}

// ---------------------------------------------------------------------------
// Kraus form

namespace {

bool lex_less(const CMatrix& a, const CMatrix& b) {
    for (Index k = 0; k < a.size(); ++k) {
        const Complex x = a.data()[k];
        const Complex y = b.data()[k];
        if (std::abs(x.real() - y.real()) > 1e-12) return x.real() < y.real();
        if (std::abs(x.imag() - y.imag()) > 1e-12) return x.imag() < y.imag();
    }
    return false;
}

}  // namespace

KrausForm kraus_decompose(const StarHom& theta, double tol) {
    const MultiMatrixAlgebra& s = theta.source();
    const MultiMatrixAlgebra& t = theta.target();
    const Index ns = s.ambient_dim();
    const Index nt = t.ambient_dim();
    // Choi matrix of T ↦ embed_t(θ(E_s(T))), E_s the trace-preserving expectation onto embed_s(M).
    CMatrix choi = CMatrix::Zero(ns * nt, ns * nt);
    for (Index a = 0; a < ns; ++a)
        for (Index b = 0; b < ns; ++b) {
            const CMatrix img = t.embed(theta.apply(s.coordinates_of(unit_matrix(ns, ns, a, b))));
            choi.block(a * nt, b * nt, nt, nt) = img;
        }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (choi + choi.adjoint()));
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double top = ev.size() ? std::max(ev.maxCoeff(), 0.0) : 0.0;

    struct Entry {
        double lambda;
        CMatrix k;
    };
    std::vector<Entry> entries;
    for (Index e = ev.size() - 1; e >= 0; --e) {
        if (!(ev(e) > tol * top) || top == 0.0) break;
        const CVector v = es.eigenvectors().col(e);
        CMatrix l(nt, ns);
        for (Index a = 0; a < ns; ++a)
            for (Index c = 0; c < nt; ++c) l(c, a) = std::sqrt(ev(e)) * v(a * nt + c);
        CMatrix k = l.adjoint();
        const double big = max_abs(k);
        for (Index i = 0; i < k.size(); ++i) {
            const Complex z = k.data()[i];
            if (std::abs(z) > 1e-8 * big) {
                k *= std::conj(z) / std::abs(z);
                break;
            }
        }
        entries.push_back({ev(e), std::move(k)});
    }
    std::stable_sort(entries.begin(), entries.end(), [&](const Entry& x, const Entry& y) {
        if (std::abs(x.lambda - y.lambda) > 1e-9 * std::max(1.0, top)) return x.lambda > y.lambda;
        return lex_less(x.k, y.k);
    });
    KrausForm out;
    for (auto& e : entries) out.operators.push_back(std::move(e.k));
    const double r = kraus_residual(out, theta);
    if (r > std::max(1e-8, tol))
        throw NumericalError("Kraus reconstruction residual " + std::to_string(r));
    return out;
}

double kraus_residual(const KrausForm& k, const StarHom& theta) {
    const MultiMatrixAlgebra& s = theta.source();
    const MultiMatrixAlgebra& t = theta.target();
    const Index nt = t.ambient_dim();
    for (const auto& op : k.operators)
        if (op.rows() != s.ambient_dim() || op.cols() != nt)
            throw DimensionError("Kraus operator must be " + idx(s.ambient_dim()) + "x" + idx(nt));
    CMatrix sum = CMatrix::Zero(nt, nt);
    for (const auto& op : k.operators) sum += op.adjoint() * op;
    double r = max_abs(sum - CMatrix::Identity(nt, nt));
    for (Index a = 0; a < s.dim(); ++a) {
        const CMatrix x = s.basis_matrix(a);
        CMatrix acc = CMatrix::Zero(nt, nt);
        for (const auto& op : k.operators) acc += op.adjoint() * x * op;
        r = std::max(r, max_abs(acc - t.embed(theta.apply(s.basis_vector(a)))));
    }
    return r;
}

// ---------------------------------------------------------------------------
// W*-categorical operations

ProductResult w_star_product(const std::vector<MultiMatrixAlgebra>& factors) {
    std::vector<Index> dims, mults;
    for (const auto& f : factors) {
        dims.insert(dims.end(), f.block_dims().begin(), f.block_dims().end());
        mults.insert(mults.end(), f.multiplicities().begin(), f.multiplicities().end());
    }
    ProductResult out{MultiMatrixAlgebra(dims, mults), {}};
    Index offset = 0;
    for (const auto& f : factors) {
        StarHom::Bratteli b(size_t(f.num_blocks()), std::vector<Index>(dims.size(), 0));
        for (Index j = 0; j < f.num_blocks(); ++j) b[size_t(j)][size_t(offset + j)] = 1;
        out.projections.push_back(StarHom::from_bratteli(out.algebra, f, b));
        offset += f.num_blocks();
    }
    return out;
}

StarHom factor_through(const ProductResult& product, const std::vector<StarHom>& cone,
                       double tol) {
    if (cone.size() != product.projections.size())
        throw DimensionError("cone has " + idx(Index(cone.size())) + " legs, product has " +
                             idx(Index(product.projections.size())) + " factors");
    if (cone.empty()) throw ValidationError("no map into the zero algebra is determined by an empty cone");
    const MultiMatrixAlgebra& apex = cone.front().source();
    CMatrix action(product.algebra.dim(), apex.dim());
    Index row = 0;
    for (size_t k = 0; k < cone.size(); ++k) {
        if (cone[k].source() != apex) throw DimensionError("cone legs have different sources");
        if (cone[k].target() != product.projections[k].target())
            throw DimensionError("cone leg " + idx(Index(k)) + " has the wrong target");
        action.middleRows(row, cone[k].action().rows()) = cone[k].action();
        row += cone[k].action().rows();
    }
    return StarHom::from_action(apex, product.algebra, action, tol);
}

std::vector<SimpleSummand> decompose_star_algebra(const std::vector<CMatrix>& spanning,
                                                  double tol) {
    if (spanning.empty()) throw ValidationError("empty spanning set");
    const Index n = spanning.front().rows();
    const Subspace a = span(n, n, spanning, tol);
    const auto basis = a.basis_matrices();
    const Index d = a.dim();
    if (!a.contains(CMatrix::Identity(n, n), 1e-8))
        throw ValidationError("algebra does not contain the identity");

    // center: coefficients c with [Σ c_l a_l, a_k] = 0 for all k
    CMatrix comm(d * n * n, d);
    for (Index l = 0; l < d; ++l)
        for (Index k = 0; k < d; ++k)
            comm.col(l).segment(k * n * n, n * n) =
                flatten(basis[size_t(l)] * basis[size_t(k)] - basis[size_t(k)] * basis[size_t(l)]);
    const CMatrix center = null_space_absolute(comm, std::max(tol, 1e-10) * 10.0);

    std::mt19937_64 rng(0x5eed1234ULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    CMatrix h = CMatrix::Zero(n, n);
    for (Index t = 0; t < center.cols(); ++t) {
        CMatrix z = CMatrix::Zero(n, n);
        for (Index l = 0; l < d; ++l) z += center(l, t) * basis[size_t(l)];
        h += uni(rng) * (z + z.adjoint()) + uni(rng) * Complex(0, 1) * (z - z.adjoint());
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));

    std::vector<SimpleSummand> out;
    for (const auto& [start, len] : cluster_sorted(es.eigenvalues(), 1e-6)) {
        const CMatrix uc = es.eigenvectors().middleCols(start, len);
        const CMatrix zc = uc * uc.adjoint();
        std::vector<CMatrix> part;
        for (const auto& b : basis) part.push_back(b * zc);
        const Subspace ac = span(n, n, part, tol);
        const Index k = static_cast<Index>(std::llround(std::sqrt(double(ac.dim()))));
        if (k * k != ac.dim() || len % k != 0)
            throw NumericalError("central summand of dimension " + idx(ac.dim()) + " is not a full matrix algebra");
        const Index mu = len / k;

        CMatrix g = CMatrix::Zero(n, n);
        for (Index l = 0; l < ac.dim(); ++l) {
            const CMatrix b = ac.basis(l);
            g += uni(rng) * (b + b.adjoint()) + uni(rng) * Complex(0, 1) * (b - b.adjoint());
        }
        const CMatrix gc = uc.adjoint() * g * uc;
        Eigen::SelfAdjointEigenSolver<CMatrix> gs(0.5 * (gc + gc.adjoint()));
        const auto clusters = cluster_sorted(gs.eigenvalues(), 1e-6);
        if (static_cast<Index>(clusters.size()) != k)
            throw NumericalError("failed to split a simple summand into minimal projections");
        std::vector<CMatrix> mins;
        for (const auto& [s0, l0] : clusters) {
            if (l0 != mu) throw NumericalError("minimal projections of unequal rank");
            const CMatrix w = uc * gs.eigenvectors().middleCols(s0, l0);
            mins.push_back(w * w.adjoint());
        }
        SimpleSummand sum;
        sum.size = k;
        sum.units.assign(size_t(k * k), CMatrix());
        std::vector<CMatrix> row0(static_cast<size_t>(k));
        row0[0] = mins[0];
        for (Index q = 1; q < k; ++q) {
            CMatrix best;
            double best_norm = -1.0;
            for (Index l = 0; l < ac.dim(); ++l) {
                CMatrix v = mins[0] * ac.basis(l) * mins[size_t(q)];
                const double nv = v.norm();
                if (nv > best_norm) {
                    best_norm = nv;
                    best = std::move(v);
                }
            }
            const double lambda = best_norm * best_norm / double(mu);
            row0[size_t(q)] = best / std::sqrt(lambda);
        }
        for (Index p = 0; p < k; ++p)
            for (Index q = 0; q < k; ++q)
                sum.units[size_t(p * k + q)] = row0[size_t(p)].adjoint() * row0[size_t(q)];
        // e_0q^† e_0q must be the q-th minimal projection
        for (Index q = 0; q < k; ++q)
            if ((sum.unit(q, q) - mins[size_t(q)]).norm() > 1e-7)
                throw NumericalError("matrix unit construction failed");
        out.push_back(std::move(sum));
    }
    return out;
}

EqualizerResult w_star_equalizer(const StarHom& f, const StarHom& g, double tol) {
    if (f.source() != g.source() || f.target() != g.target())
        throw DimensionError("equalizer needs parallel maps");
    const MultiMatrixAlgebra& s = f.source();
    const CMatrix diff = f.action() - g.action();
    const double scale = std::max({1.0, max_abs(f.action()), max_abs(g.action())});
    CMatrix ker = null_space_absolute(diff, tol * scale * std::sqrt(double(std::max<Index>(1, s.dim()))));
    Subspace kernel = Subspace::from_orthonormal(s.dim(), 1, ker, tol);

    std::vector<CMatrix> mats;
    for (Index k = 0; k < ker.cols(); ++k) mats.push_back(s.embed(ker.col(k)));
    for (const auto& x : mats) {
        if (!kernel.contains(s.coordinates_of(x.adjoint()).eval(), 1e-7))
            throw ConsistencyError("equalizer is not closed under adjoints");
        for (const auto& y : mats)
            if (!kernel.contains(s.coordinates_of(x * y).eval(), 1e-7))
                throw ConsistencyError("equalizer is not closed under products");
    }
    const auto summands = decompose_star_algebra(mats, tol);
    std::vector<Index> dims, mults;
    for (const auto& sm : summands) {
        dims.push_back(sm.size);
        mults.push_back(static_cast<Index>(std::llround(sm.unit(0, 0).trace().real())));
    }
    MultiMatrixAlgebra sub(dims, mults);
    CMatrix action(s.dim(), sub.dim());
    for (Index c = 0; c < sub.num_blocks(); ++c)
        for (Index p = 0; p < sub.block_dim(c); ++p)
            for (Index q = 0; q < sub.block_dim(c); ++q)
                action.col(sub.coord(c, p, q)) = s.coordinates_of(summands[size_t(c)].unit(p, q));
    StarHom inc = StarHom::from_action(sub, s, action, std::max(tol, 1e-9));
    return {kernel, sub, inc};
}

CoequalizerResult w_star_coequalizer(const StarHom& f, const StarHom& g, double tol) {
    if (f.source() != g.source() || f.target() != g.target())
        throw DimensionError("coequalizer needs parallel maps");
    const MultiMatrixAlgebra& t = f.target();
    const CMatrix diff = f.action() - g.action();
    const double scale = std::max({1.0, max_abs(f.action()), max_abs(g.action())});
    CoequalizerResult out;
    std::vector<Index> keep;
    for (Index j = 0; j < t.num_blocks(); ++j) {
        const Index sz = t.block_dim(j) * t.block_dim(j);
        const double m = diff.rows() ? max_abs(diff.middleRows(t.coord_offset(j), sz)) : 0.0;
        (m > tol * scale ? out.ideal_blocks : keep).push_back(j);
    }
    std::vector<Index> dims, mults;
    for (Index j : keep) {
        dims.push_back(t.block_dim(j));
        mults.push_back(t.multiplicity(j));
    }
    out.algebra = MultiMatrixAlgebra(dims, mults);
    StarHom::Bratteli b(keep.size(), std::vector<Index>(size_t(t.num_blocks()), 0));
    for (size_t r = 0; r < keep.size(); ++r) b[r][size_t(keep[r])] = 1;
    out.quotient = StarHom::from_bratteli(t, out.algebra, b);
    return out;
}

}  // namespace qgraph
