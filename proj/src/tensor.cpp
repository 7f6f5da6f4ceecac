#include "qgraph/tensor.hpp"

namespace qgraph {

namespace {

void check_coeffs(const MultiMatrixAlgebra& m, const TensorElement& z) {
    if (z.coeffs.rows() != m.dim() || z.coeffs.cols() != m.dim())
        throw DimensionError("tensor coefficients must be " + std::to_string(m.dim()) + "x" +
                             std::to_string(m.dim()));
}

}  // namespace

TensorElement tensor_zero(const MultiMatrixAlgebra& m) {
    return {CMatrix::Zero(m.dim(), m.dim())};
}

TensorElement tensor_unit(const MultiMatrixAlgebra& m) { return elementary(m.unit(), m.unit()); }

TensorElement elementary(const CVector& x, const CVector& y) { return {x * y.transpose()}; }

TensorElement operator+(const TensorElement& a, const TensorElement& b) {
    return {a.coeffs + b.coeffs};
}
TensorElement operator-(const TensorElement& a, const TensorElement& b) {
    return {a.coeffs - b.coeffs};
}
TensorElement operator*(Complex s, const TensorElement& a) { return {s * a.coeffs}; }

std::vector<CMatrix> to_pair_blocks(const MultiMatrixAlgebra& m, const TensorElement& z) {
    check_coeffs(m, z);
    const Index k = m.num_blocks();
    std::vector<CMatrix> out;
    out.reserve(size_t(k * k));
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) {
            const Index ni = m.block_dim(i);
            const Index nj = m.block_dim(j);
            CMatrix blk(ni * nj, ni * nj);
            for (Index p = 0; p < ni; ++p)
                for (Index q = 0; q < ni; ++q)
                    for (Index r = 0; r < nj; ++r)
                        for (Index s = 0; s < nj; ++s)
                            blk(p * nj + s, q * nj + r) = z.coeffs(m.coord(i, p, q), m.coord(j, r, s));
            out.push_back(std::move(blk));
        }
    return out;
}

TensorElement from_pair_blocks(const MultiMatrixAlgebra& m, const std::vector<CMatrix>& blocks) {
    const Index k = m.num_blocks();
    if (static_cast<Index>(blocks.size()) != k * k) throw DimensionError("wrong number of pair blocks");
    TensorElement z = tensor_zero(m);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) {
            const Index ni = m.block_dim(i);
            const Index nj = m.block_dim(j);
            const CMatrix& blk = blocks[size_t(i * k + j)];
            if (blk.rows() != ni * nj || blk.cols() != ni * nj)
                throw DimensionError("pair block has the wrong shape");
            for (Index p = 0; p < ni; ++p)
                for (Index q = 0; q < ni; ++q)
                    for (Index r = 0; r < nj; ++r)
                        for (Index s = 0; s < nj; ++s)
                            z.coeffs(m.coord(i, p, q), m.coord(j, r, s)) = blk(p * nj + s, q * nj + r);
        }
    return z;
}

CMatrix operator_block(const MultiMatrixAlgebra& m, const CMatrix& t, Index i, Index j) {
    const Index ni = m.block_dim(i), nj = m.block_dim(j);
    const Index mi = m.multiplicity(i), mj = m.multiplicity(j);
    const Index oi = m.ambient_offset(i), oj = m.ambient_offset(j);
    CMatrix r(ni * nj, mi * mj);
    for (Index x = 0; x < ni; ++x)
        for (Index y = 0; y < nj; ++y)
            for (Index a = 0; a < mi; ++a)
                for (Index b = 0; b < mj; ++b)
                    r(x * nj + y, a * mj + b) = t(oi + x * mi + a, oj + y * mj + b);
    return r;
}

void set_operator_block(const MultiMatrixAlgebra& m, CMatrix& t, Index i, Index j,
                        const CMatrix& r) {
    const Index ni = m.block_dim(i), nj = m.block_dim(j);
    const Index mi = m.multiplicity(i), mj = m.multiplicity(j);
    const Index oi = m.ambient_offset(i), oj = m.ambient_offset(j);
    for (Index x = 0; x < ni; ++x)
        for (Index y = 0; y < nj; ++y)
            for (Index a = 0; a < mi; ++a)
                for (Index b = 0; b < mj; ++b)
                    t(oi + x * mi + a, oj + y * mj + b) = r(x * nj + y, a * mj + b);
}

TensorElement tensor_multiply(const MultiMatrixAlgebra& m, const TensorElement& a,
                              const TensorElement& b) {
    auto ba = to_pair_blocks(m, a);
    const auto bb = to_pair_blocks(m, b);
    for (size_t k = 0; k < ba.size(); ++k) ba[k] = (ba[k] * bb[k]).eval();
    return from_pair_blocks(m, ba);
}

TensorElement tensor_dagger(const MultiMatrixAlgebra& m, const TensorElement& z) {
    check_coeffs(m, z);
    TensorElement out = tensor_zero(m);
    for (Index a = 0; a < m.dim(); ++a)
        for (Index b = 0; b < m.dim(); ++b) {
            const auto ua = m.unit_of(a);
            const auto ub = m.unit_of(b);
            // e_a ⊗ e_b  ↦  e_b* ⊗ e_a*
            const Index a2 = m.coord(ub.block, ub.col, ub.row);
            const Index b2 = m.coord(ua.block, ua.col, ua.row);
            out.coeffs(a2, b2) = std::conj(z.coeffs(a, b));
        }
    return out;
}

TensorElement tensor_diamond(const MultiMatrixAlgebra& m, const TensorElement& z) {
    check_coeffs(m, z);
    TensorElement out = tensor_zero(m);
    for (Index a = 0; a < m.dim(); ++a)
        for (Index b = 0; b < m.dim(); ++b) {
            const auto ua = m.unit_of(a);
            const auto ub = m.unit_of(b);
            out.coeffs(m.coord(ua.block, ua.col, ua.row), m.coord(ub.block, ub.col, ub.row)) =
                std::conj(z.coeffs(a, b));
        }
    return out;
}

TensorElement pushforward(const StarHom& theta, const TensorElement& z) {
    check_coeffs(theta.source(), z);
    return {theta.action() * z.coeffs * theta.action().transpose()};
}

CMatrix phi_apply(const MultiMatrixAlgebra& m, const TensorElement& z, const CMatrix& t) {
    if (t.rows() != m.ambient_dim() || t.cols() != m.ambient_dim())
        throw DimensionError("phi_apply: operator must be " + std::to_string(m.ambient_dim()) +
                             "x" + std::to_string(m.ambient_dim()));
    const auto blocks = to_pair_blocks(m, z);
    const Index k = m.num_blocks();
    CMatrix out = CMatrix::Zero(t.rows(), t.cols());
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j)
            set_operator_block(m, out, i, j, blocks[size_t(i * k + j)] * operator_block(m, t, i, j));
    return out;
}

CMatrix mult_map(const MultiMatrixAlgebra& m, const TensorElement& z) {
    return phi_apply(m, z, CMatrix::Identity(m.ambient_dim(), m.ambient_dim()));
}

}  // namespace qgraph
