#pragma once

#include <vector>

#include "qgraph/algebra.hpp"

namespace qgraph {

// z = Σ c_ab e_a ⊗ e_b in M ⊗ M^op, with (x1⊗y1)(x2⊗y2) = x1x2 ⊗ y2y1.
struct TensorElement {
    CMatrix coeffs;  // d x d
};

TensorElement tensor_zero(const MultiMatrixAlgebra& m);
TensorElement tensor_unit(const MultiMatrixAlgebra& m);
TensorElement elementary(const CVector& x, const CVector& y);
TensorElement operator+(const TensorElement& a, const TensorElement& b);
TensorElement operator-(const TensorElement& a, const TensorElement& b);
TensorElement operator*(Complex s, const TensorElement& a);

// Block (i, j) of M ⊗ M^op is M_{n_i n_j}: the coefficient of e^i_pq ⊗ e^j_rs
// sits at row p*n_j + s, column q*n_j + r. Blocks are indexed i*k + j.
std::vector<CMatrix> to_pair_blocks(const MultiMatrixAlgebra& m, const TensorElement& z);
TensorElement from_pair_blocks(const MultiMatrixAlgebra& m, const std::vector<CMatrix>& blocks);

// Block (i, j) of an operator on C^N reshaped so that Φ_z acts as left multiplication:
// R[(x, y), (α, β)] = T[(i, x, α), (j, y, β)].
CMatrix operator_block(const MultiMatrixAlgebra& m, const CMatrix& t, Index i, Index j);
void set_operator_block(const MultiMatrixAlgebra& m, CMatrix& t, Index i, Index j,
                        const CMatrix& r);

TensorElement tensor_multiply(const MultiMatrixAlgebra& m, const TensorElement& a,
                              const TensorElement& b);
// (x ⊗ y)^‡ = y* ⊗ x*
TensorElement tensor_dagger(const MultiMatrixAlgebra& m, const TensorElement& z);
// (x ⊗ y)^◇ = x* ⊗ y*
TensorElement tensor_diamond(const MultiMatrixAlgebra& m, const TensorElement& z);
// (θ ⊗ θ)(z)
TensorElement pushforward(const StarHom& theta, const TensorElement& z);

// Φ_z(T) = Σ c_ab e_a T e_b
CMatrix phi_apply(const MultiMatrixAlgebra& m, const TensorElement& z, const CMatrix& t);
// Φ_z(I) = Σ c_ab e_a e_b
CMatrix mult_map(const MultiMatrixAlgebra& m, const TensorElement& z);

}  // namespace qgraph
