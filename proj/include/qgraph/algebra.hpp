#pragma once

#include <string>
#include <vector>

#include "qgraph/linalg.hpp"

namespace qgraph {

// ⊕_i M_{n_i} acting on C^N through x ↦ ⊕_i x_i ⊗ I_{m_i}.
// Coordinates are matrix units ordered by (block, row, col).
class MultiMatrixAlgebra {
public:
    struct Unit {
        Index block;
        Index row;
        Index col;
    };

    MultiMatrixAlgebra() = default;  // the zero algebra B({0})
    MultiMatrixAlgebra(std::vector<Index> block_dims, std::vector<Index> multiplicities);

    const std::vector<Index>& block_dims() const { return dims_; }
    const std::vector<Index>& multiplicities() const { return mults_; }
    Index num_blocks() const { return static_cast<Index>(dims_.size()); }
    Index block_dim(Index i) const { return dims_[static_cast<size_t>(i)]; }
    Index multiplicity(Index i) const { return mults_[static_cast<size_t>(i)]; }
    Index ambient_dim() const { return ambient_; }
    Index dim() const { return dim_; }
    Index coord_offset(Index block) const { return coord_off_[static_cast<size_t>(block)]; }
    Index ambient_offset(Index block) const { return amb_off_[static_cast<size_t>(block)]; }

    Unit unit_of(Index a) const { return units_[static_cast<size_t>(a)]; }
    Index coord(Index block, Index row, Index col) const {
        return coord_offset(block) + row * block_dim(block) + col;
    }

    CVector unit() const;
    CVector basis_vector(Index a) const;
    CMatrix embed(const CVector& x) const;
    CMatrix basis_matrix(Index a) const;
    CVector multiply(const CVector& x, const CVector& y) const;
    CVector adjoint(const CVector& x) const;
    std::vector<CMatrix> to_blocks(const CVector& x) const;
    CVector from_blocks(const std::vector<CMatrix>& blocks) const;
    // Coordinates of the HS projection of T onto embed(M); exact on embed(M).
    CVector coordinates_of(const CMatrix& t) const;
    // The block-central projection of block i in coordinates.
    CVector block_unit(Index i) const;

    bool operator==(const MultiMatrixAlgebra& o) const {
        return dims_ == o.dims_ && mults_ == o.mults_;
    }
    bool operator!=(const MultiMatrixAlgebra& o) const { return !(*this == o); }
    std::string describe() const;

private:
    std::vector<Index> dims_;
    std::vector<Index> mults_;
    std::vector<Index> coord_off_;
    std::vector<Index> amb_off_;
    std::vector<Unit> units_;
    Index ambient_ = 0;
    Index dim_ = 0;
};

MultiMatrixAlgebra build_algebra(const std::vector<Index>& block_dims,
                                 const std::vector<Index>& multiplicities);
// ℓ∞(n) as diagonal matrices on C^n.
MultiMatrixAlgebra diagonal_algebra(Index n);
// M_n acting on C^n.
MultiMatrixAlgebra full_algebra(Index n);

// embed(M) as a subspace of B(C^N).
Subspace algebra_span(const MultiMatrixAlgebra& m, double tol = kDefaultTol);
// ⊕_i I_{n_i} ⊗ M_{m_i}
Subspace commutant(const MultiMatrixAlgebra& m, double tol = kDefaultTol);

// Per-block positive reals d_i giving <a, b> = Σ_i d_i tr(a_i^† b_i).
using Weights = std::vector<double>;
Weights plancherel_weights(const MultiMatrixAlgebra& m);
Weights counting_weights(const MultiMatrixAlgebra& m);
// Diagonal of the Gram matrix of the matrix-unit basis.
Eigen::VectorXd coordinate_weights(const MultiMatrixAlgebra& m, const Weights& w);

// Unital *-homomorphism. Target block j is U_j (⊕_i x_i ⊗ I_{c_ji}) U_j^†.
class StarHom {
public:
    using Bratteli = std::vector<std::vector<Index>>;  // [target block][source block]

    static StarHom from_bratteli(const MultiMatrixAlgebra& source,
                                 const MultiMatrixAlgebra& target, const Bratteli& bratteli,
                                 const std::vector<CMatrix>& unitaries = {},
                                 double tol = kDefaultTol);
    // Validates the *-homomorphism property and derives Bratteli data and unitaries.
    static StarHom from_action(const MultiMatrixAlgebra& source, const MultiMatrixAlgebra& target,
                               const CMatrix& action, double tol = kDefaultTol);
    static StarHom identity(const MultiMatrixAlgebra& m);

    const MultiMatrixAlgebra& source() const { return source_; }
    const MultiMatrixAlgebra& target() const { return target_; }
    const Bratteli& bratteli() const { return bratteli_; }
    const std::vector<CMatrix>& block_unitaries() const { return unitaries_; }
    // ⊕_j U_j ⊗ I_{m'_j} on C^{N_target}
    CMatrix intertwiner() const;
    const CMatrix& action() const { return action_; }

    CVector apply(const CVector& x) const { return action_ * x; }
    // Largest violation of unitality, multiplicativity and *-preservation on the basis.
    double hom_residual() const;

    StarHom() = default;

private:
    MultiMatrixAlgebra source_;
    MultiMatrixAlgebra target_;
    Bratteli bratteli_;
    std::vector<CMatrix> unitaries_;
    CMatrix action_;
};

StarHom star_hom(const MultiMatrixAlgebra& source, const MultiMatrixAlgebra& target,
                 const StarHom::Bratteli& bratteli, const std::vector<CMatrix>& unitaries = {},
                 double tol = kDefaultTol);
// g ∘ f
StarHom compose(const StarHom& g, const StarHom& f, double tol = kDefaultTol);

// θ† = G_s^{-1} Θ^H G_t with the weighted Gram matrices.
CMatrix theta_adjoint(const StarHom& theta, const Weights& source_weights,
                      const Weights& target_weights);

// θ(x) = Σ K_i^† x K_i with K_i : C^{N_target} → C^{N_source}.
struct KrausForm {
    std::vector<CMatrix> operators;
};

KrausForm kraus_decompose(const StarHom& theta, double tol = kDefaultTol);
// max over source basis of the reconstruction error, and the unitality error.
double kraus_residual(const KrausForm& k, const StarHom& theta);

struct ProductResult {
    MultiMatrixAlgebra algebra;
    std::vector<StarHom> projections;
};
ProductResult w_star_product(const std::vector<MultiMatrixAlgebra>& factors);
// The map into the product determined by a cone of maps into the factors.
StarHom factor_through(const ProductResult& product, const std::vector<StarHom>& cone,
                       double tol = kDefaultTol);

struct EqualizerResult {
    Subspace kernel;  // of f - g, in source coordinates (d_source x 1 vectors)
    MultiMatrixAlgebra algebra;
    StarHom inclusion;
};
EqualizerResult w_star_equalizer(const StarHom& f, const StarHom& g, double tol = kDefaultTol);

struct CoequalizerResult {
    std::vector<Index> ideal_blocks;  // target blocks killed by the quotient
    MultiMatrixAlgebra algebra;
    StarHom quotient;
};
CoequalizerResult w_star_coequalizer(const StarHom& f, const StarHom& g,
                                     double tol = kDefaultTol);

// Simple summand of a concrete *-algebra with matrix units e_pq (row-major).
struct SimpleSummand {
    Index size = 0;
    std::vector<CMatrix> units;
    const CMatrix& unit(Index p, Index q) const { return units[static_cast<size_t>(p * size + q)]; }
};
// Wedderburn decomposition of a unital *-subalgebra of M_N given by a spanning set.
std::vector<SimpleSummand> decompose_star_algebra(const std::vector<CMatrix>& spanning,
                                                  double tol = kDefaultTol);

}  // namespace qgraph
