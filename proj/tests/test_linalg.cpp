#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace qgraph;
using namespace testing_support;

namespace {

CMatrix E(Index i, Index j, Index n = 2) { return unit_matrix(n, n, i, j); }

}  // namespace

TEST_CASE("kron index layout") {
    CHECK((kron(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)) - CMatrix::Identity(4, 4)).norm() == 0.0);

    const CMatrix k = kron(E(0, 0), E(1, 1));
    CHECK(k.cwiseAbs().sum() == doctest::Approx(1.0));
    CHECK(k(1, 1) == Complex(1.0));

    // a single 1 at row 1, column 3 comes from A[0,1] B[1,1]
    const CMatrix k2 = kron(E(0, 1), E(1, 1));
    CHECK(k2(1, 3) == Complex(1.0));
    CHECK(k2.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("kron is multiplicative for the Frobenius norm") {
    Rng rng(1);
    for (int t = 0; t < 10; ++t) {
        const CMatrix a = random_matrix(rng, 3, 3);
        const CMatrix b = random_matrix(rng, 3, 3);
        CHECK(kron(a, b).norm() == doctest::Approx(a.norm() * b.norm()).epsilon(1e-12));
    }
}

TEST_CASE("flatten is row-major") {
    CMatrix m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    const CVector v = flatten(m);
    CHECK(v(1) == Complex(2.0));
    CHECK(v(3) == Complex(4.0));
    CHECK((unflatten(v, 2, 3) - m).norm() == 0.0);
}

TEST_CASE("span rank decisions") {
    CHECK(span({E(0, 0), CMatrix(2.0 * E(0, 0))}).dim() == 1);
    CHECK(span({E(0, 0), E(0, 1), E(1, 0), E(1, 1)}).dim() == 4);
    CHECK(span(2, 2, {}).dim() == 0);
    CHECK(span({}).dim() == 0);

    Rng rng(2);
    std::vector<CMatrix> vs;
    for (int k = 0; k < 10; ++k) vs.push_back(random_matrix(rng, 3, 3));
    const Subspace s = span(vs);
    CHECK(s.dim() <= 9);
    for (const auto& v : vs) CHECK(s.contains(v));

    // an explicitly rank-deficient family
    std::vector<CMatrix> low;
    const CMatrix a = random_matrix(rng, 3, 3), b = random_matrix(rng, 3, 3);
    for (int k = 0; k < 6; ++k) low.push_back(gauss_c(rng) * a + gauss_c(rng) * b);
    CHECK(span(low).dim() == 2);
}

TEST_CASE("span is orthonormal and order independent") {
    Rng rng(3);
    std::vector<CMatrix> vs;
    for (int k = 0; k < 5; ++k) vs.push_back(random_matrix(rng, 4, 4));
    const Subspace s = span(vs);
    CHECK((s.columns().adjoint() * s.columns() - CMatrix::Identity(5, 5)).norm() < 1e-12);
    std::vector<CMatrix> rev(vs.rbegin(), vs.rend());
    CHECK(subspace_equal(s, span(rev)));
}

TEST_CASE("projection residual is orthogonal to the subspace") {
    Rng rng(4);
    std::vector<CMatrix> vs;
    for (int k = 0; k < 4; ++k) vs.push_back(random_matrix(rng, 3, 3));
    const Subspace s = span(vs);
    for (int t = 0; t < 5; ++t) {
        const CMatrix v = random_matrix(rng, 3, 3);
        const CMatrix r = v - s.project(v);
        for (const auto& b : s.basis_matrices()) CHECK(std::abs(hs_inner(b, r)) < 1e-12);
        CHECK(s.contains(s.project(v)));
    }
}

TEST_CASE("subspace arithmetic") {
    CHECK_FALSE(subspace_contains(span({E(0, 0)}), E(1, 1)));
    CHECK(subspace_contains(span({E(0, 0)}), CMatrix(3.0 * E(0, 0))));
    CHECK(subspace_contains(span({E(0, 0)}), CMatrix::Zero(2, 2)));

    const Subspace i = subspace_intersect(span({E(0, 0), E(0, 1)}), span({E(0, 1), E(1, 0)}));
    CHECK(subspace_equal(i, span({E(0, 1)})));

    Rng rng(5);
    const Subspace s = span({random_matrix(rng, 3, 3), random_matrix(rng, 3, 3)});
    CHECK(subspace_equal(subspace_sum(s, s), s));
    CHECK(orthogonal_complement(s).dim() == 7);
    CHECK(subspace_intersect(s, orthogonal_complement(s)).dim() == 0);

    // intersection oracle: common kernel of both complements
    const Subspace t = span({random_matrix(rng, 3, 3), s.basis(0), random_matrix(rng, 3, 3)});
    const Subspace st = subspace_intersect(s, t);
    CHECK(st.dim() == 1);
    CHECK(st.contains(s.basis(0)));

    CHECK_THROWS_AS(subspace_sum(s, span({E(0, 0)})), DimensionError);
    CHECK_THROWS_AS((void)s.contains(E(0, 0)), DimensionError);
}

TEST_CASE("multiplicative product") {
    Rng rng(6);
    std::vector<CMatrix> x;
    for (int k = 0; k < 4; ++k) x.push_back(random_matrix(rng, 2, 2));
    std::vector<CMatrix> y = {random_matrix(rng, 2, 2), random_matrix(rng, 2, 2)};
    const BlockMatrix px(2, 2, x), py(2, 1, y);
    const BlockMatrix xy = mult_product(px, py);
    CHECK(xy.rows() == 2);
    CHECK(xy.cols() == 1);
    CHECK((xy.at(0, 0) - (kron(x[0], y[0]) + kron(x[1], y[1]))).norm() < 1e-12);
    CHECK((xy.at(1, 0) - (kron(x[2], y[0]) + kron(x[3], y[1]))).norm() < 1e-12);

    // identity pattern of scalars
    const CMatrix one = CMatrix::Identity(1, 1), zero = CMatrix::Zero(1, 1);
    const BlockMatrix id(2, 2, {one, zero, zero, one});
    const BlockMatrix iy = mult_product(id, py);
    CHECK((iy.at(0, 0) - y[0]).norm() == 0.0);
    CHECK((iy.at(1, 0) - y[1]).norm() == 0.0);

    CHECK_THROWS_AS(mult_product(py, py), DimensionError);
}

TEST_CASE("multiplicative product matches triple loop and is associative") {
    Rng rng(7);
    auto rand_block = [&](Index r, Index c, Index er, Index ec) {
        std::vector<CMatrix> e;
        for (Index k = 0; k < r * c; ++k) e.push_back(random_matrix(rng, er, ec));
        return BlockMatrix(r, c, e);
    };
    const BlockMatrix a = rand_block(2, 3, 2, 1), b = rand_block(3, 2, 1, 2);
    const BlockMatrix ab = mult_product(a, b);
    for (Index i = 0; i < 2; ++i)
        for (Index l = 0; l < 2; ++l) {
            CMatrix acc = CMatrix::Zero(2, 2);
            for (Index k = 0; k < 3; ++k) {
                const CMatrix& x = a.at(i, k);
                const CMatrix& y = b.at(k, l);
                for (Index p = 0; p < 2; ++p)
                    for (Index q = 0; q < 2; ++q) acc(p, q) += x(p, 0) * y(0, q);
            }
            CHECK((ab.at(i, l) - acc).norm() < 1e-12);
        }

    const BlockMatrix c = rand_block(2, 2, 2, 2);
    const BlockMatrix left = mult_product(mult_product(a, b), c);
    const BlockMatrix right = mult_product(a, mult_product(b, c));
    for (Index i = 0; i < 2; ++i)
        for (Index l = 0; l < 2; ++l) CHECK((left.at(i, l) - right.at(i, l)).norm() < 1e-10);
}

TEST_CASE("canonical basis depends only on the subspace") {
    Rng rng(8);
    const Subspace s = span({random_matrix(rng, 3, 3), random_matrix(rng, 3, 3)});
    const Subspace t = span({s.basis(0) + s.basis(1), s.basis(0) - 2.0 * s.basis(1)});
    const CMatrix cs = canonical_basis(s.columns());
    const CMatrix ct = canonical_basis(t.columns());
    CHECK((cs - ct).norm() < 1e-10);
    CHECK((canonical_basis(span({E(1, 1), E(0, 1)}).columns()).col(0) - flatten(E(0, 1))).norm() < 1e-12);
}
