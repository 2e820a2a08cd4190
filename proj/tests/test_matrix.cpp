#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "lapsync/factorizations.hpp"
#include "lapsync/matrix.hpp"
#include "lapsync/sym_matrix.hpp"

using namespace lapsync;

TEST_CASE("matrix basics") {
    Matrix a(2, 3);
    a(0, 0) = 1.0;
    a(1, 2) = -2.0;
    CHECK(a.rows() == 2);
    CHECK(a.cols() == 3);
    CHECK(a.transpose()(2, 1) == -2.0);
    CHECK(a.max_norm() == 2.0);

    const Matrix id = Matrix::identity(3);
    CHECK((id * id - id).max_norm() == 0.0);
    CHECK(id.trace() == 3.0);

    const Matrix j = Matrix::ones_outer(4);
    CHECK((j * j - j).max_norm() < 1e-15); // projector
}

TEST_CASE("sym_matrix construction enforces exact symmetry") {
    Matrix m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0 + 1e-15;
    CHECK_THROWS_AS(SymMatrix(m), ValidationError);
    CHECK_NOTHROW(SymMatrix::symmetrized(m));
    CHECK_THROWS_AS(SymMatrix(Matrix(2, 3)), ValidationError);
}

TEST_CASE("cholesky solves SPD systems") {
    std::mt19937 rng(7);
    const SymMatrix a = testutil::random_psd(6, rng, 0.5);
    auto chol = Cholesky::factor(a.mat());
    REQUIRE(chol.has_value());
    const Matrix x = chol->solve(Matrix::identity(6));
    CHECK((a.mat() * x - Matrix::identity(6)).max_norm() < 1e-10);
}

TEST_CASE("cholesky rejects singular matrices") {
    // Laplacian of a connected graph: PSD with the consensus kernel.
    std::mt19937 rng(8);
    const SymMatrix k = testutil::random_connected_laplacian(5, rng);
    CHECK_FALSE(Cholesky::factor(k.mat()).has_value());
}

TEST_CASE("lu factorization solves general systems") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    Matrix a(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = entry(rng) + (i == j ? 3.0 : 0.0);
    auto lu = LuFactor::factor(a);
    REQUIRE(lu.has_value());
    std::vector<double> b{1, -2, 3, -4, 5};
    const std::vector<double> x = lu->solve(b);
    const std::vector<double> ax = a.matvec(x);
    for (int i = 0; i < 5; ++i) CHECK(ax[i] == Catch::Approx(b[i]).margin(1e-10));

    CHECK_FALSE(LuFactor::factor(Matrix(3, 3)).has_value());
}
