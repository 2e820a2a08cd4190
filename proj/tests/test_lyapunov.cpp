#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "lapsync/eig.hpp"
#include "lapsync/lyapunov.hpp"

using namespace lapsync;

TEST_CASE("lyapunov scalar balance A=-I, Q=2I") {
    const SymMatrix p = solve_lyapunov_dense(Matrix::identity(3) * -1.0, SymMatrix::identity(3) * 2.0);
    CHECK((p - SymMatrix::identity(3)).max_norm() < 1e-10);
}

TEST_CASE("lyapunov decoupled diagonal system") {
    Matrix a(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const SymMatrix p = solve_lyapunov_dense(a, SymMatrix::identity(2));
    CHECK(p(0, 0) == Catch::Approx(0.5).margin(1e-12));
    CHECK(p(1, 1) == Catch::Approx(0.25).margin(1e-12));
    CHECK(p(0, 1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("lyapunov trace cross-check A=-[[2,1],[1,2]]") {
    Matrix a(2, 2);
    a(0, 0) = -2.0;
    a(0, 1) = -1.0;
    a(1, 0) = -1.0;
    a(1, 1) = -2.0;
    const SymMatrix p = solve_lyapunov_dense(a, SymMatrix::identity(2));
    // trace(P) = -(1/2) trace(Q A^{-1}) = (1/2) trace([[2,1],[1,2]]^{-1}) = 2/3.
    CHECK(p.trace() == Catch::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("lyapunov trace identity on random symmetric Hurwitz systems") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const SymMatrix spd = testutil::random_psd(n, rng, 0.5);
        const Matrix a = spd.mat() * -1.0;
        const SymMatrix q = testutil::random_psd(n, rng, 0.1);
        const SymMatrix p = solve_lyapunov_dense(a, q);

        const EigDecomp d = sym_eig(spd);
        std::vector<double> inv(n);
        for (int i = 0; i < n; ++i) inv[i] = -1.0 / d.eigenvalues[i];
        const SymMatrix a_inv = eig_apply(d, inv);
        const double expected = -0.5 * (q.mat() * a_inv.mat()).trace();
        CHECK(p.trace() == Catch::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("lyapunov solves nonsymmetric stable systems") {
    // Damped oscillator block [[0, 1], [-1, -2]] is Hurwitz but not symmetric.
    Matrix a(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = -1.0;
    a(1, 1) = -2.0;
    const SymMatrix q = SymMatrix::identity(2);
    const SymMatrix p = solve_lyapunov_dense(a, q);
    CHECK((a.transpose() * p.mat() + p.mat() * a + q.mat()).max_norm() < 1e-10);
}

TEST_CASE("lyapunov rejects unstable and marginal dynamics") {
    CHECK_THROWS_AS(solve_lyapunov_dense(Matrix::identity(2), SymMatrix::identity(2)), SolverError);

    Matrix rotation(2, 2); // purely imaginary eigenvalues: operator singular
    rotation(0, 1) = 1.0;
    rotation(1, 0) = -1.0;
    CHECK_THROWS_AS(solve_lyapunov_dense(rotation, SymMatrix::identity(2)), SolverError);

    Matrix saddle(2, 2); // one stable, one unstable direction
    saddle(0, 0) = -1.0;
    saddle(1, 1) = 2.0;
    CHECK_THROWS_AS(solve_lyapunov_dense(saddle, SymMatrix::identity(2)), SolverError);
}

TEST_CASE("lyapunov enforces the oracle dimension cap") {
    CHECK_THROWS_AS(solve_lyapunov_dense(Matrix::identity(65) * -1.0, SymMatrix::identity(65)), ValidationError);
}
