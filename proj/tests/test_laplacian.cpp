#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "lapsync/io.hpp"
#include "lapsync/laplacian.hpp"

using namespace lapsync;

TEST_CASE("to_matrix single edge and path") {
    const SymMatrix single = to_matrix(LaplacianCandidate(2, {{0, 1, 1.0}}));
    CHECK(single(0, 0) == 1.0);
    CHECK(single(0, 1) == -1.0);

    const SymMatrix path = to_matrix(LaplacianCandidate(3, {{0, 1, 1.0}, {1, 2, 1.0}}));
    CHECK(path(1, 1) == 2.0);
    CHECK(path(0, 2) == 0.0);
    CHECK(path(0, 0) == 1.0);
}

TEST_CASE("complete graph with weight 1/n matches the uniform coupling form") {
    const int n = 3;
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0 / n});
    const SymMatrix k = to_matrix(LaplacianCandidate(n, std::move(edges)));
    const SymMatrix uniform = SymMatrix::identity(n) - SymMatrix::ones_outer(n); // k_level = n * w = 1
    CHECK((k - uniform).max_norm() < 1e-15);
}

TEST_CASE("candidate validation") {
    CHECK_THROWS_AS(LaplacianCandidate(3, {{0, 1, -0.5}}), ValidationError);
    CHECK_THROWS_AS(LaplacianCandidate(3, {{1, 1, 0.5}}), ValidationError);
    CHECK_THROWS_AS(LaplacianCandidate(3, {{0, 3, 0.5}}), ValidationError);
    CHECK_THROWS_AS(LaplacianCandidate(3, {{0, 1, 0.5}, {0, 1, 0.2}}), ValidationError);
}

TEST_CASE("check_membership on the path graph") {
    const SymMatrix path = to_matrix(LaplacianCandidate(3, {{0, 1, 1.0}, {1, 2, 1.0}}));
    const MembershipReport rep = check_membership(path);
    CHECK(rep.is_symmetric);
    CHECK(rep.row_sums_zero);
    CHECK(rep.offdiag_nonpositive);
    CHECK(rep.connected);
    CHECK(rep.lambda2 == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("check_membership flags disconnection and sign violations") {
    const SymMatrix islands = to_matrix(LaplacianCandidate(4, {{0, 1, 1.0}, {2, 3, 1.0}}));
    const MembershipReport rep = check_membership(islands);
    CHECK_FALSE(rep.connected);
    CHECK(rep.lambda2 == Catch::Approx(0.0).margin(1e-10));

    Matrix bad(2, 2);
    bad(0, 0) = -1.0;
    bad(0, 1) = 1.0;
    bad(1, 0) = 1.0;
    bad(1, 1) = -1.0;
    CHECK_FALSE(check_membership(SymMatrix(bad)).offdiag_nonpositive);
}

TEST_CASE("connectivity equivalence: lambda2 > 0 iff K + 1 1^T/n is PD") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        LaplacianCandidate cand = testutil::random_connected_candidate(n, rng);
        // Half the trials: drop edges around a split point to disconnect.
        std::vector<Edge> edges = cand.edges();
        if (trial % 2 == 1 && n >= 3) {
            const int cut = 1 + static_cast<int>(rng() % (n - 1));
            std::vector<Edge> kept;
            for (const Edge& e : edges)
                if (e.j < cut || e.i >= cut) kept.push_back(e);
            edges = kept;
        }
        const SymMatrix k = to_matrix(LaplacianCandidate(n, edges));
        const MembershipReport rep = check_membership(k);
        const bool uf = testutil::edges_connected(n, edges);
        CHECK(rep.connected == uf);
        const EigDecomp shifted = sym_eig(k + SymMatrix::ones_outer(n));
        CHECK((shifted.eigenvalues.front() > default_membership_tol(k)) == rep.connected);
    }
}

TEST_CASE("from_matrix basics and truncation") {
    const SymMatrix single = to_matrix(LaplacianCandidate(2, {{0, 1, 1.0}}));
    const LaplacianCandidate c = from_matrix(single, 0.0);
    REQUIRE(c.edges().size() == 1);
    CHECK(c.edges()[0].weight == 1.0);

    Matrix tiny(2, 2);
    tiny(0, 0) = 1e-9;
    tiny(0, 1) = -1e-9;
    tiny(1, 0) = -1e-9;
    tiny(1, 1) = 1e-9;
    CHECK(from_matrix(SymMatrix(tiny), 1e-6).edges().empty());

    Matrix positive(2, 2);
    positive(0, 0) = -0.5;
    positive(0, 1) = 0.5;
    positive(1, 0) = 0.5;
    positive(1, 1) = -0.5;
    CHECK_THROWS_AS(from_matrix(SymMatrix(positive), 1e-6), ValidationError);
}

TEST_CASE("from_matrix recovers the path topology of the reference sparse design") {
    const SymMatrix k01 = SymMatrix(testutil::table_k01());
    const LaplacianCandidate c = from_matrix(k01, 1e-3);
    REQUIRE(c.edges().size() == 6);
    for (const Edge& e : c.edges()) {
        CHECK(e.j == e.i + 1);
        CHECK(e.weight == Catch::Approx(0.57).margin(1e-12));
    }
}

TEST_CASE("round-trip from_matrix(to_matrix) is the identity on canonical edge lists") {
    std::mt19937 rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const LaplacianCandidate cand = testutil::random_connected_candidate(n, rng);
        const LaplacianCandidate back = from_matrix(to_matrix(cand), 0.0);
        REQUIRE(back.edges().size() == cand.edges().size());
        for (std::size_t e = 0; e < back.edges().size(); ++e) {
            CHECK(back.edges()[e].i == cand.edges()[e].i);
            CHECK(back.edges()[e].j == cand.edges()[e].j);
            CHECK(back.edges()[e].weight == cand.edges()[e].weight);
        }
    }
}

TEST_CASE("membership holds for every connected candidate") {
    std::mt19937 rng(33);
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const SymMatrix k = testutil::random_connected_laplacian(n, rng);
        const MembershipReport rep = check_membership(k);
        CHECK(rep.is_symmetric);
        CHECK(rep.row_sums_zero);
        CHECK(rep.offdiag_nonpositive);
        CHECK(rep.connected);
    }
}

TEST_CASE("matrix text format round-trips at full precision") {
    std::mt19937 rng(34);
    const SymMatrix a = testutil::random_symmetric(5, rng);
    std::ostringstream out;
    write_matrix(out, a.mat());
    std::istringstream in(out.str());
    const Matrix back = read_matrix(in);
    CHECK(back.data() == a.mat().data()); // bit-exact via 17 significant digits
}

TEST_CASE("graph text format round-trips and accepts comments") {
    const LaplacianCandidate cand(4, {{0, 1, 0.125}, {1, 2, 1.0 / 3.0}, {2, 3, 2.0}});
    std::ostringstream out;
    write_graph(out, cand);
    std::istringstream in("# a comment line\n" + out.str());
    const LaplacianCandidate back = read_graph(in);
    REQUIRE(back.edges().size() == 3);
    for (std::size_t e = 0; e < 3; ++e) CHECK(back.edges()[e].weight == cand.edges()[e].weight);
    CHECK(back.node_count() == 4);
}

TEST_CASE("io errors carry IoError") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_matrix(empty), IoError);
    std::istringstream bad_header("x 3\n0 1 1.0\n");
    CHECK_THROWS_AS(read_graph(bad_header), IoError);
    CHECK_THROWS_AS(read_matrix_file("/nonexistent/file.txt"), IoError);
}
