#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "txnn/matrix.hpp"
#include "txnn/rng.hpp"

using namespace txnn;
using Catch::Approx;

namespace {

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    REQUIRE(a.same_shape(b));
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

}  // namespace

TEST_CASE("matmul matches a triple-loop evaluation") {
    Rng rng(42);
    const std::array<std::array<std::size_t, 3>, 5> shapes{
        {{1, 1, 1}, {2, 3, 4}, {16, 16, 16}, {5, 1, 7}, {3, 16, 2}}};
    for (const auto& [m, k, n] : shapes) {
        Matrix a = rng.uniform_matrix(-1.0, 1.0, m, k);
        Matrix b = rng.uniform_matrix(-1.0, 1.0, k, n);
        REQUIRE(max_abs_diff(matmul(a, b), naive_matmul(a, b)) < 1e-12);
    }
}

TEST_CASE("matmul is associative to rounding") {
    Rng rng(7);
    Matrix a = rng.uniform_matrix(-2.0, 2.0, 8, 8);
    Matrix b = rng.uniform_matrix(-2.0, 2.0, 8, 8);
    Matrix c = rng.uniform_matrix(-2.0, 2.0, 8, 8);
    REQUIRE(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))) < 1e-9);
}

TEST_CASE("matmul rejects mismatched inner dimensions, naming both shapes") {
    REQUIRE_THROWS_AS(matmul(Matrix(2, 3), Matrix(4, 2)), ShapeError);
    try {
        matmul(Matrix(2, 3), Matrix(4, 2));
        FAIL("expected a ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("2x3") != std::string::npos);
        REQUIRE(msg.find("4x2") != std::string::npos);
    }
}

TEST_CASE("transposed products match explicit transposes") {
    Rng rng(3);
    Matrix a = rng.uniform_matrix(-1.0, 1.0, 4, 3);
    Matrix b = rng.uniform_matrix(-1.0, 1.0, 4, 5);
    REQUIRE(max_abs_diff(matmul_tn(a, b), matmul(a.transpose(), b)) < 1e-12);
    Matrix c = rng.uniform_matrix(-1.0, 1.0, 3, 4);
    Matrix d = rng.uniform_matrix(-1.0, 1.0, 5, 4);
    REQUIRE(max_abs_diff(matmul_nt(c, d), matmul(c, d.transpose())) < 1e-12);
    REQUIRE_THROWS_AS(matmul_tn(Matrix(4, 3), Matrix(5, 2)), ShapeError);
    REQUIRE_THROWS_AS(matmul_nt(Matrix(3, 4), Matrix(5, 2)), ShapeError);
}

TEST_CASE("identity is neutral for matmul") {
    Rng rng(11);
    Matrix a = rng.uniform_matrix(-1.0, 1.0, 6, 6);
    REQUIRE(matmul(Matrix::identity(6), a) == a);
    REQUIRE(matmul(a, Matrix::identity(6)) == a);
}

TEST_CASE("elementwise helpers") {
    Matrix a = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    Matrix b = Matrix::from_rows({{10.0, 20.0}, {30.0, 40.0}});

    REQUIRE(a.transpose().transpose() == a);
    REQUIRE(a.hadamard(b) == Matrix::from_rows({{10.0, 40.0}, {90.0, 160.0}}));
    REQUIRE((a + b) == Matrix::from_rows({{11.0, 22.0}, {33.0, 44.0}}));
    REQUIRE((b - a) == Matrix::from_rows({{9.0, 18.0}, {27.0, 36.0}}));
    REQUIRE((a * 2.0) == Matrix::from_rows({{2.0, 4.0}, {6.0, 8.0}}));
    REQUIRE(a.col_sums() == Matrix::from_rows({{4.0, 6.0}}));
    REQUIRE(a.col_means() == Matrix::from_rows({{2.0, 3.0}}));
    REQUIRE(a.sum() == 10.0);
    REQUIRE(a.map([](double v) { return -v; }) == Matrix::from_rows({{-1.0, -2.0}, {-3.0, -4.0}}));

    Matrix c = a;
    c.add_row_vector(Matrix::from_rows({{100.0, 200.0}}));
    REQUIRE(c == Matrix::from_rows({{101.0, 202.0}, {103.0, 204.0}}));
    REQUIRE_THROWS_AS(c.add_row_vector(Matrix(1, 3)), ShapeError);
    REQUIRE_THROWS_AS(a.hadamard(Matrix(3, 2)), ShapeError);
    REQUIRE_THROWS_AS(Matrix::from_rows({{1.0}, {1.0, 2.0}}), ShapeError);

    REQUIRE(a.all_finite());
    Matrix inf = a;
    inf(1, 1) = std::numeric_limits<double>::infinity();
    REQUIRE_FALSE(inf.all_finite());
}

TEST_CASE("rng emits the reference splitmix64 sequence for seed 42") {
    Rng rng(42);
    REQUIRE(rng.next_u64() == 13679457532755275413ULL);
    REQUIRE(rng.next_u64() == 2949826092126892291ULL);
    REQUIRE(rng.next_u64() == 5139283748462763858ULL);
    REQUIRE(rng.next_u64() == 6349198060258255764ULL);

    Rng units(42);
    REQUIRE(units.next_unit() == 0.7415648787718233);
    REQUIRE(units.next_unit() == 0.1599103928769201);
}

TEST_CASE("normal draws follow the two-uniform box-muller recipe") {
    Rng rng(42);
    REQUIRE(rng.normal(0.0, 1.0) == Approx(0.8822489062222688).margin(1e-15));

    // exactly two uniforms consumed per draw
    Rng a(123), b(123);
    a.normal(5.0, 2.0);
    b.next_unit();
    b.next_unit();
    REQUIRE(a.next_u64() == b.next_u64());

    // zero stddev collapses to the mean
    Rng c(9);
    for (int i = 0; i < 16; ++i) REQUIRE(c.normal(3.25, 0.0) == 3.25);
}

TEST_CASE("sample statistics approach the distribution parameters") {
    const int n = 100000;
    Rng rng(7);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = rng.next_unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    REQUIRE(sum / n == Approx(0.5).margin(0.005));

    Rng rng2(8);
    double mean = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = rng2.normal(2.0, 3.0);
        mean += z;
        sq += z * z;
    }
    mean /= n;
    const double var = sq / n - mean * mean;
    REQUIRE(mean == Approx(2.0).margin(0.05));
    REQUIRE(var == Approx(9.0).margin(0.3));
}

TEST_CASE("rng argument validation") {
    Rng rng(1);
    REQUIRE_THROWS_AS(rng.uniform(2.0, 1.0), ArgumentError);
    REQUIRE_THROWS_AS(rng.normal(0.0, -1.0), ArgumentError);
    REQUIRE_THROWS_AS(rng.below(0), ArgumentError);
    REQUIRE_THROWS_AS(rng.uniform_matrix(1.0, 0.0, 2, 2), ArgumentError);
    REQUIRE_THROWS_AS(rng.normal_matrix(0.0, -0.5, 2, 2), ArgumentError);
}

TEST_CASE("shuffle is a seed-deterministic permutation") {
    std::vector<int> v(100);
    std::iota(v.begin(), v.end(), 0);
    std::vector<int> w = v, original = v;

    Rng a(5), b(5);
    a.shuffle(v.begin(), v.end());
    b.shuffle(w.begin(), w.end());
    REQUIRE(v == w);
    REQUIRE(v != original);  // astronomically unlikely to be identity

    std::sort(v.begin(), v.end());
    REQUIRE(v == original);
}

TEST_CASE("identical seeds give identical streams, different seeds diverge") {
    Rng a(99), b(99), c(100);
    bool diverged = false;
    for (int i = 0; i < 64; ++i) {
        auto va = a.next_u64();
        REQUIRE(va == b.next_u64());
        if (va != c.next_u64()) diverged = true;
    }
    REQUIRE(diverged);
}
