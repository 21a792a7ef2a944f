#include <doctest.h>

#include "steinmix/errors.hpp"
#include "steinmix/operator_core.hpp"
#include "steinmix/random_states.hpp"

#include <cmath>

using namespace steinmix;

namespace {

double min_eigenvalue(const ComplexMatrix& m) { return eigenvalues(HermitianOperator(m))(0); }

ComplexMatrix rotated_qubit(double p, double theta) {
    ComplexMatrix u(2, 2);
    u << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = p;
    d(1, 1) = 1 - p;
    return u * d * u.adjoint();
}

}  // namespace

TEST_CASE("construction validates and symmetrizes") {
    ComplexMatrix m(2, 2);
    m << 1, Complex(0, 1), Complex(0, -1), 1;
    CHECK_NOTHROW(HermitianOperator{m});
    m(0, 1) = Complex(0, 2);
    CHECK_THROWS_AS(HermitianOperator{m}, ValidationError);
    CHECK_THROWS_AS(HermitianOperator{ComplexMatrix(2, 3)}, DimensionError);

    CHECK_THROWS_AS(DensityMatrix(HermitianOperator::diagonal(std::vector{1.2, -0.2})), ValidationError);
    CHECK_THROWS_AS(DensityMatrix(HermitianOperator::diagonal(std::vector{0.5, 0.6})), ValidationError);
    const DensityMatrix nearly(HermitianOperator::diagonal(std::vector{0.5 + 1e-9, 0.5}));
    CHECK(std::abs(nearly.op().trace() - 1.0) < 1e-15);

    CHECK_THROWS_AS(TestOperator(HermitianOperator::diagonal(std::vector{1.1, 0.0})), ValidationError);
    const TestOperator clipped(HermitianOperator::diagonal(std::vector{1.0 + 1e-11, -1e-11}));
    CHECK(clipped.matrix()(0, 0).real() <= 1.0);
    CHECK(clipped.matrix()(1, 1).real() >= 0.0);
}

TEST_CASE("eig on trivial inputs") {
    const auto es = eig(HermitianOperator::diagonal(std::vector{2.0, -1.0}));
    CHECK(es.eigenvalues()(0) == -1.0);
    CHECK(es.eigenvalues()(1) == 2.0);
    CHECK(es.distinct_count() == 2);

    const auto id = eig(HermitianOperator::identity(3));
    CHECK(id.eigenvalues().isApprox(RealVector::Ones(3)));
    CHECK(id.distinct_count() == 1);
}

TEST_CASE("eig reconstructs random Hermitian matrices") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix g = random_ginibre(4, rng);
        const HermitianOperator h(g + g.adjoint());
        const auto es = eig(h);
        const ComplexMatrix v = es.eigenvectors();
        const ComplexMatrix back = v * es.eigenvalues().cast<Complex>().asDiagonal() * v.adjoint();
        CHECK(max_abs(back - h.matrix()) <= 1e-9 * (1 + max_abs(h.matrix())));
        CHECK(max_abs(v.adjoint() * v - ComplexMatrix::Identity(4, 4)) <= 1e-10);
        for (Index k = 1; k < 4; ++k) CHECK(es.eigenvalues()(k) >= es.eigenvalues()(k - 1));
    }
}

TEST_CASE("positive part and kernel projections") {
    const auto p = positive_part_projection(HermitianOperator::diagonal(std::vector{1.0, -1.0}));
    CHECK(max_abs(p.matrix() - HermitianOperator::diagonal(std::vector{1.0, 0.0}).matrix()) == 0.0);
    const auto none = positive_part_projection(HermitianOperator::identity(3) * -1.0);
    CHECK(max_abs(none.matrix()) == 0.0);

    const auto k = kernel_projection(HermitianOperator::diagonal(std::vector{1.0, 0.0, -1.0}));
    CHECK(max_abs(k.matrix() - HermitianOperator::diagonal(std::vector{0.0, 1.0, 0.0}).matrix()) == 0.0);
    CHECK(max_abs(kernel_projection(HermitianOperator::identity(2)).matrix()) == 0.0);
    const auto tiny = kernel_projection(HermitianOperator::diagonal(std::vector{1e-15, 1.0}));
    CHECK(max_abs(tiny.matrix() - HermitianOperator::diagonal(std::vector{1.0, 0.0}).matrix()) == 0.0);
}

TEST_CASE("positive part projection is extremal, idempotent and commuting") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = random_density(2, rng);
        const auto sigma = random_density(2, rng);
        const HermitianOperator m = rho.op() - sigma.op();
        const auto p = positive_part_projection(m);
        const double best = trace_product(p.matrix(), m.matrix());
        for (int t = 0; t < 100; ++t) {
            const auto test = random_test_operator(2, rng);
            CHECK(trace_product(test.matrix(), m.matrix()) <= best + 1e-12);
        }
        CHECK(max_abs(p.matrix() * p.matrix() - p.matrix()) <= 1e-9);
        CHECK(commutator_norm(p.matrix(), m.matrix()) <= 1e-8 * max_abs(m.matrix()));
        CHECK(best >= 0.0);
        const ComplexMatrix rest = ComplexMatrix::Identity(2, 2) - p.matrix();
        CHECK(trace_product(rest, m.matrix()) <= 1e-15);
    }
}

TEST_CASE("matrix log on support") {
    const auto half = matrix_log_on_support(DensityMatrix::maximally_mixed(2));
    CHECK(std::abs(half.matrix()(0, 0).real() + std::log(2.0)) < 1e-15);
    CHECK(std::abs(half.matrix()(1, 1).real() + std::log(2.0)) < 1e-15);

    const auto pure = matrix_log_on_support(DensityMatrix::diagonal(std::vector{1.0, 0.0}));
    CHECK(max_abs(pure.matrix()) == 0.0);

    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = random_density(2, rng);
        const ComplexMatrix back = matrix_exp(matrix_log_on_support(rho));
        CHECK(max_abs(back - rho.matrix()) <= 1e-9);
    }
}

TEST_CASE("tensor powers") {
    const auto pure = tensor_power(DensityMatrix::diagonal(std::vector{1.0, 0.0}), 3);
    REQUIRE(pure.dim() == 8);
    CHECK(pure.matrix()(0, 0).real() == 1.0);
    CHECK(std::abs(pure.matrix().sum() - Complex(1.0)) == 0.0);

    Rng rng(1);
    const auto rho = random_density(3, rng);
    CHECK(max_abs(tensor_power(rho, 1).matrix() - rho.matrix()) == 0.0);

    const double p = 0.3;
    const auto sq = tensor_power(DensityMatrix::diagonal(std::vector{p, 1 - p}), 2);
    const std::vector<double> expected{p * p, p * (1 - p), (1 - p) * p, (1 - p) * (1 - p)};
    for (int i = 0; i < 4; ++i) CHECK(sq.matrix()(i, i).real() == doctest::Approx(expected[i]).epsilon(1e-15));

    const auto dense3 = tensor_power(rho, 3);
    CHECK(std::abs(dense3.op().trace() - 1.0) <= 1e-9);
    CHECK(max_abs(dense3.matrix() - kron(kron(rho.matrix(), rho.matrix()), rho.matrix())) <= 1e-15);

    CHECK_THROWS_AS(tensor_power(rho, 8), OverflowError);
    CHECK_NOTHROW(tensor_power(DensityMatrix::maximally_mixed(2), 12));
    CHECK(checked_power(2, 200, 4096) > 4096);
}

TEST_CASE("pinching on trivial inputs") {
    Rng rng(9);
    const auto rho = random_density(3, rng);
    const auto flat = pinch(rho, DensityMatrix::maximally_mixed(3));
    CHECK(flat.distinct_count == 1);
    CHECK(max_abs(flat.state.matrix() - rho.matrix()) <= 1e-15);

    const auto dephased = pinch(rho, DensityMatrix::diagonal(std::vector{0.2, 0.3, 0.5}));
    CHECK(dephased.distinct_count == 3);
    ComplexMatrix diag = rho.matrix().diagonal().asDiagonal();
    CHECK(max_abs(dephased.state.matrix() - diag) <= 1e-15);

    const auto partial = pinch(rho, DensityMatrix::diagonal(std::vector{0.25, 0.25, 0.5}));
    CHECK(partial.distinct_count == 2);
    CHECK(std::abs(partial.state.matrix()(0, 1) - rho.matrix()(0, 1)) <= 1e-15);
    CHECK(std::abs(partial.state.matrix()(0, 2)) == 0.0);

    CHECK_THROWS_AS(pinch(rho, DensityMatrix::maximally_mixed(2)), DimensionError);
}

TEST_CASE("pinching invariants on random pairs") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const Index d = random_small_dim(rng);
        const auto rho = random_density(d, rng);
        const auto sigma = random_density(d, rng);
        const auto r = pinch(rho, sigma);
        CHECK(std::abs(r.state.op().trace() - 1.0) <= 1e-9);
        CHECK(commutator_norm(r.state.matrix(), sigma.matrix()) <= 1e-9);
        const auto twice = pinch(r.state, sigma);
        CHECK(max_abs(twice.state.matrix() - r.state.matrix()) <= 1e-9);
        CHECK(min_eigenvalue(r.distinct_count * r.state.matrix() - rho.matrix()) >= -1e-9);
    }
}

TEST_CASE("pinching a tensor power of a non-commuting qubit pair") {
    const auto rho = DensityMatrix(HermitianOperator(rotated_qubit(0.85, 0.6)));
    const auto sigma = DensityMatrix::diagonal(std::vector{0.7, 0.3});
    for (int n : {2, 4, 6}) {
        const auto r = pinch(tensor_power(rho, n), tensor_power(sigma, n));
        CHECK(r.distinct_count == n + 1);
        CHECK(min_eigenvalue(r.distinct_count * r.state.matrix() - tensor_power(rho, n).matrix()) >= -1e-9);
    }
}

TEST_CASE("clusters stay distinct for tiny eigenvalues of large tensor powers") {
    const auto sigma = tensor_power(DensityMatrix::diagonal(std::vector{0.9, 0.1}), 12);
    CHECK(eig(sigma.op()).distinct_count() == 13);
    const auto rotated = DensityMatrix(HermitianOperator(rotated_qubit(0.9, 0.3)));
    CHECK(eig(tensor_power(rotated, 8).op()).distinct_count() == 9);
}
