#include "steinmix/random_states.hpp"

#include <cmath>

namespace steinmix {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

ComplexMatrix random_ginibre(Index dim, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(dim, dim);
    for (Index j = 0; j < dim; ++j) {
        for (Index i = 0; i < dim; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

ComplexMatrix random_unitary(Index dim, Rng& rng) {
    const ComplexMatrix g = random_ginibre(dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < dim; ++k) {
        const Complex d = r(k, k);
        const double a = std::abs(d);
        if (a > 0.0) q.col(k) *= d / a;
    }
    return q;
}

DensityMatrix random_density(Index dim, Rng& rng) {
    const ComplexMatrix g = random_ginibre(dim, rng);
    ComplexMatrix w = g * g.adjoint();
    w /= w.trace().real();
    return DensityMatrix(HermitianOperator(std::move(w)));
}

DensityMatrix random_diagonal_density(Index dim, Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> p(static_cast<std::size_t>(dim));
    double total = 0.0;
    for (auto& x : p) {
        x = expo(rng);
        total += x;
    }
    for (auto& x : p) x /= total;
    return DensityMatrix::diagonal(p);
}

TestOperator random_projection(Index dim, Index rank, Rng& rng) {
    const ComplexMatrix u = random_unitary(dim, rng);
    const ComplexMatrix v = u.leftCols(rank);
    return TestOperator::assume_valid(HermitianOperator(v * v.adjoint()));
}

TestOperator random_test_operator(Index dim, Rng& rng) {
    const ComplexMatrix g = random_ginibre(dim, rng);
    ComplexMatrix h = 0.25 * (g + g.adjoint());
    h += 0.5 * ComplexMatrix::Identity(dim, dim);
    const EigenSystem es = eig(HermitianOperator(std::move(h)));
    return TestOperator::assume_valid(HermitianOperator(es.synthesize(es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0))));
}

DensityMatrix rotate(const DensityMatrix& rho, const ComplexMatrix& u) {
    return DensityMatrix::assume_valid(HermitianOperator(u * rho.matrix() * u.adjoint()));
}

Index random_small_dim(Rng& rng) {
    const double x = uniform01(rng);
    if (x < 0.6) return 2;
    if (x < 0.9) return 3;
    return 4;
}

}  // namespace steinmix
