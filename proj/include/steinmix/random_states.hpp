#pragma once

// Seeded generators for random states, unitaries, projections and tests.

#include "steinmix/operator_core.hpp"

#include <cstdint>
#include <random>

namespace steinmix {

using Rng = std::mt19937_64;

/// d×d matrix of i.i.d. standard complex Gaussians.
ComplexMatrix random_ginibre(Index dim, Rng& rng);
/// Haar-like unitary from the QR decomposition of a Ginibre matrix.
ComplexMatrix random_unitary(Index dim, Rng& rng);
/// G G† / Tr[G G†] with G Ginibre; full rank almost surely.
DensityMatrix random_density(Index dim, Rng& rng);
/// Diagonal state with Dirichlet(1,...,1) weights.
DensityMatrix random_diagonal_density(Index dim, Rng& rng);
/// Random rank-r orthogonal projection.
TestOperator random_projection(Index dim, Index rank, Rng& rng);
/// Random Hermitian matrix with its spectrum clipped into [0, 1].
TestOperator random_test_operator(Index dim, Rng& rng);
/// U diag(p) U† for the given unitary.
DensityMatrix rotate(const DensityMatrix& rho, const ComplexMatrix& u);

/// Dimension draw: 60% qubits, 30% qutrits, 10% four-level systems.
Index random_small_dim(Rng& rng);
double uniform01(Rng& rng);

}  // namespace steinmix
