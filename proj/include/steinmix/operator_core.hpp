#pragma once

// Dense Hermitian operators, their spectral decompositions, and the operator
// functions built on top of them (spectral projections, matrix log on the
// support, tensor powers, pinching).

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace steinmix {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative Hermiticity tolerance applied to ‖M‖_max on construction.
inline constexpr double kHermitianTol = 1e-12;
/// Allowed negative eigenvalue of a density matrix before it is rejected.
inline constexpr double kPsdTol = 1e-10;
/// Allowed excursion of a test operator's spectrum outside [0, 1].
inline constexpr double kTestOperatorTol = 1e-10;
/// Allowed |Tr ρ − 1| on input; accepted states are renormalized exactly.
inline constexpr double kTraceInputTol = 1e-8;
/// Zero-eigenvalue band for spectral projections, relative to the spectral range.
inline constexpr double kProjectionRelTol = 1e-10;
/// Eigenvalue clustering tolerance, relative to the eigenvalue magnitude.
inline constexpr double kClusterRelTol = 1e-8;
inline constexpr Index kDefaultMaxDim = 4096;

/// Largest |entry| of a matrix; 0 for empty.
double max_abs(const ComplexMatrix& m);

/// Dense complex square matrix that is Hermitian up to tolerance.
/// The stored matrix is exactly Hermitian: the constructor symmetrizes.
class HermitianOperator {
public:
    explicit HermitianOperator(ComplexMatrix m);

    static HermitianOperator zero(Index dim);
    static HermitianOperator identity(Index dim);
    static HermitianOperator diagonal(std::span<const double> entries);

    Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }

    /// True when every off-diagonal entry is exactly zero.
    bool is_diagonal() const;
    double trace() const;

    HermitianOperator operator+(const HermitianOperator& other) const;
    HermitianOperator operator-(const HermitianOperator& other) const;
    HermitianOperator operator*(double s) const;

private:
    struct Trusted {};
    HermitianOperator(ComplexMatrix m, Trusted) : m_(std::move(m)) {}

    ComplexMatrix m_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& h) { return h * s; }

/// Positive semidefinite, unit-trace Hermitian operator.
class DensityMatrix {
public:
    /// Validates PSD (within kPsdTol) and trace (within kTraceInputTol), clips
    /// tolerable negative eigenvalues to zero and renormalizes.
    explicit DensityMatrix(HermitianOperator op);

    /// Skips the spectral check; only renormalizes the trace. For states built
    /// from valid states by operations that preserve positivity.
    static DensityMatrix assume_valid(HermitianOperator op);

    static DensityMatrix maximally_mixed(Index dim);
    static DensityMatrix diagonal(std::span<const double> probs);
    static DensityMatrix pure(const ComplexVector& psi);

    Index dim() const { return op_.dim(); }
    const HermitianOperator& op() const { return op_; }
    const ComplexMatrix& matrix() const { return op_.matrix(); }

private:
    explicit DensityMatrix(HermitianOperator op, bool /*trusted*/) : op_(std::move(op)) {}
    HermitianOperator op_;
};

/// Hermitian operator with spectrum in [0, 1]: one element of a binary POVM.
class TestOperator {
public:
    /// Validates the spectrum lies in [−tol, 1+tol] and clips it into [0, 1].
    explicit TestOperator(HermitianOperator op);
    static TestOperator assume_valid(HermitianOperator op);

    static TestOperator identity(Index dim);
    static TestOperator zero(Index dim);

    Index dim() const { return op_.dim(); }
    const HermitianOperator& op() const { return op_; }
    const ComplexMatrix& matrix() const { return op_.matrix(); }

    /// Convex combination Σ_k w_k T_k; weights must be nonnegative and sum to 1.
    static TestOperator mixture(std::span<const TestOperator> tests, std::span<const double> weights);

private:
    explicit TestOperator(HermitianOperator op, bool /*trusted*/) : op_(std::move(op)) {}
    HermitianOperator op_;
};

/// Index range [begin, end) into the ascending eigenvalue list.
struct EigenCluster {
    Index begin;
    Index end;
};

/// Spectral decomposition M = V diag(λ) V† with ascending λ.
///
/// Diagonal inputs are decomposed exactly: the eigenbasis is a permutation of
/// the standard basis and is stored as an index map rather than a dense matrix.
class EigenSystem {
public:
    const RealVector& eigenvalues() const { return values_; }
    /// Dense unitary whose columns are the eigenvectors (materialized on demand
    /// for the diagonal case).
    ComplexMatrix eigenvectors() const;
    Index dim() const { return values_.size(); }

    int distinct_count() const { return static_cast<int>(clusters_.size()); }
    const std::vector<EigenCluster>& clusters() const { return clusters_; }

    double spectral_range() const;
    double max_abs_eigenvalue() const;
    /// True when the decomposition came from the exact diagonal path.
    bool exact() const { return !permutation_.empty(); }
    /// True when the eigenvectors are real (real symmetric input).
    bool real() const { return real_vectors_.size() > 0; }
    /// Absolute accuracy of the eigenvalues: 0 on the exact path.
    double noise_floor() const;
    /// Zero band half-width used by the spectral projections.
    double projection_tolerance() const { return kProjectionRelTol * spectral_range(); }

    /// V diag(w) V†; columns with zero weight are skipped.
    ComplexMatrix synthesize(const RealVector& weights) const;
    /// Real parts of diag(V† X V), i.e. ⟨v_k|X|v_k⟩ for each eigenvector.
    RealVector diagonal_in_basis(const ComplexMatrix& x) const;
    /// V† X V and its inverse.
    ComplexMatrix to_basis(const ComplexMatrix& x) const;
    ComplexMatrix from_basis(const ComplexMatrix& x) const;

private:
    friend EigenSystem eig(const HermitianOperator& m);

    void build_clusters();

    RealVector values_;
    ComplexMatrix vectors_;
    Eigen::MatrixXd real_vectors_;
    std::vector<Index> permutation_;  // eigenvector k is e_{permutation_[k]}
    std::vector<EigenCluster> clusters_;
};

/// Full eigendecomposition. Throws NumericError if the solver does not converge.
EigenSystem eig(const HermitianOperator& m);
/// Eigenvalues only, ascending.
RealVector eigenvalues(const HermitianOperator& m);

/// Projection onto eigenvalues ≥ −tol (the closed condition {M ≥ 0}).
TestOperator positive_part_projection(const HermitianOperator& m);
TestOperator positive_part_projection(const EigenSystem& es);
/// Projection onto eigenvalues > tol.
TestOperator strict_positive_projection(const EigenSystem& es);
/// Projection onto eigenvalues in [−tol, tol].
TestOperator kernel_projection(const HermitianOperator& m);
TestOperator kernel_projection(const EigenSystem& es);
/// Tr[(M)_+] = Σ_{λ > tol} λ.
double positive_part_trace(const HermitianOperator& m);

/// Projection onto the support of a state (eigenvalues above the noise floor).
TestOperator support_projection(const DensityMatrix& rho);

/// Natural log on the support, zero on the kernel.
HermitianOperator matrix_log_on_support(const DensityMatrix& rho);
/// exp(M) via the spectral decomposition.
ComplexMatrix matrix_exp(const HermitianOperator& m);

/// Kronecker product of two operators.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);
/// n-fold Kronecker power. Throws OverflowError if dim^n > max_dim.
DensityMatrix tensor_power(const DensityMatrix& rho, int n, Index max_dim = kDefaultMaxDim);
/// dim^n, saturating instead of overflowing.
Index checked_power(Index base, int n, Index cap);

struct PinchResult {
    DensityMatrix state;
    int distinct_count;
};

/// E(ρ) = Σ_i Π_i ρ Π_i over the eigenvalue clusters Π_i of σ.
PinchResult pinch(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Tr[A B] for Hermitian A, B (real by construction).
double trace_product(const ComplexMatrix& a, const ComplexMatrix& b);
/// ‖AB − BA‖_max.
double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace steinmix
