#include "steinmix/operator_core.hpp"

#include "steinmix/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace steinmix {

namespace {

bool matrix_is_diagonal(const ComplexMatrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
        }
    }
    return true;
}

}  // namespace

double max_abs(const ComplexMatrix& m) {
    double best = 0.0;
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) best = std::max(best, std::abs(m(i, j)));
    }
    return best;
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
        std::ostringstream msg;
        msg << "HermitianOperator: expected a nonempty square matrix, got " << m_.rows() << "x" << m_.cols();
        throw DimensionError(msg.str());
    }
    const double tol = kHermitianTol * max_abs(m_);
    double asym = 0.0;
    const Index d = m_.rows();
    for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i <= j; ++i) {
            const Complex a = m_(i, j);
            const Complex b = std::conj(m_(j, i));
            asym = std::max(asym, std::abs(a - b));
            const Complex s = 0.5 * (a + b);
            m_(i, j) = s;
            m_(j, i) = std::conj(s);
        }
    }
    if (!(asym <= tol)) {
        std::ostringstream msg;
        msg << "HermitianOperator: matrix is not Hermitian (max |M - M^dag| = " << asym << ", tolerance " << tol << ")";
        throw ValidationError(msg.str());
    }
}

HermitianOperator HermitianOperator::zero(Index dim) {
    return HermitianOperator(ComplexMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(Index dim) {
    return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> entries) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(entries.size()), static_cast<Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = entries[i];
    return HermitianOperator(std::move(m));
}

bool HermitianOperator::is_diagonal() const { return matrix_is_diagonal(m_); }

double HermitianOperator::trace() const { return m_.diagonal().real().sum(); }

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
    if (dim() != other.dim()) throw DimensionError("HermitianOperator: dimension mismatch in sum");
    return HermitianOperator(m_ + other.m_, Trusted{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
    if (dim() != other.dim()) throw DimensionError("HermitianOperator: dimension mismatch in difference");
    return HermitianOperator(m_ - other.m_, Trusted{});
}

HermitianOperator HermitianOperator::operator*(double s) const { return HermitianOperator(m_ * s, Trusted{}); }

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(HermitianOperator op) : op_(std::move(op)) {
    const RealVector lambda = eigenvalues(op_);
    const double lmin = lambda.minCoeff();
    if (lmin < -kPsdTol) {
        std::ostringstream msg;
        msg << "DensityMatrix: not positive semidefinite (min eigenvalue " << lmin << ")";
        throw ValidationError(msg.str());
    }
    const double tr = lambda.sum();
    if (!(std::abs(tr - 1.0) <= kTraceInputTol)) {
        std::ostringstream msg;
        msg << "DensityMatrix: trace " << tr << " differs from 1";
        throw ValidationError(msg.str());
    }
    if (lmin < 0.0) {
        const EigenSystem es = eig(op_);
        RealVector clipped = es.eigenvalues().cwiseMax(0.0);
        clipped /= clipped.sum();
        op_ = HermitianOperator(es.synthesize(clipped));
    }
    const double t = op_.trace();
    if (t != 1.0) op_ = op_ * (1.0 / t);
}

DensityMatrix DensityMatrix::assume_valid(HermitianOperator op) {
    const double t = op.trace();
    if (!(t > 0.0)) throw ValidationError("DensityMatrix: nonpositive trace");
    if (t != 1.0) op = op * (1.0 / t);
    return DensityMatrix(std::move(op), true);
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
    return assume_valid(HermitianOperator::identity(dim) * (1.0 / static_cast<double>(dim)));
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probs) {
    return DensityMatrix(HermitianOperator::diagonal(probs));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
    const double nrm = psi.norm();
    if (!(nrm > 0.0)) throw ValidationError("DensityMatrix::pure: zero vector");
    const ComplexVector v = psi / nrm;
    return assume_valid(HermitianOperator(v * v.adjoint()));
}

// ---------------------------------------------------------------------------
// TestOperator

TestOperator::TestOperator(HermitianOperator op) : op_(std::move(op)) {
    const RealVector lambda = eigenvalues(op_);
    const double lmin = lambda.minCoeff();
    const double lmax = lambda.maxCoeff();
    if (lmin < -kTestOperatorTol || lmax > 1.0 + kTestOperatorTol) {
        std::ostringstream msg;
        msg << "TestOperator: spectrum [" << lmin << ", " << lmax << "] outside [0, 1]";
        throw ValidationError(msg.str());
    }
    if (lmin < 0.0 || lmax > 1.0) {
        const EigenSystem es = eig(op_);
        op_ = HermitianOperator(es.synthesize(es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0)));
    }
}

TestOperator TestOperator::assume_valid(HermitianOperator op) { return TestOperator(std::move(op), true); }

TestOperator TestOperator::identity(Index dim) { return assume_valid(HermitianOperator::identity(dim)); }

TestOperator TestOperator::zero(Index dim) { return assume_valid(HermitianOperator::zero(dim)); }

TestOperator TestOperator::mixture(std::span<const TestOperator> tests, std::span<const double> weights) {
    if (tests.empty() || tests.size() != weights.size())
        throw ValidationError("TestOperator::mixture: need one weight per test");
    const Index d = tests.front().dim();
    ComplexMatrix acc = ComplexMatrix::Zero(d, d);
    double total = 0.0;
    for (std::size_t k = 0; k < tests.size(); ++k) {
        if (tests[k].dim() != d) throw DimensionError("TestOperator::mixture: dimension mismatch");
        if (weights[k] < 0.0) throw ValidationError("TestOperator::mixture: negative weight");
        total += weights[k];
        if (weights[k] != 0.0) acc += weights[k] * tests[k].matrix();
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("TestOperator::mixture: weights do not sum to 1");
    return assume_valid(HermitianOperator(std::move(acc)));
}

// ---------------------------------------------------------------------------
// EigenSystem

ComplexMatrix EigenSystem::eigenvectors() const {
    if (real()) return real_vectors_.cast<Complex>();
    if (!exact()) return vectors_;
    const Index d = dim();
    ComplexMatrix v = ComplexMatrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) v(permutation_[static_cast<std::size_t>(k)], k) = 1.0;
    return v;
}

double EigenSystem::spectral_range() const { return values_.maxCoeff() - values_.minCoeff(); }

double EigenSystem::max_abs_eigenvalue() const { return values_.cwiseAbs().maxCoeff(); }

double EigenSystem::noise_floor() const {
    if (exact()) return 0.0;
    return 8.0 * static_cast<double>(dim()) * std::numeric_limits<double>::epsilon() * max_abs_eigenvalue();
}

void EigenSystem::build_clusters() {
    clusters_.clear();
    const Index d = dim();
    const double floor = noise_floor();
    Index start = 0;
    for (Index k = 1; k < d; ++k) {
        const double tol = kClusterRelTol * std::max(std::abs(values_[k]), std::abs(values_[k - 1])) + floor;
        if (values_[k] - values_[k - 1] >= tol) {
            clusters_.push_back({start, k});
            start = k;
        }
    }
    clusters_.push_back({start, d});
}

ComplexMatrix EigenSystem::synthesize(const RealVector& weights) const {
    const Index d = dim();
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    if (exact()) {
        for (Index k = 0; k < d; ++k) {
            const Index i = permutation_[static_cast<std::size_t>(k)];
            out(i, i) = weights[k];
        }
        return out;
    }
    std::vector<Index> keep;
    for (Index k = 0; k < d; ++k) {
        if (weights[k] != 0.0) keep.push_back(k);
    }
    if (keep.empty()) return out;
    const auto s = static_cast<Index>(keep.size());
    if (real()) {
        Eigen::MatrixXd vs(d, s);
        RealVector ws(s);
        for (Index c = 0; c < s; ++c) {
            vs.col(c) = real_vectors_.col(keep[static_cast<std::size_t>(c)]);
            ws[c] = weights[keep[static_cast<std::size_t>(c)]];
        }
        const Eigen::MatrixXd r = vs * ws.asDiagonal() * vs.transpose();
        out.real() = r;
        return out;
    }
    ComplexMatrix vs(d, s);
    RealVector ws(s);
    for (Index c = 0; c < s; ++c) {
        vs.col(c) = vectors_.col(keep[static_cast<std::size_t>(c)]);
        ws[c] = weights[keep[static_cast<std::size_t>(c)]];
    }
    out.noalias() = vs * ws.asDiagonal() * vs.adjoint();
    return out;
}

RealVector EigenSystem::diagonal_in_basis(const ComplexMatrix& x) const {
    const Index d = dim();
    RealVector out(d);
    if (exact()) {
        for (Index k = 0; k < d; ++k) {
            const Index i = permutation_[static_cast<std::size_t>(k)];
            out[k] = x(i, i).real();
        }
        return out;
    }
    if (real()) {
        // ⟨v|X|v⟩ = vᵀ Re(X) v for real v and Hermitian X.
        const Eigen::MatrixXd xv = x.real() * real_vectors_;
        for (Index k = 0; k < d; ++k) out[k] = real_vectors_.col(k).dot(xv.col(k));
        return out;
    }
    const ComplexMatrix xv = x * vectors_;
    for (Index k = 0; k < d; ++k) out[k] = vectors_.col(k).dot(xv.col(k)).real();
    return out;
}

ComplexMatrix EigenSystem::to_basis(const ComplexMatrix& x) const {
    if (real()) {
        ComplexMatrix out(x.rows(), x.cols());
        out.real() = real_vectors_.transpose() * x.real() * real_vectors_;
        out.imag() = real_vectors_.transpose() * x.imag() * real_vectors_;
        return out;
    }
    if (!exact()) return vectors_.adjoint() * x * vectors_;
    const Index d = dim();
    ComplexMatrix out(d, d);
    for (Index l = 0; l < d; ++l) {
        for (Index k = 0; k < d; ++k)
            out(k, l) = x(permutation_[static_cast<std::size_t>(k)], permutation_[static_cast<std::size_t>(l)]);
    }
    return out;
}

ComplexMatrix EigenSystem::from_basis(const ComplexMatrix& x) const {
    if (real()) {
        ComplexMatrix out(x.rows(), x.cols());
        out.real() = real_vectors_ * x.real() * real_vectors_.transpose();
        out.imag() = real_vectors_ * x.imag() * real_vectors_.transpose();
        return out;
    }
    if (!exact()) return vectors_ * x * vectors_.adjoint();
    const Index d = dim();
    ComplexMatrix out(d, d);
    for (Index l = 0; l < d; ++l) {
        for (Index k = 0; k < d; ++k)
            out(permutation_[static_cast<std::size_t>(k)], permutation_[static_cast<std::size_t>(l)]) = x(k, l);
    }
    return out;
}

namespace {

[[noreturn]] void throw_nonconvergence(const HermitianOperator& m) {
    std::ostringstream msg;
    msg << "eig: eigensolver did not converge (dim " << m.dim() << ", max |entry| " << max_abs(m.matrix())
        << ", trace " << m.trace() << ")";
    throw NumericError(msg.str());
}

std::vector<Index> sorted_diagonal_order(const ComplexMatrix& m) {
    std::vector<Index> order(static_cast<std::size_t>(m.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return m(a, a).real() < m(b, b).real(); });
    return order;
}

// Real symmetric input takes the cheaper real solver.
bool is_real(const ComplexMatrix& m) { return m.imag().isZero(0.0); }

}  // namespace

EigenSystem eig(const HermitianOperator& m) {
    EigenSystem es;
    const ComplexMatrix& a = m.matrix();
    if (m.is_diagonal()) {
        es.permutation_ = sorted_diagonal_order(a);
        es.values_.resize(a.rows());
        for (Index k = 0; k < a.rows(); ++k) es.values_[k] = a(es.permutation_[static_cast<std::size_t>(k)], es.permutation_[static_cast<std::size_t>(k)]).real();
    } else if (is_real(a)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.real(), Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success) throw_nonconvergence(m);
        es.values_ = solver.eigenvalues();
        es.real_vectors_ = solver.eigenvectors();
    } else {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a, Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success) throw_nonconvergence(m);
        es.values_ = solver.eigenvalues();
        es.vectors_ = solver.eigenvectors();
    }
    es.build_clusters();
    return es;
}

RealVector eigenvalues(const HermitianOperator& m) {
    const ComplexMatrix& a = m.matrix();
    if (m.is_diagonal()) {
        RealVector v = a.diagonal().real();
        std::sort(v.data(), v.data() + v.size());
        return v;
    }
    if (is_real(a)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.real(), Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw_nonconvergence(m);
        return solver.eigenvalues();
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw_nonconvergence(m);
    return solver.eigenvalues();
}

// ---------------------------------------------------------------------------
// Spectral projections and functions

namespace {

TestOperator projection_where(const EigenSystem& es, auto&& keep) {
    const RealVector& lambda = es.eigenvalues();
    RealVector w(lambda.size());
    for (Index k = 0; k < lambda.size(); ++k) w[k] = keep(lambda[k]) ? 1.0 : 0.0;
    return TestOperator::assume_valid(HermitianOperator(es.synthesize(w)));
}

}  // namespace

TestOperator positive_part_projection(const EigenSystem& es) {
    const double tol = es.projection_tolerance();
    return projection_where(es, [tol](double l) { return l >= -tol; });
}

TestOperator positive_part_projection(const HermitianOperator& m) { return positive_part_projection(eig(m)); }

TestOperator strict_positive_projection(const EigenSystem& es) {
    const double tol = es.projection_tolerance();
    return projection_where(es, [tol](double l) { return l > tol; });
}

TestOperator kernel_projection(const EigenSystem& es) {
    const double tol = es.projection_tolerance();
    return projection_where(es, [tol](double l) { return std::abs(l) <= tol; });
}

TestOperator kernel_projection(const HermitianOperator& m) { return kernel_projection(eig(m)); }

double positive_part_trace(const HermitianOperator& m) {
    const RealVector lambda = eigenvalues(m);
    const double tol = kProjectionRelTol * (lambda.maxCoeff() - lambda.minCoeff());
    double acc = 0.0;
    for (Index k = 0; k < lambda.size(); ++k) {
        if (lambda[k] > tol) acc += lambda[k];
    }
    return acc;
}

TestOperator support_projection(const DensityMatrix& rho) {
    const EigenSystem es = eig(rho.op());
    const double floor = es.noise_floor();
    return projection_where(es, [floor](double l) { return l > floor; });
}

HermitianOperator matrix_log_on_support(const DensityMatrix& rho) {
    const EigenSystem es = eig(rho.op());
    const double floor = es.noise_floor();
    const RealVector& lambda = es.eigenvalues();
    RealVector w(lambda.size());
    for (Index k = 0; k < lambda.size(); ++k) w[k] = lambda[k] > floor ? std::log(lambda[k]) : 0.0;
    return HermitianOperator(es.synthesize(w));
}

ComplexMatrix matrix_exp(const HermitianOperator& m) {
    const EigenSystem es = eig(m);
    return es.synthesize(es.eigenvalues().array().exp().matrix());
}

// ---------------------------------------------------------------------------
// Tensor products

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    out = Eigen::kroneckerProduct(a, b);
    return out;
}

Index checked_power(Index base, int n, Index cap) {
    Index acc = 1;
    for (int k = 0; k < n; ++k) {
        if (acc > cap / std::max<Index>(base, 1)) return cap + 1;
        acc *= base;
    }
    return acc;
}

namespace {

DensityMatrix diagonal_state(const RealVector& diag) {
    const Index d = diag.size();
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) m(i, i) = diag[i];
    return DensityMatrix::assume_valid(HermitianOperator(std::move(m)));
}

RealVector kron_vec(const RealVector& a, const RealVector& b) {
    RealVector out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

}  // namespace

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.op().is_diagonal() && b.op().is_diagonal())
        return diagonal_state(kron_vec(a.matrix().diagonal().real(), b.matrix().diagonal().real()));
    return DensityMatrix::assume_valid(HermitianOperator(kron(a.matrix(), b.matrix())));
}

DensityMatrix tensor_power(const DensityMatrix& rho, int n, Index max_dim) {
    if (n < 1) throw ValidationError("tensor_power: n must be positive");
    const Index total = checked_power(rho.dim(), n, max_dim);
    if (total > max_dim) {
        std::ostringstream msg;
        msg << "tensor_power: dimension " << rho.dim() << "^" << n << " exceeds max_dim " << max_dim;
        throw OverflowError(msg.str());
    }
    if (rho.op().is_diagonal()) {
        const RealVector base = rho.matrix().diagonal().real();
        RealVector acc = base;
        for (int k = 1; k < n; ++k) acc = kron_vec(acc, base);
        return diagonal_state(acc);
    }
    ComplexMatrix acc = rho.matrix();
    for (int k = 1; k < n; ++k) acc = kron(acc, rho.matrix());
    return DensityMatrix::assume_valid(HermitianOperator(std::move(acc)));
}

// ---------------------------------------------------------------------------
// Pinching

PinchResult pinch(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionError("pinch: dimension mismatch");
    const EigenSystem es = eig(sigma.op());
    const Index d = rho.dim();
    const auto& clusters = es.clusters();
    // Clusters are contiguous in the eigenbasis, so E(ρ) is block diagonal there.
    const ComplexMatrix in_basis = es.to_basis(rho.matrix());
    ComplexMatrix blocked = ComplexMatrix::Zero(d, d);
    for (const auto& c : clusters) {
        const Index len = c.end - c.begin;
        blocked.block(c.begin, c.begin, len, len) = in_basis.block(c.begin, c.begin, len, len);
    }
    ComplexMatrix out = es.from_basis(blocked);
    return {DensityMatrix::assume_valid(HermitianOperator(std::move(out))), es.distinct_count()};
}

// ---------------------------------------------------------------------------

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.cols() || a.cols() != b.rows()) throw DimensionError("trace_product: dimension mismatch");
    return a.cwiseProduct(b.transpose()).sum().real();
}

double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("commutator_norm: dimension mismatch");
    if (matrix_is_diagonal(a) && matrix_is_diagonal(b)) return 0.0;
    const ComplexMatrix c = a * b - b * a;
    return max_abs(c);
}

}  // namespace steinmix
