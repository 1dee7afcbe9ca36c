#include "freedil/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace freedil {

std::string shape_of(const ComplexMatrix& m)
{
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

void require_finite(const ComplexMatrix& m, const std::string& what)
{
    if (!m.allFinite())
        throw DimensionError(what + ": matrix contains non-finite entries");
}

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_of(a) + " vs " + shape_of(b));
}

void require_square(const ComplexMatrix& a, const char* op)
{
    if (a.rows() != a.cols())
        throw DimensionError(std::string(op) + ": expected a square matrix, got " + shape_of(a));
}

} // namespace

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b)
{
    require_same_shape(a, b, "add");
    return a + b;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.cols() != b.rows())
        throw DimensionError("multiply: inner dimensions differ " + shape_of(a) + " * " + shape_of(b));
    return a * b;
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

ComplexMatrix scale(const ComplexMatrix& a, Complex c) { return c * a; }

ComplexMatrix matrix_algebra(const ComplexMatrix& a, const ComplexMatrix& b, MatrixOp op)
{
    switch (op) {
    case MatrixOp::add: return add(a, b);
    case MatrixOp::multiply: return multiply(a, b);
    case MatrixOp::adjoint: return adjoint(a);
    case MatrixOp::kron: return kron(a, b);
    case MatrixOp::direct_sum: return direct_sum(a, b);
    case MatrixOp::scale:
        if (b.rows() != 1 || b.cols() != 1)
            throw DimensionError("scale: scalar operand must be 1x1, got " + shape_of(b));
        return scale(a, b(0, 0));
    }
    throw Error("matrix_algebra: unknown op");
}

double operator_norm(const ComplexMatrix& m)
{
    if (m.size() == 0)
        return 0.0;
    // Work with the smaller Gram matrix.
    ComplexMatrix gram = m.rows() < m.cols() ? ComplexMatrix(m * m.adjoint()) : ComplexMatrix(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double hermitian_residual(const ComplexMatrix& m)
{
    require_square(m, "hermitian_residual");
    return (m - m.adjoint()).norm();
}

double unitarity_residual(const ComplexMatrix& u)
{
    require_square(u, "unitarity_residual");
    const auto id = ComplexMatrix::Identity(u.rows(), u.cols());
    return std::max((u.adjoint() * u - id).norm(), (u * u.adjoint() - id).norm());
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol)
{
    require_square(m, "psd_sqrt");
    require_finite(m, "psd_sqrt");
    if (m.rows() == 0)
        return m;
    const double herm = hermitian_residual(m);
    if (herm > tol * std::max(1.0, m.norm()))
        throw NotPsdError("psd_sqrt: matrix is not Hermitian (residual " + std::to_string(herm) + ")", 0.0);

    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < -tol) {
            std::ostringstream os;
            os.precision(17);
            os << "not PSD: eigenvalue " << ev[i] << " < -" << tol;
            throw NotPsdError(os.str(), ev[i]);
        }
        ev[i] = ev[i] <= tol ? 0.0 : std::sqrt(ev[i]);
    }
    const ComplexMatrix& q = es.eigenvectors();
    ComplexMatrix root = q * ev.cast<Complex>().asDiagonal() * q.adjoint();
    return 0.5 * (root + root.adjoint());
}

double require_contraction(const ComplexMatrix& t, double tol)
{
    require_finite(t, "contraction");
    const double norm = operator_norm(t);
    if (norm > 1.0 + tol) {
        std::ostringstream os;
        os.precision(17);
        os << "not a contraction: operator norm " << norm << " exceeds 1 + " << tol;
        throw NotContractionError(os.str(), norm);
    }
    return norm;
}

DefectPair defect_pair(const ComplexMatrix& t, double tol)
{
    require_square(t, "defect_pair");
    require_contraction(t, tol);
    const auto id = ComplexMatrix::Identity(t.rows(), t.cols());
    // Slightly super-unit singular values within tol land in the clamp window.
    return {psd_sqrt(id - t.adjoint() * t, tol), psd_sqrt(id - t * t.adjoint(), tol)};
}

// ---------------------------------------------------------------------------

Embedding::Embedding(ComplexMatrix isometry, double tol) : isometry_(std::move(isometry))
{
    require_finite(isometry_, "embedding");
    if (isometry_.cols() > isometry_.rows())
        throw DimensionError("embedding: isometry must be tall, got " + shape_of(isometry_));
    const double res =
        (isometry_.adjoint() * isometry_ - ComplexMatrix::Identity(isometry_.cols(), isometry_.cols())).norm();
    if (res > tol * std::max<double>(1.0, static_cast<double>(isometry_.cols())))
        throw DimensionError("embedding: columns are not orthonormal (residual " + std::to_string(res) + ")");
}

Embedding Embedding::leading(Index big_dim, Index small_dim)
{
    if (small_dim > big_dim)
        throw DimensionError("embedding: small dimension exceeds big dimension");
    return Embedding(ComplexMatrix::Identity(big_dim, small_dim));
}

ComplexMatrix Embedding::projection() const { return isometry_ * isometry_.adjoint(); }

Embedding Embedding::followed_by(const Embedding& outer) const
{
    if (outer.small_dim() != big_dim())
        throw DimensionError("embedding composition: " + shape_of(outer.isometry()) + " after " + shape_of(isometry_));
    return Embedding(outer.isometry() * isometry_);
}

ComplexMatrix compress(const ComplexMatrix& a, const Embedding& e)
{
    if (a.rows() != e.big_dim() || a.cols() != e.big_dim())
        throw DimensionError("compress: operator " + shape_of(a) + " does not act on the embedding's big space " +
                             shape_of(e.isometry()));
    return e.isometry().adjoint() * a * e.isometry();
}

// ---------------------------------------------------------------------------

State State::from_vector(ComplexVector xi, double tol)
{
    require_finite(xi, "vector state");
    const double norm = xi.norm();
    if (std::abs(norm - 1.0) > tol) {
        std::ostringstream os;
        os.precision(17);
        os << "vector state is not a unit vector: norm " << norm;
        throw InvalidStateError(os.str());
    }
    State s;
    s.kind_ = Kind::vector;
    s.vector_ = std::move(xi);
    return s;
}

State State::from_density(ComplexMatrix rho, double tol)
{
    require_square(rho, "density state");
    require_finite(rho, "density state");
    if (rho.rows() == 0)
        throw InvalidStateError("density state: empty matrix");
    const double herm = hermitian_residual(rho);
    if (herm > tol)
        throw InvalidStateError("density state is not Hermitian: residual " + std::to_string(herm));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    const double lowest = es.eigenvalues().minCoeff();
    if (lowest < -tol) {
        std::ostringstream os;
        os.precision(17);
        os << "density state not PSD: eigenvalue " << lowest;
        throw NotPsdError(os.str(), lowest);
    }
    const Complex tr = rho.trace();
    if (std::abs(tr - 1.0) > tol) {
        std::ostringstream os;
        os.precision(17);
        os << "density state trace " << tr.real() << "+" << tr.imag() << "i is not 1";
        throw InvalidStateError(os.str());
    }
    State s;
    s.kind_ = Kind::density;
    s.density_ = std::move(rho);
    return s;
}

State State::basis_vector(Index dim, Index i)
{
    ComplexVector xi = ComplexVector::Zero(dim);
    xi[i] = 1.0;
    return from_vector(std::move(xi));
}

State State::maximally_mixed(Index dim)
{
    return from_density(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

Index State::dim() const noexcept { return kind_ == Kind::vector ? vector_.size() : density_.rows(); }

const ComplexVector& State::vector() const
{
    if (kind_ != Kind::vector)
        throw InvalidStateError("state is a density, not a vector");
    return vector_;
}

const ComplexMatrix& State::density() const
{
    if (kind_ != Kind::density)
        throw InvalidStateError("state is a vector, not a density");
    return density_;
}

ComplexMatrix State::as_density() const
{
    if (kind_ == Kind::density)
        return density_;
    return vector_ * vector_.adjoint();
}

Complex evaluate_state(const State& s, const ComplexMatrix& a)
{
    if (a.rows() != s.dim() || a.cols() != s.dim())
        throw DimensionError("evaluate_state: operator " + shape_of(a) + " on a state of dimension " +
                             std::to_string(s.dim()));
    if (s.is_vector())
        return s.vector().dot(a * s.vector()); // dot conjugates the left operand
    return (s.density() * a).trace();
}

State push_forward(const State& s, const Embedding& e)
{
    if (s.dim() != e.small_dim())
        throw DimensionError("push_forward: state dimension " + std::to_string(s.dim()) +
                             " does not match embedding " + shape_of(e.isometry()));
    if (s.is_vector())
        return State::from_vector(e.isometry() * s.vector());
    return State::from_density(e.isometry() * s.density() * e.isometry().adjoint());
}

ComplexMatrix Purification::lift(const ComplexMatrix& a) const
{
    if (a.rows() != factor_dim || a.cols() != factor_dim)
        throw DimensionError("purification lift: expected " + std::to_string(factor_dim) + "x" +
                             std::to_string(factor_dim) + ", got " + shape_of(a));
    return kron(a, ComplexMatrix::Identity(factor_dim, factor_dim));
}

Purification purify(const State& rho, double tol)
{
    const ComplexMatrix density = rho.as_density();
    // Re-validate so a hand-built density gets the PSD/trace check.
    State::from_density(density, tol);
    const Index d = density.rows();
    const ComplexMatrix root = psd_sqrt(density, tol);
    ComplexVector xi = ComplexVector::Zero(d * d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i)
            xi[i * d + j] = root(i, j);
    xi /= xi.norm();
    return {State::from_vector(std::move(xi), tol), d};
}

} // namespace freedil
