#pragma once

// Dense complex operators, states, embeddings and the numerical predicates
// shared by the dilation, free product and verification layers.
//
// Residual norms are Frobenius norms (an upper bound for the operator norm)
// unless a function says otherwise. Every tolerance is an explicit argument.

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "freedil/errors.hpp"

namespace freedil {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kDefaultTol = 1e-9;

std::string shape_of(const ComplexMatrix& m);

// Throws DimensionError unless every entry is finite.
void require_finite(const ComplexMatrix& m, const std::string& what);

// ---------------------------------------------------------------------------
// matrix_algebra
// ---------------------------------------------------------------------------

enum class MatrixOp { add, multiply, adjoint, kron, direct_sum, scale };

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& a);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scale(const ComplexMatrix& a, Complex c);

// Dispatcher over the binary/unary ops above. For `adjoint` the second
// operand is ignored; for `scale` it must be 1x1 and carries the scalar.
ComplexMatrix matrix_algebra(const ComplexMatrix& a, const ComplexMatrix& b, MatrixOp op);

// ---------------------------------------------------------------------------
// Spectral helpers
// ---------------------------------------------------------------------------

// Largest singular value, via the Hermitian eigendecomposition of m* m.
double operator_norm(const ComplexMatrix& m);

double hermitian_residual(const ComplexMatrix& m);

// max(|U*U - I|, |UU* - I|), Frobenius.
double unitarity_residual(const ComplexMatrix& u);

// Hermitian PSD square root. Eigenvalues in [-tol, tol] are clamped to 0;
// an eigenvalue below -tol raises NotPsdError.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol = kDefaultTol);

struct DefectPair {
    ComplexMatrix d_t;     // (I - T*T)^{1/2}
    ComplexMatrix d_tstar; // (I - TT*)^{1/2}
};

// Throws NotContractionError when |t| > 1 + tol.
DefectPair defect_pair(const ComplexMatrix& t, double tol = kDefaultTol);

// Throws NotContractionError when |t| > 1 + tol; returns the norm otherwise.
double require_contraction(const ComplexMatrix& t, double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Embedding: an isometry H -> K
// ---------------------------------------------------------------------------

class Embedding {
public:
    // Validates isometry* isometry = I within tol.
    explicit Embedding(ComplexMatrix isometry, double tol = kDefaultTol);

    // Inclusion of C^small as the leading coordinates of C^big.
    static Embedding leading(Index big_dim, Index small_dim);

    Index big_dim() const noexcept { return isometry_.rows(); }
    Index small_dim() const noexcept { return isometry_.cols(); }
    const ComplexMatrix& isometry() const noexcept { return isometry_; }

    // The orthogonal projection P_H on the big space.
    ComplexMatrix projection() const;

    // this: H -> K, outer: K -> M  gives H -> M.
    Embedding followed_by(const Embedding& outer) const;

private:
    ComplexMatrix isometry_;
};

// isometry* a isometry.
ComplexMatrix compress(const ComplexMatrix& a, const Embedding& e);

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

class State {
public:
    enum class Kind { vector, density };

    static State from_vector(ComplexVector xi, double tol = kDefaultTol);
    static State from_density(ComplexMatrix rho, double tol = kDefaultTol);
    static State basis_vector(Index dim, Index i);
    static State maximally_mixed(Index dim);

    Kind kind() const noexcept { return kind_; }
    bool is_vector() const noexcept { return kind_ == Kind::vector; }
    Index dim() const noexcept;

    // Only valid for the matching kind; throws InvalidStateError otherwise.
    const ComplexVector& vector() const;
    const ComplexMatrix& density() const;

    // rho = xi xi* for vector states.
    ComplexMatrix as_density() const;

private:
    State() = default;
    Kind kind_ = Kind::vector;
    ComplexVector vector_;
    ComplexMatrix density_;
};

// <a xi, xi> or trace(rho a).
Complex evaluate_state(const State& s, const ComplexMatrix& a);

// The state a -> s(P_H a|_H) on the big space of e.
State push_forward(const State& s, const Embedding& e);

// A density state realized as a vector state on C^d (x) C^d:
// xi = sum_j (rho^{1/2} e_j) (x) e_j, so that <(a (x) I) xi, xi> = trace(rho a).
struct Purification {
    State state;
    Index factor_dim;

    // a -> a (x) I_d
    ComplexMatrix lift(const ComplexMatrix& a) const;
};

Purification purify(const State& rho, double tol = kDefaultTol);

} // namespace freedil
