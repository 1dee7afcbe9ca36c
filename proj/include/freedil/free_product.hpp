#pragma once

// Truncated reduced free product of pointed Hilbert spaces and the freely
// independent unitary dilation built on it.
//
// The free Fock space F(K.) has orthonormal basis Omega plus words
// k_1 (x) ... (x) k_m, m <= L, where k_j is a complement basis vector of
// factor i_j and i_j != i_{j+1}. An operator a on K_i acts on the left by
// decomposing the space K_i = C xi_i + K_i°: on a word starting in factor i it
// acts on the first letter, otherwise it acts on xi_i and prepends. Components
// longer than L are projected away.
//
// Exactness: a product of operators with at most L same-factor runs, applied to
// Omega, never reaches the truncation, so vacuum moments within that budget
// agree with the untruncated free product.

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "freedil/dilation.hpp"
#include "freedil/operator_core.hpp"

namespace freedil {

struct PointedSpace {
    ComplexVector base;       // the state vector xi
    ComplexMatrix complement; // dim x (dim - 1), orthonormal basis of xi's complement

    Index dim() const noexcept { return base.size(); }

    // Completes xi to an orthonormal basis by Gram-Schmidt over e_0, e_1, ...
    static PointedSpace from_vector(const ComplexVector& xi, double tol = kDefaultTol);

    // [xi | complement], a unitary.
    ComplexMatrix frame() const;
};

// (factor id, 1-based; complement index, 0-based)
using FockLetter = std::pair<int, int>;
using FockLabel = std::vector<FockLetter>;

inline constexpr Index kDefaultFockDimCap = 5000;

class FockBasis {
public:
    // Throws BudgetError when the dimension would exceed `cap`.
    FockBasis(std::vector<PointedSpace> factors, int max_len, Index cap = kDefaultFockDimCap);

    // Dimension of the truncated space for the given complement dimensions.
    static double projected_dim(std::span<const Index> complement_dims, int max_len);

    Index dim() const noexcept { return static_cast<Index>(labels_.size()); }
    int max_len() const noexcept { return max_len_; }
    std::size_t factor_count() const noexcept { return factors_.size(); }
    const PointedSpace& factor(int id) const { return factors_.at(static_cast<std::size_t>(id - 1)); }

    const FockLabel& label(Index i) const { return labels_.at(static_cast<std::size_t>(i)); }
    std::optional<Index> find(const FockLabel& label) const;

    // Basis vectors are ordered by word length, so those of length < len form a prefix.
    Index prefix_shorter_than(int len) const;

private:
    std::vector<PointedSpace> factors_;
    int max_len_;
    std::vector<FockLabel> labels_;
    std::map<FockLabel, Index> index_;
};

FockBasis build_fock(std::vector<PointedSpace> factors, int max_len, Index cap = kDefaultFockDimCap);

// The left action of `a` (an operator on factor `factor`'s space) on F.
ComplexMatrix left_representation(int factor, const ComplexMatrix& a, const FockBasis& fb);

// An input contraction with its state on H_i. Density states are purified.
struct FreeFactor {
    ComplexMatrix t;
    State state;
};

struct FreeDilationOptions {
    int degree = 3;
    int trunc = 4;
    double tol = kDefaultTol;
    // Cut each V_i down to its minimal reducing subspace containing H_i first.
    bool minimal = false;
    Index dim_cap = kDefaultFockDimCap;
};

struct FreeDilationScenario {
    std::vector<ComplexMatrix> inputs; // t_i on H_i (lifted to H_i (x) H_i for density states)
    std::vector<ComplexMatrix> v;      // V_i on K_i, H_i the leading coordinates
    std::vector<Embedding> h_in_k;
    FockBasis fock_h;
    FockBasis fock_k;
    std::vector<ComplexMatrix> s; // lambda_i(t_i) on F(H.)
    // unitaries U_i = lambda_i(V_i) on F(K.), embedding J: F(H.) -> F(K.),
    // degree N, max_alternation L
    DilationResult dilation;
    State vacuum;

    const std::vector<ComplexMatrix>& u() const noexcept { return dilation.unitaries; }
    int degree() const noexcept { return dilation.degree; }
    int trunc() const noexcept { return fock_k.max_len(); }

    // Number of F(K.) basis words of length < L; U_i is isometric there.
    Index exact_domain() const { return fock_k.prefix_shorter_than(trunc()); }

    // k -> <V_i^k xi_i, xi_i>
    Complex factor_moment(int factor, int k) const;
};

FreeDilationScenario free_unitary_dilation(std::span<const FreeFactor> factors, const FreeDilationOptions& opt = {});

// The compressed state on F(K.): the vector state at the vacuum.
State dilated_state(const FreeDilationScenario& fds);

// Isometry residual of U and U* on the exactness domain (Frobenius).
double truncated_unitarity_residual(const ComplexMatrix& u, Index domain);

} // namespace freedil
