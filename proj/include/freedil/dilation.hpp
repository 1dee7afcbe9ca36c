#pragma once

// Finite unitary power dilations.
//
// A contraction T on C^d is dilated to the unitary on C^{N+1} (x) C^d
//
//        [ T     0  ...  0   D_T* ]
//        [ D_T   0  ...  0   -T*  ]
//    U = [ 0     I           0    ]
//        [          ...           ]
//        [ 0     0  ...  I   0    ]
//
// which is the Schaffer layout wrapped cyclically after N+1 blocks. Block 0
// carries the original space, and P U^k P = T^k, P U*^k P = T*^k hold exactly
// for 0 <= k <= N. The degree N is the exactness budget.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freedil/operator_core.hpp"

namespace freedil {

struct DilationResult {
    std::vector<ComplexMatrix> unitaries;
    Embedding embedding;
    int degree = 0;
    Index ambient_dim = 0;
    // Set for free-product dilations: the longest alternation for which the
    // truncated construction is exact.
    std::optional<int> max_alternation;
};

struct PowerLetter {
    int factor; // 1-based
    int power;  // k >= 0 -> T^k, k < 0 -> T*^{-k}
};

// T(k) convention: k >= 0 gives T^k, k < 0 gives (T*)^{-k}.
using SignedPowerWord = std::vector<PowerLetter>;

std::string to_string(const SignedPowerWord& w);

DilationResult finite_unitary_dilation(const ComplexMatrix& t, int degree, double tol = kDefaultTol);

// max over i != j of |T_i T_j - T_j T_i| and |T_i* T_j - T_j T_i*|.
struct CommutationResidual {
    double residual = 0.0;
    int first = 0;  // 1-based, the worst pair
    int second = 0;
};
CommutationResidual double_commutation_residual(std::span<const ComplexMatrix> ts);

// Iterated dilation: at step j the j-th operator is replaced by its finite
// dilation and the others by I_{N+1} (x) (.). Throws DoubleCommutationError
// when the inputs fail to doubly commute within tol.
DilationResult doubly_commuting_dilation(std::span<const ComplexMatrix> ts, int degree, double tol = kDefaultTol);

// Smallest subspace containing range(e) and invariant under every u and u*.
// The returned isometry starts with an orthonormal basis of range(e).
Embedding minimal_reducing_subspace(std::span<const ComplexMatrix> us, const Embedding& e, double tol = kDefaultTol);

// Relative rank tolerance used when growing spans.
inline constexpr double kSpanRankTol = 1e-10;

enum class PowerDilationMode {
    tensor, // factors strictly increasing, |k| <= degree
    free,   // any factor sequence, k >= 0, sum k <= degree, alternation <= max_alternation
};

struct PowerDilationReport {
    double residual = 0.0;
    bool pass = false;
};

// Compares compress(prod U(k)) against prod T(k). The operators in `ts` act on
// the small space of res.embedding. Throws BudgetError for words outside the
// mode's validity budget.
PowerDilationReport verify_power_dilation(const DilationResult& res, std::span<const ComplexMatrix> ts,
                                          const SignedPowerWord& word, PowerDilationMode mode,
                                          double tol = kDefaultTol);

// T(k) for a single operator.
ComplexMatrix signed_power(const ComplexMatrix& t, int k);

} // namespace freedil
