#pragma once

// Numerical certificates for independence, traciality and faithfulness.
//
// Each check returns a CheckReport with the largest residual seen, a witness
// that reproduces it, and the budgets used. Small budgets are enumerated
// exhaustively; above `exhaustive_limit` the checks fall back to seeded
// sampling where every sample draws from its own derived seed.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freedil/matrix_io.hpp"
#include "freedil/word.hpp"

namespace freedil {

struct CheckReport {
    std::string property;
    Json budgets = Json::object();
    double max_residual = 0.0;
    std::string worst_witness;
    bool pass = false;
    // Named partial residuals (e.g. commutation vs factorization).
    std::vector<std::pair<std::string, double>> parts;
    std::string note;

    Json to_json() const;
};

struct TensorCheckOptions {
    int degree = 3;
    int samples = 100;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::size_t exhaustive_limit = 20000;
};

// (a) |[w_i, w_j]| for words from distinct factors up to `degree`;
// (b) |s(a_1 ... a_n) - prod s(a_i)| over basis word tuples and random elements.
CheckReport tensor_independence_check(const State& s, std::span<const ComplexMatrix> gens,
                                      const TensorCheckOptions& opt = {});

struct FreeCheckOptions {
    int max_len = 4;
    int degree = 3;
    int samples = 100;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::size_t exhaustive_limit = 200000;
};

// |s(a_1 ... a_m)| for alternating factor patterns of length 2..max_len and
// centered a_j of degree <= `degree` from the j-th factor.
CheckReport free_independence_check(const State& s, std::span<const ComplexMatrix> gens,
                                    const FreeCheckOptions& opt = {});

struct TraceCheckOptions {
    int degree = 3;
    int samples = 100;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    // Words with more same-factor runs than this are not drawn (0: no limit).
    int max_alternation = 0;
    std::size_t exhaustive_limit = 20000;
};

// |s(w1 w2) - s(w2 w1)| over word pairs of length 1..degree.
CheckReport trace_check(const State& s, std::span<const ComplexMatrix> gens, const TraceCheckOptions& opt = {});

struct FaithfulnessOptions {
    int degree = 1;
    double rank_tol = 1e-9; // relative to the largest eigenvalue of each Gram matrix
    std::size_t max_words = 4096;
    // When nonzero, operators are compared on the span of the first
    // `domain_cols` basis vectors only.
    Index domain_cols = 0;
};

struct FaithfulnessReport {
    bool faithful_on_span = false;
    int span_dim = 0;  // rank of the Hilbert-Schmidt Gram of the words
    int gram_rank = 0; // rank of the GNS Gram s(u* v)
    int words = 0;

    Json to_json() const;
};

FaithfulnessReport faithfulness_check(const State& s, std::span<const ComplexMatrix> gens,
                                      const FaithfulnessOptions& opt = {});

// Numerical rank of a Hermitian PSD matrix.
int psd_rank(const ComplexMatrix& gram, double rel_tol);

struct TensorModel {
    std::vector<ComplexMatrix> gens;
    State state;
};

inline constexpr Index kMaxTensorDim = 4096;

// T_i = I (x) ... (x) t_i (x) ... (x) I with the product state.
TensorModel make_tensor_independent(std::span<const std::pair<ComplexMatrix, State>> factors);

// Generator seeded from (seed, stream, index); independent of evaluation order.
std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Uniform on the complex unit disc.
Complex random_disc(std::mt19937_64& rng);

// Coefficients uniform on the unit disc over all words of length 0..degree
// in the letters of `factor`.
Element random_element(int factor, int degree, std::mt19937_64& rng);

} // namespace freedil
