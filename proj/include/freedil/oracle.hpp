#pragma once

#include <functional>
#include <map>

#include "freedil/word.hpp"

namespace freedil {

// State value of a word over a single factor.
using Marginal = std::function<Complex(const Word&)>;
using Marginals = std::map<int, Marginal>;

// Mixed moments of a free family, computed from the marginals alone.
//
// A word is split into maximal same-factor blocks a_1 ... a_m. For m >= 2,
// expanding prod (a_j - s(a_j)) and using that an alternating product of
// centered elements has state zero gives
//
//   s(a_1 ... a_m) = - sum_{S nonempty} prod_{j in S} (-s(a_j)) s(prod_{j not in S} a_j),
//
// where every term on the right has fewer blocks once neighbours from the
// same factor are merged. Results are memoized on the word.
class FreeMomentOracle {
public:
    static constexpr std::size_t kMaxWordLength = 16;

    explicit FreeMomentOracle(Marginals marginals) : marginals_(std::move(marginals)) {}

    Complex operator()(const Word& w);

    std::size_t memo_size() const noexcept { return memo_.size(); }

private:
    Complex marginal(const Word& block);

    Marginals marginals_;
    std::map<Word, Complex> memo_;
};

Complex free_mixed_moment_oracle(const Marginals& marginals, const Word& w);

// Marginal of a unitary generator given its power moments k -> s(U^k).
Marginal unitary_marginal(std::function<Complex(int)> power_moment);

// Haar marginal: s(U^k) = 1 if k == 0 else 0.
Marginal haar_marginal();

// Marginal of a concrete operator under a state, evaluated on matrices.
Marginal matrix_marginal(const ComplexMatrix& t, const State& s);

} // namespace freedil
