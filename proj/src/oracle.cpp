#include "freedil/oracle.hpp"

#include <vector>

namespace freedil {

Complex FreeMomentOracle::marginal(const Word& block)
{
    const int factor = block.letters().front().factor;
    const auto it = marginals_.find(factor);
    if (it == marginals_.end())
        throw Error("free moment oracle: no marginal for factor " + std::to_string(factor));
    return it->second(block);
}

Complex FreeMomentOracle::operator()(const Word& w)
{
    if (w.size() > kMaxWordLength)
        throw BudgetError("free moment oracle: word length " + std::to_string(w.size()) + " exceeds " +
                          std::to_string(kMaxWordLength));
    if (w.empty())
        return 1.0;
    if (const auto it = memo_.find(w); it != memo_.end())
        return it->second;

    const std::vector<Word> blocks = w.blocks();
    const std::size_t m = blocks.size();
    Complex value = 0.0;
    if (m == 1) {
        value = marginal(w);
    } else {
        std::vector<Complex> block_values;
        block_values.reserve(m);
        for (const auto& b : blocks)
            block_values.push_back(marginal(b));
        // S ranges over nonempty subsets of blocks replaced by their state value.
        for (unsigned long mask = 1; mask < (1UL << m); ++mask) {
            Complex coeff = 1.0;
            Word rest;
            for (std::size_t j = 0; j < m; ++j) {
                if (mask & (1UL << j))
                    coeff *= -block_values[j];
                else
                    rest = rest * blocks[j];
            }
            if (coeff == Complex{0.0})
                continue;
            value -= coeff * (*this)(rest);
        }
    }
    memo_.emplace(w, value);
    return value;
}

Complex free_mixed_moment_oracle(const Marginals& marginals, const Word& w)
{
    FreeMomentOracle oracle(marginals);
    return oracle(w);
}

Marginal unitary_marginal(std::function<Complex(int)> power_moment)
{
    return [power_moment = std::move(power_moment)](const Word& w) { return power_moment(w.net_exponent()); };
}

Marginal haar_marginal()
{
    return unitary_marginal([](int k) { return k == 0 ? Complex{1.0} : Complex{0.0}; });
}

Marginal matrix_marginal(const ComplexMatrix& t, const State& s)
{
    return [t, s](const Word& w) {
        const ComplexMatrix gens[] = {t};
        // Renumber to factor 1 so the single generator is found.
        std::vector<Letter> letters = w.letters();
        for (auto& l : letters)
            l.factor = 1;
        return evaluate_state(s, evaluate_word(Word(std::move(letters)), gens));
    };
}

} // namespace freedil
