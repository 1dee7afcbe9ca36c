#pragma once

// Formal words in generator letters and finite linear combinations of them.
//
// Text form: letters separated by spaces, `2` for a generator, `2*` for its
// adjoint, with an optional exponent `2^3`, `2*^2`. Factor ids are 1-based.
// The empty word is written `1` only inside elements; as a word it is "".

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freedil/operator_core.hpp"

namespace freedil {

struct Letter {
    int factor = 1;
    bool star = false;

    auto operator<=>(const Letter&) const = default;
};

class Word {
public:
    Word() = default;
    explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

    static Word parse(std::string_view text);
    // The word U_f^k (k >= 0) or U_f*^{-k} (k < 0).
    static Word power(int factor, int k);

    std::string to_string() const;

    const std::vector<Letter>& letters() const noexcept { return letters_; }
    bool empty() const noexcept { return letters_.empty(); }
    std::size_t size() const noexcept { return letters_.size(); }

    // Reverses the letters and flips every star flag.
    Word adjoint() const;

    // Maximal runs of letters from the same factor.
    std::vector<Word> blocks() const;
    // Number of such runs.
    int alternation() const;

    // Sum of +1 per plain letter and -1 per starred letter; meaningful as an
    // exponent for single-factor words over a unitary.
    int net_exponent() const;

    Word operator*(const Word& rhs) const;

    auto operator<=>(const Word&) const = default;

private:
    std::vector<Letter> letters_;
};

// All words of length lo..hi over the letters {f, f*} for f in `factors`,
// ordered by length and then lexicographically.
std::vector<Word> enumerate_words(std::span<const int> factors, int lo, int hi);

class Element {
public:
    using Term = std::pair<Complex, Word>;

    Element() = default;
    explicit Element(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static Element unit() { return Element({{Complex{1.0}, Word{}}}); }
    static Element from_word(Word w, Complex c = 1.0) { return Element({{c, std::move(w)}}); }

    const std::vector<Term>& terms() const noexcept { return terms_; }

    Element adjoint() const;
    Element operator+(const Element& rhs) const;
    Element operator-(const Element& rhs) const;
    Element operator*(const Element& rhs) const;
    Element operator*(Complex c) const;

    // Merge equal words and drop exact zero coefficients.
    Element simplified() const;

    std::string to_string() const;

private:
    std::vector<Term> terms_;
};

// Ordered product of generators (adjoints per star flag); identity for the
// empty word. Throws DimensionError for unknown factors.
ComplexMatrix evaluate_word(const Word& w, std::span<const ComplexMatrix> gens);

ComplexMatrix evaluate_element(const Element& el, std::span<const ComplexMatrix> gens);

// Element minus its state value times the unit.
Element center(const Element& el, const State& s, std::span<const ComplexMatrix> gens);

} // namespace freedil
