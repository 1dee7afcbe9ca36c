#include "freedil/word.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "freedil/moment_engine.hpp"

namespace freedil {

Word Word::parse(std::string_view text)
{
    std::vector<Letter> letters;
    std::size_t pos = 0;
    const auto fail = [&](const std::string& why) {
        throw Error("cannot parse word \"" + std::string(text) + "\": " + why);
    };
    while (pos < text.size()) {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == ','))
            ++pos;
        if (pos == text.size())
            break;
        if (text[pos] == 'u' || text[pos] == 'U' || text[pos] == 't' || text[pos] == 'T')
            ++pos;
        int factor = 0;
        auto [p, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), factor);
        if (ec != std::errc{} || factor < 1)
            fail("expected a positive factor id at offset " + std::to_string(pos));
        pos = static_cast<std::size_t>(p - text.data());
        bool star = false;
        if (pos < text.size() && text[pos] == '*') {
            star = true;
            ++pos;
        }
        int exponent = 1;
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            auto [q, ec2] = std::from_chars(text.data() + pos, text.data() + text.size(), exponent);
            if (ec2 != std::errc{} || exponent < 0)
                fail("bad exponent at offset " + std::to_string(pos));
            pos = static_cast<std::size_t>(q - text.data());
        }
        if (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' && text[pos] != ',')
            fail(std::string("unexpected character '") + text[pos] + "'");
        for (int i = 0; i < exponent; ++i)
            letters.push_back({factor, star});
    }
    return Word(std::move(letters));
}

Word Word::power(int factor, int k)
{
    return Word(std::vector<Letter>(static_cast<std::size_t>(std::abs(k)), Letter{factor, k < 0}));
}

std::string Word::to_string() const
{
    std::ostringstream os;
    std::size_t i = 0;
    bool first = true;
    while (i < letters_.size()) {
        std::size_t j = i;
        while (j < letters_.size() && letters_[j] == letters_[i])
            ++j;
        if (!first)
            os << ' ';
        first = false;
        os << letters_[i].factor << (letters_[i].star ? "*" : "");
        if (j - i > 1)
            os << '^' << (j - i);
        i = j;
    }
    return os.str();
}

Word Word::adjoint() const
{
    std::vector<Letter> out(letters_.rbegin(), letters_.rend());
    for (auto& l : out)
        l.star = !l.star;
    return Word(std::move(out));
}

std::vector<Word> Word::blocks() const
{
    std::vector<Word> out;
    for (const auto& l : letters_) {
        if (out.empty() || out.back().letters_.back().factor != l.factor)
            out.emplace_back();
        out.back().letters_.push_back(l);
    }
    return out;
}

int Word::alternation() const
{
    int count = 0;
    for (std::size_t i = 0; i < letters_.size(); ++i)
        if (i == 0 || letters_[i].factor != letters_[i - 1].factor)
            ++count;
    return count;
}

int Word::net_exponent() const
{
    int k = 0;
    for (const auto& l : letters_)
        k += l.star ? -1 : 1;
    return k;
}

Word Word::operator*(const Word& rhs) const
{
    std::vector<Letter> out = letters_;
    out.insert(out.end(), rhs.letters_.begin(), rhs.letters_.end());
    return Word(std::move(out));
}

std::vector<Word> enumerate_words(std::span<const int> factors, int lo, int hi)
{
    std::vector<Letter> alphabet;
    for (int f : factors) {
        alphabet.push_back({f, false});
        alphabet.push_back({f, true});
    }
    std::sort(alphabet.begin(), alphabet.end());
    std::vector<Word> out;
    std::vector<Word> layer{Word{}};
    for (int len = 0; len <= hi; ++len) {
        if (len >= lo)
            out.insert(out.end(), layer.begin(), layer.end());
        if (len == hi)
            break;
        std::vector<Word> next;
        next.reserve(layer.size() * alphabet.size());
        for (const auto& w : layer)
            for (const auto& a : alphabet)
                next.push_back(w * Word({a}));
        layer = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------

Element Element::adjoint() const
{
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [c, w] : terms_)
        out.emplace_back(std::conj(c), w.adjoint());
    return Element(std::move(out));
}

Element Element::operator+(const Element& rhs) const
{
    std::vector<Term> out = terms_;
    out.insert(out.end(), rhs.terms_.begin(), rhs.terms_.end());
    return Element(std::move(out)).simplified();
}

Element Element::operator-(const Element& rhs) const { return *this + rhs * Complex{-1.0}; }

Element Element::operator*(const Element& rhs) const
{
    std::vector<Term> out;
    out.reserve(terms_.size() * rhs.terms_.size());
    for (const auto& [a, u] : terms_)
        for (const auto& [b, v] : rhs.terms_)
            out.emplace_back(a * b, u * v);
    return Element(std::move(out)).simplified();
}

Element Element::operator*(Complex c) const
{
    std::vector<Term> out = terms_;
    for (auto& t : out)
        t.first *= c;
    return Element(std::move(out));
}

Element Element::simplified() const
{
    std::map<Word, Complex> merged;
    for (const auto& [c, w] : terms_)
        merged[w] += c;
    std::vector<Term> out;
    for (auto& [w, c] : merged)
        if (c != Complex{0.0})
            out.emplace_back(c, w);
    return Element(std::move(out));
}

std::string Element::to_string() const
{
    if (terms_.empty())
        return "0";
    std::ostringstream os;
    os.precision(6);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i)
            os << " + ";
        const auto& [c, w] = terms_[i];
        os << '(' << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
        os << '[' << (w.empty() ? "1" : w.to_string()) << ']';
    }
    return os.str();
}

// ---------------------------------------------------------------------------

namespace {

const ComplexMatrix& generator(std::span<const ComplexMatrix> gens, int factor)
{
    if (factor < 1 || static_cast<std::size_t>(factor) > gens.size())
        throw DimensionError("unknown factor id " + std::to_string(factor) + " (have " +
                             std::to_string(gens.size()) + " generators)");
    return gens[static_cast<std::size_t>(factor - 1)];
}

Index common_dim(std::span<const ComplexMatrix> gens)
{
    if (gens.empty())
        throw DimensionError("no generators");
    const Index d = gens[0].rows();
    for (const auto& g : gens)
        if (g.rows() != d || g.cols() != d)
            throw DimensionError("generators must share one square shape, got " + shape_of(gens[0]) + " and " +
                                 shape_of(g));
    return d;
}

} // namespace

ComplexMatrix evaluate_word(const Word& w, std::span<const ComplexMatrix> gens)
{
    const Index d = common_dim(gens);
    ComplexMatrix out = ComplexMatrix::Identity(d, d);
    for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
        const ComplexMatrix& g = generator(gens, it->factor);
        out = it->star ? ComplexMatrix(g.adjoint() * out) : ComplexMatrix(g * out);
    }
    return out;
}

ComplexMatrix evaluate_element(const Element& el, std::span<const ComplexMatrix> gens)
{
    const Index d = common_dim(gens);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (const auto& [c, w] : el.terms())
        out += c * evaluate_word(w, gens);
    return out;
}

Element center(const Element& el, const State& s, std::span<const ComplexMatrix> gens)
{
    const MomentEngine engine(s, gens);
    return (el - Element::unit() * engine.moment(el)).simplified();
}

} // namespace freedil
