#pragma once

#include <span>
#include <vector>

#include "freedil/word.hpp"

namespace freedil {

// Evaluates a state on words and elements without forming word matrices.
//
// The state is held as a block X with s(a) = trace(X* a X): X = xi for a
// vector state, X = rho^{1/2} for a density. Words are applied to X right to
// left. Vectors are tracked by the length of their nonzero prefix; each
// generator stores, per prefix length, how many leading rows that prefix can
// reach, so operators that respect a graded basis ordering (the Fock matrices)
// are applied at the cost of the populated corner only. Results are identical
// to dense evaluation.
//
// The generator matrices are referenced, not copied; they must outlive the engine.
class MomentEngine {
public:
    MomentEngine(const State& s, std::span<const ComplexMatrix> gens);

    Index dim() const noexcept { return dim_; }
    std::size_t factors() const noexcept { return gens_.size(); }

    // The state block X (dim x 1 or dim x dim).
    const ComplexMatrix& state_block() const noexcept { return block_; }

    // w X and el X.
    ComplexMatrix apply(const Word& w, const ComplexMatrix& x) const;
    ComplexMatrix apply(const Element& el, const ComplexMatrix& x) const;
    ComplexMatrix apply(const Letter& l, const ComplexMatrix& x) const;

    // s(w), computed as <R X, L* X> with w = L R split in the middle.
    Complex moment(const Word& w) const;
    Complex moment(const Element& el) const;
    // s(a_1 a_2 ... a_m)
    Complex moment(std::span<const Element> product) const;

    // trace(a* b): the pairing used by the meet-in-the-middle evaluation.
    static Complex pairing(const ComplexMatrix& a, const ComplexMatrix& b);

private:
    struct Extents {
        std::vector<Index> plain; // rows reachable from a column prefix
        std::vector<Index> star;  // same for the adjoint
    };

    const ComplexMatrix& generator(int factor) const;
    const Extents& extents(int factor) const;

    std::span<const ComplexMatrix> gens_;
    std::vector<Extents> extents_;
    ComplexMatrix block_;
    Index dim_ = 0;
};

// Number of leading rows of x holding a nonzero entry.
Index populated_rows(const ComplexMatrix& x);

} // namespace freedil
