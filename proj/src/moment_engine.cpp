#include "freedil/moment_engine.hpp"

#include <algorithm>

namespace freedil {

Index populated_rows(const ComplexMatrix& x)
{
    for (Index r = x.rows(); r > 0; --r)
        if (x.row(r - 1).cwiseAbs2().maxCoeff() != 0.0)
            return r;
    return 0;
}

MomentEngine::MomentEngine(const State& s, std::span<const ComplexMatrix> gens) : gens_(gens)
{
    if (gens.empty())
        throw DimensionError("moment engine: no generators");
    dim_ = s.dim();
    extents_.reserve(gens.size());
    for (const auto& g : gens) {
        if (g.rows() != dim_ || g.cols() != dim_)
            throw DimensionError("moment engine: generator " + shape_of(g) + " on a state of dimension " +
                                 std::to_string(dim_));
        Extents ext;
        ext.plain.assign(static_cast<std::size_t>(dim_) + 1, 0);
        ext.star.assign(static_cast<std::size_t>(dim_) + 1, 0);
        // plain: last nonzero row of each column; star: last nonzero column of each row
        std::vector<Index> last_row(static_cast<std::size_t>(dim_), -1);
        std::vector<Index> last_col(static_cast<std::size_t>(dim_), -1);
        for (Index c = 0; c < dim_; ++c)
            for (Index r = 0; r < dim_; ++r)
                if (g(r, c) != Complex{0.0}) {
                    last_row[static_cast<std::size_t>(c)] = r;
                    last_col[static_cast<std::size_t>(r)] = c;
                }
        for (Index s_len = 1; s_len <= dim_; ++s_len) {
            const auto i = static_cast<std::size_t>(s_len);
            ext.plain[i] = std::max(ext.plain[i - 1], last_row[i - 1] + 1);
            ext.star[i] = std::max(ext.star[i - 1], last_col[i - 1] + 1);
        }
        extents_.push_back(std::move(ext));
    }
    block_ = s.is_vector() ? ComplexMatrix(s.vector()) : psd_sqrt(s.density());
}

const ComplexMatrix& MomentEngine::generator(int factor) const
{
    if (factor < 1 || static_cast<std::size_t>(factor) > gens_.size())
        throw DimensionError("unknown factor id " + std::to_string(factor) + " (have " +
                             std::to_string(gens_.size()) + " generators)");
    return gens_[static_cast<std::size_t>(factor - 1)];
}

const MomentEngine::Extents& MomentEngine::extents(int factor) const
{
    return extents_[static_cast<std::size_t>(factor - 1)];
}

ComplexMatrix MomentEngine::apply(const Letter& l, const ComplexMatrix& x) const
{
    const ComplexMatrix& g = generator(l.factor);
    const Index support = populated_rows(x);
    ComplexMatrix out = ComplexMatrix::Zero(dim_, x.cols());
    if (support == 0)
        return out;
    const auto& ext = extents(l.factor);
    if (!l.star) {
        const Index reach = ext.plain[static_cast<std::size_t>(support)];
        out.topRows(reach).noalias() = g.topLeftCorner(reach, support) * x.topRows(support);
    } else {
        const Index reach = ext.star[static_cast<std::size_t>(support)];
        out.topRows(reach).noalias() = g.topLeftCorner(support, reach).adjoint() * x.topRows(support);
    }
    return out;
}

ComplexMatrix MomentEngine::apply(const Word& w, const ComplexMatrix& x) const
{
    if (x.rows() != dim_)
        throw DimensionError("moment engine: operand has " + std::to_string(x.rows()) + " rows, expected " +
                             std::to_string(dim_));
    ComplexMatrix out = x;
    for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it)
        out = apply(*it, out);
    return out;
}

ComplexMatrix MomentEngine::apply(const Element& el, const ComplexMatrix& x) const
{
    ComplexMatrix out = ComplexMatrix::Zero(dim_, x.cols());
    for (const auto& [c, w] : el.terms())
        out += c * apply(w, x);
    return out;
}

Complex MomentEngine::pairing(const ComplexMatrix& a, const ComplexMatrix& b)
{
    return (a.conjugate().cwiseProduct(b)).sum();
}

Complex MomentEngine::moment(const Word& w) const
{
    const auto& letters = w.letters();
    const std::size_t half = letters.size() / 2;
    const Word left(std::vector<Letter>(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(half)));
    const Word right(std::vector<Letter>(letters.begin() + static_cast<std::ptrdiff_t>(half), letters.end()));
    return pairing(apply(left.adjoint(), block_), apply(right, block_));
}

Complex MomentEngine::moment(const Element& el) const
{
    Complex acc = 0.0;
    for (const auto& [c, w] : el.terms())
        acc += c * moment(w);
    return acc;
}

Complex MomentEngine::moment(std::span<const Element> product) const
{
    const std::size_t half = product.size() / 2;
    ComplexMatrix left = block_;
    for (std::size_t j = 0; j < half; ++j)
        left = apply(product[j].adjoint(), left);
    ComplexMatrix right = block_;
    for (std::size_t j = product.size(); j > half; --j)
        right = apply(product[j - 1], right);
    return pairing(left, right);
}

} // namespace freedil
