#include "freedil/free_product.hpp"

#include <cmath>
#include <sstream>

#include "freedil/errors.hpp"

namespace freedil {

PointedSpace PointedSpace::from_vector(const ComplexVector& xi, double tol)
{
    const Index d = xi.size();
    if (d == 0)
        throw DimensionError("pointed space: empty base vector");
    if (std::abs(xi.norm() - 1.0) > tol)
        throw InvalidStateError("pointed space: base vector has norm " + std::to_string(xi.norm()));

    PointedSpace ps;
    ps.base = xi;
    ps.complement.resize(d, d - 1);
    Index filled = 0;
    for (Index k = 0; k < d && filled < d - 1; ++k) {
        ComplexVector v = ComplexVector::Unit(d, k);
        // two passes against xi and the vectors found so far
        for (int pass = 0; pass < 2; ++pass) {
            v -= xi * xi.dot(v);
            for (Index c = 0; c < filled; ++c)
                v -= ps.complement.col(c) * ps.complement.col(c).dot(v);
        }
        const double n = v.norm();
        if (n < 1e-8)
            continue;
        ps.complement.col(filled++) = v / n;
    }
    if (filled != d - 1)
        throw Error("pointed space: could not complete the base vector to a basis");
    return ps;
}

ComplexMatrix PointedSpace::frame() const
{
    ComplexMatrix f(dim(), dim());
    f.col(0) = base;
    f.rightCols(dim() - 1) = complement;
    return f;
}

double FockBasis::projected_dim(std::span<const Index> complement_dims, int max_len)
{
    const std::size_t n = complement_dims.size();
    // ending[f]: number of words of the current length whose first letter is from f
    std::vector<double> ending(n);
    double total = 1.0;
    for (std::size_t f = 0; f < n; ++f)
        ending[f] = static_cast<double>(complement_dims[f]);
    for (int len = 1; len <= max_len; ++len) {
        double sum = 0.0;
        for (double e : ending)
            sum += e;
        total += sum;
        if (len == max_len)
            break;
        std::vector<double> next(n);
        for (std::size_t f = 0; f < n; ++f)
            next[f] = static_cast<double>(complement_dims[f]) * (sum - ending[f]);
        ending = std::move(next);
    }
    return total;
}

FockBasis::FockBasis(std::vector<PointedSpace> factors, int max_len, Index cap)
    : factors_(std::move(factors)), max_len_(max_len)
{
    if (max_len < 1)
        throw BudgetError("fock basis: truncation length must be >= 1, got " + std::to_string(max_len));
    std::vector<Index> comp;
    for (const auto& f : factors_)
        comp.push_back(f.dim() - 1);
    const double projected = projected_dim(comp, max_len);
    if (projected > static_cast<double>(cap)) {
        std::ostringstream os;
        os << "fock basis: dimension " << static_cast<long double>(projected) << " exceeds the cap " << cap;
        throw BudgetError(os.str());
    }

    labels_.reserve(static_cast<std::size_t>(projected));
    labels_.emplace_back();
    FockLabel cur;
    const int n = static_cast<int>(factors_.size());
    const auto rec = [&](auto&& self, int remaining) -> void {
        if (remaining == 0) {
            labels_.push_back(cur);
            return;
        }
        for (int f = 1; f <= n; ++f) {
            if (!cur.empty() && cur.back().first == f)
                continue;
            for (Index m = 0; m < comp[static_cast<std::size_t>(f - 1)]; ++m) {
                cur.emplace_back(f, static_cast<int>(m));
                self(self, remaining - 1);
                cur.pop_back();
            }
        }
    };
    for (int len = 1; len <= max_len; ++len)
        rec(rec, len);

    for (std::size_t i = 0; i < labels_.size(); ++i)
        index_.emplace(labels_[i], static_cast<Index>(i));
}

std::optional<Index> FockBasis::find(const FockLabel& label) const
{
    const auto it = index_.find(label);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

Index FockBasis::prefix_shorter_than(int len) const
{
    Index k = 0;
    while (k < dim() && static_cast<int>(labels_[static_cast<std::size_t>(k)].size()) < len)
        ++k;
    return k;
}

FockBasis build_fock(std::vector<PointedSpace> factors, int max_len, Index cap)
{
    return FockBasis(std::move(factors), max_len, cap);
}

ComplexMatrix left_representation(int factor, const ComplexMatrix& a, const FockBasis& fb)
{
    if (factor < 1 || factor > static_cast<int>(fb.factor_count()))
        throw DimensionError("left_representation: unknown factor " + std::to_string(factor));
    const PointedSpace& ps = fb.factor(factor);
    if (a.rows() != ps.dim() || a.cols() != ps.dim())
        throw DimensionError("left_representation: operator " + shape_of(a) + " on factor " +
                             std::to_string(factor) + " of dimension " + std::to_string(ps.dim()));

    // Coordinates in the basis [xi, complement]: index 0 is xi, m + 1 is complement m.
    const ComplexMatrix f = ps.frame();
    const ComplexMatrix ac = f.adjoint() * a * f;
    const Index dk = ps.dim();
    const int max_len = fb.max_len();

    ComplexMatrix out = ComplexMatrix::Zero(fb.dim(), fb.dim());
    FockLabel scratch;
    for (Index col = 0; col < fb.dim(); ++col) {
        const FockLabel& w = fb.label(col);
        if (!w.empty() && w.front().first == factor) {
            const Index src = w.front().second + 1;
            scratch.assign(w.begin() + 1, w.end());
            out(*fb.find(scratch), col) += ac(0, src);
            scratch.insert(scratch.begin(), FockLetter{factor, 0});
            for (Index m = 1; m < dk; ++m) {
                scratch.front().second = static_cast<int>(m - 1);
                out(*fb.find(scratch), col) += ac(m, src);
            }
        } else {
            out(col, col) += ac(0, 0);
            if (static_cast<int>(w.size()) >= max_len)
                continue;
            scratch.assign(w.begin(), w.end());
            scratch.insert(scratch.begin(), FockLetter{factor, 0});
            for (Index m = 1; m < dk; ++m) {
                scratch.front().second = static_cast<int>(m - 1);
                out(*fb.find(scratch), col) += ac(m, 0);
            }
        }
    }
    return out;
}

namespace {

// H_i's complement vectors, then the remaining standard coordinates of K_i.
PointedSpace extend_pointed(const PointedSpace& h, Index k_dim)
{
    const Index d = h.dim();
    PointedSpace k;
    k.base = ComplexVector::Zero(k_dim);
    k.base.head(d) = h.base;
    k.complement = ComplexMatrix::Zero(k_dim, k_dim - 1);
    k.complement.topLeftCorner(d, d - 1) = h.complement;
    for (Index j = d; j < k_dim; ++j)
        k.complement(j, j - 1) = 1.0;
    return k;
}

} // namespace

FreeDilationScenario free_unitary_dilation(std::span<const FreeFactor> factors, const FreeDilationOptions& opt)
{
    if (factors.empty())
        throw DimensionError("free_unitary_dilation: no factors");
    if (opt.degree < 1)
        throw BudgetError("free_unitary_dilation: degree must be >= 1, got " + std::to_string(opt.degree));
    if (opt.trunc < 1)
        throw BudgetError("free_unitary_dilation: truncation length must be >= 1, got " + std::to_string(opt.trunc));

    std::vector<ComplexMatrix> inputs;
    std::vector<PointedSpace> h_spaces;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto& fac = factors[i];
        const std::string who = "factor " + std::to_string(i + 1);
        if (fac.t.rows() != fac.t.cols())
            throw DimensionError(who + ": operator " + shape_of(fac.t) + " is not square");
        if (fac.t.rows() != fac.state.dim())
            throw DimensionError(who + ": operator " + shape_of(fac.t) + " with a state of dimension " +
                                 std::to_string(fac.state.dim()));
        if (fac.state.is_vector()) {
            inputs.push_back(fac.t);
            h_spaces.push_back(PointedSpace::from_vector(fac.state.vector(), opt.tol));
        } else {
            const Purification p = purify(fac.state, opt.tol);
            inputs.push_back(p.lift(fac.t));
            h_spaces.push_back(PointedSpace::from_vector(p.state.vector(), opt.tol));
        }
    }

    std::vector<ComplexMatrix> v;
    std::vector<Embedding> h_in_k;
    std::vector<PointedSpace> k_spaces;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        DilationResult single = finite_unitary_dilation(inputs[i], opt.degree, opt.tol);
        ComplexMatrix vi = std::move(single.unitaries.front());
        if (opt.minimal) {
            const ComplexMatrix us[] = {vi};
            const Embedding q = minimal_reducing_subspace(us, single.embedding, opt.tol);
            vi = q.isometry().adjoint() * vi * q.isometry();
        }
        const Index kd = vi.rows();
        h_in_k.push_back(Embedding::leading(kd, inputs[i].rows()));
        k_spaces.push_back(extend_pointed(h_spaces[i], kd));
        v.push_back(std::move(vi));
    }

    FockBasis fock_k(k_spaces, opt.trunc, opt.dim_cap);
    FockBasis fock_h(h_spaces, opt.trunc, opt.dim_cap);

    std::vector<ComplexMatrix> u;
    std::vector<ComplexMatrix> s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        u.push_back(left_representation(static_cast<int>(i + 1), v[i], fock_k));
        s.push_back(left_representation(static_cast<int>(i + 1), inputs[i], fock_h));
    }

    // Complements nest, so every F(H.) label is also an F(K.) label.
    ComplexMatrix j = ComplexMatrix::Zero(fock_k.dim(), fock_h.dim());
    for (Index c = 0; c < fock_h.dim(); ++c)
        j(*fock_k.find(fock_h.label(c)), c) = 1.0;

    const Index ambient = fock_k.dim();
    DilationResult dil{std::move(u), Embedding(std::move(j), opt.tol), opt.degree, ambient, opt.trunc};
    State vacuum = State::basis_vector(ambient, 0);
    return FreeDilationScenario{std::move(inputs), std::move(v),  std::move(h_in_k), std::move(fock_h),
                                std::move(fock_k), std::move(s), std::move(dil),    std::move(vacuum)};
}

Complex FreeDilationScenario::factor_moment(int factor, int k) const
{
    const auto& vi = v.at(static_cast<std::size_t>(factor - 1));
    const ComplexVector& xi = fock_k.factor(factor).base;
    ComplexVector x = xi;
    for (int step = 0; step < std::abs(k); ++step)
        x = k > 0 ? ComplexVector(vi * x) : ComplexVector(vi.adjoint() * x);
    return xi.dot(x);
}

State dilated_state(const FreeDilationScenario& fds) { return fds.vacuum; }

double truncated_unitarity_residual(const ComplexMatrix& u, Index domain)
{
    if (domain <= 0)
        return 0.0;
    const ComplexMatrix cols = u.leftCols(domain);
    const ComplexMatrix rows = u.topRows(domain);
    const ComplexMatrix id = ComplexMatrix::Identity(domain, domain);
    const double r1 = (cols.adjoint() * cols - id).norm();
    const double r2 = (rows * rows.adjoint() - id).norm();
    return std::max(r1, r2);
}

} // namespace freedil
