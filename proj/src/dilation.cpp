#include "freedil/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace freedil {

std::string to_string(const SignedPowerWord& w)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i)
            os << ' ';
        os << w[i].factor << '^' << w[i].power;
    }
    return os.str();
}

ComplexMatrix signed_power(const ComplexMatrix& t, int k)
{
    ComplexMatrix out = ComplexMatrix::Identity(t.rows(), t.cols());
    if (k >= 0) {
        for (int i = 0; i < k; ++i)
            out = t * out;
    } else {
        const ComplexMatrix ts = t.adjoint();
        for (int i = 0; i < -k; ++i)
            out = ts * out;
    }
    return out;
}

DilationResult finite_unitary_dilation(const ComplexMatrix& t, int degree, double tol)
{
    if (t.rows() != t.cols())
        throw DimensionError("finite_unitary_dilation: expected a square matrix, got " + shape_of(t));
    if (degree < 1)
        throw BudgetError("finite_unitary_dilation: degree must be >= 1, got " + std::to_string(degree));
    const auto [d_t, d_tstar] = defect_pair(t, tol);

    const Index d = t.rows();
    const Index blocks = degree + 1;
    ComplexMatrix u = ComplexMatrix::Zero(blocks * d, blocks * d);
    const auto block = [&](Index r, Index c) { return u.block(r * d, c * d, d, d); };
    block(0, 0) = t;
    block(1, 0) = d_t;
    block(0, degree) = d_tstar;
    block(1, degree) = -t.adjoint();
    for (Index j = 1; j + 1 < blocks; ++j)
        block(j + 1, j) = ComplexMatrix::Identity(d, d);

    DilationResult res{{std::move(u)}, Embedding::leading(blocks * d, d), degree, blocks * d, std::nullopt};
    return res;
}

CommutationResidual double_commutation_residual(std::span<const ComplexMatrix> ts)
{
    CommutationResidual worst;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            const double r1 = (ts[i] * ts[j] - ts[j] * ts[i]).norm();
            const double r2 = (ts[i].adjoint() * ts[j] - ts[j] * ts[i].adjoint()).norm();
            const double r = std::max(r1, r2);
            if (r > worst.residual || worst.first == 0)
                worst = {r, static_cast<int>(i + 1), static_cast<int>(j + 1)};
        }
    }
    return worst;
}

DilationResult doubly_commuting_dilation(std::span<const ComplexMatrix> ts, int degree, double tol)
{
    if (ts.empty())
        throw DimensionError("doubly_commuting_dilation: no operators");
    const Index d = ts[0].rows();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i].rows() != d || ts[i].cols() != d)
            throw DimensionError("doubly_commuting_dilation: operator " + std::to_string(i + 1) + " is " +
                                 shape_of(ts[i]) + ", expected " + std::to_string(d) + "x" + std::to_string(d));
        require_contraction(ts[i], tol);
    }
    if (const auto cr = double_commutation_residual(ts); cr.first != 0 && cr.residual > tol) {
        std::ostringstream os;
        os.precision(6);
        os << "operators " << cr.first << " and " << cr.second << " do not doubly commute (residual " << cr.residual
           << ")";
        throw DoubleCommutationError(os.str(), cr.first, cr.second, cr.residual);
    }

    std::vector<ComplexMatrix> ops(ts.begin(), ts.end());
    Embedding embedding = Embedding::leading(d, d);
    const ComplexMatrix id_blocks = ComplexMatrix::Identity(degree + 1, degree + 1);
    for (std::size_t j = 0; j < ops.size(); ++j) {
        DilationResult step = finite_unitary_dilation(ops[j], degree, tol);
        for (std::size_t i = 0; i < ops.size(); ++i)
            if (i != j)
                ops[i] = kron(id_blocks, ops[i]);
        ops[j] = std::move(step.unitaries.front());
        embedding = embedding.followed_by(step.embedding);
    }
    const Index ambient = embedding.big_dim();
    return DilationResult{std::move(ops), std::move(embedding), degree, ambient, std::nullopt};
}

Embedding minimal_reducing_subspace(std::span<const ComplexMatrix> us, const Embedding& e, double tol)
{
    const Index n = e.big_dim();
    for (std::size_t i = 0; i < us.size(); ++i) {
        if (us[i].rows() != n || us[i].cols() != n)
            throw DimensionError("minimal_reducing_subspace: operator " + std::to_string(i + 1) + " is " +
                                 shape_of(us[i]) + " but the ambient dimension is " + std::to_string(n));
        const double res = unitarity_residual(us[i]);
        if (res > tol * std::max<double>(1.0, static_cast<double>(n)))
            throw NotUnitaryError("minimal_reducing_subspace: operator " + std::to_string(i + 1) +
                                  " is not unitary (residual " + std::to_string(res) + ")");
    }

    std::vector<ComplexVector> basis;
    const auto try_add = [&](ComplexVector v) -> bool {
        const double scale = v.norm();
        if (scale == 0.0)
            return false;
        // two passes of modified Gram-Schmidt
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis)
                v -= q.dot(v) * q;
        const double rest = v.norm();
        if (rest <= kSpanRankTol * scale)
            return false;
        basis.push_back(v / rest);
        return true;
    };

    for (Index c = 0; c < e.small_dim(); ++c)
        try_add(e.isometry().col(c));

    std::size_t frontier_begin = 0;
    while (frontier_begin < basis.size()) {
        const std::size_t frontier_end = basis.size();
        for (std::size_t f = frontier_begin; f < frontier_end; ++f) {
            for (const auto& u : us) {
                try_add(u * basis[f]);
                try_add(u.adjoint() * basis[f]);
            }
        }
        frontier_begin = frontier_end;
    }

    ComplexMatrix q(n, static_cast<Index>(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c)
        q.col(static_cast<Index>(c)) = basis[c];
    return Embedding(std::move(q), std::max(tol, 1e-8));
}

namespace {

void check_budget(const DilationResult& res, std::size_t n, const SignedPowerWord& word, PowerDilationMode mode)
{
    const auto reject = [&](const std::string& why) {
        throw BudgetError("word \"" + to_string(word) + "\" rejected: " + why);
    };
    for (const auto& l : word)
        if (l.factor < 1 || static_cast<std::size_t>(l.factor) > n)
            reject("factor " + std::to_string(l.factor) + " out of range 1.." + std::to_string(n));

    if (mode == PowerDilationMode::tensor) {
        for (std::size_t i = 0; i < word.size(); ++i) {
            if (i > 0 && word[i].factor <= word[i - 1].factor)
                reject("tensor words must list factors in strictly increasing order");
            if (std::abs(word[i].power) > res.degree)
                reject("|k| = " + std::to_string(std::abs(word[i].power)) + " exceeds the dilation degree " +
                       std::to_string(res.degree));
        }
        return;
    }

    int total = 0;
    int alternation = 0;
    int last_factor = 0;
    for (const auto& l : word) {
        if (l.power < 0)
            reject("free words take nonnegative powers only");
        total += l.power;
        if (l.power > 0 && l.factor != last_factor) {
            ++alternation;
            last_factor = l.factor;
        }
    }
    if (total > res.degree)
        reject("total degree " + std::to_string(total) + " exceeds the exactness budget " +
               std::to_string(res.degree));
    if (res.max_alternation && alternation > *res.max_alternation)
        reject("alternation length " + std::to_string(alternation) + " exceeds the truncation budget " +
               std::to_string(*res.max_alternation));
}

} // namespace

PowerDilationReport verify_power_dilation(const DilationResult& res, std::span<const ComplexMatrix> ts,
                                          const SignedPowerWord& word, PowerDilationMode mode, double tol)
{
    if (ts.size() != res.unitaries.size())
        throw DimensionError("verify_power_dilation: " + std::to_string(ts.size()) + " operators for " +
                             std::to_string(res.unitaries.size()) + " unitaries");
    for (const auto& t : ts)
        if (t.rows() != res.embedding.small_dim() || t.cols() != res.embedding.small_dim())
            throw DimensionError("verify_power_dilation: operator " + shape_of(t) +
                                 " does not act on the embedded space");
    check_budget(res, ts.size(), word, mode);

    // Apply right to left to the isometry to keep the work thin.
    ComplexMatrix big = res.embedding.isometry();
    ComplexMatrix small = ComplexMatrix::Identity(res.embedding.small_dim(), res.embedding.small_dim());
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        const ComplexMatrix& u = res.unitaries[static_cast<std::size_t>(it->factor - 1)];
        const ComplexMatrix& t = ts[static_cast<std::size_t>(it->factor - 1)];
        for (int i = 0; i < std::abs(it->power); ++i) {
            if (it->power > 0) {
                big = u * big;
                small = t * small;
            } else {
                big = u.adjoint() * big;
                small = t.adjoint() * small;
            }
        }
    }
    const ComplexMatrix compressed = res.embedding.isometry().adjoint() * big;
    PowerDilationReport out;
    out.residual = (compressed - small).norm();
    out.pass = out.residual <= tol;
    return out;
}

} // namespace freedil
