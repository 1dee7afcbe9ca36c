#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "freedil/dilation.hpp"
#include "freedil/errors.hpp"
#include "support.hpp"

using namespace freedil;
using namespace testing_support;

namespace {

ComplexMatrix cyclic_shift(Index d)
{
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (Index i = 0; i < d; ++i)
        s((i + 1) % d, i) = 1.0;
    return s;
}

ComplexMatrix power(const ComplexMatrix& m, int k)
{
    ComplexMatrix out = ComplexMatrix::Identity(m.rows(), m.cols());
    for (int i = 0; i < k; ++i)
        out = out * m;
    return out;
}

// Hand-assembled degree-3 dilation of a real scalar t.
ComplexMatrix scalar_dilation_n3(double t)
{
    const double d = std::sqrt(1 - t * t);
    ComplexMatrix u = ComplexMatrix::Zero(4, 4);
    u(0, 0) = t;
    u(1, 0) = d;
    u(0, 3) = d;
    u(1, 3) = -t;
    u(2, 1) = 1.0;
    u(3, 2) = 1.0;
    return u;
}

} // namespace

TEST_CASE("dilation of zero is a cyclic shift")
{
    const auto r1 = finite_unitary_dilation(scalar(0.0), 1);
    CHECK(r1.unitaries[0] == mat2(0, 1, 1, 0));

    const auto r2 = finite_unitary_dilation(scalar(0.0), 2);
    CHECK(r2.unitaries[0] == cyclic_shift(3));
    CHECK(compress(power(r2.unitaries[0], 2), r2.embedding)(0, 0) == Complex(0.0));
    CHECK(r2.ambient_dim == 3);
    CHECK(r2.degree == 2);
}

TEST_CASE("scalar dilation matches the hand-built block matrix")
{
    const auto res = finite_unitary_dilation(scalar(0.5), 3);
    const ComplexMatrix want = scalar_dilation_n3(0.5);
    CHECK(max_abs(res.unitaries[0] - want) < 1e-15);
    for (int k = 0; k <= 3; ++k)
        CHECK(std::abs(compress(power(want, k), res.embedding)(0, 0) - std::pow(0.5, k)) < 1e-15);
    // Exactness ends at the degree: the fourth power wraps around.
    const Complex wrap = power(want, 4)(0, 0);
    CHECK(std::abs(wrap - 0.0625) > 0.1);
    CHECK(std::abs(wrap - (0.0625 + 0.75 * 1.0)) < 1e-12); // t^4 + d * (d) through the wrap
}

TEST_CASE("complex scalars: compressed powers equal t^k and conj(t)^k")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const Complex t = std::polar(ud(rng), 2 * std::numbers::pi * ud(rng));
        const int n = 1 + i % 4;
        const auto res = finite_unitary_dilation(scalar(t), n);
        const ComplexMatrix& u = res.unitaries[0];
        for (int k = 0; k <= n; ++k) {
            CHECK(std::abs(power(u, k)(0, 0) - std::pow(t, k)) < 1e-12);
            CHECK(std::abs(power(u.adjoint(), k)(0, 0) - std::pow(std::conj(t), k)) < 1e-12);
        }
        // |U e_0|^2 = |t|^2 + (1 - |t|^2)
        CHECK(std::abs(u.col(0).squaredNorm() - 1.0) < 1e-14);
    }
}

TEST_CASE("random contractions: unitarity and power exactness")
{
    std::mt19937_64 rng(41);
    for (int i = 0; i < 200; ++i) {
        const Index d = 1 + i % 4;
        const int n = 1 + (i / 4) % 4;
        const ComplexMatrix t = random_contraction(d, rng, i);
        const auto res = finite_unitary_dilation(t, n);
        const ComplexMatrix& u = res.unitaries[0];
        CHECK(res.ambient_dim == d * (n + 1));
        CHECK(unitarity_residual(u) <= 1e-10 * static_cast<double>(u.rows()));
        for (int k = 0; k <= n; ++k) {
            CHECK((compress(power(u, k), res.embedding) - power(t, k)).norm() <= 1e-10);
            CHECK((compress(power(u.adjoint(), k), res.embedding) - power(t.adjoint(), k)).norm() <= 1e-10);
        }
    }
}

TEST_CASE("dilating a unitary keeps it in the corner")
{
    std::mt19937_64 rng(6);
    const ComplexMatrix w = random_unitary(2, rng);
    const auto res = finite_unitary_dilation(w, 3);
    CHECK(res.unitaries[0].topLeftCorner(2, 2) == w);
    CHECK(max_abs(res.unitaries[0].block(2, 0, 2, 2)) == 0.0);
    const auto id = finite_unitary_dilation(ComplexMatrix::Identity(2, 2), 2);
    CHECK(compress(id.unitaries[0], id.embedding) == ComplexMatrix::Identity(2, 2));
}

TEST_CASE("dilation errors")
{
    CHECK_THROWS_AS(finite_unitary_dilation(scalar(0.5), 0), BudgetError);
    CHECK_THROWS_AS(finite_unitary_dilation(scalar(1.2), 2), NotContractionError);
}

TEST_CASE("doubly commuting dilation examples")
{
    const ComplexMatrix zeros[] = {scalar(0.0), scalar(0.0)};
    const auto res = doubly_commuting_dilation(zeros, 2);
    CHECK(res.ambient_dim == 9);
    CHECK(res.unitaries.size() == 2);
    const ComplexMatrix& u1 = res.unitaries[0];
    const ComplexMatrix& u2 = res.unitaries[1];
    CHECK((u1 * u2 - u2 * u1).norm() < 1e-15);
    CHECK(std::abs(compress(u1 * u2, res.embedding)(0, 0)) < 1e-15);

    const ComplexMatrix diag[] = {mat2(0.5, 0, 0, 0.3), mat2(0.2, 0, 0, 0.9)};
    const auto r2 = doubly_commuting_dilation(diag, 2);
    CHECK(r2.ambient_dim == 18);
    const ComplexMatrix lhs = compress(r2.unitaries[0] * r2.unitaries[0] * r2.unitaries[1].adjoint(), r2.embedding);
    const ComplexMatrix rhs = diag[0] * diag[0] * diag[1].adjoint();
    CHECK(max_abs(lhs - rhs) <= 1e-10);

    const ComplexMatrix ids[] = {ComplexMatrix::Identity(2, 2)};
    const auto r3 = doubly_commuting_dilation(ids, 3);
    CHECK(compress(r3.unitaries[0], r3.embedding) == ComplexMatrix::Identity(2, 2));
}

TEST_CASE("doubly commuting dilation rejects non-commuting input and names the pair")
{
    const ComplexMatrix ts[] = {mat2(0.5, 0, 0, 0.2), mat2(0.1, 0, 0, 0.1), mat2(0, 0.5, 0, 0)};
    try {
        doubly_commuting_dilation(ts, 2);
        FAIL("expected a double commutation error");
    } catch (const DoubleCommutationError& e) {
        CHECK(e.first() == 1);
        CHECK(e.second() == 3);
        CHECK(e.residual() > 0.1);
    }
    // Commuting but not doubly commuting: a nilpotent with itself.
    const ComplexMatrix n = mat2(0, 1, 0, 0);
    const ComplexMatrix pair[] = {n, n};
    CHECK_THROWS_AS(doubly_commuting_dilation(pair, 1), DoubleCommutationError);
}

TEST_CASE("doubly commuting dilation preserves double commutation")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Index d = 1 + trial % 3;
        const ComplexMatrix q = random_unitary(d, rng);
        std::vector<ComplexMatrix> ts;
        for (int j = 0; j < 2 + trial % 2; ++j) {
            ComplexMatrix diag = ComplexMatrix::Zero(d, d);
            for (Index i = 0; i < d; ++i)
                diag(i, i) = std::polar(ud(rng), 2 * std::numbers::pi * ud(rng));
            ts.push_back(q * diag * q.adjoint());
        }
        const auto res = doubly_commuting_dilation(ts, 2);
        CHECK(double_commutation_residual(res.unitaries).residual <= 1e-9);
        for (const auto& u : res.unitaries)
            CHECK(unitarity_residual(u) <= 1e-10 * static_cast<double>(u.rows()));
    }
}

TEST_CASE("minimal reducing subspace examples")
{
    const ComplexMatrix shift[] = {cyclic_shift(3)};
    CHECK(minimal_reducing_subspace(shift, Embedding::leading(3, 1)).small_dim() == 3);

    const ComplexMatrix id[] = {ComplexMatrix::Identity(3, 3)};
    CHECK(minimal_reducing_subspace(id, Embedding::leading(3, 1)).small_dim() == 1);

    const ComplexMatrix refl[] = {mat2(1, 0, 0, -1)};
    CHECK(minimal_reducing_subspace(refl, Embedding::leading(2, 1)).small_dim() == 1);

    const ComplexMatrix not_unitary[] = {mat2(0.5, 0, 0, 1)};
    CHECK_THROWS_AS(minimal_reducing_subspace(not_unitary, Embedding::leading(2, 1)), NotUnitaryError);
}

TEST_CASE("minimal reducing subspace is reducing and idempotent")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        // A nilpotent-type contraction has rank-deficient defects, so the
        // dilation space is strictly larger than the reducing hull of H.
        ComplexMatrix t = ComplexMatrix::Zero(3, 3);
        t(0, 1) = 0.9;
        t(1, 2) = 0.5 * (trial % 3);
        if (trial % 2)
            t = random_contraction(2, rng, trial);
        const auto res = finite_unitary_dilation(t, 2 + trial % 3);
        const Embedding q = minimal_reducing_subspace(res.unitaries, res.embedding);
        const ComplexMatrix p = q.projection();
        const ComplexMatrix id = ComplexMatrix::Identity(p.rows(), p.cols());
        for (const auto& u : res.unitaries) {
            CHECK(((id - p) * u * p).norm() <= 1e-9);
            CHECK(((id - p) * u.adjoint() * p).norm() <= 1e-9);
        }
        // The leading columns span H.
        CHECK((q.isometry().leftCols(t.rows()) - res.embedding.isometry()).norm() < 1e-12);
        const Embedding again = minimal_reducing_subspace(res.unitaries, q);
        CHECK(again.small_dim() == q.small_dim());
        CHECK((again.projection() - p).norm() < 1e-9);
    }
}

TEST_CASE("verify_power_dilation")
{
    const ComplexMatrix t[] = {scalar(0.5)};
    const auto res = finite_unitary_dilation(t[0], 3);
    const auto empty = verify_power_dilation(res, t, {}, PowerDilationMode::tensor);
    CHECK(empty.residual == 0.0);
    CHECK(empty.pass);
    const auto two = verify_power_dilation(res, t, {{1, 2}}, PowerDilationMode::tensor);
    CHECK(two.residual <= 1e-12);
    const auto back = verify_power_dilation(res, t, {{1, -3}}, PowerDilationMode::tensor);
    CHECK(back.residual <= 1e-12);

    CHECK_THROWS_AS(verify_power_dilation(res, t, {{1, 4}}, PowerDilationMode::tensor), BudgetError);
    CHECK_THROWS_AS(verify_power_dilation(res, t, {{1, 1}, {1, 1}}, PowerDilationMode::tensor), BudgetError);
    CHECK_THROWS_AS(verify_power_dilation(res, t, {{1, -1}}, PowerDilationMode::free), BudgetError);
    CHECK_THROWS_AS(verify_power_dilation(res, t, {{2, 1}}, PowerDilationMode::tensor), BudgetError);

    const ComplexMatrix ts[] = {mat2(0.5, 0, 0, 0.3), mat2(0.2, 0, 0, 0.9)};
    const auto r2 = doubly_commuting_dilation(ts, 2);
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            CHECK(verify_power_dilation(r2, ts, {{1, a}, {2, b}}, PowerDilationMode::tensor).residual <= 1e-12);
}

TEST_CASE("signed powers")
{
    const ComplexMatrix n = mat2(0, 1, 0, 0);
    CHECK(signed_power(n, 0) == ComplexMatrix::Identity(2, 2));
    CHECK(signed_power(n, 1) == n);
    CHECK(signed_power(n, -1) == n.adjoint());
    CHECK(to_string(SignedPowerWord{{1, 2}, {2, -1}}).find('2') != std::string::npos);
}
