#include "doctest.h"

#include <cmath>
#include <random>

#include "freedil/errors.hpp"
#include "freedil/matrix_io.hpp"
#include "freedil/operator_core.hpp"
#include "support.hpp"

using namespace freedil;
using namespace testing_support;

TEST_CASE("matrix_algebra basics")
{
    const ComplexMatrix n = mat2(0, 1, 0, 0);
    CHECK(matrix_algebra(n, {}, MatrixOp::adjoint) == mat2(0, 0, 1, 0));

    std::mt19937_64 rng(3);
    const ComplexMatrix x = gaussian(2, 2, rng);
    CHECK(matrix_algebra(ComplexMatrix::Identity(2, 2), x, MatrixOp::multiply) == x);

    const Complex c(0.3, -1.2);
    const ComplexMatrix k = matrix_algebra(ComplexMatrix::Identity(2, 2), scalar(c), MatrixOp::kron);
    CHECK(k == mat2(c, 0, 0, c));

    const ComplexMatrix ds = direct_sum(scalar(1.0), scalar(2.0));
    CHECK(ds == mat2(1, 0, 0, 2));
    CHECK(matrix_algebra(x, scalar(2.0), MatrixOp::scale) == 2.0 * x);
    CHECK(matrix_algebra(x, x, MatrixOp::add) == 2.0 * x);
}

TEST_CASE("matrix_algebra reports both shapes on mismatch")
{
    const ComplexMatrix a = ComplexMatrix::Zero(2, 3);
    const ComplexMatrix b = ComplexMatrix::Zero(2, 2);
    try {
        matrix_algebra(a, b, MatrixOp::add);
        FAIL("expected a dimension error");
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2x3") != std::string::npos);
        CHECK(msg.find("2x2") != std::string::npos);
    }
    CHECK_THROWS_AS(matrix_algebra(a, a, MatrixOp::multiply), DimensionError);
}

TEST_CASE("operator norm agrees with the 2x2 singular value formula")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const ComplexMatrix a = gaussian(2, 2, rng);
        const double f2 = a.squaredNorm();
        const double det = std::abs(a.determinant());
        const double sigma = std::sqrt((f2 + std::sqrt(f2 * f2 - 4 * det * det)) / 2);
        CHECK(operator_norm(a) == doctest::Approx(sigma).epsilon(1e-12));
    }
}

TEST_CASE("psd_sqrt")
{
    CHECK(max_abs(psd_sqrt(ComplexMatrix::Identity(3, 3)) - ComplexMatrix::Identity(3, 3)) < 1e-15);
    CHECK(max_abs(psd_sqrt(ComplexMatrix::Zero(2, 2))) == 0.0);
    CHECK(psd_sqrt(scalar(0.75))(0, 0).real() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));

    try {
        psd_sqrt(mat2(1.0, 0, 0, -0.01));
        FAIL("expected not PSD");
    } catch (const NotPsdError& e) {
        CHECK(std::string(e.what()).find("not PSD") != std::string::npos);
        CHECK(e.eigenvalue() == doctest::Approx(-0.01));
    }
    // Tiny negative eigenvalues are clamped, not rejected.
    CHECK(max_abs(psd_sqrt(mat2(1.0, 0, 0, -1e-12))) == doctest::Approx(1.0));

    std::mt19937_64 rng(9);
    for (int d = 1; d <= 4; ++d)
        for (int i = 0; i < 20; ++i) {
            const ComplexMatrix g = gaussian(d, d, rng);
            const ComplexMatrix m = g * g.adjoint();
            const ComplexMatrix r = psd_sqrt(m);
            CHECK(hermitian_residual(r) < 1e-12);
            CHECK((r * r - m).norm() < 1e-10 * (1 + m.norm()));
        }
}

TEST_CASE("defect_pair examples")
{
    const auto zero = defect_pair(scalar(0.0));
    CHECK(zero.d_t(0, 0) == Complex(1.0));
    CHECK(zero.d_tstar(0, 0) == Complex(1.0));

    const auto half = defect_pair(scalar(0.5));
    CHECK(half.d_t(0, 0).real() == doctest::Approx(std::sqrt(1 - 0.25)).epsilon(1e-15));
    CHECK(half.d_tstar(0, 0).real() == doctest::Approx(std::sqrt(1 - 0.25)).epsilon(1e-15));

    std::mt19937_64 rng(1);
    const ComplexMatrix u = random_unitary(3, rng);
    const auto du = defect_pair(u);
    CHECK(max_abs(du.d_t) == 0.0);
    CHECK(max_abs(du.d_tstar) == 0.0);

    try {
        defect_pair(scalar(1.5));
        FAIL("expected not a contraction");
    } catch (const NotContractionError& e) {
        CHECK(e.norm() == doctest::Approx(1.5));
        CHECK(std::string(e.what()).find("not a contraction") != std::string::npos);
    }
}

TEST_CASE("defect identities on random contractions")
{
    const double tol = kDefaultTol;
    std::mt19937_64 rng(17);
    for (int d = 1; d <= 4; ++d)
        for (int i = 0; i < 100; ++i) {
            const ComplexMatrix t = random_contraction(d, rng, i);
            const auto dp = defect_pair(t);
            const ComplexMatrix id = ComplexMatrix::Identity(d, d);
            CHECK((dp.d_t * dp.d_t - (id - t.adjoint() * t)).norm() <= 10 * tol * d);
            CHECK((dp.d_tstar * dp.d_tstar - (id - t * t.adjoint())).norm() <= 10 * tol * d);
            // Clamping near-zero eigenvalues perturbs the intertwining by ~sqrt(tol).
            CHECK((t * dp.d_t - dp.d_tstar * t).norm() <= 10 * std::sqrt(tol) * d);
        }
}

TEST_CASE("embeddings and compression")
{
    const Embedding e = Embedding::leading(2, 1);
    CHECK(compress(mat2(1, 2, 3, 4), e)(0, 0) == Complex(1.0));
    CHECK(compress(ComplexMatrix::Identity(2, 2), e) == ComplexMatrix::Identity(1, 1));
    CHECK_THROWS_AS(Embedding(mat2(1, 1, 0, 1)), DimensionError);
    CHECK_THROWS_AS(compress(ComplexMatrix::Identity(3, 3), e), DimensionError);

    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        const ComplexMatrix q = random_unitary(5, rng).leftCols(3);
        const Embedding f(q);
        const ComplexMatrix a = gaussian(5, 5, rng);
        CHECK((compress(a.adjoint(), f) - compress(a, f).adjoint()).norm() < 1e-14);
        CHECK((f.projection() * f.projection() - f.projection()).norm() < 1e-13);
    }

    const Embedding inner = Embedding::leading(3, 1);
    const Embedding outer = Embedding::leading(5, 3);
    CHECK(inner.followed_by(outer).isometry() == Embedding::leading(5, 1).isometry());
}

TEST_CASE("states")
{
    const ComplexMatrix a = mat2(1, 2, 3, 4);
    CHECK(evaluate_state(State::basis_vector(2, 0), a) == Complex(1.0));
    CHECK(evaluate_state(State::maximally_mixed(2), mat2(1, 0, 0, 3)) == Complex(2.0));

    std::mt19937_64 rng(8);
    for (int d = 1; d <= 4; ++d) {
        const State v = State::from_vector(random_unit(d, rng));
        const State r = State::from_density(random_density(d, rng));
        CHECK(std::abs(evaluate_state(v, ComplexMatrix::Identity(d, d)) - 1.0) < 1e-12);
        CHECK(std::abs(evaluate_state(r, ComplexMatrix::Identity(d, d)) - 1.0) < 1e-12);
    }

    try {
        State::from_vector(ComplexVector::Constant(2, 1.0));
        FAIL("expected an invalid state");
    } catch (const InvalidStateError& e) {
        CHECK(std::string(e.what()).find("norm 1.414") != std::string::npos);
    }
    try {
        State::from_density(mat2(1.01, 0, 0, -0.01));
        FAIL("expected not PSD");
    } catch (const NotPsdError& e) {
        CHECK(e.eigenvalue() == doctest::Approx(-0.01));
    }
    CHECK_THROWS_AS(State::from_density(mat2(0.5, 0, 0, 0.6)), InvalidStateError);
    CHECK_THROWS_AS(evaluate_state(State::basis_vector(2, 0), ComplexMatrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("purification")
{
    const State e0 = State::from_density(mat2(1, 0, 0, 0));
    const Purification p0 = purify(e0);
    ComplexVector want = ComplexVector::Zero(4);
    want[0] = 1.0;
    CHECK((p0.state.vector() - want).norm() < 1e-15);

    const Purification ph = purify(State::maximally_mixed(2));
    ComplexVector bell = ComplexVector::Zero(4);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    CHECK((ph.state.vector() - bell).norm() < 1e-15);
    CHECK(std::abs(evaluate_state(ph.state, ph.lift(mat2(1, 0, 0, 3))) - 2.0) < 1e-14);

    std::mt19937_64 rng(21);
    for (int d = 1; d <= 4; ++d) {
        const State rho = State::from_density(random_density(d, rng));
        const Purification p = purify(rho);
        CHECK(std::abs(evaluate_state(p.state, p.lift(ComplexMatrix::Identity(d, d))) - 1.0) < 1e-12);
        for (int i = 0; i < 100; ++i) {
            const ComplexMatrix h = random_hermitian(d, rng);
            CHECK(std::abs(evaluate_state(p.state, p.lift(h)) - (rho.density() * h).trace()) < 1e-9);
        }
    }
}

TEST_CASE("matrix and state JSON round trip is bit exact")
{
    std::mt19937_64 rng(77);
    for (int i = 0; i < 20; ++i) {
        const ComplexMatrix m = gaussian(1 + i % 3, 1 + i % 4, rng) * 1e-3 * (i + 1);
        const ComplexMatrix back = matrix_from_json(Json::parse(matrix_to_json(m).dump()));
        CHECK(back == m);
        const State s = State::from_vector(random_unit(3, rng));
        CHECK(state_from_json(Json::parse(state_to_json(s).dump())).vector() == s.vector());
        const State r = State::from_density(random_density(3, rng));
        CHECK(state_from_json(Json::parse(state_to_json(r).dump())).density() == r.density());
    }
}

TEST_CASE("matrix JSON errors carry their location")
{
    const Json bad = Json::parse(R"({"rows": 2, "cols": 2, "data": [[[1,0],[0,0]],[[0,0],"x"]]})");
    try {
        matrix_from_json(bad, "m");
        FAIL("expected an ingest error");
    } catch (const IngestError& e) {
        CHECK(std::string(e.what()).find("m/data/1/1") != std::string::npos);
    }
    CHECK_THROWS_AS(matrix_from_json(Json::parse(R"({"rows": 1, "cols": 2, "data": [[[1,0]]]})")), IngestError);
}
