#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "freedil/operator_core.hpp"

namespace testing_support {

using freedil::Complex;
using freedil::ComplexMatrix;
using freedil::ComplexVector;
using freedil::Index;

inline ComplexMatrix scalar(Complex c)
{
    ComplexMatrix m(1, 1);
    m(0, 0) = c;
    return m;
}

inline ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d)
{
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline ComplexMatrix gaussian(Index rows, Index cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd;
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            m(i, j) = Complex(nd(rng), nd(rng));
    return m;
}

inline ComplexMatrix random_unitary(Index d, std::mt19937_64& rng)
{
    Eigen::HouseholderQR<ComplexMatrix> qr(gaussian(d, d, rng));
    return qr.householderQ() * ComplexMatrix::Identity(d, d);
}

// Largest singular value, from an SVD rather than the library's eigen route.
inline double svd_norm(const ComplexMatrix& m)
{
    if (m.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

// Norm drawn from [0, 1]; every fifth one sits on the unit sphere (isometric directions).
inline ComplexMatrix random_contraction(Index d, std::mt19937_64& rng, int index = 1)
{
    ComplexMatrix g = gaussian(d, d, rng);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const double target = index % 5 == 0 ? 1.0 : ud(rng);
    return g * (target / svd_norm(g));
}

inline ComplexVector random_unit(Index d, std::mt19937_64& rng)
{
    ComplexVector v = gaussian(d, 1, rng);
    return v / v.norm();
}

inline ComplexMatrix random_density(Index d, std::mt19937_64& rng)
{
    const ComplexMatrix g = gaussian(d, d, rng);
    ComplexMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

inline ComplexMatrix random_hermitian(Index d, std::mt19937_64& rng)
{
    const ComplexMatrix g = gaussian(d, d, rng);
    return 0.5 * (g + g.adjoint());
}

inline double max_abs(const ComplexMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

} // namespace testing_support
