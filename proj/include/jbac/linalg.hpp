#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace jbac {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

/// Dense complex matrix, row-major, double precision.
struct ComplexMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    CVec entries;  // rows*cols entries, row i at [i*cols, (i+1)*cols)

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c) {}

    Complex& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

    bool same_shape(const ComplexMatrix& o) const { return rows == o.rows && cols == o.cols; }
};

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix hermitian(const ComplexMatrix& a);

// y = A x
CVec matvec(const ComplexMatrix& a, std::span<const Complex> x);
// y = A^H x
CVec matvec_herm(const ComplexMatrix& a, std::span<const Complex> x);

CVec column(const ComplexMatrix& a, std::size_t j);

double frobenius_norm(const ComplexMatrix& a);

// a^H b
Complex cdot(std::span<const Complex> a, std::span<const Complex> b);
double norm_sq(std::span<const Complex> v);
double norm2(std::span<const Complex> v);

}  // namespace jbac
