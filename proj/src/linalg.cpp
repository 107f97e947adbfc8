#include "jbac/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace jbac {

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("multiply: inner dimensions differ");
    ComplexMatrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

ComplexMatrix hermitian(const ComplexMatrix& a) {
    ComplexMatrix h(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) h(j, i) = std::conj(a(i, j));
    return h;
}

CVec matvec(const ComplexMatrix& a, std::span<const Complex> x) {
    if (a.cols != x.size()) throw std::invalid_argument("matvec: size mismatch");
    CVec y(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        Complex acc{};
        const Complex* row = a.entries.data() + i * a.cols;
        for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

CVec matvec_herm(const ComplexMatrix& a, std::span<const Complex> x) {
    if (a.rows != x.size()) throw std::invalid_argument("matvec_herm: size mismatch");
    CVec y(a.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const Complex* row = a.entries.data() + i * a.cols;
        const Complex xi = x[i];
        for (std::size_t j = 0; j < a.cols; ++j) y[j] += std::conj(row[j]) * xi;
    }
    return y;
}

CVec column(const ComplexMatrix& a, std::size_t j) {
    if (j >= a.cols) throw std::invalid_argument("column: index out of range");
    CVec c(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) c[i] = a(i, j);
    return c;
}

double frobenius_norm(const ComplexMatrix& a) {
    double acc = 0.0;
    for (const Complex& e : a.entries) acc += std::norm(e);
    return std::sqrt(acc);
}

Complex cdot(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cdot: size mismatch");
    Complex acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double norm_sq(std::span<const Complex> v) {
    double acc = 0.0;
    for (const Complex& e : v) acc += std::norm(e);
    return acc;
}

double norm2(std::span<const Complex> v) { return std::sqrt(norm_sq(v)); }

}  // namespace jbac
