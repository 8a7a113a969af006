#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace conceptgen::nn {

// Dense row-major matrix of doubles. All training math runs in 64-bit so
// gradient checks and reruns are bit-reproducible.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), values(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }

    std::string shape() const;

    static Matrix identity(std::size_t n);
    static Matrix from_row(std::span<const double> v);
};

bool all_finite(const Matrix& m);
bool all_finite(std::span<const double> v);

// Throws InputError naming `what` when shapes disagree.
void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& what);

// a (n x k) * b (k x m) -> n x m
Matrix multiply(const Matrix& a, const Matrix& b);

// a (n x k) * b^T, b is (m x k) -> n x m. The layer-forward product: both
// operands are traversed along contiguous rows.
Matrix multiply_nt(const Matrix& a, const Matrix& b);

// a^T * b, a is (k x n), b is (k x m) -> n x m. The weight-gradient product.
Matrix multiply_tn(const Matrix& a, const Matrix& b);

Matrix add(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
void scale_in_place(Matrix& m, double factor);

std::vector<double> column_sums(const Matrix& m);

}  // namespace conceptgen::nn
