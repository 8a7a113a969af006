#include "conceptgen/nn/matrix.hpp"

#include <cmath>

#include "conceptgen/errors.hpp"

namespace conceptgen::nn {

std::string Matrix::shape() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_row(std::span<const double> v) {
    Matrix m(1, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m.values[i] = v[i];
    return m;
}

bool all_finite(const Matrix& m) { return all_finite(std::span<const double>(m.values)); }

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& what) {
    if (m.rows != rows || m.cols != cols) {
        throw InputError("shape mismatch for " + what + ": expected " + std::to_string(rows) +
                         "x" + std::to_string(cols) + ", got " + m.shape());
    }
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw InputError("matrix product shape mismatch: " + a.shape() + " * " + b.shape());
    }
    Matrix out(a.rows, b.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.values.data() + i * a.cols;
        double* orow = out.values.data() + i * out.cols;
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.values.data() + k * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix multiply_nt(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) {
        throw InputError("matrix product shape mismatch: " + a.shape() + " * (" + b.shape() +
                         ")^T");
    }
    Matrix out(a.rows, b.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.values.data() + i * a.cols;
        double* orow = out.values.data() + i * out.cols;
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = b.values.data() + j * b.cols;
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
            orow[j] = acc;
        }
    }
    return out;
}

Matrix multiply_tn(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) {
        throw InputError("matrix product shape mismatch: (" + a.shape() + ")^T * " + b.shape());
    }
    Matrix out(a.cols, b.cols, 0.0);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* arow = a.values.data() + k * a.cols;
        const double* brow = b.values.data() + k * b.cols;
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* orow = out.values.data() + i * out.cols;
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
        }
    }
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw InputError("matrix sum shape mismatch: " + a.shape() + " + " + b.shape());
    }
    Matrix out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw InputError("elementwise product shape mismatch: " + a.shape() + " vs " + b.shape());
    }
    Matrix out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
    return out;
}

void scale_in_place(Matrix& m, double factor) {
    for (double& v : m.values) v *= factor;
}

std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> out(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.values.data() + r * m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) out[c] += row[c];
    }
    return out;
}

}  // namespace conceptgen::nn
