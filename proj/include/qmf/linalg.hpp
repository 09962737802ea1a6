#pragma once

#include "qmf/tensor.hpp"

#include <cstddef>
#include <vector>

namespace qmf::linalg {

/// Small dense column-accessible complex matrix, row-major.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Complex> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, Complex{0.0, 0.0}) {}

    Complex& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    Complex operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    static Matrix identity(std::size_t n);
};

Matrix matmul(const Matrix& x, const Matrix& y);
Matrix adjoint(const Matrix& x);
double max_abs_diff(const Matrix& x, const Matrix& y);
bool is_unitary(const Matrix& x, double tol = 1e-12);

/// Flattens a tensor into a matrix: rows indexed by `row_axes` (row-major
/// in the given order), columns by `col_axes`. Together they must name
/// every axis exactly once.
Matrix to_matrix(const NamedTensor& t, std::span<const std::string> row_axes,
                 std::span<const std::string> col_axes);

struct EigResult {
    std::vector<double> values; // ascending
    Matrix vectors;             // column k pairs with values[k]
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Adequate for the small dense matrices this library produces.
EigResult hermitian_eig(Matrix m, std::size_t max_sweeps = 64);

} // namespace qmf::linalg
