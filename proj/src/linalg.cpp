#include "qmf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmf::linalg {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = Complex{1.0, 0.0};
    return m;
}

Matrix matmul(const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows)
        throw qmf_error("matmul dimension mismatch");
    Matrix out(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const Complex v = x(i, k);
            if (v == Complex{0.0, 0.0})
                continue;
            for (std::size_t j = 0; j < y.cols; ++j)
                out(i, j) += v * y(k, j);
        }
    return out;
}

Matrix adjoint(const Matrix& x) {
    Matrix out(x.cols, x.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j)
            out(j, i) = std::conj(x(i, j));
    return out;
}

double max_abs_diff(const Matrix& x, const Matrix& y) {
    if (x.rows != y.rows || x.cols != y.cols)
        throw qmf_error("matrix shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i)
        m = std::max(m, std::abs(x.a[i] - y.a[i]));
    return m;
}

bool is_unitary(const Matrix& x, double tol) {
    if (x.rows != x.cols)
        return false;
    return max_abs_diff(matmul(adjoint(x), x), Matrix::identity(x.rows)) <= tol;
}

Matrix to_matrix(const NamedTensor& t, std::span<const std::string> row_axes,
                 std::span<const std::string> col_axes) {
    std::vector<std::string> order(row_axes.begin(), row_axes.end());
    order.insert(order.end(), col_axes.begin(), col_axes.end());
    NamedTensor perm = t.transposed(order);
    std::size_t rows = 1, cols = 1;
    for (std::size_t i = 0; i < row_axes.size(); ++i)
        rows *= perm.axes()[i].cardinality;
    for (std::size_t i = row_axes.size(); i < perm.rank(); ++i)
        cols *= perm.axes()[i].cardinality;
    Matrix m(rows, cols);
    m.a = perm.data();
    return m;
}

namespace {

double off_diagonal_norm(const Matrix& m) {
    double s = 0.0;
    for (std::size_t p = 0; p < m.rows; ++p)
        for (std::size_t q = p + 1; q < m.cols; ++q)
            s += std::norm(m(p, q));
    return std::sqrt(s);
}

} // namespace

EigResult hermitian_eig(Matrix m, std::size_t max_sweeps) {
    if (m.rows != m.cols)
        throw qmf_error("hermitian_eig expects a square matrix");
    const std::size_t n = m.rows;

    // Symmetrize to wash out representation noise in the input.
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p; q < n; ++q) {
            const Complex avg = 0.5 * (m(p, q) + std::conj(m(q, p)));
            m(p, q) = avg;
            m(q, p) = std::conj(avg);
        }

    Matrix v = Matrix::identity(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        scale = std::max(scale, std::abs(m(i, i)));
    scale = std::max(scale, off_diagonal_norm(m));
    const double stop = (scale == 0.0) ? 0.0 : scale * 1e-15 * static_cast<double>(n);

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(m) <= stop)
            break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = m(p, q);
                const double mag = std::abs(apq);
                if (mag <= stop / static_cast<double>(n * n) || mag == 0.0)
                    continue;
                const double app = m(p, p).real();
                const double aqq = m(q, q).real();
                // Phase factor turning the 2x2 block real symmetric.
                const Complex phase = apq / mag;
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Columns: J(:,p) = c e_p - s conj(phase) e_q,
                //          J(:,q) = s phase e_p + c e_q.
                const Complex jpq = s * phase;
                const Complex jqp = -s * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) { // A <- A J
                    const Complex akp = m(k, p), akq = m(k, q);
                    m(k, p) = akp * c + akq * jqp;
                    m(k, q) = akp * jpq + akq * c;
                }
                for (std::size_t k = 0; k < n; ++k) { // A <- J^H A
                    const Complex apk = m(p, k), aqk = m(q, k);
                    m(p, k) = c * apk + std::conj(jqp) * aqk;
                    m(q, k) = std::conj(jpq) * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) { // V <- V J
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * c + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * c;
                }
                m(p, q) = Complex{0.0, 0.0};
                m(q, p) = Complex{0.0, 0.0};
            }
        }
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return m(a, a).real() < m(b, b).real(); });

    EigResult out;
    out.values.reserve(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values.push_back(m(perm[j], perm[j]).real());
        for (std::size_t i = 0; i < n; ++i)
            out.vectors(i, j) = v(i, perm[j]);
    }
    return out;
}

} // namespace qmf::linalg
