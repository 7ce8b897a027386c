#ifndef BISPEC_LINALG_HPP
#define BISPEC_LINALG_HPP

#include <cstddef>
#include <vector>

namespace bispec {

// Dense row-major matrix.
template <class T>
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<T> a;

    Matrix() = default;
    Matrix(int r, int c, T fill = T(0)) : rows(r), cols(c), a(std::size_t(r) * std::size_t(c), fill) {}

    T& operator()(int i, int j) { return a[std::size_t(i) * std::size_t(cols) + std::size_t(j)]; }
    const T& operator()(int i, int j) const { return a[std::size_t(i) * std::size_t(cols) + std::size_t(j)]; }

    static Matrix identity(int n)
    {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }
};

template <class T>
Matrix<T> operator*(const Matrix<T>& x, const Matrix<T>& y)
{
    Matrix<T> z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            T v = x(i, k);
            if (v == T(0)) continue;
            for (int j = 0; j < y.cols; ++j) z(i, j) += v * y(k, j);
        }
    return z;
}

// Symmetric tridiagonal matrix: diag[i], off[i] couples i and i+1.
template <class T>
struct Tridiagonal {
    std::vector<T> diag, off;

    int size() const { return int(diag.size()); }

    std::vector<T> apply(const std::vector<T>& u) const
    {
        int n = size();
        std::vector<T> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            T s = diag[std::size_t(i)] * u[std::size_t(i)];
            if (i > 0) s += off[std::size_t(i - 1)] * u[std::size_t(i - 1)];
            if (i + 1 < n) s += off[std::size_t(i)] * u[std::size_t(i + 1)];
            y[std::size_t(i)] = s;
        }
        return y;
    }

    Matrix<T> dense() const
    {
        int n = size();
        Matrix<T> m(n, n);
        for (int i = 0; i < n; ++i) {
            m(i, i) = diag[std::size_t(i)];
            if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = off[std::size_t(i)];
        }
        return m;
    }
};

} // namespace bispec

#endif // BISPEC_LINALG_HPP
