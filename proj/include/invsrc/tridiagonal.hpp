#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace invsrc {

template <typename Scalar>
struct TridiagonalSolution {
    std::vector<Scalar> x;
    double min_pivot = 0.0;
};

// LU with partial pivoting for a tridiagonal system. Row swaps introduce one
// fill-in superdiagonal, so the working arrays carry diagonals -1..+2.
// Throws std::runtime_error when a pivot underflows (singular system), with
// the pivot magnitude in the message.
template <typename Scalar>
TridiagonalSolution<Scalar> solve_tridiagonal(std::span<const Scalar> lower,
                                              std::span<const Scalar> diag,
                                              std::span<const Scalar> upper,
                                              std::span<const Scalar> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n || n == 0) {
        throw std::invalid_argument("solve_tridiagonal: inconsistent sizes");
    }

    std::vector<Scalar> a(n, Scalar{});  // subdiagonal (row i, col i-1)
    std::vector<Scalar> d(diag.begin(), diag.end());
    std::vector<Scalar> u1(n, Scalar{}); // first superdiagonal
    std::vector<Scalar> u2(n, Scalar{}); // fill-in second superdiagonal
    std::vector<Scalar> b(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        a[i + 1] = lower[i];
        u1[i] = upper[i];
    }

    double min_pivot = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(a[i + 1]) > std::abs(d[i])) {
            std::swap(d[i], a[i + 1]);
            std::swap(u1[i], d[i + 1]);
            std::swap(u2[i], u1[i + 1]);
            std::swap(b[i], b[i + 1]);
        }
        const double piv = std::abs(d[i]);
        min_pivot = std::min(min_pivot, piv);
        if (!(piv > 0.0)) {
            throw std::runtime_error(
                "solve_tridiagonal: singular system, pivot magnitude " +
                std::to_string(piv));
        }
        const Scalar m = a[i + 1] / d[i];
        d[i + 1] -= m * u1[i];
        u1[i + 1] -= m * u2[i];
        b[i + 1] -= m * b[i];
    }
    const double last_piv = std::abs(d[n - 1]);
    min_pivot = std::min(min_pivot, last_piv);
    if (!(last_piv > 0.0)) {
        throw std::runtime_error(
            "solve_tridiagonal: singular system, pivot magnitude " +
            std::to_string(last_piv));
    }

    TridiagonalSolution<Scalar> sol;
    sol.min_pivot = min_pivot;
    sol.x.assign(n, Scalar{});
    auto& x = sol.x;
    x[n - 1] = b[n - 1] / d[n - 1];
    if (n >= 2) {
        x[n - 2] = (b[n - 2] - u1[n - 2] * x[n - 1]) / d[n - 2];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        if (i + 2 < n) {
            x[i] = (b[i] - u1[i] * x[i + 1] - u2[i] * x[i + 2]) / d[i];
        }
    }
    return sol;
}

// y = T x for the tridiagonal matrix given by its three diagonals.
template <typename Scalar>
std::vector<Scalar> tridiagonal_apply(std::span<const Scalar> lower,
                                      std::span<const Scalar> diag,
                                      std::span<const Scalar> upper,
                                      std::span<const Scalar> x) {
    const std::size_t n = diag.size();
    std::vector<Scalar> y(n, Scalar{});
    for (std::size_t i = 0; i < n; ++i) {
        Scalar acc = diag[i] * x[i];
        if (i > 0) {
            acc += lower[i - 1] * x[i - 1];
        }
        if (i + 1 < n) {
            acc += upper[i] * x[i + 1];
        }
        y[i] = acc;
    }
    return y;
}

} // namespace invsrc
