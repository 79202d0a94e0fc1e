// Thomas algorithm for tridiagonal systems.
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace nlslab {

// Solves a x_{i-1} + d x_i + c x_{i+1} = rhs_i in place; a[0] and c[n-1] are
// ignored. Scalar may be double or std::complex<double>.
template <typename Scalar>
std::vector<Scalar> solve_tridiagonal(const std::vector<Scalar>& a, const std::vector<Scalar>& d,
                                      const std::vector<Scalar>& c, const std::vector<Scalar>& rhs) {
    const std::size_t n = d.size();
    if (a.size() != n || c.size() != n || rhs.size() != n)
        throw std::invalid_argument("tridiagonal bands must have equal length");
    std::vector<Scalar> cp(n), dp(n), x(n);
    Scalar denom = d[0];
    if (denom == Scalar(0)) throw std::runtime_error("tridiagonal solve: zero pivot");
    cp[0] = c[0] / denom;
    dp[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = d[i] - a[i] * cp[i - 1];
        if (denom == Scalar(0)) throw std::runtime_error("tridiagonal solve: zero pivot");
        cp[i] = c[i] / denom;
        dp[i] = (rhs[i] - a[i] * dp[i - 1]) / denom;
    }
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
}

}  // namespace nlslab
