// Test-only reference implementations, kept independent of the library's
// computation paths on purpose.
#pragma once

#include <catch2/catch.hpp>

#include <complex>
#include <vector>

#include "find/common.hpp"
#include "find/rng.hpp"

namespace oracle {

// O(N^2) DFT, the independent check for the radix-2 implementation.
inline find::cvec dft(const find::cvec& x, bool inverse = false)
{
    const std::size_t n = x.size();
    find::cvec out(n, {0.0, 0.0});
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = sign * find::two_pi * static_cast<double>(k * i) / static_cast<double>(n);
            out[k] += x[i] * find::cplx(std::cos(ang), std::sin(ang));
        }
        if (inverse)
            out[k] /= static_cast<double>(n);
    }
    return out;
}

inline find::cvec random_signal(std::size_t n, find::Rng& rng)
{
    find::cvec x(n);
    for (auto& v : x)
        v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    return x;
}

inline double max_abs_diff(const find::cvec& a, const find::cvec& b)
{
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace oracle
