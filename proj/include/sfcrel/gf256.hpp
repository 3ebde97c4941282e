#pragma once

// GF(256) arithmetic with the AES reduction polynomial x^8+x^4+x^3+x+1
// (0x11B) and generator 0x03, via compile-time exp/log tables. Supplies the
// byte arithmetic and the dense linear solver the packet codec builds on.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sfcrel::gf {

inline constexpr unsigned kPoly = 0x11B;
inline constexpr std::uint8_t kGenerator = 0x03;

namespace detail {

constexpr std::uint8_t slow_mul(std::uint8_t a, std::uint8_t b) {
    unsigned p = 0, aa = a, bb = b;
    while (bb != 0) {
        if (bb & 1u) p ^= aa;
        bb >>= 1;
        aa <<= 1;
        if (aa & 0x100u) aa ^= kPoly;
    }
    return static_cast<std::uint8_t>(p);
}

struct Tables {
    std::array<std::uint8_t, 512> exp{};
    std::array<std::uint8_t, 256> log{};

    constexpr Tables() {
        std::uint8_t x = 1;
        for (int i = 0; i < 255; ++i) {
            exp[static_cast<std::size_t>(i)] = x;
            log[x] = static_cast<std::uint8_t>(i);
            x = slow_mul(x, kGenerator);
        }
        for (int i = 255; i < 512; ++i)
            exp[static_cast<std::size_t>(i)] = exp[static_cast<std::size_t>(i - 255)];
    }
};

inline constexpr Tables kTables{};

}  // namespace detail

inline std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    if (a == 0 || b == 0) return 0;
    return detail::kTables.exp[static_cast<std::size_t>(detail::kTables.log[a]) +
                               detail::kTables.log[b]];
}

inline std::uint8_t inv(std::uint8_t a) {
    if (a == 0) throw std::domain_error("gf256: zero has no inverse");
    return detail::kTables.exp[255 - detail::kTables.log[a]];
}

inline std::uint8_t pow(std::uint8_t a, unsigned e) {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return detail::kTables.exp[(static_cast<std::size_t>(detail::kTables.log[a]) * e) % 255];
}

/// Solves A x = b over GF(256) in place, where each b column is a byte
/// string (rhs[i] is row i's byte vector). Returns the solution rows.
/// Throws if A is singular.
inline std::vector<std::vector<std::uint8_t>> solve(
    std::vector<std::vector<std::uint8_t>> a, std::vector<std::vector<std::uint8_t>> rhs) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) throw std::domain_error("gf256: singular system");
        std::swap(a[col], a[piv]);
        std::swap(rhs[col], rhs[piv]);
        const std::uint8_t ipiv = inv(a[col][col]);
        for (std::size_t c = 0; c < n; ++c) a[col][c] = mul(a[col][c], ipiv);
        for (auto& byte : rhs[col]) byte = mul(byte, ipiv);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0) continue;
            const std::uint8_t f = a[row][col];
            for (std::size_t c = 0; c < n; ++c) a[row][c] ^= mul(f, a[col][c]);
            for (std::size_t i = 0; i < rhs[row].size(); ++i)
                rhs[row][i] ^= mul(f, rhs[col][i]);
        }
    }
    return rhs;
}

}  // namespace sfcrel::gf
