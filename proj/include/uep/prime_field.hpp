#pragma once

#include <cstdint>
#include <vector>

namespace uep {

// Arithmetic in GF(p), p = 2^31 - 1.
namespace fp {

inline constexpr std::uint32_t kPrime = 2147483647u;

inline std::uint32_t add(std::uint32_t a, std::uint32_t b) {
    std::uint64_t s = static_cast<std::uint64_t>(a) + b;
    if (s >= kPrime) s -= kPrime;
    return static_cast<std::uint32_t>(s);
}

inline std::uint32_t sub(std::uint32_t a, std::uint32_t b) {
    return a >= b ? a - b : static_cast<std::uint32_t>(a + kPrime - b);
}

inline std::uint32_t mul(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % kPrime);
}

inline std::uint32_t pow(std::uint32_t base, std::uint64_t exp) {
    std::uint32_t result = 1;
    while (exp) {
        if (exp & 1) result = mul(result, base);
        base = mul(base, base);
        exp >>= 1;
    }
    return result;
}

inline std::uint32_t inv(std::uint32_t a) { return pow(a, kPrime - 2); }

}  // namespace fp

// Dense row-major matrix over GF(p).
struct FpMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint32_t> data;

    FpMatrix() = default;
    FpMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

    std::uint32_t& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    std::uint32_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

FpMatrix fp_matmul(const FpMatrix& a, const FpMatrix& b);

// In-place reduced row echelon form; returns the rank.
int fp_rref(FpMatrix& m);

int fp_rank(FpMatrix m);

}  // namespace uep
