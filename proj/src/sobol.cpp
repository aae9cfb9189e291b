#include <array>
#include <bit>
#include <stdexcept>

#include "divsel/samplers.hpp"

namespace divsel {

namespace {

struct Primitive {
    int degree;
    unsigned coeffs;
    std::array<unsigned, 7> m;
};

// Joe & Kuo (new-joe-kuo-6.21201), dimensions 2..21.
constexpr std::array<Primitive, 20> kJoeKuo = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
}};

}  // namespace

SobolSequence::SobolSequence(std::size_t dimension)
    : dimension_(dimension), directions_(dimension * kBits), state_(dimension, 0) {
    if (dimension == 0 || dimension > max_dimension())
        throw std::invalid_argument("sobol: unsupported dimension " + std::to_string(dimension) +
                                    " (max " + std::to_string(max_dimension()) + ")");
    for (int k = 0; k < kBits; ++k) directions_[k] = std::uint64_t{1} << (kBits - 1 - k);
    for (std::size_t d = 1; d < dimension; ++d) {
        const auto& prim = kJoeKuo[d - 1];
        const int s = prim.degree;
        std::uint64_t* v = directions_.data() + d * kBits;
        for (int k = 0; k < kBits && k < s; ++k)
            v[k] = std::uint64_t{prim.m[k]} << (kBits - 1 - k);
        for (int k = s; k < kBits; ++k) {
            v[k] = v[k - s] ^ (v[k - s] >> s);
            for (int j = 1; j < s; ++j)
                if ((prim.coeffs >> (s - 1 - j)) & 1u) v[k] ^= v[k - j];
        }
    }
}

void SobolSequence::next(std::span<double> out) {
    constexpr double scale = 0x1.0p-52;
    for (std::size_t d = 0; d < dimension_; ++d) out[d] = static_cast<double>(state_[d]) * scale;
    // Gray-code step: flip the direction number at the lowest zero bit.
    const int c = std::countr_one(index_);
    if (c >= kBits) throw std::overflow_error("sobol: sequence exhausted");
    for (std::size_t d = 0; d < dimension_; ++d) state_[d] ^= directions_[d * kBits + c];
    ++index_;
}

void SobolSequence::skip(std::size_t n) {
    std::vector<double> scratch(dimension_);
    for (std::size_t i = 0; i < n; ++i) next(scratch);
}

}  // namespace divsel
