#pragma once

#include "relusynth/network.hpp"

#include <vector>

namespace relusynth {

using BitStream = std::vector<int>;

struct BlockCode {
    mpq_class value;
    std::size_t c = 0;       // digits per packed value
    std::size_t blocks = 0;  // number of packed values
};

// sum_k theta_k 3^-k
mpq_class ternary_encode(const BitStream& bits);
// First c binary digits of v in [0, 1).
BitStream binary_digits(const mpq_class& v, std::size_t c);
// Packs the first c binary digits of each value: digit i of value j goes to 3^-((j-1)c + i).
BlockCode block_encode(const std::vector<mpq_class>& values, std::size_t c);
// Inverse of block_encode on the digit level: the c-digit prefixes as dyadic rationals.
std::vector<mpq_class> block_decode(const BlockCode& code);

// x -> (theta_1, ..., theta_n, tail) for x = sum theta_k 3^-k; depth 1.
Network digit_lookup_net(std::size_t n, ScalarKind kind = ScalarKind::rational());
// (x, i) -> (sum_{j <= min(i, n)} theta_j, ternary tail after digit n); depth 2.
Network bit_sum_net(std::size_t n, ScalarKind kind = ScalarKind::rational());
// x -> (sum_{j <= ell} theta_j 2^-j, ternary tail after digit ell); depth ceil(ell / n).
Network bit_decode_net(std::size_t n, std::size_t ell, ScalarKind kind = ScalarKind::rational());

}  // namespace relusynth
