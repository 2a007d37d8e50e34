#include "relusynth/bitcodec.hpp"

#include "relusynth/pwl.hpp"

#include <algorithm>
#include <stdexcept>

namespace relusynth {

mpq_class ternary_encode(const BitStream& bits) {
    mpq_class v = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (bits[k] != 0 && bits[k] != 1) throw std::invalid_argument("ternary_encode: digits must be 0 or 1");
        if (bits[k]) v += pow3q(-static_cast<long>(k + 1));
    }
    return v;
}

BitStream binary_digits(const mpq_class& v, std::size_t c) {
    if (v < 0 || v >= 1) throw std::invalid_argument("binary_digits: value outside [0, 1)");
    BitStream out;
    mpq_class r = v;
    for (std::size_t i = 0; i < c; ++i) {
        r *= 2;
        int b = r >= 1 ? 1 : 0;
        out.push_back(b);
        r -= b;
    }
    return out;
}

BlockCode block_encode(const std::vector<mpq_class>& values, std::size_t c) {
    BlockCode code{0, c, values.size()};
    for (std::size_t j = 0; j < values.size(); ++j) {
        BitStream d = binary_digits(values[j], c);
        for (std::size_t i = 0; i < c; ++i)
            if (d[i]) code.value += pow3q(-static_cast<long>(j * c + i + 1));
    }
    return code;
}

std::vector<mpq_class> block_decode(const BlockCode& code) {
    std::vector<mpq_class> out;
    mpq_class x = code.value;
    for (std::size_t j = 0; j < code.blocks; ++j) {
        mpq_class v = 0;
        for (std::size_t i = 0; i < code.c; ++i) {
            x *= 3;
            int b = x >= 1 ? 1 : 0;
            x -= b;
            if (b) v += pow2q(-static_cast<long>(i + 1));
        }
        out.push_back(v);
    }
    return out;
}

Network digit_lookup_net(std::size_t n, ScalarKind kind) {
    if (n < 1 || n > 20) throw std::invalid_argument("digit_lookup_net: n out of range");
    // Prefix classes in increasing order of value; binary counting order matches.
    const std::size_t classes = std::size_t{1} << n;
    const mpq_class h = pow3q(-static_cast<long>(n));
    auto prefix_value = [&](std::size_t c) {
        mpq_class p = 0;
        for (std::size_t j = 0; j < n; ++j)
            if ((c >> (n - 1 - j)) & 1) p += pow3q(-static_cast<long>(j + 1));
        return p;
    };
    auto digit = [&](std::size_t c, std::size_t j) { return static_cast<int>((c >> (n - 1 - j)) & 1); };

    // Class c occupies [P_c, P_c + h/2]; transitions sit strictly inside the gaps.
    PwlMultiSpec spec;
    spec.values.resize(n);
    for (std::size_t c = 0; c + 1 < classes; ++c) {
        spec.xs.push_back(Scalar(mpq_class(prefix_value(c) + h / 2 + h / 8)));
        spec.xs.push_back(Scalar(mpq_class(prefix_value(c + 1) - h / 8)));
        for (std::size_t j = 0; j < n; ++j) {
            spec.values[j].push_back(Scalar(mpq_class(digit(c, j))));
            spec.values[j].push_back(Scalar(mpq_class(digit(c + 1, j))));
        }
    }
    Network digits = pwl_net(spec, kind);
    Network both = parallelize(digits, identity_net(1, kind));
    // tail = 3^n x - sum_j 3^(n-j) theta_j
    Matrix::Builder post(n + 1, n + 1, kind);
    for (std::size_t j = 0; j < n; ++j) {
        post.add(j, j, 1);
        post.add(n, j, Scalar(mpq_class(-pow3q(static_cast<long>(n - 1 - j)))));
    }
    post.add(n, n, Scalar(mpq_class(pow3q(static_cast<long>(n)))));
    return compose(affine_net(post.build(), std::vector<Scalar>(n + 1, Scalar::zero(kind))), both);
}

Network bit_sum_net(std::size_t n, ScalarKind kind) {
    Network look = digit_lookup_net(n, kind);
    const Layer& l0 = look.layers()[0];
    const Layer& l1 = look.layers()[1];
    const std::size_t H = l0.W.rows();
    // Layer 1: lookup units on x, then relu(j - i) for j = 1..n.
    Matrix::Builder w0(H + n, 2, kind);
    std::vector<Scalar> v0 = l0.v;
    for (std::size_t r = 0; r < H; ++r)
        for (const auto& e : l0.W.row(r)) w0.add(r, 0, e.value);
    for (std::size_t j = 0; j < n; ++j) {
        w0.add(H + j, 1, -1);
        v0.push_back(Scalar::from_rational(mpq_class(static_cast<long>(j + 1)), kind));
    }
    // Layer 2: relu(theta_j - relu(j - i)) and relu(tail).
    Matrix::Builder w1(n + 1, H + n, kind);
    std::vector<Scalar> v1;
    for (std::size_t r = 0; r <= n; ++r) {
        for (const auto& e : l1.W.row(r)) w1.add(r, e.col, e.value);
        if (r < n) w1.add(r, H + r, -1);
        v1.push_back(l1.v[r]);
    }
    Matrix::Builder w2(2, n + 1, kind);
    for (std::size_t j = 0; j < n; ++j) w2.add(0, j, 1);
    w2.add(1, n, 1);
    std::vector<Layer> layers;
    layers.push_back({w0.build(), std::move(v0)});
    layers.push_back({w1.build(), std::move(v1)});
    layers.push_back({w2.build(), std::vector<Scalar>(2, Scalar::zero(kind))});
    return Network(kind, std::move(layers));
}

Network bit_decode_net(std::size_t n, std::size_t ell, ScalarKind kind) {
    if (n < 1 || ell < 1) throw std::invalid_argument("bit_decode_net: n and ell must be positive");
    const std::size_t M = (ell + n - 1) / n;
    Network acc;
    for (std::size_t m = 0; m < M; ++m) {
        const std::size_t nm = std::min(n, ell - m * n);
        Network look = digit_lookup_net(nm, kind);
        // (y, x) -> (y + sum_j theta_j 2^-(m n + j), tail); y >= 0 rides on one relu unit.
        Matrix::Builder post(2, nm + 2, kind);
        post.add(0, 0, 1);
        for (std::size_t j = 0; j < nm; ++j)
            post.add(0, 1 + j, Scalar(pow2q(-static_cast<long>(m * n + j + 1))));
        post.add(1, nm + 1, 1);
        Network block;
        if (m == 0) {
            Matrix::Builder drop(1 + nm + 1, nm + 1, kind);  // prepend y = 0
            for (std::size_t j = 0; j <= nm; ++j) drop.add(1 + j, j, 1);
            Network with_y = compose(affine_net(drop.build(), std::vector<Scalar>(nm + 2, Scalar::zero(kind))), look);
            block = compose(affine_net(post.build(), std::vector<Scalar>(2, Scalar::zero(kind))), with_y);
            acc = block;
        } else {
            Matrix::Builder carry0(1, 1, kind), carry1(1, 1, kind);
            carry0.add(0, 0, 1);
            carry1.add(0, 0, 1);
            std::vector<Layer> cl;
            cl.push_back({carry0.build(), {Scalar::zero(kind)}});
            cl.push_back({carry1.build(), {Scalar::zero(kind)}});
            Network keep_y(kind, std::move(cl));
            block = compose(affine_net(post.build(), std::vector<Scalar>(2, Scalar::zero(kind))),
                            direct_sum(keep_y, look));
            acc = compose(block, acc);
        }
    }
    return acc;
}

}  // namespace relusynth
