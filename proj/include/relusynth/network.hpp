#pragma once

#include "relusynth/scalar.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace relusynth {

// Dense-semantics matrix; absent entries read as zero. Rows are stored compressed.
class Matrix {
public:
    struct Entry {
        std::uint32_t col;
        Scalar value;
    };

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, ScalarKind kind);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const ScalarKind& kind() const { return kind_; }
    std::size_t nonzeros() const { return entries_.size(); }

    Scalar at(std::size_t i, std::size_t j) const;
    std::span<const Entry> row(std::size_t i) const {
        return {entries_.data() + start_[i], entries_.data() + start_[i + 1]};
    }

    Matrix to(const ScalarKind& k) const;

    static Matrix identity(std::size_t n, ScalarKind kind);
    static Matrix from_dense(const std::vector<std::vector<Scalar>>& a, ScalarKind kind);

    class Builder;

private:
    std::size_t rows_ = 0, cols_ = 0;
    ScalarKind kind_;
    std::vector<std::size_t> start_{0};
    std::vector<Entry> entries_;
};

// Accumulates (i, j, value) triplets; duplicates add, zeros are dropped.
class Matrix::Builder {
public:
    Builder(std::size_t rows, std::size_t cols, ScalarKind kind);
    void add(std::size_t i, std::size_t j, const Scalar& v);
    void add(std::size_t i, std::size_t j, const mpq_class& v) { add(i, j, Scalar(v)); }
    void add(std::size_t i, std::size_t j, int v) { add(i, j, Scalar(mpq_class(v))); }
    Matrix build();

private:
    struct T {
        std::size_t i, j;
        Scalar v;
    };
    std::size_t rows_, cols_;
    ScalarKind kind_;
    std::vector<T> items_;
};

struct Layer {
    Matrix W;
    std::vector<Scalar> v;
};

struct SizeReport {
    std::size_t width = 0;
    std::size_t depth = 0;
    Scalar max_magnitude;
    std::size_t param_count = 0;
    std::size_t nonzero_count = 0;
};

class Network {
public:
    Network() = default;
    Network(ScalarKind kind, std::vector<Layer> layers);

    std::size_t input_dim() const { return dims_.front(); }
    std::size_t output_dim() const { return dims_.back(); }
    std::size_t depth() const { return layers_.size() - 1; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    const std::vector<Layer>& layers() const { return layers_; }
    const ScalarKind& kind() const { return kind_; }
    bool empty() const { return layers_.empty(); }

    Network to(const ScalarKind& k) const;

private:
    ScalarKind kind_;
    std::vector<std::size_t> dims_;
    std::vector<Layer> layers_;
};

std::vector<Scalar> evaluate(const Network& net, const std::vector<Scalar>& x);

// Weights converted once into native arithmetic for repeated evaluation.
class Evaluator {
public:
    explicit Evaluator(const Network& net);
    ~Evaluator();
    Evaluator(Evaluator&&) noexcept;
    Evaluator& operator=(Evaluator&&) noexcept;

    std::vector<Scalar> operator()(const std::vector<Scalar>& x) const;
    std::vector<double> eval_double(std::span<const double> x) const;
    // Rows of `points` evaluated in parallel on `threads` workers (0 = hardware default).
    std::vector<std::vector<double>> eval_batch(const std::vector<std::vector<double>>& points,
                                                unsigned threads = 1) const;

    const ScalarKind& kind() const;
    std::size_t input_dim() const;
    std::size_t output_dim() const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

SizeReport size_report(const Network& net);

Network identity_net(std::size_t D, ScalarKind kind = ScalarKind::rational());
Network affine_net(const Matrix& A, const std::vector<Scalar>& b);
Network affine_net(const std::vector<std::vector<Scalar>>& A, const std::vector<Scalar>& b);
// Coordinate selection x -> (x_{idx[0]}, x_{idx[1]}, ...).
Network projection_net(std::size_t D, const std::vector<std::size_t>& idx,
                       ScalarKind kind = ScalarKind::rational());
Network depth_align(const Network& net, std::size_t target_depth);
Network compose(const Network& f, const Network& g);
Network parallelize(const Network& f, const Network& g);
Network parallelize(const std::vector<Network>& nets);
// (x, y) -> (f(x), g(y)) on concatenated inputs.
Network direct_sum(const Network& f, const Network& g);
Network direct_sum(const std::vector<Network>& nets);
Network scaling_chain(long s_plus_r, std::size_t L, ScalarKind kind);

}  // namespace relusynth
