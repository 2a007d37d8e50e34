#include "relusynth/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace relusynth {

// ---- Matrix ----

Matrix::Matrix(std::size_t rows, std::size_t cols, ScalarKind kind)
    : rows_(rows), cols_(cols), kind_(kind), start_(rows + 1, 0) {}

Scalar Matrix::at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) throw std::out_of_range("matrix index");
    auto r = row(i);
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::size_t c) { return e.col < c; });
    if (it != r.end() && it->col == j) return it->value;
    return Scalar::zero(kind_);
}

Matrix Matrix::to(const ScalarKind& k) const {
    if (k == kind_) return *this;
    Matrix m = *this;
    m.kind_ = k;
    for (auto& e : m.entries_) e.value = e.value.to(k);
    return m;
}

Matrix Matrix::identity(std::size_t n, ScalarKind kind) {
    Builder b(n, n, kind);
    for (std::size_t i = 0; i < n; ++i) b.add(i, i, 1);
    return b.build();
}

Matrix Matrix::from_dense(const std::vector<std::vector<Scalar>>& a, ScalarKind kind) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    Builder b(rows, cols, kind);
    for (std::size_t i = 0; i < rows; ++i) {
        if (a[i].size() != cols) throw std::invalid_argument("ragged matrix");
        for (std::size_t j = 0; j < cols; ++j) b.add(i, j, a[i][j]);
    }
    return b.build();
}

Matrix::Builder::Builder(std::size_t rows, std::size_t cols, ScalarKind kind)
    : rows_(rows), cols_(cols), kind_(kind) {}

void Matrix::Builder::add(std::size_t i, std::size_t j, const Scalar& v) {
    if (i >= rows_ || j >= cols_) throw std::out_of_range("matrix builder index");
    if (v.is_zero()) return;
    items_.push_back({i, j, v.to(kind_)});
}

Matrix Matrix::Builder::build() {
    std::stable_sort(items_.begin(), items_.end(),
                     [](const T& a, const T& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    Matrix m(rows_, cols_, kind_);
    m.entries_.reserve(items_.size());
    std::vector<std::size_t> count(rows_, 0);
    for (std::size_t k = 0; k < items_.size();) {
        std::size_t e = k;
        Scalar sum = items_[k].v;
        while (++e < items_.size() && items_[e].i == items_[k].i && items_[e].j == items_[k].j)
            sum = sum + items_[e].v;
        if (!sum.is_zero()) {
            m.entries_.push_back({static_cast<std::uint32_t>(items_[k].j), std::move(sum)});
            ++count[items_[k].i];
        }
        k = e;
    }
    for (std::size_t i = 0; i < rows_; ++i) m.start_[i + 1] = m.start_[i] + count[i];
    items_.clear();
    return m;
}

// ---- Network ----

Network::Network(ScalarKind kind, std::vector<Layer> layers) : kind_(kind), layers_(std::move(layers)) {
    if (layers_.empty()) throw std::invalid_argument("network needs at least one affine layer");
    dims_.push_back(layers_[0].W.cols());
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Layer& l = layers_[i];
        if (l.W.cols() != dims_.back())
            throw std::invalid_argument("layer " + std::to_string(i) + ": input width mismatch");
        if (l.v.size() != l.W.rows())
            throw std::invalid_argument("layer " + std::to_string(i) + ": bias length mismatch");
        if (!(l.W.kind() == kind_)) l.W = l.W.to(kind_);
        for (auto& s : l.v) {
            if (!(s.kind() == kind_)) s = s.to(kind_);
            if (!s.is_finite()) throw std::invalid_argument("non-finite bias");
        }
        dims_.push_back(l.W.rows());
    }
}

Network Network::to(const ScalarKind& k) const {
    if (k == kind_) return *this;
    std::vector<Layer> out;
    out.reserve(layers_.size());
    for (const auto& l : layers_) {
        Layer n{l.W.to(k), {}};
        n.v.reserve(l.v.size());
        for (const auto& s : l.v) n.v.push_back(s.to(k));
        out.push_back(std::move(n));
    }
    return Network(k, std::move(out));
}

std::vector<Scalar> evaluate(const Network& net, const std::vector<Scalar>& x) {
    if (x.size() != net.input_dim()) throw std::invalid_argument("evaluate: dimension mismatch");
    const ScalarKind k = net.kind();
    std::vector<Scalar> h;
    h.reserve(x.size());
    for (const auto& s : x) h.push_back(s.to(k));
    for (std::size_t li = 0; li < net.layers().size(); ++li) {
        const Layer& l = net.layers()[li];
        bool hidden = li + 1 < net.layers().size();
        std::vector<Scalar> next;
        next.reserve(l.W.rows());
        for (std::size_t i = 0; i < l.W.rows(); ++i) {
            Scalar acc = l.v[i];
            for (const auto& e : l.W.row(i)) acc = acc + e.value * h[e.col];
            if (!acc.is_finite()) throw std::overflow_error("evaluate: non-finite intermediate value");
            next.push_back(hidden ? acc.relu() : std::move(acc));
        }
        h = std::move(next);
    }
    return h;
}

// ---- Evaluator ----

namespace {

template <class T>
struct Compiled {
    struct L {
        std::vector<std::size_t> start;
        std::vector<std::uint32_t> col;
        std::vector<T> w;
        std::vector<T> v;
    };
    std::vector<L> layers;
    std::size_t max_width = 0;
};

template <class T, class Conv>
Compiled<T> compile(const Network& net, Conv conv) {
    Compiled<T> c;
    for (auto d : net.dims()) c.max_width = std::max(c.max_width, d);
    for (const auto& l : net.layers()) {
        typename Compiled<T>::L cl;
        cl.start.push_back(0);
        for (std::size_t i = 0; i < l.W.rows(); ++i) {
            for (const auto& e : l.W.row(i)) {
                cl.col.push_back(e.col);
                cl.w.push_back(conv(e.value));
            }
            cl.start.push_back(cl.col.size());
        }
        for (const auto& s : l.v) cl.v.push_back(conv(s));
        c.layers.push_back(std::move(cl));
    }
    return c;
}

}  // namespace

struct Evaluator::Impl {
    ScalarKind kind;
    std::size_t in = 0, out = 0;
    Compiled<double> f64;
    Compiled<mpq_class> rat;
    Compiled<BigFloat> big;

    std::vector<double> run_f64(std::span<const double> x) const {
        std::vector<double> h(x.begin(), x.end()), next;
        for (std::size_t li = 0; li < f64.layers.size(); ++li) {
            const auto& l = f64.layers[li];
            bool hidden = li + 1 < f64.layers.size();
            next.assign(l.v.size(), 0.0);
            for (std::size_t i = 0; i < l.v.size(); ++i) {
                double acc = l.v[i];
                for (std::size_t k = l.start[i]; k < l.start[i + 1]; ++k) acc += l.w[k] * h[l.col[k]];
                if (!std::isfinite(acc)) throw std::overflow_error("evaluate: non-finite intermediate value");
                next[i] = hidden ? std::max(acc, 0.0) : acc;
            }
            h.swap(next);
        }
        return h;
    }

    std::vector<mpq_class> run_rat(std::vector<mpq_class> h) const {
        std::vector<mpq_class> next;
        mpq_class t;
        for (std::size_t li = 0; li < rat.layers.size(); ++li) {
            const auto& l = rat.layers[li];
            bool hidden = li + 1 < rat.layers.size();
            next.assign(l.v.size(), mpq_class(0));
            for (std::size_t i = 0; i < l.v.size(); ++i) {
                mpq_class& acc = next[i];
                acc = l.v[i];
                for (std::size_t k = l.start[i]; k < l.start[i + 1]; ++k) {
                    const mpq_class& hv = h[l.col[k]];
                    if (sgn(hv) == 0) continue;
                    mpq_mul(t.get_mpq_t(), l.w[k].get_mpq_t(), hv.get_mpq_t());
                    mpq_add(acc.get_mpq_t(), acc.get_mpq_t(), t.get_mpq_t());
                }
                if (hidden && sgn(acc) < 0) acc = 0;
            }
            h.swap(next);
        }
        return h;
    }

    std::vector<BigFloat> run_big(std::vector<BigFloat> h) const {
        const mpfr_prec_t bits = kind.bits;
        std::vector<BigFloat> next;
        next.reserve(big.max_width);
        for (std::size_t li = 0; li < big.layers.size(); ++li) {
            const auto& l = big.layers[li];
            bool hidden = li + 1 < big.layers.size();
            next.clear();
            for (std::size_t i = 0; i < l.v.size(); ++i) next.emplace_back(bits);
            for (std::size_t i = 0; i < l.v.size(); ++i) {
                mpfr_ptr acc = next[i].get();
                mpfr_set(acc, l.v[i].get(), MPFR_RNDN);
                for (std::size_t k = l.start[i]; k < l.start[i + 1]; ++k) {
                    mpfr_srcptr hv = h[l.col[k]].get();
                    if (mpfr_zero_p(hv)) continue;
                    mpfr_fma(acc, l.w[k].get(), hv, acc, MPFR_RNDN);
                }
                if (!mpfr_number_p(acc)) throw std::overflow_error("evaluate: non-finite intermediate value");
                if (hidden && mpfr_sgn(acc) < 0) mpfr_set_zero(acc, 1);
            }
            h.swap(next);
        }
        return h;
    }
};

Evaluator::Evaluator(const Network& net) : impl_(std::make_unique<Impl>()) {
    impl_->kind = net.kind();
    impl_->in = net.input_dim();
    impl_->out = net.output_dim();
    switch (net.kind().tag) {
        case ScalarKind::Tag::f64:
            impl_->f64 = compile<double>(net, [](const Scalar& s) { return s.as_double(); });
            break;
        case ScalarKind::Tag::rational:
            impl_->rat = compile<mpq_class>(net, [](const Scalar& s) { return s.as_rational(); });
            break;
        case ScalarKind::Tag::bigfloat:
            impl_->big = compile<BigFloat>(net, [](const Scalar& s) { return s.as_bigfloat(); });
            break;
    }
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

const ScalarKind& Evaluator::kind() const { return impl_->kind; }
std::size_t Evaluator::input_dim() const { return impl_->in; }
std::size_t Evaluator::output_dim() const { return impl_->out; }

std::vector<Scalar> Evaluator::operator()(const std::vector<Scalar>& x) const {
    if (x.size() != impl_->in) throw std::invalid_argument("evaluate: dimension mismatch");
    std::vector<Scalar> out;
    switch (impl_->kind.tag) {
        case ScalarKind::Tag::f64: {
            std::vector<double> xs;
            for (const auto& s : x) xs.push_back(s.to_double());
            for (double d : impl_->run_f64(xs)) out.emplace_back(d);
            break;
        }
        case ScalarKind::Tag::rational: {
            std::vector<mpq_class> xs;
            for (const auto& s : x) xs.push_back(s.to_rational());
            for (auto& q : impl_->run_rat(std::move(xs))) out.emplace_back(std::move(q));
            break;
        }
        case ScalarKind::Tag::bigfloat: {
            std::vector<BigFloat> xs;
            for (const auto& s : x) xs.push_back(s.to(impl_->kind).as_bigfloat());
            for (auto& b : impl_->run_big(std::move(xs))) out.emplace_back(std::move(b));
            break;
        }
    }
    return out;
}

std::vector<double> Evaluator::eval_double(std::span<const double> x) const {
    if (x.size() != impl_->in) throw std::invalid_argument("evaluate: dimension mismatch");
    switch (impl_->kind.tag) {
        case ScalarKind::Tag::f64: return impl_->run_f64(x);
        case ScalarKind::Tag::rational: {
            std::vector<mpq_class> xs;
            for (double d : x) xs.emplace_back(d);
            std::vector<double> out;
            for (auto& q : impl_->run_rat(std::move(xs))) out.push_back(q.get_d());
            return out;
        }
        case ScalarKind::Tag::bigfloat: {
            std::vector<BigFloat> xs;
            for (double d : x) xs.emplace_back(d, impl_->kind.bits);
            std::vector<double> out;
            for (auto& b : impl_->run_big(std::move(xs))) out.push_back(b.to_double());
            return out;
        }
    }
    return {};
}

std::vector<std::vector<double>> Evaluator::eval_batch(const std::vector<std::vector<double>>& points,
                                                       unsigned threads) const {
    std::vector<std::vector<double>> out(points.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(points.size(), 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) out[i] = eval_double(points[i]);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < points.size(); i += threads) out[i] = eval_double(points[i]);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

// ---- size accounting ----

SizeReport size_report(const Network& net) {
    SizeReport r;
    r.depth = net.depth();
    r.max_magnitude = Scalar::zero(net.kind());
    for (auto d : net.dims()) r.width = std::max(r.width, d);
    for (const auto& l : net.layers()) {
        r.param_count += l.W.rows() * (l.W.cols() + 1);
        r.nonzero_count += l.W.nonzeros();
        for (std::size_t i = 0; i < l.W.rows(); ++i) {
            for (const auto& e : l.W.row(i))
                if (e.value.abs() > r.max_magnitude) r.max_magnitude = e.value.abs();
            if (!l.v[i].is_zero()) {
                ++r.nonzero_count;
                if (l.v[i].abs() > r.max_magnitude) r.max_magnitude = l.v[i].abs();
            }
        }
    }
    return r;
}

// ---- combinators ----

namespace {

std::vector<Scalar> zeros(std::size_t n, const ScalarKind& k) { return std::vector<Scalar>(n, Scalar::zero(k)); }

// Copies `m` into builder `b` at offset (r0, c0).
void place(Matrix::Builder& b, const Matrix& m, std::size_t r0, std::size_t c0) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (const auto& e : m.row(i)) b.add(r0 + i, c0 + e.col, e.value);
}

}  // namespace

Network identity_net(std::size_t D, ScalarKind kind) {
    if (D == 0) throw std::invalid_argument("identity_net: D must be positive");
    Matrix::Builder w0(2 * D, D, kind), w1(D, 2 * D, kind);
    for (std::size_t i = 0; i < D; ++i) {
        w0.add(i, i, 1);
        w0.add(D + i, i, -1);
        w1.add(i, i, 1);
        w1.add(i, D + i, -1);
    }
    std::vector<Layer> layers;
    layers.push_back({w0.build(), zeros(2 * D, kind)});
    layers.push_back({w1.build(), zeros(D, kind)});
    return Network(kind, std::move(layers));
}

Network affine_net(const Matrix& A, const std::vector<Scalar>& b) {
    if (A.rows() != b.size()) throw std::invalid_argument("affine_net: shape mismatch");
    ScalarKind k = A.kind();
    for (const auto& s : b) k = common_kind(k, s.kind());
    std::vector<Layer> layers;
    std::vector<Scalar> bias;
    for (const auto& s : b) bias.push_back(s.to(k));
    layers.push_back({A.to(k), std::move(bias)});
    return Network(k, std::move(layers));
}

Network affine_net(const std::vector<std::vector<Scalar>>& A, const std::vector<Scalar>& b) {
    ScalarKind k = b.empty() ? ScalarKind::rational() : b[0].kind();
    for (const auto& row : A)
        for (const auto& s : row) k = common_kind(k, s.kind());
    for (const auto& s : b) k = common_kind(k, s.kind());
    return affine_net(Matrix::from_dense(A, k), b);
}

Network projection_net(std::size_t D, const std::vector<std::size_t>& idx, ScalarKind kind) {
    Matrix::Builder b(idx.size(), D, kind);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= D) throw std::out_of_range("projection_net: index out of range");
        b.add(i, idx[i], 1);
    }
    return affine_net(b.build(), zeros(idx.size(), kind));
}

Network compose(const Network& f_in, const Network& g_in) {
    if (f_in.input_dim() != g_in.output_dim()) throw std::invalid_argument("compose: dimension mismatch");
    ScalarKind k = common_kind(f_in.kind(), g_in.kind());
    Network f = f_in.to(k), g = g_in.to(k);
    const Layer& gl = g.layers().back();
    const Layer& f0 = f.layers().front();

    // Merged affine map: W_f0 (W_gL h + v_gL) + v_f0.
    Matrix::Builder wb(f0.W.rows(), gl.W.cols(), k);
    std::vector<Scalar> bias = f0.v;
    for (std::size_t i = 0; i < f0.W.rows(); ++i) {
        for (const auto& e : f0.W.row(i)) {
            for (const auto& ge : gl.W.row(e.col)) wb.add(i, ge.col, e.value * ge.value);
            if (!gl.v[e.col].is_zero()) bias[i] = bias[i] + e.value * gl.v[e.col];
        }
    }
    std::vector<Layer> layers(g.layers().begin(), g.layers().end() - 1);
    layers.push_back({wb.build(), std::move(bias)});
    layers.insert(layers.end(), f.layers().begin() + 1, f.layers().end());
    return Network(k, std::move(layers));
}

Network depth_align(const Network& net, std::size_t target_depth) {
    if (target_depth < net.depth()) throw std::invalid_argument("depth_align: target below current depth");
    Network out = net;
    Network id = identity_net(net.output_dim(), net.kind());
    while (out.depth() < target_depth) out = compose(id, out);
    return out;
}

Network parallelize(const Network& f_in, const Network& g_in) {
    if (f_in.input_dim() != g_in.input_dim()) throw std::invalid_argument("parallelize: input-dimension mismatch");
    ScalarKind k = common_kind(f_in.kind(), g_in.kind());
    std::size_t L = std::max(f_in.depth(), g_in.depth());
    Network f = depth_align(f_in.to(k), L), g = depth_align(g_in.to(k), L);
    std::vector<Layer> layers;
    for (std::size_t i = 0; i <= L; ++i) {
        const Layer& a = f.layers()[i];
        const Layer& b = g.layers()[i];
        std::size_t cols = i == 0 ? a.W.cols() : a.W.cols() + b.W.cols();
        Matrix::Builder wb(a.W.rows() + b.W.rows(), cols, k);
        place(wb, a.W, 0, 0);
        place(wb, b.W, a.W.rows(), i == 0 ? 0 : a.W.cols());
        std::vector<Scalar> v = a.v;
        v.insert(v.end(), b.v.begin(), b.v.end());
        layers.push_back({wb.build(), std::move(v)});
    }
    return Network(k, std::move(layers));
}

Network parallelize(const std::vector<Network>& nets) {
    if (nets.empty()) throw std::invalid_argument("parallelize: empty list");
    Network acc = nets[0];
    for (std::size_t i = 1; i < nets.size(); ++i) acc = parallelize(acc, nets[i]);
    return acc;
}

Network direct_sum(const Network& f_in, const Network& g_in) {
    ScalarKind k = common_kind(f_in.kind(), g_in.kind());
    std::size_t L = std::max(f_in.depth(), g_in.depth());
    Network f = depth_align(f_in.to(k), L), g = depth_align(g_in.to(k), L);
    std::vector<Layer> layers;
    for (std::size_t i = 0; i <= L; ++i) {
        const Layer& a = f.layers()[i];
        const Layer& b = g.layers()[i];
        Matrix::Builder wb(a.W.rows() + b.W.rows(), a.W.cols() + b.W.cols(), k);
        place(wb, a.W, 0, 0);
        place(wb, b.W, a.W.rows(), a.W.cols());
        std::vector<Scalar> v = a.v;
        v.insert(v.end(), b.v.begin(), b.v.end());
        layers.push_back({wb.build(), std::move(v)});
    }
    return Network(k, std::move(layers));
}

Network direct_sum(const std::vector<Network>& nets) {
    if (nets.empty()) throw std::invalid_argument("direct_sum: empty list");
    Network acc = nets[0];
    for (std::size_t i = 1; i < nets.size(); ++i) acc = direct_sum(acc, nets[i]);
    return acc;
}

Network scaling_chain(long s_plus_r, std::size_t L, ScalarKind kind) {
    if (s_plus_r < 0 || L < 1) throw std::invalid_argument("scaling_chain: need s_plus_r >= 0 and L >= 1");
    Scalar a = pow2_frac(s_plus_r, static_cast<long>(L), kind);
    std::vector<Layer> layers;
    for (std::size_t i = 0; i < L; ++i) {
        Matrix::Builder b(1, 1, kind);
        b.add(0, 0, a);
        layers.push_back({b.build(), zeros(1, kind)});
    }
    Matrix::Builder last(1, 1, kind);
    last.add(0, 0, 1);
    layers.push_back({last.build(), zeros(1, kind)});
    return Network(kind, std::move(layers));
}

}  // namespace relusynth
