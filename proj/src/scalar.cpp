#include "relusynth/scalar.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace relusynth {

// ---- BigFloat ----

BigFloat::BigFloat(mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
    live_ = true;
}

BigFloat::BigFloat(double v, mpfr_prec_t bits) : BigFloat(bits) { mpfr_set_d(v_, v, MPFR_RNDN); }

BigFloat::BigFloat(const mpq_class& q, mpfr_prec_t bits) : BigFloat(bits) {
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& o) : BigFloat(o.bits()) { mpfr_set(v_, o.v_, MPFR_RNDN); }

BigFloat::BigFloat(BigFloat&& o) noexcept {
    // Steal the limbs; leave `o` as an empty shell that frees nothing.
    v_[0] = o.v_[0];
    live_ = o.live_;
    o.live_ = false;
}

BigFloat& BigFloat::operator=(const BigFloat& o) {
    if (this == &o) return *this;
    if (!live_) {
        mpfr_init2(v_, o.bits());
        live_ = true;
    } else if (bits() != o.bits()) {
        mpfr_set_prec(v_, o.bits());
    }
    mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& o) noexcept {
    if (this == &o) return *this;
    if (live_) mpfr_clear(v_);
    v_[0] = o.v_[0];
    live_ = o.live_;
    o.live_ = false;
    return *this;
}

BigFloat::~BigFloat() {
    if (live_) mpfr_clear(v_);
}

std::string BigFloat::to_hex() const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%Ra", v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
}

BigFloat BigFloat::from_string(const std::string& s, mpfr_prec_t bits) {
    BigFloat b(bits);
    char* end = nullptr;
    mpfr_strtofr(b.v_, s.c_str(), &end, 0, MPFR_RNDN);
    if (end == s.c_str() || *end != '\0') throw std::invalid_argument("unparsable bigfloat: " + s);
    return b;
}

// ---- ScalarKind ----

ScalarKind ScalarKind::bigfloat(int bits) {
    if (bits < 64) throw std::invalid_argument("bigfloat needs at least 64 mantissa bits");
    return {Tag::bigfloat, bits};
}

std::string ScalarKind::name() const {
    switch (tag) {
        case Tag::f64: return "f64";
        case Tag::rational: return "rational";
        case Tag::bigfloat: return "bigfloat:" + std::to_string(bits);
    }
    return "?";
}

ScalarKind ScalarKind::parse(const std::string& s) {
    if (s == "f64") return f64();
    if (s == "rational") return rational();
    if (s.rfind("bigfloat:", 0) == 0) {
        int bits = 0;
        auto tail = s.substr(9);
        auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), bits);
        if (ec != std::errc() || p != tail.data() + tail.size())
            throw std::invalid_argument("bad scalar kind: " + s);
        return bigfloat(bits);
    }
    throw std::invalid_argument("bad scalar kind: " + s);
}

ScalarKind common_kind(const ScalarKind& a, const ScalarKind& b) {
    using T = ScalarKind::Tag;
    if (a == b) return a;
    if (a.tag == T::bigfloat || b.tag == T::bigfloat) return ScalarKind::bigfloat(std::max(a.bits, b.bits));
    return ScalarKind::rational();
}

// ---- Scalar ----

Scalar Scalar::zero(const ScalarKind& k) {
    switch (k.tag) {
        case ScalarKind::Tag::f64: return Scalar(0.0);
        case ScalarKind::Tag::rational: return Scalar(mpq_class(0));
        case ScalarKind::Tag::bigfloat: return Scalar(BigFloat(k.bits));
    }
    return Scalar();
}

Scalar Scalar::from_rational(const mpq_class& q, const ScalarKind& k) {
    switch (k.tag) {
        case ScalarKind::Tag::f64: return Scalar(q.get_d());
        case ScalarKind::Tag::rational: return Scalar(q);
        case ScalarKind::Tag::bigfloat: return Scalar(BigFloat(q, k.bits));
    }
    return Scalar();
}

Scalar Scalar::from_double(double d, const ScalarKind& k) {
    if (!std::isfinite(d)) throw std::domain_error("non-finite scalar");
    switch (k.tag) {
        case ScalarKind::Tag::f64: return Scalar(d);
        case ScalarKind::Tag::rational: return Scalar(mpq_class(d));
        case ScalarKind::Tag::bigfloat: return Scalar(BigFloat(d, k.bits));
    }
    return Scalar();
}

ScalarKind Scalar::kind() const {
    if (is_f64()) return ScalarKind::f64();
    if (is_rational()) return ScalarKind::rational();
    return ScalarKind::bigfloat(static_cast<int>(as_bigfloat().bits()));
}

double Scalar::to_double() const {
    if (is_f64()) return as_double();
    if (is_rational()) return as_rational().get_d();
    return as_bigfloat().to_double();
}

mpq_class Scalar::to_rational() const {
    if (is_f64()) return mpq_class(as_double());
    if (is_rational()) return as_rational();
    const BigFloat& b = as_bigfloat();
    if (!b.is_finite()) throw std::domain_error("non-finite bigfloat");
    if (mpfr_zero_p(b.get())) return mpq_class(0);
    mpz_class m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), b.get());
    mpq_class q(m);
    if (e >= 0) {
        mpz_class p;
        mpz_mul_2exp(p.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        q = p;
    } else {
        mpz_class d;
        mpz_ui_pow_ui(d.get_mpz_t(), 2, static_cast<unsigned long>(-e));
        q = mpq_class(m, d);
        q.canonicalize();
    }
    return q;
}

Scalar Scalar::to(const ScalarKind& k) const {
    ScalarKind mine = kind();
    if (mine == k) return *this;
    switch (k.tag) {
        case ScalarKind::Tag::f64: return Scalar(to_double());
        case ScalarKind::Tag::rational: return Scalar(to_rational());
        case ScalarKind::Tag::bigfloat: {
            BigFloat b(k.bits);
            if (is_f64()) mpfr_set_d(b.get(), as_double(), MPFR_RNDN);
            else if (is_rational()) mpfr_set_q(b.get(), as_rational().get_mpq_t(), MPFR_RNDN);
            else mpfr_set(b.get(), as_bigfloat().get(), MPFR_RNDN);
            return Scalar(std::move(b));
        }
    }
    return *this;
}

bool Scalar::is_zero() const { return sign() == 0; }

bool Scalar::is_finite() const {
    if (is_f64()) return std::isfinite(as_double());
    if (is_rational()) return true;
    return as_bigfloat().is_finite();
}

int Scalar::sign() const {
    if (is_f64()) return (as_double() > 0) - (as_double() < 0);
    if (is_rational()) return sgn(as_rational());
    return mpfr_sgn(as_bigfloat().get());
}

Scalar Scalar::abs() const { return sign() < 0 ? -*this : *this; }

std::string Scalar::to_string() const {
    if (is_f64()) {
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, as_double());
        return std::string(buf, p);
    }
    if (is_rational()) {
        const mpq_class& q = as_rational();
        return q.get_num().get_str() + "/" + q.get_den().get_str();
    }
    return as_bigfloat().to_hex();
}

Scalar Scalar::parse(const std::string& s, const ScalarKind& k) {
    switch (k.tag) {
        case ScalarKind::Tag::f64: {
            double d = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
            if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(d))
                throw std::invalid_argument("unparsable f64: " + s);
            return Scalar(d);
        }
        case ScalarKind::Tag::rational: {
            mpq_class q;
            if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0)
                throw std::invalid_argument("unparsable rational: " + s);
            q.canonicalize();
            return Scalar(std::move(q));
        }
        case ScalarKind::Tag::bigfloat: {
            BigFloat b = BigFloat::from_string(s, k.bits);
            if (!b.is_finite()) throw std::invalid_argument("non-finite bigfloat: " + s);
            return Scalar(std::move(b));
        }
    }
    throw std::invalid_argument("bad kind");
}

namespace {

using BinF = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

template <class OpD, class OpQ>
Scalar binop(const Scalar& a, const Scalar& b, OpD opd, OpQ opq, BinF opf) {
    ScalarKind ka = a.kind(), kb = b.kind();
    if (ka == kb) {
        if (a.is_f64()) return Scalar(opd(a.as_double(), b.as_double()));
        if (a.is_rational()) return Scalar(mpq_class(opq(a.as_rational(), b.as_rational())));
        BigFloat r(ka.bits);
        opf(r.get(), a.as_bigfloat().get(), b.as_bigfloat().get(), MPFR_RNDN);
        return Scalar(std::move(r));
    }
    ScalarKind k = common_kind(ka, kb);
    return binop(a.to(k), b.to(k), opd, opq, opf);
}

}  // namespace

Scalar operator+(const Scalar& a, const Scalar& b) {
    return binop(
        a, b, [](double x, double y) { return x + y; },
        [](const mpq_class& x, const mpq_class& y) { return mpq_class(x + y); }, mpfr_add);
}

Scalar operator-(const Scalar& a, const Scalar& b) {
    return binop(
        a, b, [](double x, double y) { return x - y; },
        [](const mpq_class& x, const mpq_class& y) { return mpq_class(x - y); }, mpfr_sub);
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    return binop(
        a, b, [](double x, double y) { return x * y; },
        [](const mpq_class& x, const mpq_class& y) { return mpq_class(x * y); }, mpfr_mul);
}

Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    return binop(
        a, b, [](double x, double y) { return x / y; },
        [](const mpq_class& x, const mpq_class& y) { return mpq_class(x / y); }, mpfr_div);
}

Scalar Scalar::operator-() const {
    if (is_f64()) return Scalar(-as_double());
    if (is_rational()) return Scalar(mpq_class(-as_rational()));
    BigFloat r(as_bigfloat());
    mpfr_neg(r.get(), r.get(), MPFR_RNDN);
    return Scalar(std::move(r));
}

int compare(const Scalar& a, const Scalar& b) {
    ScalarKind ka = a.kind(), kb = b.kind();
    if (ka == kb) {
        if (a.is_f64()) return (a.as_double() > b.as_double()) - (a.as_double() < b.as_double());
        if (a.is_rational()) return cmp(a.as_rational(), b.as_rational());
        return mpfr_cmp(a.as_bigfloat().get(), b.as_bigfloat().get());
    }
    // Exact comparison across kinds.
    return cmp(a.to_rational(), b.to_rational());
}

mpq_class pow2q(long e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
    return e >= 0 ? mpq_class(p) : mpq_class(mpz_class(1), p);
}

mpq_class pow3q(long e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 3, static_cast<unsigned long>(e < 0 ? -e : e));
    return e >= 0 ? mpq_class(p) : mpq_class(mpz_class(1), p);
}

Scalar pow2_frac(long num, long den, const ScalarKind& k) {
    if (den <= 0) throw std::invalid_argument("pow2_frac: den must be positive");
    if (num % den == 0) return Scalar::from_rational(pow2q(num / den), k);
    switch (k.tag) {
        case ScalarKind::Tag::rational:
            throw std::domain_error("2^(p/q) is irrational; rational kind unavailable");
        case ScalarKind::Tag::f64: return Scalar(std::exp2(static_cast<double>(num) / static_cast<double>(den)));
        case ScalarKind::Tag::bigfloat: {
            BigFloat e(mpq_class(num, den), k.bits + 16);
            BigFloat r(k.bits);
            mpfr_ui_pow(r.get(), 2, e.get(), MPFR_RNDN);
            return Scalar(std::move(r));
        }
    }
    return Scalar();
}

}  // namespace relusynth
