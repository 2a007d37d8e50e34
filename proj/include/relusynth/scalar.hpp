#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <string>
#include <variant>

namespace relusynth {

// Owning wrapper around an MPFR value with explicit precision.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t bits = 256);
    BigFloat(double v, mpfr_prec_t bits);
    BigFloat(const mpq_class& q, mpfr_prec_t bits);
    BigFloat(const BigFloat& o);
    BigFloat(BigFloat&& o) noexcept;
    BigFloat& operator=(const BigFloat& o);
    BigFloat& operator=(BigFloat&& o) noexcept;
    ~BigFloat();

    mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    // Hex-mantissa form, e.g. "0x1.8p+1"; round-trips every bit.
    std::string to_hex() const;
    static BigFloat from_string(const std::string& s, mpfr_prec_t bits);

private:
    mpfr_t v_;
    bool live_ = false;
};

struct ScalarKind {
    enum class Tag { f64, bigfloat, rational };
    Tag tag = Tag::f64;
    int bits = 0;  // mantissa bits, bigfloat only

    static ScalarKind f64() { return {Tag::f64, 0}; }
    static ScalarKind rational() { return {Tag::rational, 0}; }
    static ScalarKind bigfloat(int bits);

    bool operator==(const ScalarKind&) const = default;
    std::string name() const;            // "f64", "rational", "bigfloat:256"
    static ScalarKind parse(const std::string& s);
};

// Smallest kind both operands convert into without loss of the weaker one.
ScalarKind common_kind(const ScalarKind& a, const ScalarKind& b);

class Scalar {
public:
    Scalar() : v_(0.0) {}
    Scalar(double d) : v_(d) {}
    Scalar(int i) : v_(mpq_class(i)) {}
    Scalar(const mpq_class& q) : v_(q) { std::get<mpq_class>(v_).canonicalize(); }
    Scalar(mpq_class&& q) : v_(std::move(q)) { std::get<mpq_class>(v_).canonicalize(); }
    Scalar(const BigFloat& b) : v_(b) {}
    Scalar(BigFloat&& b) : v_(std::move(b)) {}

    static Scalar zero(const ScalarKind& k);
    static Scalar from_rational(const mpq_class& q, const ScalarKind& k);
    static Scalar from_double(double d, const ScalarKind& k);

    ScalarKind kind() const;
    Scalar to(const ScalarKind& k) const;

    bool is_f64() const { return std::holds_alternative<double>(v_); }
    bool is_rational() const { return std::holds_alternative<mpq_class>(v_); }
    bool is_bigfloat() const { return std::holds_alternative<BigFloat>(v_); }

    double as_double() const { return std::get<double>(v_); }
    const mpq_class& as_rational() const { return std::get<mpq_class>(v_); }
    const BigFloat& as_bigfloat() const { return std::get<BigFloat>(v_); }

    double to_double() const;
    // Exact for f64 and rational; bigfloat values are converted exactly too.
    mpq_class to_rational() const;

    bool is_zero() const;
    bool is_finite() const;
    int sign() const;
    Scalar abs() const;

    std::string to_string() const;  // serialization form for its kind
    static Scalar parse(const std::string& s, const ScalarKind& k);

    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    friend Scalar operator/(const Scalar& a, const Scalar& b);
    Scalar operator-() const;
    Scalar& operator+=(const Scalar& b) { return *this = *this + b; }

    friend int compare(const Scalar& a, const Scalar& b);
    friend bool operator<(const Scalar& a, const Scalar& b) { return compare(a, b) < 0; }
    friend bool operator>(const Scalar& a, const Scalar& b) { return compare(a, b) > 0; }
    friend bool operator<=(const Scalar& a, const Scalar& b) { return compare(a, b) <= 0; }
    friend bool operator>=(const Scalar& a, const Scalar& b) { return compare(a, b) >= 0; }
    friend bool operator==(const Scalar& a, const Scalar& b) { return compare(a, b) == 0; }

    Scalar relu() const { return sign() > 0 ? *this : zero(kind()); }

private:
    std::variant<double, mpq_class, BigFloat> v_;
};

// Exact powers used throughout the constructions.
mpq_class pow2q(long e);
mpq_class pow3q(long e);
// 2^(num/den) in the given kind; exact when den divides num and kind is rational.
Scalar pow2_frac(long num, long den, const ScalarKind& k);

}  // namespace relusynth
