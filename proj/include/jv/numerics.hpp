#pragma once

// Binary fixed-point reals and complexes over GMP integers.
//
// A FixedReal is mantissa / 2^bits together with an error bound err_ulps,
// counted in units of 2^-bits. Every operation returns a bound that covers the
// true error given the bounds of its inputs; nothing is ever dropped. Values
// are immutable once built.

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace jv {

using BigInt = mpz_class;
using BigRat = mpq_class;

class FixedReal {
public:
    FixedReal() = default;
    FixedReal(BigInt mantissa, int bits, BigInt err_ulps = 0);

    static FixedReal from_int(const BigInt& n, int bits);
    // Nearest fixed-point value to num/den; error at most one ulp.
    static FixedReal from_rational(const BigInt& num, const BigInt& den, int bits);
    static FixedReal from_rational(const BigRat& q, int bits);

    const BigInt& mantissa() const { return mantissa_; }
    int bits() const { return bits_; }
    const BigInt& err_ulps() const { return err_; }

    // Re-expresses the value at another precision. Widening is exact;
    // narrowing rounds and folds the rounding into the error bound.
    FixedReal at(int bits) const;
    FixedReal without_error() const { return FixedReal(mantissa_, bits_, 0); }
    FixedReal with_extra_error(const BigInt& ulps) const;

    FixedReal operator-() const;
    FixedReal operator+(const FixedReal& o) const;
    FixedReal operator-(const FixedReal& o) const;
    FixedReal operator*(const FixedReal& o) const;
    FixedReal operator/(const FixedReal& o) const;
    FixedReal mul_int(const BigInt& k) const;
    FixedReal div_int(const BigInt& k) const;
    // Multiplication by 2^k.
    FixedReal shifted(int k) const;

    FixedReal abs() const;

    // +1 / -1 when the sign is certain, 0 when the value cannot be told apart
    // from zero.
    int sign() const;
    bool certainly_positive() const { return sign() > 0; }
    // |a - b| <= err(a) + err(b), measured at the finer of the two scales.
    bool indistinguishable(const FixedReal& o) const;

    BigInt round_to_integer() const;
    BigInt floor() const;
    // Upper bound on |value| in ulps: |mantissa| + err.
    BigInt magnitude_ulps() const;

    double to_double() const;
    // Rounded decimal rendering with the given count of fractional digits.
    std::string to_decimal(int digits) const;
    // Number of low-order bits swallowed by the error bound.
    int error_bits() const;
    // Upper bound on log10 of the absolute error (value units).
    double error_log10() const;

private:
    BigInt mantissa_ = 0;
    int bits_ = 64;
    BigInt err_ = 0;
};

class FixedComplex {
public:
    FixedComplex() = default;
    FixedComplex(FixedReal re, FixedReal im);
    static FixedComplex from_real(const FixedReal& re);
    static FixedComplex from_int(const BigInt& n, int bits);

    const FixedReal& re() const { return re_; }
    const FixedReal& im() const { return im_; }
    int bits() const { return re_.bits(); }

    FixedComplex at(int bits) const;
    FixedComplex without_error() const;

    FixedComplex operator-() const;
    FixedComplex operator+(const FixedComplex& o) const;
    FixedComplex operator-(const FixedComplex& o) const;
    FixedComplex operator*(const FixedComplex& o) const;
    FixedComplex operator/(const FixedComplex& o) const;
    FixedComplex operator*(const FixedReal& o) const;
    FixedComplex mul_int(const BigInt& k) const;
    FixedComplex div_int(const BigInt& k) const;
    FixedComplex shifted(int k) const;
    FixedComplex conj() const;

    // |z|^2 and |z|; the modulus is always derived, never stored.
    FixedReal norm2() const;
    FixedReal modulus() const;
    bool indistinguishable(const FixedComplex& o) const;
    // Largest component error, in ulps.
    BigInt err_ulps() const;

private:
    FixedReal re_;
    FixedReal im_;
};

// Number of bits needed to represent the given count of decimal digits.
int bits_for_digits(int digits);
double digits_for_bits(int bits);

// pi to the given precision; computed once per precision and cached.
FixedReal pi(int bits);
FixedReal ln2(int bits);

// floor(sqrt(n) * 2^bits) rounded to nearest; error at most one ulp.
FixedReal sqrt_fixed(const BigInt& n, int bits);
FixedReal sqrt_fixed(const FixedReal& x);

// cos(2 pi theta) + i sin(2 pi theta).
FixedComplex exp_cis(const FixedReal& theta, int bits);
FixedComplex exp_cis(const FixedReal& theta);
FixedReal exp_fixed(const FixedReal& x, int bits);
FixedReal exp_fixed(const FixedReal& x);
// Natural logarithm on x > 1. Throws DomainError otherwise.
FixedReal log_fixed(const FixedReal& x, int bits);
FixedReal log_fixed(const FixedReal& x);
// Complex exponential by its own Taylor series (independent of exp_cis).
FixedComplex exp_complex(const FixedComplex& w, int bits);

} // namespace jv
