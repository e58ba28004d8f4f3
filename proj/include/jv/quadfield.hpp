#pragma once

// Exact arithmetic in real quadratic fields Q(sqrt d): quadratic irrationals,
// periodic continued fractions, units of orders and the SL2(Z) / GL2(Z)
// equivalence of quadratic irrationals.

#include "jv/numerics.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace jv {

bool is_square_free(long n);

/// (a + b sqrt d) / c with c > 0 and gcd(a, b, c) = 1. d is square-free and
/// at least 2; b = 0 is allowed so the type is closed under field
/// operations, but is_rational() callers must reject it where an
/// irrationality is required.
class QuadraticIrrational {
public:
    QuadraticIrrational(BigInt a, BigInt b, BigInt c, long d);
    static QuadraticIrrational sqrt_of(long d) { return {0, 1, 1, d}; }
    static QuadraticIrrational integer(const BigInt& n, long d) { return {n, 0, 1, d}; }

    const BigInt& a() const { return a_; }
    const BigInt& b() const { return b_; }
    const BigInt& c() const { return c_; }
    long d() const { return d_; }
    bool is_rational() const { return b_ == 0; }

    QuadraticIrrational operator+(const QuadraticIrrational& o) const;
    QuadraticIrrational operator-(const QuadraticIrrational& o) const;
    QuadraticIrrational operator*(const QuadraticIrrational& o) const;
    QuadraticIrrational operator/(const QuadraticIrrational& o) const;
    QuadraticIrrational operator-() const;
    QuadraticIrrational operator+(const BigInt& n) const;
    QuadraticIrrational operator-(const BigInt& n) const;
    QuadraticIrrational conjugate() const;
    QuadraticIrrational reciprocal() const;

    BigRat norm() const;
    BigRat trace() const;
    BigInt floor() const;
    BigInt ceil() const;
    // sign of the value under the embedding sqrt d > 0
    int sign() const;

    bool operator==(const QuadraticIrrational& o) const = default;
    bool operator<(const QuadraticIrrational& o) const { return (*this - o).sign() < 0; }
    bool operator>(const QuadraticIrrational& o) const { return (*this - o).sign() > 0; }

    FixedReal to_fixed(int bits) const;
    double to_double() const;
    std::string to_string() const;
    std::size_t hash() const;

private:
    void normalize();
    void require_same_field(const QuadraticIrrational& o) const;

    BigInt a_, b_, c_;
    long d_;
};

enum class FieldKind { real, imaginary };

/// The order Z + conductor * O_K in Q(sqrt d) (real) or Q(sqrt -d)
/// (imaginary).
struct OrderDescriptor {
    FieldKind kind = FieldKind::real;
    long d = 2;
    long conductor = 1;

    // d or 4d (real), -d or -4d (imaginary), by the residue of d mod 4.
    BigInt fundamental_discriminant() const;
    BigInt discriminant() const;
    bool operator==(const OrderDescriptor&) const = default;
};

OrderDescriptor real_order(long d, long conductor = 1);
OrderDescriptor imaginary_order(long d, long conductor = 1);

struct CFExpansion {
    std::vector<BigInt> preperiod;
    std::vector<BigInt> period;
    bool operator==(const CFExpansion&) const = default;
};

CFExpansion cf_expand(const QuadraticIrrational& theta);
// Exact value of an eventually periodic continued fraction in Q(sqrt d).
QuadraticIrrational cf_value(const CFExpansion& cf, long d);

/// A unit > 1 of a real quadratic order.
struct UnitElement {
    QuadraticIrrational value;
    int norm = 1;
};

// The smallest unit > 1 of the order; every unit is +-(result)^n.
UnitElement fundamental_unit(const OrderDescriptor& order);
// True when x lies in Z + conductor * O_K.
bool in_order(const QuadraticIrrational& x, const OrderDescriptor& order);

/// Integer 2x2 matrix (a b; c d) acting by x -> (a x + b) / (c x + d).
struct Mat2 {
    BigInt a = 1, b = 0, c = 0, d = 1;
    BigInt det() const { return a * d - b * c; }
    Mat2 operator*(const Mat2& o) const;
    Mat2 inverse() const;  // requires det = +-1
    bool operator==(const Mat2&) const = default;
};

QuadraticIrrational apply(const Mat2& m, const QuadraticIrrational& x);

/// Equivalence verdicts under both the proper (det +1) and the wide
/// (det +-1) modular group, with witnesses.
struct EquivalenceVerdict {
    bool sl2 = false;
    bool gl2 = false;
    std::optional<Mat2> sl2_witness;
    std::optional<Mat2> gl2_witness;
};

EquivalenceVerdict sl2_equivalent(const QuadraticIrrational& theta, const QuadraticIrrational& theta2);

} // namespace jv
