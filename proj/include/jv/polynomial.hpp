#pragma once

// Dense univariate polynomials with integer coefficients, exact gcd,
// resultants and factorization over Q.

#include "jv/numerics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jv {

class IntegerPolynomial {
public:
    IntegerPolynomial() = default;
    // coefficients lowest degree first; trailing zeros are dropped
    explicit IntegerPolynomial(std::vector<BigInt> coeffs);
    static IntegerPolynomial constant(const BigInt& c);
    static IntegerPolynomial x();

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<BigInt>& coefficients() const { return coeffs_; }
    BigInt coeff(int k) const;
    const BigInt& leading() const;
    BigInt content() const;
    // content removed and leading coefficient made positive
    IntegerPolynomial primitive_part() const;
    BigInt height() const;

    IntegerPolynomial operator+(const IntegerPolynomial& o) const;
    IntegerPolynomial operator-(const IntegerPolynomial& o) const;
    IntegerPolynomial operator*(const IntegerPolynomial& o) const;
    IntegerPolynomial operator-() const;
    IntegerPolynomial scaled(const BigInt& k) const;
    IntegerPolynomial derivative() const;

    BigInt evaluate(const BigInt& x) const;
    BigRat evaluate(const BigRat& x) const;
    FixedComplex evaluate(const FixedComplex& z) const;

    std::string to_string() const;
    bool operator==(const IntegerPolynomial& o) const { return coeffs_ == o.coeffs_; }

    // Set by factor() on the factors it returns.
    std::optional<bool> irreducible;

private:
    void trim();
    std::vector<BigInt> coeffs_;
};

// Quotient when q divides p with an integer quotient.
std::optional<IntegerPolynomial> divide_exact(const IntegerPolynomial& p, const IntegerPolynomial& q);
// Greatest common divisor over Q as a primitive integer polynomial.
IntegerPolynomial poly_gcd(const IntegerPolynomial& p, const IntegerPolynomial& q);
bool is_squarefree(const IntegerPolynomial& p);

BigInt resultant(const IntegerPolynomial& p, const IntegerPolynomial& q);
BigInt discriminant(const IntegerPolynomial& p);
// Determinant of a square integer matrix by fraction-free elimination.
BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m);

// Approximate complex roots of a squarefree polynomial. The returned values
// carry no error bound; callers confirm anything they conclude exactly.
std::vector<FixedComplex> complex_roots(const IntegerPolynomial& p, int bits);

// Irreducible primitive factors over Q, with multiplicity, leading
// coefficients positive. Constant content is not reported.
std::vector<IntegerPolynomial> factor(const IntegerPolynomial& p);
bool is_irreducible(const IntegerPolynomial& p);
// The irreducible factor of p having a root closest to z.
IntegerPolynomial factor_vanishing_at(const IntegerPolynomial& p, const FixedComplex& z);

} // namespace jv
