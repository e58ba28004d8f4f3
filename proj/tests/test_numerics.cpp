#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jv/errors.hpp"
#include "jv/numerics.hpp"

#include <random>

using namespace jv;

namespace {

BigInt pow2(int k) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(k));
    return r;
}

// e^x for small rational x from the exact Taylor polynomial; the remainder
// after 400 terms is far below 2^-1000 for |x| <= 4.
BigRat exp_rational(const BigRat& x) {
    BigRat sum = 1, term = 1;
    for (int n = 1; n < 400; ++n) {
        term = term * x / n;
        sum += term;
    }
    return sum;
}

} // namespace

TEST_CASE("sqrt_fixed exact and derived cases") {
    const FixedReal zero = sqrt_fixed(0, 64);
    CHECK(zero.mantissa() == 0);
    CHECK(zero.err_ulps() == 0);

    const FixedReal four = sqrt_fixed(16, 64);
    CHECK(four.mantissa() == 4 * pow2(64));
    CHECK(four.err_ulps() == 0);

    const FixedReal r2 = sqrt_fixed(2, 256);
    CHECK(r2.err_ulps() <= 2);
    // |m^2 / 2^512 - 2| < 2^-250, checked on integers
    const BigInt diff = abs(r2.mantissa() * r2.mantissa() - 2 * pow2(512));
    CHECK(diff < pow2(512 - 250));
    // within 4 ulps at scale 256 when squared
    CHECK(diff <= 4 * pow2(256));

    CHECK_THROWS_AS(sqrt_fixed(BigInt(-1), 64), DomainError);
}

TEST_CASE("exp_cis identity, half turn and sixth root of unity") {
    const FixedComplex one = exp_cis(FixedReal(0, 128), 128);
    CHECK(one.re().indistinguishable(FixedReal::from_int(1, 128)));
    CHECK(one.im().indistinguishable(FixedReal(0, 128)));
    CHECK(one.err_ulps() <= 8);

    const FixedComplex half = exp_cis(FixedReal::from_rational(1, 2, 128), 128);
    CHECK(abs(half.re().mantissa() + pow2(128)) <= 8);
    CHECK(abs(half.im().mantissa()) <= 8);
    CHECK(half.err_ulps() <= 8);

    const FixedComplex w = exp_cis(FixedReal::from_rational(1, 6, 256), 256);
    CHECK(w.err_ulps() <= 16);
    const FixedComplex cube = w * w * w + FixedComplex::from_int(1, 256);
    // every point of the error box is within 2^-240 of zero
    CHECK(abs(cube.re().mantissa()) + cube.re().err_ulps() < pow2(256 - 240));
    CHECK(abs(cube.im().mantissa()) + cube.im().err_ulps() < pow2(256 - 240));
}

TEST_CASE("exp_cis reduces theta modulo one exactly") {
    const int p = 192;
    const FixedReal theta = FixedReal::from_rational(7, 5, p);
    const FixedReal shifted = theta + FixedReal::from_int(-12, p);
    const FixedComplex a = exp_cis(theta, p), b = exp_cis(shifted, p);
    CHECK(a.re().mantissa() == b.re().mantissa());
    CHECK(a.im().mantissa() == b.im().mantissa());
}

TEST_CASE("log_fixed near one and on e^2") {
    const int p = 128;
    const FixedReal x = FixedReal(pow2(p) + 1, p);
    const FixedReal l = log_fixed(x, p);
    CHECK(abs(l.mantissa() - 1) <= 2);

    const FixedReal e2 = FixedReal::from_rational(exp_rational(2), p);
    const FixedReal two = log_fixed(e2, p);
    CHECK(abs(two.mantissa() - 2 * pow2(p)) <= 8);

    CHECK_THROWS_AS(log_fixed(FixedReal::from_int(1, p), p), DomainError);
    CHECK_THROWS_AS(log_fixed(FixedReal::from_rational(1, 2, p), p), DomainError);
}

TEST_CASE("log of 4 + sqrt 15 round-trips through exp") {
    const int p = 256;
    const FixedReal eps = FixedReal::from_int(4, p) + sqrt_fixed(15, p);
    const FixedReal mu = log_fixed(eps, p);
    // digits frozen from an independent 40-digit evaluation
    CHECK(mu.to_decimal(30) == "2.063437068895560546727281172620");
    const FixedReal back = exp_fixed(mu, p);
    CHECK(back.indistinguishable(eps));
    CHECK(abs(back.mantissa() - eps.mantissa()) <= 8);
}

TEST_CASE("pi and ln2 digits") {
    CHECK(pi(200).to_decimal(30) == "3.141592653589793238462643383280");
    CHECK(ln2(200).to_decimal(20) == "0.69314718055994530942");
    CHECK(pi(333).err_ulps() <= 2);
}

TEST_CASE("exp_complex agrees with exp times cis") {
    const int p = 256;
    const FixedReal x = FixedReal::from_rational(3, 7, p);
    const FixedReal y = FixedReal::from_rational(-22, 3, p);
    const FixedComplex direct = exp_complex(FixedComplex(x, y), p);
    const FixedReal turns = y / pi(p).shifted(1);
    const FixedComplex split = exp_cis(turns, p) * exp_fixed(x, p);
    CHECK(direct.indistinguishable(split));
}

TEST_CASE("fixed-point arithmetic propagates error bounds") {
    const int p = 96;
    const FixedReal a = FixedReal::from_rational(1, 3, p);
    const FixedReal b = FixedReal::from_rational(2, 7, p);
    // a*b and a/b land within their bounds of the exact rationals
    const FixedReal prod = a * b;
    const FixedReal quot = a / b;
    CHECK(prod.indistinguishable(FixedReal::from_rational(2, 21, p + 40)));
    CHECK(quot.indistinguishable(FixedReal::from_rational(7, 6, p + 40)));
    CHECK_THROWS_AS(a / FixedReal(1, p, 2), DomainError);
    CHECK(FixedReal(5, p, 5).sign() == 0);
    CHECK(FixedReal(-6, p, 5).sign() == -1);
}

// ------------------------------------------------------------ properties

TEST_CASE("property: exp(log x) round-trip for random x in (1, 1e6)") {
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<long> num(1, 1'000'000'000L);
    const int p = 128;
    for (int i = 0; i < 200; ++i) {
        const long n = num(rng);
        const long d = 1 + static_cast<long>(rng() % 999);
        if (n <= d) continue;
        const FixedReal x = FixedReal::from_rational(BigInt(n), BigInt(d), p);
        const FixedReal back = exp_fixed(log_fixed(x, p), p);
        // 16 ulps relative to max(1, x)
        const BigInt allowed = 16 * (x.floor() + 1);
        CHECK(abs(back.mantissa() - x.mantissa()) <= allowed);
        CHECK(back.indistinguishable(x));
    }
}

TEST_CASE("property: higher precision agrees within the lower bound") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 50; ++i) {
        const long n = 1 + static_cast<long>(rng() % 100000);
        const long d = 1 + static_cast<long>(rng() % 997);
        const int p = 128 + static_cast<int>(rng() % 128);
        const FixedReal lo = FixedReal::from_rational(BigInt(n + d), BigInt(d), p);
        const FixedReal hi = FixedReal::from_rational(BigInt(n + d), BigInt(d), p + 64);
        CHECK(log_fixed(hi, p + 64).indistinguishable(log_fixed(lo, p)));
        const FixedReal t = FixedReal::from_rational(BigInt(n), BigInt(d), p);
        const FixedReal th = FixedReal::from_rational(BigInt(n), BigInt(d), p + 64);
        CHECK(exp_cis(th, p + 64).indistinguishable(exp_cis(t, p)));
        CHECK(sqrt_fixed(BigInt(n), p + 64).indistinguishable(sqrt_fixed(BigInt(n), p)));
    }
}

TEST_CASE("property: |exp_cis(theta)| = 1 within the declared bound") {
    std::mt19937_64 rng(7);
    const int p = 128;
    const FixedReal one = FixedReal::from_int(1, p);
    for (int i = 0; i < 1000; ++i) {
        BigInt m = BigInt(static_cast<unsigned long>(rng())) * BigInt(static_cast<unsigned long>(rng()));
        if (rng() % 2) m = -m;
        const FixedReal theta(m, p);
        const FixedComplex v = exp_cis(theta, p);
        CHECK(v.err_ulps() <= 8);
        CHECK(v.norm2().indistinguishable(one));
    }
}
