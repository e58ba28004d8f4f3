#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jv/errors.hpp"
#include "jv/quadfield.hpp"
#include "pell_oracle.hpp"

#include <random>

using namespace jv;

namespace {

using QI = QuadraticIrrational;

std::vector<BigInt> ints(std::initializer_list<long> xs) {
    std::vector<BigInt> v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

// [a0; a1, ..., a_{k-1}, tail] evaluated exactly from the back
QI reconstruct(const std::vector<BigInt>& terms, const QI& tail) {
    QI x = tail;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) x = x.reciprocal() + *it;
    return x;
}

// the order generator's unit as (t + u sqrt Disc) / 2 in terms of sqrt d
QI unit_from_pell(long d, long f, const oracle::PellSolution& s) {
    const long g = (d % 4 == 1) ? f : 2 * f;
    return QI(BigInt(static_cast<unsigned long>(s.t)), BigInt(static_cast<unsigned long>(s.u)) * g, 2, d);
}

QI power(const QI& x, int n) {
    QI r = QI::integer(1, x.d());
    for (int i = 0; i < n; ++i) r = r * x;
    return r;
}

} // namespace

TEST_CASE("canonical form and field arithmetic") {
    const QI x(2, 4, -6, 3);
    CHECK(x.a() == -1);
    CHECK(x.b() == -2);
    CHECK(x.c() == 3);
    const QI s = QI::sqrt_of(7);
    CHECK(s * s == QI::integer(7, 7));
    CHECK((s + 1) / (s + 1) == QI::integer(1, 7));
    CHECK((s - 3).sign() < 0);
    CHECK(s.floor() == 2);
    CHECK((-s).floor() == -3);
    CHECK(QI(1, 1, 2, 5).to_string() == "(1+sqrt(5))/2");
    CHECK_THROWS_AS(QI::integer(0, 7).reciprocal(), DomainError);
    CHECK_THROWS_AS(QI(1, 1, 1, 8), DomainError);
    CHECK_THROWS_AS(s + QI::sqrt_of(3), DomainError);
    CHECK(QI::sqrt_of(2).to_fixed(128).to_decimal(20) == "1.41421356237309504880");
}

TEST_CASE("continued fraction examples reconstruct exactly") {
    const CFExpansion r2 = cf_expand(QI::sqrt_of(2));
    CHECK(r2.preperiod == ints({1}));
    CHECK(r2.period == ints({2}));
    // tail y = [2; 2, ...] satisfies y = 2 + 1/y, so y = 1 + sqrt 2
    CHECK(reconstruct(r2.preperiod, QI(1, 1, 1, 2)) == QI::sqrt_of(2));
    CHECK(cf_value(r2, 2) == QI::sqrt_of(2));

    const QI phi(1, 1, 2, 5);
    const CFExpansion g = cf_expand(phi);
    CHECK(g.preperiod.empty());
    CHECK(g.period == ints({1}));
    CHECK(phi == phi.reciprocal() + 1);
    CHECK(cf_value(g, 5) == phi);

    const CFExpansion r15 = cf_expand(QI::sqrt_of(15));
    CHECK(r15.preperiod == ints({3}));
    CHECK(r15.period == ints({1, 6}));
    // tail y = [1; 6, y] and 3 + 1/y = sqrt 15 give y = (3 + sqrt 15)/6
    const QI tail(3, 1, 6, 15);
    CHECK(reconstruct(r15.period, tail) == tail);
    CHECK(reconstruct(r15.preperiod, tail) == QI::sqrt_of(15));
    CHECK(cf_value(r15, 15) == QI::sqrt_of(15));

    CHECK_THROWS_AS(cf_expand(QI::integer(3, 2)), InputRational);
}

TEST_CASE("fundamental units of small fields") {
    const UnitElement e15 = fundamental_unit(real_order(15));
    CHECK(e15.value == QI(4, 1, 1, 15));
    CHECK(e15.norm == 1);

    const UnitElement e2 = fundamental_unit(real_order(2));
    CHECK(e2.value == QI(1, 1, 1, 2));
    CHECK(e2.norm == -1);

    const UnitElement e5 = fundamental_unit(real_order(5));
    CHECK(e5.value == QI(1, 1, 2, 5));
    CHECK(e5.norm == -1);

    CHECK_THROWS_AS(fundamental_unit(imaginary_order(15)), DomainError);
}

TEST_CASE("fundamental units agree with the Pell search for maximal orders") {
    for (long d = 2; d <= 100; ++d) {
        if (!is_square_free(d)) continue;
        const OrderDescriptor o = real_order(d);
        const oracle::PellSolution s = oracle::pell_search(o.discriminant().get_ui());
        const UnitElement e = fundamental_unit(o);
        CAPTURE(d);
        CHECK(e.value == unit_from_pell(d, 1, s));
        CHECK(e.norm == s.norm);
    }
}

TEST_CASE("order discriminants") {
    CHECK(real_order(15).discriminant() == 60);
    CHECK(real_order(5, 3).discriminant() == 45);
    CHECK(imaginary_order(3).discriminant() == -3);
    CHECK(imaginary_order(15, 2).discriminant() == -60);
    CHECK(imaginary_order(1).discriminant() == -4);
    CHECK_THROWS_AS(real_order(12), DomainError);
}

TEST_CASE("equivalence examples") {
    const QI t(1, 2, 3, 7);
    const EquivalenceVerdict shift = sl2_equivalent(t, t + 1);
    REQUIRE(shift.sl2);
    CHECK(*shift.sl2_witness == Mat2{1, 1, 0, 1});

    const EquivalenceVerdict inv = sl2_equivalent(t, -t.reciprocal());
    REQUIRE(inv.sl2);
    CHECK(*inv.sl2_witness == Mat2{0, -1, 1, 0});

    const EquivalenceVerdict none = sl2_equivalent(QI::sqrt_of(2), QI::sqrt_of(3));
    CHECK_FALSE(none.sl2);
    CHECK_FALSE(none.gl2);

    // x -> 1/x has determinant -1; sqrt 3 has an even period so no proper witness exists
    const EquivalenceVerdict wide = sl2_equivalent(QI::sqrt_of(3), QI::sqrt_of(3).reciprocal());
    CHECK(wide.gl2);
    CHECK_FALSE(wide.sl2);
    CHECK(wide.gl2_witness->det() == -1);
    // sqrt 2 has odd period so 1/x is also properly equivalent
    CHECK(sl2_equivalent(QI::sqrt_of(2), QI::sqrt_of(2).reciprocal()).sl2);

    CHECK_THROWS_AS(sl2_equivalent(QI::integer(1, 2), QI::sqrt_of(2)), InputRational);
}

// ------------------------------------------------------------ properties

TEST_CASE("property: continued fractions are periodic for d up to 10^4") {
    std::mt19937_64 rng(5);
    for (long d = 2; d <= 10000; ++d) {
        if (!is_square_free(d)) continue;
        const QI r = QI::sqrt_of(d);
        const CFExpansion a = cf_expand(r);
        REQUIRE_FALSE(a.period.empty());
        CHECK(cf_value(a, d) == r);
        const QI x(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 5), 1 + static_cast<long>(rng() % 9), d);
        const CFExpansion b = cf_expand(x);
        REQUIRE_FALSE(b.period.empty());
        CHECK(cf_value(b, d) == x);
    }
}

TEST_CASE("property: units lie in their order with norm +-1") {
    for (long d = 2; d <= 200; ++d) {
        if (!is_square_free(d)) continue;
        for (long f = 1; f <= 5; ++f) {
            const OrderDescriptor o = real_order(d, f);
            const UnitElement e = fundamental_unit(o);
            CAPTURE(d);
            CAPTURE(f);
            CHECK(in_order(e.value, o));
            CHECK(e.value.norm() == e.norm);
            CHECK(e.value.sign() > 0);
            CHECK((e.value - 1).sign() > 0);
        }
    }
}

TEST_CASE("property: order units are powers of the field unit") {
    for (long d = 2; d <= 100; ++d) {
        if (!is_square_free(d)) continue;
        const QI base = fundamental_unit(real_order(d)).value;
        for (long f = 1; f <= 5; ++f) {
            const OrderDescriptor o = real_order(d, f);
            const QI e = fundamental_unit(o).value;
            int exponent = 0;
            QI p = QI::integer(1, d);
            for (int n = 1; n <= 12; ++n) {
                p = p * base;
                if (p == e) {
                    exponent = n;
                    break;
                }
            }
            CAPTURE(d);
            CAPTURE(f);
            REQUIRE(exponent > 0);
            // no smaller power lies in the order
            for (int n = 1; n < exponent; ++n) CHECK_FALSE(in_order(power(base, n), o));
        }
    }
}

TEST_CASE("property: equivalence is reflexive, symmetric and transitive") {
    std::mt19937_64 rng(17);
    const std::vector<Mat2> gens = {{1, 1, 0, 1}, {1, -1, 0, 1}, {0, -1, 1, 0}};
    auto random_sl2 = [&] {
        Mat2 m;
        const int len = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < len; ++i) m = m * gens[rng() % gens.size()];
        return m;
    };
    const std::vector<long> ds = {2, 3, 5, 6, 7, 10, 13, 15, 21, 29, 34};
    for (int trial = 0; trial < 200; ++trial) {
        const long d = ds[rng() % ds.size()];
        const QI t(static_cast<long>(rng() % 21) - 10, 1 + static_cast<long>(rng() % 3), 1 + static_cast<long>(rng() % 7), d);
        const Mat2 m1 = random_sl2(), m2 = random_sl2();
        const QI t2 = apply(m1, t);
        const QI t3 = apply(m2, t2);

        const EquivalenceVerdict self = sl2_equivalent(t, t);
        REQUIRE(self.sl2);
        CHECK(apply(*self.sl2_witness, t) == t);

        const EquivalenceVerdict ab = sl2_equivalent(t, t2);
        const EquivalenceVerdict ba = sl2_equivalent(t2, t);
        const EquivalenceVerdict bc = sl2_equivalent(t2, t3);
        REQUIRE(ab.sl2);
        REQUIRE(ba.sl2);
        REQUIRE(bc.sl2);
        CHECK(ab.sl2_witness->det() == 1);
        CHECK(apply(ab.sl2_witness->inverse(), t2) == t);
        CHECK(apply(*ba.sl2_witness, t2) == t);
        const Mat2 w = *bc.sl2_witness * *ab.sl2_witness;
        CHECK(w.det() == 1);
        CHECK(apply(w, t) == t3);
        CHECK(sl2_equivalent(t, t3).sl2);
    }
}
