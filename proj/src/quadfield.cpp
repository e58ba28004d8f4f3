#include "jv/quadfield.hpp"

#include "jv/errors.hpp"

#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace jv {

namespace {

BigInt isqrt(const BigInt& n) {
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

BigInt fdiv(const BigInt& a, const BigInt& b) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

BigInt gcd(const BigInt& a, const BigInt& b) {
    BigInt g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

bool is_perfect_square(const BigInt& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

// p_k, q_k for the partial quotients terms[0..count).
Mat2 convergent_matrix(const std::vector<BigInt>& terms, std::size_t count) {
    Mat2 m;  // identity: (p_{-1} p_{-2}; q_{-1} q_{-2})
    for (std::size_t i = 0; i < count; ++i) {
        const BigInt p = terms[i] * m.a + m.b;
        const BigInt q = terms[i] * m.c + m.d;
        m = Mat2{p, m.a, q, m.c};
    }
    return m;
}

} // namespace

bool is_square_free(long n) {
    if (n <= 0) return false;
    for (long p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0) return false;
    }
    return true;
}

// ------------------------------------------------------- QuadraticIrrational

QuadraticIrrational::QuadraticIrrational(BigInt a, BigInt b, BigInt c, long d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(d) {
    if (d_ < 2 || !is_square_free(d_)) throw DomainError("d must be a square-free integer >= 2");
    if (c_ == 0) throw DomainError("zero denominator");
    normalize();
}

void QuadraticIrrational::normalize() {
    if (c_ < 0) {
        a_ = -a_;
        b_ = -b_;
        c_ = -c_;
    }
    const BigInt g = gcd(gcd(a_, b_), c_);
    if (g > 1) {
        a_ /= g;
        b_ /= g;
        c_ /= g;
    }
}

void QuadraticIrrational::require_same_field(const QuadraticIrrational& o) const {
    if (d_ != o.d_) throw DomainError("quadratic irrationals from different fields");
}

QuadraticIrrational QuadraticIrrational::operator+(const QuadraticIrrational& o) const {
    require_same_field(o);
    return {a_ * o.c_ + o.a_ * c_, b_ * o.c_ + o.b_ * c_, c_ * o.c_, d_};
}

QuadraticIrrational QuadraticIrrational::operator-(const QuadraticIrrational& o) const {
    return *this + (-o);
}

QuadraticIrrational QuadraticIrrational::operator*(const QuadraticIrrational& o) const {
    require_same_field(o);
    return {a_ * o.a_ + b_ * o.b_ * d_, a_ * o.b_ + b_ * o.a_, c_ * o.c_, d_};
}

QuadraticIrrational QuadraticIrrational::operator/(const QuadraticIrrational& o) const {
    return *this * o.reciprocal();
}

QuadraticIrrational QuadraticIrrational::operator-() const { return {-a_, -b_, c_, d_}; }

QuadraticIrrational QuadraticIrrational::operator+(const BigInt& n) const {
    return {a_ + n * c_, b_, c_, d_};
}

QuadraticIrrational QuadraticIrrational::operator-(const BigInt& n) const {
    return {a_ - n * c_, b_, c_, d_};
}

QuadraticIrrational QuadraticIrrational::conjugate() const { return {a_, -b_, c_, d_}; }

QuadraticIrrational QuadraticIrrational::reciprocal() const {
    const BigInt den = a_ * a_ - b_ * b_ * d_;
    if (den == 0) throw DomainError("reciprocal of zero");
    return {c_ * a_, -c_ * b_, den, d_};
}

BigRat QuadraticIrrational::norm() const {
    BigRat q(a_ * a_ - b_ * b_ * d_, c_ * c_);
    q.canonicalize();
    return q;
}

BigRat QuadraticIrrational::trace() const {
    BigRat q(2 * a_, c_);
    q.canonicalize();
    return q;
}

int QuadraticIrrational::sign() const {
    if (b_ == 0) return sgn(a_);
    if (a_ >= 0 && b_ > 0) return 1;
    if (a_ <= 0 && b_ < 0) return -1;
    const BigInt lhs = a_ * a_;
    const BigInt rhs = b_ * b_ * d_;
    // a and b of opposite signs: the sign is the sign of the larger magnitude
    if (a_ > 0) return lhs > rhs ? 1 : -1;
    return rhs > lhs ? 1 : -1;
}

BigInt QuadraticIrrational::floor() const {
    if (b_ == 0) return fdiv(a_, c_);
    const BigInt s = isqrt(b_ * b_ * d_);
    const BigInt fl = b_ > 0 ? s : -s - 1;
    return fdiv(a_ + fl, c_);
}

BigInt QuadraticIrrational::ceil() const {
    if (b_ == 0) {
        BigInt q;
        mpz_cdiv_q(q.get_mpz_t(), a_.get_mpz_t(), c_.get_mpz_t());
        return q;
    }
    return floor() + 1;
}

FixedReal QuadraticIrrational::to_fixed(int bits) const {
    FixedReal root = sqrt_fixed(b_ * b_ * d_, bits);
    if (b_ < 0) root = -root;
    return (FixedReal::from_int(a_, bits) + root).div_int(c_);
}

double QuadraticIrrational::to_double() const { return to_fixed(96).to_double(); }

std::string QuadraticIrrational::to_string() const {
    std::ostringstream os;
    const bool paren = c_ != 1 && (a_ != 0 && b_ != 0);
    if (paren) os << "(";
    if (a_ != 0 || b_ == 0) os << a_.get_str();
    if (b_ != 0) {
        if (a_ != 0) os << (b_ > 0 ? "+" : "-");
        else if (b_ < 0) os << "-";
        const BigInt mag = abs(b_);
        if (mag != 1) os << mag.get_str() << "*";
        os << "sqrt(" << d_ << ")";
    }
    if (paren) os << ")";
    if (c_ != 1) os << "/" << c_.get_str();
    return os.str();
}

std::size_t QuadraticIrrational::hash() const {
    const std::hash<std::string> h;
    return h(a_.get_str(16) + ":" + b_.get_str(16) + ":" + c_.get_str(16) + ":" + std::to_string(d_));
}

// ------------------------------------------------------------------- orders

BigInt OrderDescriptor::fundamental_discriminant() const {
    if (kind == FieldKind::real) return (d % 4 == 1) ? BigInt(d) : BigInt(4 * d);
    // -d = 1 mod 4 exactly when d = 3 mod 4
    return (d % 4 == 3) ? BigInt(-d) : BigInt(-4 * d);
}

BigInt OrderDescriptor::discriminant() const {
    return BigInt(conductor) * BigInt(conductor) * fundamental_discriminant();
}

OrderDescriptor real_order(long d, long conductor) {
    if (!is_square_free(d) || d < 2) throw DomainError("real order needs square-free d >= 2");
    if (conductor < 1) throw DomainError("conductor must be positive");
    return {FieldKind::real, d, conductor};
}

OrderDescriptor imaginary_order(long d, long conductor) {
    if (!is_square_free(d)) throw DomainError("imaginary order needs square-free d >= 1");
    if (conductor < 1) throw DomainError("conductor must be positive");
    return {FieldKind::imaginary, d, conductor};
}

// -------------------------------------------------------- continued fraction

namespace {

struct CompleteQuotientState {
    BigInt p, q;  // value (p + sqrt(D)) / q
    bool operator<(const CompleteQuotientState& o) const {
        return p < o.p || (p == o.p && q < o.q);
    }
};

} // namespace

CFExpansion cf_expand(const QuadraticIrrational& theta) {
    if (theta.is_rational()) throw InputRational("continued fraction of a rational number");
    BigInt disc = theta.b() * theta.b() * theta.d();
    BigInt p = theta.b() > 0 ? theta.a() : BigInt(-theta.a());
    BigInt q = theta.b() > 0 ? theta.c() : BigInt(-theta.c());
    if ((disc - p * p) % q != 0) {
        const BigInt aq = abs(q);
        p *= aq;
        disc *= q * q;
        q *= aq;
    }
    const BigInt root = isqrt(disc);

    std::vector<BigInt> terms;
    std::map<CompleteQuotientState, std::size_t> seen;
    for (;;) {
        const CompleteQuotientState state{p, q};
        auto it = seen.find(state);
        if (it != seen.end()) {
            CFExpansion cf;
            cf.preperiod.assign(terms.begin(), terms.begin() + static_cast<long>(it->second));
            cf.period.assign(terms.begin() + static_cast<long>(it->second), terms.end());
            return cf;
        }
        seen.emplace(state, terms.size());
        BigInt a;
        if (q > 0)
            a = fdiv(p + root, q);
        else
            a = -fdiv(p + root, BigInt(-q)) - 1;
        terms.push_back(a);
        p = a * q - p;
        q = (disc - p * p) / q;
    }
}

QuadraticIrrational cf_value(const CFExpansion& cf, long d) {
    if (cf.period.empty()) throw DomainError("continued fraction period must be nonempty");
    const Mat2 per = convergent_matrix(cf.period, cf.period.size());
    // y = (P1 y + P0) / (Q1 y + Q0)  =>  Q1 y^2 + (Q0 - P1) y - P0 = 0
    const BigInt qa = per.c, qb = per.d - per.a, qc = -per.b;
    const BigInt disc = qb * qb - 4 * qa * qc;
    if (disc % d != 0 || !is_perfect_square(disc / d))
        throw DomainError("continued fraction does not lie in Q(sqrt d)");
    const BigInt k = isqrt(disc / d);
    const QuadraticIrrational y(-qb, k, 2 * qa, d);
    const Mat2 pre = convergent_matrix(cf.preperiod, cf.preperiod.size());
    return apply(pre, y);
}

// -------------------------------------------------------------------- units

UnitElement fundamental_unit(const OrderDescriptor& order) {
    if (order.kind != FieldKind::real) throw DomainError("fundamental_unit needs a real order");
    const long d = order.d;
    const BigInt f = order.conductor;
    const bool one_mod_four = d % 4 == 1;
    // sqrt(Disc) = g sqrt(d); omega = (s + sqrt(Disc)) / 2 generates the order
    const BigInt g = one_mod_four ? f : BigInt(2 * f);
    const BigInt disc = order.discriminant();
    const BigInt s = (disc % 2 == 0) ? BigInt(0) : BigInt(1);
    const QuadraticIrrational omega(s, g, 2, d);
    // shift to a reduced number: alpha > 1, -1 < alpha' < 0
    const QuadraticIrrational alpha = omega - omega.conjugate().ceil();
    const CFExpansion cf = cf_expand(alpha);
    if (!cf.preperiod.empty()) throw std::logic_error("reduced generator must be purely periodic");
    const std::size_t len = cf.period.size();
    const Mat2 m = convergent_matrix(cf.period, len);
    // eta = q_{L-1} alpha + q_{L-2}
    const QuadraticIrrational eta = alpha * QuadraticIrrational::integer(m.c, d) + m.d;
    const BigRat n = eta.norm();
    if (n != 1 && n != -1) throw std::logic_error("period product is not a unit");
    return UnitElement{eta, n > 0 ? 1 : -1};
}

bool in_order(const QuadraticIrrational& x, const OrderDescriptor& order) {
    const long d = order.d;
    if (x.d() != d) return false;
    BigInt u, v;
    if (d % 4 == 1) {
        // x = u + v (1 + sqrt d)/2 : v = 2b/c, u = a/c - v/2
        if ((2 * x.b()) % x.c() != 0) return false;
        v = 2 * x.b() / x.c();
        const BigInt twice_u = 2 * x.a() - v * x.c();
        if (twice_u % (2 * x.c()) != 0) return false;
        u = twice_u / (2 * x.c());
    } else {
        if (x.a() % x.c() != 0 || x.b() % x.c() != 0) return false;
        u = x.a() / x.c();
        v = x.b() / x.c();
    }
    return v % order.conductor == 0;
}

// ------------------------------------------------------------ equivalence

Mat2 Mat2::operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Mat2 Mat2::inverse() const {
    const BigInt det_value = det();
    if (det_value != 1 && det_value != -1) throw DomainError("matrix is not unimodular");
    return {det_value * d, -det_value * b, -det_value * c, det_value * a};
}

QuadraticIrrational apply(const Mat2& m, const QuadraticIrrational& x) {
    const QuadraticIrrational num = x * QuadraticIrrational::integer(m.a, x.d()) + m.b;
    const QuadraticIrrational den = x * QuadraticIrrational::integer(m.c, x.d()) + m.d;
    return num / den;
}

namespace {

struct Expansion {
    std::vector<BigInt> terms;
    std::vector<QuadraticIrrational> quotients;
    std::size_t period = 0;
};

Expansion expand_with_quotients(const QuadraticIrrational& theta) {
    const CFExpansion cf = cf_expand(theta);
    Expansion e;
    e.period = cf.period.size();
    const std::size_t count = cf.preperiod.size() + 2 * cf.period.size() + 1;
    QuadraticIrrational x = theta;
    for (std::size_t k = 0; k < count; ++k) {
        e.quotients.push_back(x);
        const BigInt a = x.floor();
        e.terms.push_back(a);
        x = (x - a).reciprocal();
    }
    return e;
}

} // namespace

EquivalenceVerdict sl2_equivalent(const QuadraticIrrational& theta, const QuadraticIrrational& theta2) {
    if (theta.is_rational() || theta2.is_rational())
        throw InputRational("equivalence is decided for irrationals only");
    EquivalenceVerdict verdict;
    if (theta.d() != theta2.d()) return verdict;

    const Expansion x = expand_with_quotients(theta);
    const Expansion y = expand_with_quotients(theta2);

    std::optional<std::pair<std::size_t, std::size_t>> best_any, best_even;
    for (std::size_t m = 0; m < x.quotients.size(); ++m) {
        for (std::size_t n = 0; n < y.quotients.size(); ++n) {
            if (!(x.quotients[m] == y.quotients[n])) continue;
            const std::size_t cost = m + n;
            if (!best_any || cost < best_any->first + best_any->second) best_any = {m, n};
            if (cost % 2 == 0 && (!best_even || cost < best_even->first + best_even->second))
                best_even = {m, n};
        }
    }
    auto witness = [&](std::size_t m, std::size_t n) {
        const Mat2 mx = convergent_matrix(x.terms, m);
        const Mat2 ny = convergent_matrix(y.terms, n);
        const Mat2 w = ny * mx.inverse();
        if (!(apply(w, theta) == theta2)) throw std::logic_error("equivalence witness failed verification");
        return w;
    };
    if (best_any) {
        verdict.gl2 = true;
        verdict.gl2_witness = witness(best_any->first, best_any->second);
    }
    if (best_even) {
        verdict.sl2 = true;
        verdict.sl2_witness = witness(best_even->first, best_even->second);
    }
    return verdict;
}

} // namespace jv
