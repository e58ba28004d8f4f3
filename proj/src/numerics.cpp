#include "jv/numerics.hpp"

#include "jv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace jv {

namespace {

BigInt pow2(int k) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(k));
    return r;
}

// ceil(a / b) for a >= 0, b > 0
BigInt ceil_div(const BigInt& a, const BigInt& b) {
    BigInt q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

BigInt ceil_shift(const BigInt& a, int k) {
    BigInt q;
    mpz_cdiv_q_2exp(q.get_mpz_t(), a.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
    return q;
}

// Nearest integer to a / 2^k (ties up); sets exact when nothing was dropped.
BigInt round_shift(const BigInt& a, int k, bool& exact) {
    if (k <= 0) {
        exact = true;
        BigInt r = a;
        mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), static_cast<mp_bitcnt_t>(-k));
        return r;
    }
    exact = a == 0 || mpz_scan1(a.get_mpz_t(), 0) >= static_cast<mp_bitcnt_t>(k);
    const BigInt t = a + pow2(k - 1);
    BigInt q;
    mpz_fdiv_q_2exp(q.get_mpz_t(), t.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
    return q;
}

// Nearest integer to a / b, b > 0.
BigInt round_div(const BigInt& a, const BigInt& b, bool& exact) {
    BigInt q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    exact = (r == 0);
    if (2 * r >= b) q += 1;
    return q;
}

void require_same(int a, int b) {
    if (a != b) throw std::invalid_argument("fixed-point precision mismatch");
}

int bit_length(const BigInt& v) {
    if (v == 0) return 0;
    return static_cast<int>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

} // namespace

// ---------------------------------------------------------------- FixedReal

FixedReal::FixedReal(BigInt mantissa, int bits, BigInt err_ulps)
    : mantissa_(std::move(mantissa)), bits_(bits), err_(std::move(err_ulps)) {
    if (bits_ < 0) throw std::invalid_argument("negative precision");
    if (err_ < 0) throw std::invalid_argument("negative error bound");
}

FixedReal FixedReal::from_int(const BigInt& n, int bits) {
    BigInt m = n;
    mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    return FixedReal(m, bits, 0);
}

FixedReal FixedReal::from_rational(const BigInt& num, const BigInt& den, int bits) {
    if (den == 0) throw DomainError("zero denominator");
    BigInt n = num, d = den;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    bool exact = false;
    BigInt m = round_div(n, d, exact);
    return FixedReal(m, bits, exact ? 0 : 1);
}

FixedReal FixedReal::from_rational(const BigRat& q, int bits) {
    return from_rational(q.get_num(), q.get_den(), bits);
}

FixedReal FixedReal::at(int bits) const {
    if (bits == bits_) return *this;
    if (bits > bits_) {
        const int k = bits - bits_;
        BigInt m = mantissa_, e = err_;
        mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
        mpz_mul_2exp(e.get_mpz_t(), e.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
        return FixedReal(m, bits, e);
    }
    const int k = bits_ - bits;
    bool exact = false;
    BigInt m = round_shift(mantissa_, k, exact);
    BigInt e = ceil_shift(err_, k) + (exact ? 0 : 1);
    return FixedReal(m, bits, e);
}

FixedReal FixedReal::with_extra_error(const BigInt& ulps) const {
    return FixedReal(mantissa_, bits_, err_ + ulps);
}

FixedReal FixedReal::operator-() const { return FixedReal(-mantissa_, bits_, err_); }

FixedReal FixedReal::operator+(const FixedReal& o) const {
    require_same(bits_, o.bits_);
    return FixedReal(mantissa_ + o.mantissa_, bits_, err_ + o.err_);
}

FixedReal FixedReal::operator-(const FixedReal& o) const {
    require_same(bits_, o.bits_);
    return FixedReal(mantissa_ - o.mantissa_, bits_, err_ + o.err_);
}

FixedReal FixedReal::operator*(const FixedReal& o) const {
    require_same(bits_, o.bits_);
    BigInt prod = mantissa_ * o.mantissa_;
    bool exact = false;
    BigInt m = round_shift(prod, bits_, exact);
    BigInt cross = ::abs(mantissa_) * o.err_ + ::abs(o.mantissa_) * err_ + err_ * o.err_;
    BigInt e = ceil_shift(cross, bits_) + (exact ? 0 : 1);
    return FixedReal(m, bits_, e);
}

FixedReal FixedReal::operator/(const FixedReal& o) const {
    require_same(bits_, o.bits_);
    const BigInt den_abs = ::abs(o.mantissa_);
    if (den_abs <= o.err_) throw DomainError("division by a value indistinguishable from zero");
    BigInt num = mantissa_;
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(bits_));
    BigInt den = o.mantissa_;
    if (den < 0) {
        den = -den;
        num = -num;
    }
    bool exact = false;
    BigInt m = round_div(num, den, exact);
    BigInt e = 0;
    if (err_ != 0 || o.err_ != 0) {
        BigInt top = err_ * den_abs + ::abs(mantissa_) * o.err_;
        mpz_mul_2exp(top.get_mpz_t(), top.get_mpz_t(), static_cast<mp_bitcnt_t>(bits_));
        e = ceil_div(top, den_abs * (den_abs - o.err_));
    }
    e += exact ? 0 : 1;
    return FixedReal(m, bits_, e);
}

FixedReal FixedReal::mul_int(const BigInt& k) const {
    return FixedReal(mantissa_ * k, bits_, err_ * ::abs(k));
}

FixedReal FixedReal::div_int(const BigInt& k) const {
    if (k == 0) throw DomainError("division by zero");
    BigInt n = mantissa_, d = k;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    bool exact = false;
    BigInt m = round_div(n, d, exact);
    return FixedReal(m, bits_, ceil_div(err_, d) + (exact ? 0 : 1));
}

FixedReal FixedReal::shifted(int k) const {
    if (k >= 0) {
        BigInt m = mantissa_, e = err_;
        mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
        mpz_mul_2exp(e.get_mpz_t(), e.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
        return FixedReal(m, bits_, e);
    }
    bool exact = false;
    BigInt m = round_shift(mantissa_, -k, exact);
    return FixedReal(m, bits_, ceil_shift(err_, -k) + (exact ? 0 : 1));
}

FixedReal FixedReal::abs() const { return FixedReal(jv::BigInt(::abs(mantissa_)), bits_, err_); }

int FixedReal::sign() const {
    if (::abs(mantissa_) <= err_) return 0;
    return mantissa_ > 0 ? 1 : -1;
}

bool FixedReal::indistinguishable(const FixedReal& o) const {
    const int b = std::max(bits_, o.bits_);
    const FixedReal x = at(b), y = o.at(b);
    return ::abs(x.mantissa_ - y.mantissa_) <= x.err_ + y.err_;
}

BigInt FixedReal::round_to_integer() const {
    bool exact = false;
    return round_shift(mantissa_, bits_, exact);
}

BigInt FixedReal::floor() const {
    BigInt q;
    mpz_fdiv_q_2exp(q.get_mpz_t(), mantissa_.get_mpz_t(), static_cast<mp_bitcnt_t>(bits_));
    return q;
}

BigInt FixedReal::magnitude_ulps() const { return ::abs(mantissa_) + err_; }

double FixedReal::to_double() const {
    long e = 0;
    const double d = mpz_get_d_2exp(&e, mantissa_.get_mpz_t());
    return std::ldexp(d, static_cast<int>(e) - bits_);
}

std::string FixedReal::to_decimal(int digits) const {
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    bool exact = false;
    BigInt v = round_shift(mantissa_ * scale, bits_, exact);
    const bool neg = v < 0;
    std::string s = BigInt(::abs(v)).get_str();
    if (digits > 0) {
        if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<size_t>(digits + 1 - s.size()), '0');
        s.insert(s.size() - static_cast<size_t>(digits), ".");
    }
    return neg ? "-" + s : s;
}

int FixedReal::error_bits() const { return bit_length(err_); }

double FixedReal::error_log10() const {
    if (err_ == 0) return -static_cast<double>(bits_) * std::log10(2.0) - 1.0;
    long e = 0;
    const double d = mpz_get_d_2exp(&e, err_.get_mpz_t());
    return std::log10(d) + static_cast<double>(e - bits_) * std::log10(2.0);
}

// -------------------------------------------------------------- FixedComplex

FixedComplex::FixedComplex(FixedReal re, FixedReal im) : re_(std::move(re)), im_(std::move(im)) {
    require_same(re_.bits(), im_.bits());
}

FixedComplex FixedComplex::from_real(const FixedReal& re) {
    return FixedComplex(re, FixedReal(0, re.bits(), 0));
}

FixedComplex FixedComplex::from_int(const BigInt& n, int bits) {
    return from_real(FixedReal::from_int(n, bits));
}

FixedComplex FixedComplex::at(int bits) const { return FixedComplex(re_.at(bits), im_.at(bits)); }

FixedComplex FixedComplex::without_error() const {
    return FixedComplex(re_.without_error(), im_.without_error());
}

FixedComplex FixedComplex::operator-() const { return FixedComplex(-re_, -im_); }
FixedComplex FixedComplex::operator+(const FixedComplex& o) const {
    return FixedComplex(re_ + o.re_, im_ + o.im_);
}
FixedComplex FixedComplex::operator-(const FixedComplex& o) const {
    return FixedComplex(re_ - o.re_, im_ - o.im_);
}
FixedComplex FixedComplex::operator*(const FixedComplex& o) const {
    return FixedComplex(re_ * o.re_ - im_ * o.im_, re_ * o.im_ + im_ * o.re_);
}
FixedComplex FixedComplex::operator/(const FixedComplex& o) const {
    const FixedReal den = o.norm2();
    const FixedComplex num = *this * o.conj();
    return FixedComplex(num.re_ / den, num.im_ / den);
}
FixedComplex FixedComplex::operator*(const FixedReal& o) const {
    return FixedComplex(re_ * o, im_ * o);
}
FixedComplex FixedComplex::mul_int(const BigInt& k) const {
    return FixedComplex(re_.mul_int(k), im_.mul_int(k));
}
FixedComplex FixedComplex::div_int(const BigInt& k) const {
    return FixedComplex(re_.div_int(k), im_.div_int(k));
}
FixedComplex FixedComplex::shifted(int k) const { return FixedComplex(re_.shifted(k), im_.shifted(k)); }
FixedComplex FixedComplex::conj() const { return FixedComplex(re_, -im_); }

FixedReal FixedComplex::norm2() const { return re_ * re_ + im_ * im_; }
FixedReal FixedComplex::modulus() const { return sqrt_fixed(norm2()); }

bool FixedComplex::indistinguishable(const FixedComplex& o) const {
    return re_.indistinguishable(o.re_) && im_.indistinguishable(o.im_);
}

BigInt FixedComplex::err_ulps() const { return std::max(re_.err_ulps(), im_.err_ulps()); }

// ------------------------------------------------------------- constants

int bits_for_digits(int digits) {
    return static_cast<int>(std::ceil(static_cast<double>(digits) * std::log2(10.0)));
}

double digits_for_bits(int bits) { return static_cast<double>(bits) * std::log10(2.0); }

namespace {

// sum_k (-1)^k / ((2k+1) x^(2k+1)) at scale 2^w, each term truncated.
// Returns the mantissa and the number of terms (each contributes < 1 ulp).
BigInt atan_inv(unsigned long x, int w, long& terms) {
    BigInt sum = 0;
    BigInt power = pow2(w) / x;  // 2^w / x^(2k+1)
    const unsigned long x2 = x * x;
    terms = 0;
    for (unsigned long k = 0; power != 0; ++k) {
        BigInt term = power / (2 * k + 1);
        if (k % 2 == 0)
            sum += term;
        else
            sum -= term;
        power /= x2;
        ++terms;
    }
    return sum;
}

// sum_k 1 / ((2k+1) x^(2k+1)).
BigInt atanh_inv(unsigned long x, int w, long& terms) {
    BigInt sum = 0;
    BigInt power = pow2(w) / x;
    const unsigned long x2 = x * x;
    terms = 0;
    for (unsigned long k = 0; power != 0; ++k) {
        sum += power / (2 * k + 1);
        power /= x2;
        ++terms;
    }
    return sum;
}

class ConstantCache {
public:
    template <typename Compute>
    FixedReal get(int bits, Compute compute) {
        {
            std::shared_lock lock(mutex_);
            auto it = values_.find(bits);
            if (it != values_.end()) return it->second;
        }
        FixedReal v = compute(bits);
        std::unique_lock lock(mutex_);
        return values_.emplace(bits, std::move(v)).first->second;
    }

private:
    std::shared_mutex mutex_;
    std::map<int, FixedReal> values_;
};

ConstantCache& pi_cache() {
    static ConstantCache cache;
    return cache;
}

ConstantCache& ln2_cache() {
    static ConstantCache cache;
    return cache;
}

constexpr int kGuard = 64;

} // namespace

FixedReal pi(int bits) {
    return pi_cache().get(bits, [](int p) {
        const int w = p + kGuard;
        long t1 = 0, t2 = 0;
        // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
        BigInt m = 16 * atan_inv(5, w, t1) - 4 * atan_inv(239, w, t2);
        BigInt err = 16 * 2 * t1 + 4 * 2 * t2 + 20;
        return FixedReal(m, w, err).at(p);
    });
}

FixedReal ln2(int bits) {
    return ln2_cache().get(bits, [](int p) {
        const int w = p + kGuard;
        long t = 0;
        BigInt m = 2 * atanh_inv(3, w, t);
        return FixedReal(m, w, BigInt(4 * t + 4)).at(p);
    });
}

FixedReal sqrt_fixed(const BigInt& n, int bits) {
    if (n < 0) throw DomainError("sqrt of a negative integer");
    BigInt scaled = n;
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(2 * bits));
    BigInt s;
    mpz_sqrt(s.get_mpz_t(), scaled.get_mpz_t());
    const BigInt rem = scaled - s * s;
    if (rem == 0) return FixedReal(s, bits, 0);
    if (rem > s) s += 1;
    return FixedReal(s, bits, 1);
}

FixedReal sqrt_fixed(const FixedReal& x) {
    const int p = x.bits();
    if (x.mantissa() < 0) throw DomainError("sqrt of a negative value");
    BigInt scaled = x.mantissa();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(p));
    BigInt s;
    mpz_sqrt(s.get_mpz_t(), scaled.get_mpz_t());
    const BigInt rem = scaled - s * s;
    BigInt err = 0;
    if (rem != 0) {
        if (rem > s) s += 1;
        err = 1;
    }
    if (x.err_ulps() != 0) {
        const BigInt lower = x.mantissa() - x.err_ulps();
        if (lower <= 0) {
            // Only |sqrt(x) - sqrt(x')| <= sqrt(|x - x'|) is available here.
            BigInt e = x.err_ulps();
            mpz_mul_2exp(e.get_mpz_t(), e.get_mpz_t(), static_cast<mp_bitcnt_t>(p));
            BigInt r;
            mpz_sqrt(r.get_mpz_t(), e.get_mpz_t());
            err += r + 1;
        } else {
            BigInt low = lower;
            mpz_mul_2exp(low.get_mpz_t(), low.get_mpz_t(), static_cast<mp_bitcnt_t>(p));
            BigInt root;
            mpz_sqrt(root.get_mpz_t(), low.get_mpz_t());
            BigInt top = x.err_ulps();
            mpz_mul_2exp(top.get_mpz_t(), top.get_mpz_t(), static_cast<mp_bitcnt_t>(p));
            err += ceil_div(top, 2 * std::max(root, BigInt(1)));
        }
    }
    return FixedReal(s, p, err);
}

namespace {

// Taylor series for cos and sin of a small exact argument at its own scale.
void cos_sin_series(const FixedReal& y, FixedReal& c, FixedReal& s) {
    const int w = y.bits();
    const FixedReal y2 = y * y;
    FixedReal one = FixedReal::from_int(1, w);
    c = one;
    s = y;
    FixedReal tc = one, ts = y;
    for (long n = 1;; ++n) {
        tc = (tc * y2).div_int(BigInt((2 * n - 1) * (2 * n)));
        ts = (ts * y2).div_int(BigInt((2 * n) * (2 * n + 1)));
        if (n % 2 == 1) {
            c = c - tc;
            s = s - ts;
        } else {
            c = c + tc;
            s = s + ts;
        }
        if (tc.magnitude_ulps() <= 1 && ts.magnitude_ulps() <= 1) break;
    }
    // Alternating tails with decreasing terms: bounded by the next term.
    c = c.with_extra_error(2);
    s = s.with_extra_error(2);
}

FixedReal exp_series(const FixedReal& y) {
    const int w = y.bits();
    FixedReal sum = FixedReal::from_int(1, w);
    FixedReal term = sum;
    for (long n = 1;; ++n) {
        term = (term * y).div_int(BigInt(n));
        sum = sum + term;
        if (term.magnitude_ulps() <= 1) break;
    }
    // |y| <= 1/2 so the tail is at most twice the last term.
    return sum.with_extra_error(2);
}

} // namespace

FixedComplex exp_cis(const FixedReal& theta, int bits) {
    const FixedReal th = theta.at(bits);
    const int halvings = 8;
    const int w = bits + kGuard + 2 * halvings + 8;

    // reduce mod 1 at the mantissa level
    BigInt frac;
    mpz_fdiv_r_2exp(frac.get_mpz_t(), th.mantissa().get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    const FixedReal r = FixedReal(frac, bits, 0).at(w);
    const FixedReal angle = (pi(w) * r).shifted(1);
    const FixedReal y = angle.shifted(-halvings);

    FixedReal c, s;
    cos_sin_series(y, c, s);
    for (int i = 0; i < halvings; ++i) {
        const FixedReal c2 = c * c - s * s;
        const FixedReal s2 = (c * s).shifted(1);
        c = c2;
        s = s2;
    }
    FixedReal re = c.at(bits), im = s.at(bits);
    if (th.err_ulps() != 0) {
        // |d/dtheta cis(2 pi theta)| = 2 pi < 7 per component
        const BigInt extra = 7 * th.err_ulps();
        re = re.with_extra_error(extra);
        im = im.with_extra_error(extra);
    }
    return FixedComplex(re, im);
}

FixedComplex exp_cis(const FixedReal& theta) { return exp_cis(theta, theta.bits()); }

FixedReal exp_fixed(const FixedReal& x, int bits) {
    const FixedReal xp = x.at(bits);
    const BigInt whole = ::abs(xp.floor()) + 1;
    const int halvings = bit_length(whole) + 1;
    const long grow = std::max<long>(0, static_cast<long>(std::ceil(xp.to_double() * 1.4427)));
    const int w = bits + kGuard + 2 * halvings + static_cast<int>(grow) + 8;

    const FixedReal y = xp.without_error().at(w).shifted(-halvings);
    FixedReal v = exp_series(y);
    for (int i = 0; i < halvings; ++i) v = v * v;
    FixedReal out = v.at(bits);
    if (xp.err_ulps() != 0) {
        BigInt extra = 2 * xp.err_ulps() * out.magnitude_ulps();
        out = out.with_extra_error(ceil_shift(extra, bits) + 1);
    }
    return out;
}

FixedReal exp_fixed(const FixedReal& x) { return exp_fixed(x, x.bits()); }

FixedReal log_fixed(const FixedReal& x, int bits) {
    const FixedReal xp = x.at(bits);
    if (xp.mantissa() <= pow2(bits)) throw DomainError("log_fixed requires x > 1");

    // x = 2^k * y with 1 <= y < 2
    const int k = bit_length(xp.mantissa()) - 1 - bits;
    const int w = bits + kGuard + bit_length(BigInt(k + 1)) + 8;
    const FixedReal y = FixedReal(xp.mantissa(), bits + k, 0).at(w);
    const FixedReal one = FixedReal::from_int(1, w);
    const FixedReal z = (y - one) / (y + one);  // 0 <= z < 1/3
    const FixedReal z2 = z * z;

    FixedReal sum = z, power = z;
    for (long n = 1;; ++n) {
        power = power * z2;
        const FixedReal term = power.div_int(BigInt(2 * n + 1));
        sum = sum + term;
        if (power.magnitude_ulps() <= 1) break;
    }
    sum = sum.with_extra_error(2);
    const FixedReal result = ln2(w).mul_int(k) + sum.shifted(1);
    FixedReal out = result.at(bits);
    if (xp.err_ulps() != 0) out = out.with_extra_error(xp.err_ulps());  // d log x / dx < 1
    return out;
}

FixedReal log_fixed(const FixedReal& x) { return log_fixed(x, x.bits()); }

FixedComplex exp_complex(const FixedComplex& wv, int bits) {
    const FixedComplex z = wv.at(bits);
    const BigInt reach = ::abs(z.re().floor()) + ::abs(z.im().floor()) + 2;
    const int halvings = bit_length(reach) + 2;
    const long grow = std::max<long>(0, static_cast<long>(std::ceil(z.re().to_double() * 1.4427)));
    const int w = bits + kGuard + 3 * halvings + static_cast<int>(grow) + 8;

    const FixedComplex y = z.without_error().at(w).shifted(-halvings);
    FixedComplex sum = FixedComplex::from_int(1, w);
    FixedComplex term = sum;
    for (long n = 1;; ++n) {
        term = (term * y).div_int(BigInt(n));
        sum = sum + term;
        if (term.re().magnitude_ulps() <= 1 && term.im().magnitude_ulps() <= 1) break;
    }
    sum = FixedComplex(sum.re().with_extra_error(4), sum.im().with_extra_error(4));
    for (int i = 0; i < halvings; ++i) sum = sum * sum;
    FixedComplex out = sum.at(bits);
    const BigInt in_err = z.err_ulps();
    if (in_err != 0) {
        const BigInt size = out.re().magnitude_ulps() + out.im().magnitude_ulps();
        const BigInt extra = ceil_shift(2 * in_err * size, bits) + 1;
        out = FixedComplex(out.re().with_extra_error(extra), out.im().with_extra_error(extra));
    }
    return out;
}

} // namespace jv
