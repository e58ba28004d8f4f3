#include "jv/polynomial.hpp"

#include "jv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace jv {

namespace {

BigInt pow2(int k) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(k));
    return r;
}

BigInt int_pow(const BigInt& b, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

int bit_length(const BigInt& n) { return n == 0 ? 0 : static_cast<int>(mpz_sizeinbase(n.get_mpz_t(), 2)); }

long double to_long_double(const BigInt& n) {
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return std::ldexp(static_cast<long double>(mant), static_cast<int>(exp));
}

FixedReal fixed_from_long_double(long double x, int bits) {
    const double hi = static_cast<double>(x);
    const double lo = static_cast<double>(x - static_cast<long double>(hi));
    BigRat q(hi);
    q += BigRat(lo);
    return FixedReal::from_rational(q, bits);
}

// |z| in ulps, up to a factor sqrt 2
BigInt magnitude_ulps(const FixedComplex& z) { return std::max(::abs(z.re().mantissa()), ::abs(z.im().mantissa())); }

FixedComplex drop(const FixedComplex& z) { return z.without_error(); }

// Remainder of lc(b)^(deg a - deg b + 1) * a divided by b.
IntegerPolynomial pseudo_remainder(const IntegerPolynomial& a, const IntegerPolynomial& b) {
    std::vector<BigInt> r = a.coefficients();
    const int db = b.degree();
    const BigInt& lb = b.leading();
    const std::vector<BigInt>& bc = b.coefficients();
    int dr = a.degree();
    while (dr >= db && dr >= 0) {
        const BigInt lr = r[static_cast<std::size_t>(dr)];
        for (auto& c : r) c *= lb;
        for (int k = 0; k <= db; ++k) r[static_cast<std::size_t>(dr - db + k)] -= lr * bc[static_cast<std::size_t>(k)];
        r.pop_back();
        --dr;
        while (dr >= 0 && r[static_cast<std::size_t>(dr)] == 0) {
            r.pop_back();
            --dr;
        }
    }
    return IntegerPolynomial(std::move(r));
}

} // namespace

// ------------------------------------------------------------ IntegerPolynomial

IntegerPolynomial::IntegerPolynomial(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

IntegerPolynomial IntegerPolynomial::constant(const BigInt& c) { return IntegerPolynomial({c}); }

IntegerPolynomial IntegerPolynomial::x() { return IntegerPolynomial({0, 1}); }

void IntegerPolynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

BigInt IntegerPolynomial::coeff(int k) const {
    if (k < 0 || k > degree()) return 0;
    return coeffs_[static_cast<std::size_t>(k)];
}

const BigInt& IntegerPolynomial::leading() const {
    if (coeffs_.empty()) throw DomainError("leading coefficient of the zero polynomial");
    return coeffs_.back();
}

BigInt IntegerPolynomial::content() const {
    BigInt g = 0;
    for (const BigInt& c : coeffs_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g;
}

IntegerPolynomial IntegerPolynomial::primitive_part() const {
    if (is_zero()) return *this;
    BigInt g = content();
    if (leading() < 0) g = -g;
    std::vector<BigInt> out;
    for (const BigInt& c : coeffs_) out.push_back(c / g);
    return IntegerPolynomial(std::move(out));
}

BigInt IntegerPolynomial::height() const {
    BigInt h = 0;
    for (const BigInt& c : coeffs_) h = std::max(h, BigInt(::abs(c)));
    return h;
}

IntegerPolynomial IntegerPolynomial::operator+(const IntegerPolynomial& o) const {
    std::vector<BigInt> out(std::max(coeffs_.size(), o.coeffs_.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i < coeffs_.size()) out[i] += coeffs_[i];
        if (i < o.coeffs_.size()) out[i] += o.coeffs_[i];
    }
    return IntegerPolynomial(std::move(out));
}

IntegerPolynomial IntegerPolynomial::operator-(const IntegerPolynomial& o) const { return *this + (-o); }

IntegerPolynomial IntegerPolynomial::operator-() const { return scaled(-1); }

IntegerPolynomial IntegerPolynomial::operator*(const IntegerPolynomial& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<BigInt> out(coeffs_.size() + o.coeffs_.size() - 1);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (std::size_t j = 0; j < o.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * o.coeffs_[j];
    return IntegerPolynomial(std::move(out));
}

IntegerPolynomial IntegerPolynomial::scaled(const BigInt& k) const {
    std::vector<BigInt> out;
    for (const BigInt& c : coeffs_) out.push_back(c * k);
    return IntegerPolynomial(std::move(out));
}

IntegerPolynomial IntegerPolynomial::derivative() const {
    std::vector<BigInt> out;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) out.push_back(coeffs_[k] * static_cast<unsigned long>(k));
    return IntegerPolynomial(std::move(out));
}

BigInt IntegerPolynomial::evaluate(const BigInt& x) const {
    BigInt acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

BigRat IntegerPolynomial::evaluate(const BigRat& x) const {
    BigRat acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + BigRat(*it);
    acc.canonicalize();
    return acc;
}

FixedComplex IntegerPolynomial::evaluate(const FixedComplex& z) const {
    const int bits = z.bits();
    FixedComplex acc = FixedComplex::from_int(0, bits);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + FixedComplex::from_int(*it, bits);
    return acc;
}

std::string IntegerPolynomial::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const BigInt& c = coeffs_[static_cast<std::size_t>(k)];
        if (c == 0) continue;
        const BigInt mag = ::abs(c);
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        first = false;
        if (mag != 1 || k == 0) os << mag.get_str();
        if (k > 0) os << (mag != 1 ? "*x" : "x");
        if (k > 1) os << "^" << k;
    }
    return os.str();
}

// ------------------------------------------------------------ exact algebra

std::optional<IntegerPolynomial> divide_exact(const IntegerPolynomial& p, const IntegerPolynomial& q) {
    if (q.is_zero()) throw DomainError("division by the zero polynomial");
    if (p.is_zero()) return IntegerPolynomial{};
    if (p.degree() < q.degree()) return std::nullopt;
    std::vector<BigInt> r = p.coefficients();
    const std::vector<BigInt>& qc = q.coefficients();
    const int dq = q.degree();
    std::vector<BigInt> quot(static_cast<std::size_t>(p.degree() - dq + 1));
    for (int k = p.degree(); k >= dq; --k) {
        const BigInt& top = r[static_cast<std::size_t>(k)];
        if (top == 0) continue;
        if (top % q.leading() != 0) return std::nullopt;
        const BigInt f = top / q.leading();
        quot[static_cast<std::size_t>(k - dq)] = f;
        for (int i = 0; i <= dq; ++i) r[static_cast<std::size_t>(k - dq + i)] -= f * qc[static_cast<std::size_t>(i)];
    }
    for (const BigInt& c : r)
        if (c != 0) return std::nullopt;
    return IntegerPolynomial(std::move(quot));
}

IntegerPolynomial poly_gcd(const IntegerPolynomial& p, const IntegerPolynomial& q) {
    IntegerPolynomial a = p.primitive_part(), b = q.primitive_part();
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.degree() < b.degree()) std::swap(a, b);
    while (!b.is_zero()) {
        IntegerPolynomial r = pseudo_remainder(a, b);
        a = b;
        b = r.primitive_part();
    }
    return a.primitive_part();
}

bool is_squarefree(const IntegerPolynomial& p) {
    if (p.degree() <= 0) return true;
    return poly_gcd(p, p.derivative()).degree() == 0;
}

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    int sign = 1;
    BigInt prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && m[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(m[k], m[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

BigInt resultant(const IntegerPolynomial& p, const IntegerPolynomial& q) {
    if (p.is_zero() || q.is_zero()) return 0;
    const int m = p.degree(), n = q.degree();
    if (m == 0 && n == 0) return 1;
    if (m == 0) return int_pow(p.leading(), static_cast<unsigned long>(n));
    if (n == 0) return int_pow(q.leading(), static_cast<unsigned long>(m));
    const std::size_t size = static_cast<std::size_t>(m + n);
    std::vector<std::vector<BigInt>> s(size, std::vector<BigInt>(size, 0));
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) s[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + m - k)] = p.coeff(k);
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) s[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + n - k)] = q.coeff(k);
    return bareiss_determinant(std::move(s));
}

BigInt discriminant(const IntegerPolynomial& p) {
    const int n = p.degree();
    if (n < 1) throw DomainError("discriminant needs degree >= 1");
    if (n == 1) return 1;
    BigInt r = resultant(p, p.derivative()) / p.leading();
    if ((n * (n - 1) / 2) % 2 == 1) r = -r;
    return r;
}

// ------------------------------------------------------------ roots

std::vector<FixedComplex> complex_roots(const IntegerPolynomial& p, int bits) {
    const int n = p.degree();
    if (n < 1) return {};
    if (n == 1) {
        const BigRat r(-p.coeff(0), p.coeff(1));
        return {FixedComplex::from_real(FixedReal::from_rational(r, bits))};
    }
    if (!is_squarefree(p)) throw NotSquareFree("complex_roots needs a squarefree polynomial");

    // phase 1: Aberth iteration in long double, started on the circles given
    // by the Newton polygon of the coefficient magnitudes
    using C = std::complex<long double>;
    std::vector<long double> a(static_cast<std::size_t>(n + 1));
    const long double lead = to_long_double(p.leading());
    for (int k = 0; k <= n; ++k) a[static_cast<std::size_t>(k)] = to_long_double(p.coeff(k)) / lead;
    std::vector<int> hull;
    for (int k = 0; k <= n; ++k) {
        if (a[static_cast<std::size_t>(k)] == 0) continue;
        auto lg = [&](int i) { return std::log(std::abs(a[static_cast<std::size_t>(i)])); };
        while (hull.size() >= 2) {
            const int i = hull[hull.size() - 2], j = hull.back();
            // drop j when it lies on or below the chord from i to k
            if ((lg(j) - lg(i)) * (k - i) <= (lg(k) - lg(i)) * (j - i)) hull.pop_back();
            else break;
        }
        hull.push_back(k);
    }
    std::vector<C> z;
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const int i = hull[h], j = hull[h + 1];
        const long double radius = std::pow(std::abs(a[static_cast<std::size_t>(i)] / a[static_cast<std::size_t>(j)]), 1.0L / (j - i));
        for (int m = 0; m < j - i; ++m)
            z.push_back(std::polar(radius, 0.7L + 2.0L * 3.14159265358979323846L * m / (j - i) + 0.37L * h));
    }
    if (hull.front() > 0)
        for (int m = 0; m < hull.front(); ++m) z.push_back(C(0));
    auto eval_ratio = [&](C x) {
        C v = 0, dv = 0;
        for (int k = n; k >= 0; --k) {
            dv = dv * x + v;
            v = v * x + a[static_cast<std::size_t>(k)];
        }
        return std::make_pair(v, dv);
    };
    for (int iter = 0; iter < 500; ++iter) {
        long double moved = 0;
        for (int k = 0; k < n; ++k) {
            C& zk = z[static_cast<std::size_t>(k)];
            const auto [v, dv] = eval_ratio(zk);
            if (v == C(0)) continue;
            const C ratio = v / dv;
            C sum = 0;
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                const C diff = zk - z[static_cast<std::size_t>(j)];
                if (diff != C(0)) sum += C(1) / diff;
            }
            const C step = ratio / (C(1) - ratio * sum);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
            zk -= step;
            moved = std::max(moved, std::abs(step) / (1 + std::abs(zk)));
        }
        if (!(moved > 1e-18L)) break;
    }

    // phase 2: Weierstrass corrections at full precision
    std::vector<FixedComplex> w;
    for (const C& c : z)
        w.push_back(FixedComplex(fixed_from_long_double(c.real(), bits), fixed_from_long_double(c.imag(), bits)));
    const FixedComplex lc = FixedComplex::from_int(p.leading(), bits);
    const BigInt tiny = pow2(16);
    for (int iter = 0; iter < 400; ++iter) {
        bool done = true;
        for (int k = 0; k < n; ++k) {
            auto& zk = w[static_cast<std::size_t>(k)];
            FixedComplex den = lc;
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                FixedComplex diff = drop(zk - w[static_cast<std::size_t>(j)]);
                if (magnitude_ulps(diff) == 0) diff = FixedComplex(FixedReal(1, bits), FixedReal(1, bits));
                den = drop(den * diff);
            }
            if (magnitude_ulps(den) == 0) den = FixedComplex(FixedReal(1, bits), FixedReal(0, bits));
            const FixedComplex step = drop(drop(p.evaluate(zk)) / den);
            zk = drop(zk - step);
            const BigInt scale = tiny * (1 + ::abs(zk.re().floor()) + ::abs(zk.im().floor()));
            if (magnitude_ulps(step) > scale) done = false;
        }
        if (done) break;
    }
    return w;
}

// ------------------------------------------------------------ factoring

namespace {

struct RootUnit {
    std::vector<std::size_t> members;  // one real root or a conjugate pair
};

bool near_integer(const FixedReal& x, const BigInt& tol) {
    const BigInt nearest = x.round_to_integer();
    return ::abs(x.mantissa() - nearest * pow2(x.bits())) <= tol;
}

// One irreducible factor of the squarefree primitive p of least degree, or
// p itself when p is irreducible.
IntegerPolynomial smallest_factor(const IntegerPolynomial& p) {
    const int n = p.degree();
    if (n <= 1) return p;
    if (p.coeff(0) == 0) return IntegerPolynomial::x();
    // monic transform q(x) = lc^(n-1) p(x / lc)
    const BigInt lc = p.leading();
    std::vector<BigInt> qc(static_cast<std::size_t>(n + 1));
    for (int k = 0; k < n; ++k) qc[static_cast<std::size_t>(k)] = p.coeff(k) * int_pow(lc, static_cast<unsigned long>(n - 1 - k));
    qc[static_cast<std::size_t>(n)] = 1;
    const IntegerPolynomial q(qc);

    // factor coefficients are bounded by 2^n |q|_inf (n + 1)
    const int bound_bits = n + bit_length(q.height()) + bit_length(BigInt(n + 1));
    const int bits = 2 * bound_bits + 96;
    const std::vector<FixedComplex> roots = complex_roots(q, bits);

    std::vector<RootUnit> units;
    std::vector<char> used(roots.size(), 0);
    const BigInt real_tol = pow2(bits / 2);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = 1;
        if (::abs(roots[i].im().mantissa()) <= real_tol) {
            units.push_back({{i}});
            continue;
        }
        std::size_t best = roots.size();
        BigInt best_gap;
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (used[j]) continue;
            const FixedComplex diff = drop(roots[i].conj() - roots[j]);
            const BigInt gap = magnitude_ulps(diff);
            if (best == roots.size() || gap < best_gap) {
                best = j;
                best_gap = gap;
            }
        }
        if (best == roots.size()) return p;  // unpaired root; treat as irreducible
        used[best] = 1;
        units.push_back({{i, best}});
    }

    const BigInt tol = pow2(bits - 16);
    const BigInt q0 = q.coeff(0);
    std::vector<std::size_t> chosen;
    std::optional<IntegerPolynomial> found;

    auto try_subset = [&]() -> bool {
        std::vector<std::size_t> idx;
        for (std::size_t u : chosen)
            for (std::size_t r : units[u].members) idx.push_back(r);
        // trace test
        FixedComplex sum = FixedComplex::from_int(0, bits);
        for (std::size_t r : idx) sum = drop(sum + roots[r]);
        if (!near_integer(sum.re(), tol)) return false;
        // norm test
        FixedComplex prod = FixedComplex::from_int(1, bits);
        for (std::size_t r : idx) prod = drop(prod * roots[r]);
        if (!near_integer(prod.re(), tol)) return false;
        const BigInt c0 = prod.re().round_to_integer();
        if (c0 == 0 || q0 % c0 != 0) return false;
        // full product
        std::vector<FixedComplex> f = {FixedComplex::from_int(1, bits)};
        for (std::size_t r : idx) {
            std::vector<FixedComplex> g(f.size() + 1, FixedComplex::from_int(0, bits));
            for (std::size_t k = 0; k < f.size(); ++k) {
                g[k + 1] = drop(g[k + 1] + f[k]);
                g[k] = drop(g[k] - f[k] * roots[r]);
            }
            f.swap(g);
        }
        std::vector<BigInt> coeffs;
        for (const FixedComplex& c : f) {
            if (!near_integer(c.re(), tol)) return false;
            coeffs.push_back(c.re().round_to_integer());
        }
        const IntegerPolynomial cand(coeffs);
        if (!divide_exact(q, cand)) return false;
        // undo the transform: cand(lc x) up to content
        std::vector<BigInt> back;
        for (int k = 0; k <= cand.degree(); ++k) back.push_back(cand.coeff(k) * int_pow(lc, static_cast<unsigned long>(k)));
        found = IntegerPolynomial(back).primitive_part();
        return true;
    };

    std::function<bool(std::size_t, int)> search = [&](std::size_t start, int degree_left) -> bool {
        if (degree_left == 0) return try_subset();
        for (std::size_t u = start; u < units.size(); ++u) {
            const int size = static_cast<int>(units[u].members.size());
            if (size > degree_left) continue;
            chosen.push_back(u);
            if (search(u + 1, degree_left - size)) return true;
            chosen.pop_back();
        }
        return false;
    };
    for (int k = 1; 2 * k <= n; ++k) {
        chosen.clear();
        if (search(0, k)) return *found;
    }
    return p;
}

} // namespace

std::vector<IntegerPolynomial> factor(const IntegerPolynomial& p) {
    if (p.degree() < 1) return {};
    const IntegerPolynomial pp = p.primitive_part();
    const IntegerPolynomial g = poly_gcd(pp, pp.derivative());
    std::vector<IntegerPolynomial> out;
    if (g.degree() > 0) {
        const IntegerPolynomial rest = *divide_exact(pp, g);
        for (auto& f : factor(g)) out.push_back(f);
        for (auto& f : factor(rest)) out.push_back(f);
    } else {
        IntegerPolynomial f = smallest_factor(pp);
        f.irreducible = true;
        out.push_back(f);
        if (f.degree() < pp.degree())
            for (auto& h : factor(*divide_exact(pp, f))) out.push_back(h);
    }
    std::sort(out.begin(), out.end(), [](const IntegerPolynomial& a, const IntegerPolynomial& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        return a.coefficients() < b.coefficients();
    });
    return out;
}

bool is_irreducible(const IntegerPolynomial& p) {
    if (p.degree() < 1) return false;
    const std::vector<IntegerPolynomial> f = factor(p);
    return f.size() == 1;
}

IntegerPolynomial factor_vanishing_at(const IntegerPolynomial& p, const FixedComplex& z) {
    const std::vector<IntegerPolynomial> fs = factor(p);
    if (fs.empty()) throw DomainError("constant polynomial has no roots");
    const int bits = std::max(z.bits(), 128);
    std::size_t best = 0;
    double best_gap = INFINITY;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (const FixedComplex& r : complex_roots(fs[i], bits)) {
            const FixedComplex d = drop(r - z.at(bits));
            const double gap = std::hypot(d.re().to_double(), d.im().to_double());
            if (gap < best_gap) {
                best_gap = gap;
                best = i;
            }
        }
    }
    return fs[best];
}

} // namespace jv
