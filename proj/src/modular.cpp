#include "jv/modular.hpp"

#include "jv/errors.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace jv {

namespace {

BigInt pow2(int k) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(k));
    return r;
}

long sigma3(long n) {
    long s = 0;
    for (long k = 1; k * k <= n; ++k) {
        if (n % k != 0) continue;
        s += k * k * k;
        const long m = n / k;
        if (m != k) s += m * m * m;
    }
    return s;
}

// Least n with coefficient_scale * n^3 * r^n * 2^bits < 1.
long terms_needed(double r, double coefficient_scale, int bits) {
    const double lr = std::log2(r);
    for (long n = 1;; ++n) {
        const double l = std::log2(coefficient_scale) + 3 * std::log2(static_cast<double>(n)) + n * lr + bits;
        if (l < 0) return n;
    }
}

bool certified_integer(const FixedComplex& c, int margin_bits, BigInt& value) {
    const int bits = c.bits();
    if (bits <= margin_bits) return false;
    const BigInt tol = pow2(bits - margin_bits);
    value = c.re().round_to_integer();
    const BigInt re_gap = ::abs(c.re().mantissa() - value * pow2(bits)) + c.re().err_ulps();
    const BigInt im_gap = ::abs(c.im().mantissa()) + c.im().err_ulps();
    return re_gap <= tol && im_gap <= tol;
}

} // namespace

FixedComplex reduce_to_fundamental_domain(const FixedComplex& tau) {
    if (tau.im().sign() <= 0) throw DomainError("tau must lie in the upper half plane");
    FixedComplex t = tau;
    const int bits = tau.bits();
    const FixedReal one = FixedReal::from_int(1, bits);
    for (int iter = 0; iter < 10000; ++iter) {
        const BigInt n = t.re().round_to_integer();
        t = t - FixedComplex::from_int(n, bits);
        if ((t.norm2() - one).sign() < 0)
            t = -(FixedComplex::from_int(1, bits) / t);
        else
            return t;
    }
    throw PrecisionInsufficient("reduction of tau did not terminate");
}

FixedComplex j_invariant(const FixedComplex& tau_in, int bits) {
    if (tau_in.im().sign() <= 0) throw DomainError("j_invariant needs Im(tau) > 0");
    const FixedComplex tau = reduce_to_fundamental_domain(tau_in.at(std::max(tau_in.bits(), bits + 64)));
    const double y = tau.im().to_double();
    const int w = bits + 64 + static_cast<int>(std::ceil(18.2 * y));
    const FixedComplex t = tau.at(w);

    // q = exp(-2 pi y) * cis(x)
    const FixedReal radius = exp_fixed(-(pi(w) * t.im()).shifted(1), w);
    const FixedComplex q = exp_cis(t.re(), w) * radius;
    const double r = std::exp(-2 * M_PI * y) * (1 + 1e-6);

    // powers of q up to the largest exponent either series needs
    const long n_e4 = terms_needed(r, 240 * 1.21, w);
    long k_max = 1;
    while ((3 * k_max * k_max - k_max) / 2 * std::log2(r) + w >= 0) ++k_max;
    const long n_max = std::max(n_e4, (3 * k_max * k_max + k_max) / 2);
    std::vector<FixedComplex> qp = {FixedComplex::from_int(1, w)};
    for (long n = 1; n <= n_max; ++n) qp.push_back(qp.back() * q);

    // E4 = 1 + 240 sum sigma3(n) q^n; the tail is at most twice its first term
    FixedComplex e4 = FixedComplex::from_int(1, w);
    for (long n = 1; n < n_e4; ++n) e4 = e4 + qp[static_cast<std::size_t>(n)].mul_int(240 * sigma3(n));
    e4 = FixedComplex(e4.re().with_extra_error(2), e4.im().with_extra_error(2));

    // prod (1 - q^n) = sum_k (-1)^k q^(k(3k-1)/2), k over all integers
    FixedComplex eta = FixedComplex::from_int(1, w);
    for (long k = 1; k < k_max; ++k) {
        const FixedComplex pair = qp[static_cast<std::size_t>((3 * k * k - k) / 2)] + qp[static_cast<std::size_t>((3 * k * k + k) / 2)];
        eta = (k % 2 == 1) ? eta - pair : eta + pair;
    }
    eta = FixedComplex(eta.re().with_extra_error(4), eta.im().with_extra_error(4));

    const FixedComplex e2 = eta * eta, e4p = e2 * e2, e8 = e4p * e4p, e16 = e8 * e8;
    const FixedComplex delta = q * e16 * e8;
    const FixedComplex j = e4 * e4 * e4 / delta;
    return j.at(bits);
}

RingClassPolynomial ring_class_polynomial_detailed(long d, long f, int bits, int max_bits) {
    const OrderDescriptor order = imaginary_order(d, f);
    const ClassGroupSummary cg = class_group(order);
    const BigInt absdisc = -order.discriminant();
    for (int p = bits; p <= max_bits; p *= 2) {
        RingClassPolynomial out;
        out.forms = cg.representatives;
        out.bits = p;
        const int wp = p + 64;
        const FixedReal root = sqrt_fixed(absdisc, wp);
        std::vector<FixedComplex> poly = {FixedComplex::from_int(1, p)};
        for (const BinaryQuadraticForm& form : cg.representatives) {
            const FixedComplex tau =
                FixedComplex(FixedReal::from_int(-form.b, wp), root).div_int(2 * form.a);
            const FixedComplex j = j_invariant(tau, p);
            out.taus.push_back(tau);
            out.j_values.push_back(j);
            std::vector<FixedComplex> next(poly.size() + 1, FixedComplex::from_int(0, p));
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k + 1] = next[k + 1] + poly[k];
                next[k] = next[k] - poly[k] * j;
            }
            poly.swap(next);
        }
        std::vector<BigInt> coeffs;
        bool ok = true;
        for (const FixedComplex& c : poly) {
            BigInt v;
            if (!certified_integer(c, 32, v)) {
                ok = false;
                break;
            }
            coeffs.push_back(v);
        }
        if (!ok) continue;
        out.poly = IntegerPolynomial(coeffs);
        return out;
    }
    throw PrecisionInsufficient("class polynomial coefficients not certified up to " + std::to_string(max_bits) + " bits");
}

IntegerPolynomial ring_class_polynomial(long d, long f, int bits) {
    return ring_class_polynomial_detailed(d, f, bits).poly;
}

IntegerPolynomial shifted_norm(const IntegerPolynomial& h, const BigInt& c) {
    // h(x + s) = A + s B with s^2 = -c; the norm is A^2 + c B^2
    IntegerPolynomial a = IntegerPolynomial::constant(0), b = IntegerPolynomial::constant(0);
    IntegerPolynomial pa = IntegerPolynomial::constant(1), pb = IntegerPolynomial::constant(0);
    for (int k = 0; k <= h.degree(); ++k) {
        a = a + pa.scaled(h.coeff(k));
        b = b + pb.scaled(h.coeff(k));
        // (pa + s pb)(x + s) = (pa x - c pb) + s (pa + pb x)
        const IntegerPolynomial na = pa * IntegerPolynomial::x() - pb.scaled(c);
        const IntegerPolynomial nb = pa + pb * IntegerPolynomial::x();
        pa = na;
        pb = nb;
    }
    return a * a + (b * b).scaled(c);
}

ClassFieldDescriptor hcf_generator(const RingClassPolynomial& h, long d, long f, int bits) {
    ClassFieldDescriptor out;
    out.d = d;
    out.f = f;
    out.ring_class_poly = h.poly;
    out.principal_form = h.forms.front();
    out.tau1 = h.taus.front().at(bits);
    out.degree = 2 * h.poly.degree();
    for (long t = 1;; ++t) {
        const BigInt c = BigInt(t) * t * f * f * d;
        const IntegerPolynomial g = shifted_norm(h.poly, c);
        if (!is_squarefree(g)) continue;
        out.t = t;
        out.generator_minpoly = g;
        out.generator_minpoly.irreducible = true;
        const FixedReal s = sqrt_fixed(BigInt(d), bits).mul_int(BigInt(t) * f);
        out.generator_embedding = h.j_values.front().at(bits) + FixedComplex(FixedReal(0, bits), s);
        return out;
    }
}

FixedComplex generator_embedding_at(const ClassFieldDescriptor& field, int bits) {
    const int wp = bits + 64;
    const BigInt absdisc = -imaginary_order(field.d, field.f).discriminant();
    const BinaryQuadraticForm& q = field.principal_form;
    const FixedComplex tau = FixedComplex(FixedReal::from_int(-q.b, wp), sqrt_fixed(absdisc, wp)).div_int(2 * q.a);
    const FixedReal s = sqrt_fixed(BigInt(field.d), bits).mul_int(BigInt(field.t) * field.f);
    return j_invariant(tau, bits) + FixedComplex(FixedReal(0, bits), s);
}

ClassFieldDescriptor hcf_generator(long d, long f, int bits) {
    return hcf_generator(ring_class_polynomial_detailed(d, f, bits), d, f, bits);
}

// ------------------------------------------------------------------ cache

std::filesystem::path class_polynomial_cache_path(const std::filesystem::path& dir, long d, long f) {
    return dir / ("classpoly_d" + std::to_string(d) + "_f" + std::to_string(f) + ".txt");
}

std::optional<IntegerPolynomial> load_class_polynomial(const std::filesystem::path& dir, long d, long f) {
    std::ifstream in(class_polynomial_cache_path(dir, d, f));
    if (!in) return std::nullopt;
    std::string header, line;
    if (!std::getline(in, header) || header.rfind("# jv class polynomial v1", 0) != 0) return std::nullopt;
    if (!std::getline(in, line)) return std::nullopt;
    long disc = 0, degree = -1;
    if (std::sscanf(line.c_str(), "disc=%ld degree=%ld", &disc, &degree) != 2) return std::nullopt;
    if (BigInt(disc) != imaginary_order(d, f).discriminant()) return std::nullopt;
    std::vector<BigInt> coeffs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        BigInt c;
        if (c.set_str(line, 10) != 0) return std::nullopt;
        coeffs.push_back(c);
    }
    IntegerPolynomial p(coeffs);
    if (p.degree() != degree || p.leading() != 1) return std::nullopt;
    return p;
}

void store_class_polynomial(const std::filesystem::path& dir, long d, long f, const IntegerPolynomial& poly, int bits) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path target = class_polynomial_cache_path(dir, d, f);
    static std::atomic<unsigned long> counter{0};
    std::ostringstream tmp_name;
    tmp_name << target.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
             << counter++;
    const std::filesystem::path tmp = dir / tmp_name.str();
    {
        std::ofstream out(tmp);
        out << "# jv class polynomial v1 bits=" << bits << "\n";
        out << "disc=" << imaginary_order(d, f).discriminant().get_str() << " degree=" << poly.degree() << "\n";
        for (const BigInt& c : poly.coefficients()) out << c.get_str() << "\n";
        if (!out) throw Error("could not write cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

} // namespace jv
