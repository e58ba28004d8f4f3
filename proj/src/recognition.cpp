#include "jv/recognition.hpp"

#include "jv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jv {

namespace {

BigInt pow2(int k) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(k));
    return r;
}

double log2_abs(const BigInt& n) {
    if (n == 0) return -INFINITY;
    long exp = 0;
    const double m = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return std::log2(std::fabs(m)) + static_cast<double>(exp);
}

double log2_rat(const BigRat& q) { return log2_abs(q.get_num()) - log2_abs(q.get_den()); }

// log2 of an upper bound for |z|
double log2_bound(const FixedComplex& z) {
    const BigInt ulps = ::abs(z.re().mantissa()) + z.re().err_ulps() + ::abs(z.im().mantissa()) + z.im().err_ulps();
    if (ulps == 0) return -z.bits();
    return log2_abs(ulps) - z.bits();
}

BigInt scaled_round(const FixedReal& x, int s) {
    // round(x * 2^s) for s <= bits
    const int shift = x.bits() - s;
    BigInt r;
    const BigInt half = shift > 0 ? pow2(shift - 1) : BigInt(0);
    if (shift <= 0) return x.mantissa() * pow2(-shift);
    mpz_fdiv_q_2exp(r.get_mpz_t(), BigInt(x.mantissa() + half).get_mpz_t(), static_cast<unsigned long>(shift));
    return r;
}

// Lattice [identity | 2^s Re x_k | 2^s Im x_k] for the given values.
std::vector<std::vector<BigInt>> relation_lattice(const std::vector<FixedComplex>& xs, int s) {
    const std::size_t n = xs.size();
    std::vector<std::vector<BigInt>> rows(n, std::vector<BigInt>(n + 2, 0));
    for (std::size_t k = 0; k < n; ++k) {
        rows[k][k] = 1;
        rows[k][n] = scaled_round(xs[k].re(), s);
        rows[k][n + 1] = scaled_round(xs[k].im(), s);
    }
    return rows;
}

int trusted_scale(const std::vector<FixedComplex>& xs, int bits) {
    int worst = 0;
    for (const FixedComplex& x : xs) worst = std::max(worst, std::max(x.re().error_bits(), x.im().error_bits()));
    return bits - worst - 8;
}

// A relation vector of length L has height at least this (log10).
double excluded_height_log10(const LLLResult& r, std::size_t n) {
    double min_log2 = INFINITY;
    for (const BigRat& b : r.gs_norms_sq) min_log2 = std::min(min_log2, 0.5 * log2_rat(b));
    const double dim = static_cast<double>(n);
    const double factor = std::sqrt(dim + 2 * dim * dim);
    return (min_log2 - std::log2(factor)) * std::log10(2.0);
}

std::vector<FixedComplex> powers(const FixedComplex& z, int count) {
    std::vector<FixedComplex> out = {FixedComplex::from_int(1, z.bits())};
    for (int k = 1; k < count; ++k) out.push_back(out.back() * z);
    return out;
}

} // namespace

NumberSource constant_source(const FixedComplex& z) {
    return [z](int bits) { return z.at(bits); };
}

FixedReal log_positive(const FixedReal& x, int bits) {
    const FixedReal xp = x.at(bits);
    if (xp.sign() <= 0) throw DomainError("logarithm of a non-positive number");
    const BigInt one = pow2(bits);
    if (xp.mantissa() > one) return log_fixed(xp, bits);
    if (xp.mantissa() == one) return FixedReal(0, bits, xp.err_ulps() * 2 + 1);
    return -log_fixed(FixedReal::from_int(1, bits) / xp, bits);
}

// ------------------------------------------------------------------ J

FixedComplex evaluate_J_numeric(const FixedReal& theta, const FixedReal& y, int bits) {
    const int w = bits + 32;
    const FixedReal yw = y.at(w);
    if ((yw - FixedReal::from_int(1, w)).sign() <= 0) throw DomainError("J needs y > 1");
    const FixedReal mu = log_positive(yw, w);
    const FixedReal t = theta.at(w);
    const FixedComplex product = exp_cis(t, w) * mu;
    const FixedReal turn = (pi(w) * t).shifted(1);
    const FixedComplex exp_form = exp_complex(FixedComplex(log_positive(mu, w), turn), w);
    if (!product.indistinguishable(exp_form)) throw std::logic_error("the two forms of J disagree");
    return product.at(bits);
}

JValue evaluate_J(const QuadraticIrrational& theta, const UnitElement& epsilon, int bits) {
    if ((epsilon.value - BigInt(1)).sign() <= 0) throw DomainError("J needs epsilon > 1");
    const int w = bits + 32;
    JValue out{theta, epsilon, FixedReal(), FixedComplex(), bits};
    const FixedReal y = epsilon.value.to_fixed(w);
    out.mu = log_positive(y, w).at(bits);
    out.value = evaluate_J_numeric(theta.to_fixed(w), y, bits);
    return out;
}

NumberSource j_value_source(const QuadraticIrrational& theta, const UnitElement& epsilon) {
    return [theta, epsilon](int bits) { return evaluate_J(theta, epsilon, bits).value; };
}

// ------------------------------------------------------------------ LLL

LLLResult lll_reduce(const std::vector<std::vector<BigInt>>& input, const BigRat& delta) {
    if (delta <= BigRat(1, 4) || delta >= 1) throw DomainError("LLL delta must lie in (1/4, 1)");
    const std::size_t n = input.size();
    if (n == 0) return {};
    const std::size_t cols = input[0].size();
    // 1-indexed as in the integral algorithm
    std::vector<std::vector<BigInt>> b(n + 1), h(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        if (input[i - 1].size() != cols) throw DomainError("ragged basis");
        b[i] = input[i - 1];
        h[i].assign(n, 0);
        h[i][i - 1] = 1;
    }
    auto dot = [&](const std::vector<BigInt>& x, const std::vector<BigInt>& y) {
        BigInt s = 0;
        for (std::size_t c = 0; c < cols; ++c) s += x[c] * y[c];
        return s;
    };
    std::vector<BigInt> d(n + 1);
    std::vector<std::vector<BigInt>> lam(n + 1, std::vector<BigInt>(n + 1, 0));
    const BigInt dp = delta.get_num(), dq = delta.get_den();

    auto red = [&](std::size_t k, std::size_t l) {
        if (2 * ::abs(lam[k][l]) <= d[l]) return;
        BigInt q;
        // nearest integer to lam / d
        mpz_fdiv_q(q.get_mpz_t(), BigInt(2 * lam[k][l] + d[l]).get_mpz_t(), BigInt(2 * d[l]).get_mpz_t());
        for (std::size_t c = 0; c < cols; ++c) b[k][c] -= q * b[l][c];
        for (std::size_t c = 0; c < n; ++c) h[k][c] -= q * h[l][c];
        lam[k][l] -= q * d[l];
        for (std::size_t i = 1; i < l; ++i) lam[k][i] -= q * lam[l][i];
    };
    auto swap = [&](std::size_t k, std::size_t kmax) {
        std::swap(b[k], b[k - 1]);
        std::swap(h[k], h[k - 1]);
        for (std::size_t j = 1; j + 2 <= k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
        const BigInt l = lam[k][k - 1];
        const BigInt bb = (d[k - 2] * d[k] + l * l) / d[k - 1];
        for (std::size_t i = k + 1; i <= kmax; ++i) {
            const BigInt t = lam[i][k];
            lam[i][k] = (d[k] * lam[i][k - 1] - l * t) / d[k - 1];
            lam[i][k - 1] = (bb * t + l * lam[i][k]) / d[k];
        }
        d[k - 1] = bb;
    };

    d[0] = 1;
    d[1] = dot(b[1], b[1]);
    if (d[1] == 0) throw DegenerateBasis("zero vector in basis");
    std::size_t k = 2, kmax = 1;
    while (k <= n) {
        if (k > kmax) {
            kmax = k;
            for (std::size_t j = 1; j <= k; ++j) {
                BigInt u = dot(b[k], b[j]);
                for (std::size_t i = 1; i < j; ++i) u = (d[i] * u - lam[k][i] * lam[j][i]) / d[i - 1];
                if (j < k)
                    lam[k][j] = u;
                else
                    d[k] = u;
            }
            if (d[k] == 0) throw DegenerateBasis("basis rows are linearly dependent");
        }
        red(k, k - 1);
        if (dq * d[k] * d[k - 2] < dp * d[k - 1] * d[k - 1] - dq * lam[k][k - 1] * lam[k][k - 1]) {
            swap(k, kmax);
            if (k > 2) --k;
        } else {
            for (std::size_t l = k - 1; l-- > 1;) red(k, l);
            ++k;
        }
    }

    LLLResult out;
    for (std::size_t i = 1; i <= n; ++i) {
        out.basis.push_back(b[i]);
        out.transform.push_back(h[i]);
        BigRat g(d[i], d[i - 1]);
        g.canonicalize();
        out.gs_norms_sq.push_back(g);
    }
    const BigInt det = bareiss_determinant(out.transform);
    if (det != 1 && det != -1) throw std::logic_error("LLL transform is not unimodular");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols; ++c) {
            BigInt s = 0;
            for (std::size_t j = 0; j < n; ++j) s += out.transform[i][j] * input[j][c];
            if (s != out.basis[i][c]) throw std::logic_error("LLL transform does not map the input to the output");
        }
    }
    return out;
}

// ------------------------------------------------------------------ min_poly

RecognitionResult min_poly(const NumberSource& source, int deg_bound, const BigInt& height_bound, int bits) {
    if (deg_bound < 1) throw DomainError("deg_bound must be positive");
    RecognitionResult res;
    res.deg_bound = deg_bound;
    res.height_bound = height_bound;
    res.precision_bits = bits;
    const FixedComplex z = source(bits);
    if (std::max(z.re().error_bits(), z.im().error_bits()) > bits / 10)
        throw InsufficientPrecision("fewer than 0.9 p bits of the value are trusted");
    const std::vector<FixedComplex> zp = powers(z, deg_bound + 1);
    std::optional<FixedComplex> z2;
    const double threshold = -0.8 * bits;  // 10^(-0.8 digits) in log2

    auto validate = [&](IntegerPolynomial p) -> bool {
        p = p.primitive_part();
        if (p.degree() < 1 || p.height() > height_bound) return false;
        if (!is_irreducible(p)) p = factor_vanishing_at(p, z);
        const double r1 = log2_bound(p.evaluate(z));
        if (!(r1 < threshold)) return false;
        if (!z2) z2 = source(2 * bits);
        const double r2 = log2_bound(p.evaluate(*z2));
        if (!(r2 < threshold) || !(r2 <= r1 - 0.5 * bits)) return false;
        res.recognized = true;
        p.irreducible = true;
        res.minpoly = p;
        res.residual_log10 = r1 * std::log10(2.0);
        res.residual_log10_doubled = r2 * std::log10(2.0);
        return true;
    };

    std::optional<LLLResult> last;
    for (int n = 1; n <= deg_bound; ++n) {
        const std::vector<FixedComplex> xs(zp.begin(), zp.begin() + n + 1);
        const int s = trusted_scale(xs, bits);
        if (s < 16) throw InsufficientPrecision("powers of the value lost too much precision");
        last = lll_reduce(relation_lattice(xs, s));
        for (const auto& row : last->basis) {
            const IntegerPolynomial p(std::vector<BigInt>(row.begin(), row.begin() + n + 1));
            if (validate(p)) return res;
        }
    }
    res.excluded_height_log10 = excluded_height_log10(*last, static_cast<std::size_t>(deg_bound + 1));
    res.residual_log10 = 0;
    return res;
}

ConjugacyResult conjugacy_classes(const std::vector<NumberSource>& values, int deg_bound, const BigInt& height_bound,
                                  int bits) {
    ConjugacyResult out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const RecognitionResult r = min_poly(values[i], deg_bound, height_bound, bits);
        out.per_value.push_back(r);
        if (!r.recognized) {
            out.unresolved.push_back(i);
            continue;
        }
        auto it = std::find_if(out.groups.begin(), out.groups.end(),
                               [&](const ConjugacyResult::Group& g) { return g.minpoly == *r.minpoly; });
        if (it == out.groups.end())
            out.groups.push_back({*r.minpoly, {i}});
        else
            it->members.push_back(i);
    }
    return out;
}

ConjugacyResult conjugacy_classes(const std::vector<JValue>& values, int deg_bound, const BigInt& height_bound) {
    if (values.empty()) return {};
    const int bits = values.front().precision;
    std::vector<NumberSource> sources;
    for (const JValue& v : values) {
        if (v.precision != bits) throw DomainError("J values must share one precision");
        sources.push_back(j_value_source(v.theta, v.epsilon));
    }
    return conjugacy_classes(sources, deg_bound, height_bound, bits);
}

// ------------------------------------------------------------------ membership

MembershipResult member_of_field(const NumberSource& source, const ClassFieldDescriptor& field, int bits,
                                 const BigInt& height_bound) {
    MembershipResult res;
    res.height_bound = height_bound;
    res.precision_bits = bits;
    const int m = field.degree;
    auto values_at = [&](int b) {
        std::vector<FixedComplex> xs = {source(b)};
        const std::vector<FixedComplex> g = powers(generator_embedding_at(field, b), m);
        xs.insert(xs.end(), g.begin(), g.end());
        return xs;
    };
    const std::vector<FixedComplex> xs = values_at(bits);
    if (std::max(xs[0].re().error_bits(), xs[0].im().error_bits()) > bits / 10)
        throw InsufficientPrecision("fewer than 0.9 p bits of the value are trusted");
    const int s = trusted_scale(xs, bits);
    if (s < 16) throw InsufficientPrecision("generator powers lost too much precision");
    const LLLResult lll = lll_reduce(relation_lattice(xs, s));
    const double threshold = -0.8 * bits;

    auto residual = [&](const std::vector<FixedComplex>& v, const std::vector<BigInt>& a) {
        FixedComplex acc = FixedComplex::from_int(0, v[0].bits());
        for (std::size_t k = 0; k < a.size(); ++k) acc = acc + v[k].mul_int(a[k]);
        return log2_bound(acc) - log2_abs(a[0]);
    };
    std::optional<std::vector<FixedComplex>> xs2;
    for (const auto& row : lll.basis) {
        const std::vector<BigInt> a(row.begin(), row.begin() + m + 1);
        if (a[0] == 0) continue;
        BigInt h = 0;
        for (const BigInt& c : a) h = std::max(h, BigInt(::abs(c)));
        if (h > height_bound) continue;
        const double r1 = residual(xs, a);
        if (!(r1 < threshold)) continue;
        if (!xs2) xs2 = values_at(2 * bits);
        const double r2 = residual(*xs2, a);
        if (!(r2 < threshold) || !(r2 <= r1 - 0.5 * bits)) continue;
        res.found = true;
        for (std::size_t k = 1; k < a.size(); ++k) {
            BigRat c(-a[k], a[0]);
            c.canonicalize();
            res.coordinates.push_back(c);
        }
        res.residual_log10 = r1 * std::log10(2.0);
        return res;
    }
    res.excluded_height_log10 = excluded_height_log10(lll, static_cast<std::size_t>(m + 1));
    return res;
}

// ------------------------------------------------------------------ JSON

nlohmann::json bigint_json(const BigInt& n) {
    if (n.fits_slong_p()) return n.get_si();
    return n.get_str();
}

nlohmann::json to_json(const RecognitionResult& r) {
    nlohmann::json j;
    j["verdict"] = r.recognized ? "recognized" : "no_relation";
    nlohmann::json coeffs = nlohmann::json::array();
    if (r.minpoly)
        for (const BigInt& c : r.minpoly->coefficients()) coeffs.push_back(bigint_json(c));
    j["minpoly"] = coeffs;
    j["residual_log10"] = r.recognized ? nlohmann::json(r.residual_log10) : nlohmann::json(nullptr);
    j["deg_bound"] = r.deg_bound;
    j["height_bound"] = bigint_json(r.height_bound);
    j["precision_bits"] = r.precision_bits;
    if (r.recognized)
        j["residual_log10_doubled"] = r.residual_log10_doubled;
    else
        j["excluded_height_log10"] = r.excluded_height_log10;
    return j;
}

nlohmann::json to_json(const MembershipResult& r) {
    nlohmann::json j;
    j["verdict"] = r.found ? "member" : "not_found";
    nlohmann::json coords = nlohmann::json::array();
    for (const BigRat& c : r.coordinates) coords.push_back(c.get_str());
    j["coordinates"] = coords;
    j["height_bound"] = bigint_json(r.height_bound);
    j["precision_bits"] = r.precision_bits;
    if (r.found)
        j["residual_log10"] = r.residual_log10;
    else
        j["excluded_height_log10"] = r.excluded_height_log10;
    return j;
}

} // namespace jv
