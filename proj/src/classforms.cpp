#include "jv/classforms.hpp"

#include "jv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace jv {

namespace {

long isqrt_long(long n) {
    long r = static_cast<long>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

struct SmallForm {
    long a, b, c;
    auto operator<=>(const SmallForm&) const = default;
};

BinaryQuadraticForm big(const SmallForm& f) { return {f.a, f.b, f.c}; }

SmallForm small(const BinaryQuadraticForm& f) { return {f.a.get_si(), f.b.get_si(), f.c.get_si()}; }

bool primitive_small(const SmallForm& f) { return std::gcd(std::gcd(f.a, f.b), f.c) == 1; }

void check_discriminant(long disc, long limit) {
    if (disc % 4 != 0 && ((disc % 4) + 4) % 4 != 1) throw DomainError("discriminant must be 0 or 1 mod 4");
    if (std::labs(disc) > limit) throw BoundExceeded("discriminant " + std::to_string(disc) + " exceeds the enumeration limit");
}

std::vector<SmallForm> definite_reduced(long disc) {
    std::vector<SmallForm> out;
    const long n = -disc;
    for (long a = 1; 3 * a * a <= n; ++a) {
        for (long b = -a; b <= a; ++b) {
            if (((b - disc) % 2) != 0) continue;
            const long num = b * b - disc;
            if (num % (4 * a) != 0) continue;
            const long c = num / (4 * a);
            if (c < a) continue;
            if (b < 0 && (-b == a || a == c)) continue;
            const SmallForm f{a, b, c};
            if (primitive_small(f)) out.push_back(f);
        }
    }
    return out;
}

bool indefinite_is_reduced(long disc, long a, long b) {
    if (b <= 0 || b * b >= disc) return false;
    const long twice = 2 * std::labs(a);
    if ((twice + b) * (twice + b) <= disc) return false;
    return twice - b <= 0 || (twice - b) * (twice - b) < disc;
}

std::vector<SmallForm> indefinite_reduced(long disc) {
    std::vector<SmallForm> out;
    const long root = isqrt_long(disc);
    for (long b = (disc % 2 == 0) ? 2 : 1; b <= root; b += 2) {
        const long m = (disc - b * b) / 4;  // -a c > 0
        for (long x = 1; x * x <= m; ++x) {
            if (m % x != 0) continue;
            std::vector<long> sizes = {x};
            if (x * x != m) sizes.push_back(m / x);
            for (long absa : sizes) {
                if (!indefinite_is_reduced(disc, absa, b)) continue;
                for (long a : {absa, -absa}) {
                    const SmallForm f{a, b, -m / a};
                    if (primitive_small(f)) out.push_back(f);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SmallForm rho_small(long disc, const SmallForm& f) {
    const long root = isqrt_long(disc);
    const long mod = 2 * std::labs(f.c);
    const long shift = ((root + f.b) % mod + mod) % mod;
    const long b2 = root - shift;
    return {f.c, b2, (b2 * b2 - disc) / (4 * f.c)};
}

// representatives ordered with a > 0 first, then small a, then large b
bool preferred(const SmallForm& x, const SmallForm& y) {
    if ((x.a > 0) != (y.a > 0)) return x.a > 0;
    if (std::labs(x.a) != std::labs(y.a)) return std::labs(x.a) < std::labs(y.a);
    return x.b > y.b;
}

struct IndefiniteClasses {
    long narrow = 0;
    std::vector<SmallForm> wide_reps;
};

IndefiniteClasses indefinite_classes(long disc) {
    std::vector<SmallForm> forms = indefinite_reduced(disc);
    std::sort(forms.begin(), forms.end(), preferred);
    std::map<SmallForm, long> cycle_of;
    long cycles = 0;
    for (const SmallForm& f : forms) {
        if (cycle_of.count(f)) continue;
        SmallForm g = f;
        do {
            cycle_of[g] = cycles;
            g = rho_small(disc, g);
            if (!cycle_of.count(g) && !std::binary_search(forms.begin(), forms.end(), g, preferred))
                throw std::logic_error("reduction step left the reduced forms");
        } while (!(g == f));
        ++cycles;
    }
    IndefiniteClasses out;
    out.narrow = cycles;
    std::vector<char> used(static_cast<std::size_t>(cycles), 0);
    for (const SmallForm& f : forms) {
        const long k = cycle_of.at(f);
        if (used[static_cast<std::size_t>(k)]) continue;
        used[static_cast<std::size_t>(k)] = 1;
        used[static_cast<std::size_t>(cycle_of.at(SmallForm{-f.a, f.b, -f.c}))] = 1;
        out.wide_reps.push_back(f);
    }
    return out;
}

} // namespace

bool BinaryQuadraticForm::primitive() const {
    BigInt g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g == 1;
}

bool BinaryQuadraticForm::operator<(const BinaryQuadraticForm& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    return c < o.c;
}

std::vector<BinaryQuadraticForm> reduced_forms(const BigInt& disc) {
    if (!disc.fits_slong_p()) throw BoundExceeded("discriminant too large");
    const long dl = disc.get_si();
    check_discriminant(dl, std::labs(dl));
    std::vector<SmallForm> forms;
    if (dl < 0) {
        forms = definite_reduced(dl);
    } else {
        const long r = isqrt_long(dl);
        if (r * r == dl) throw DomainError("square discriminant");
        forms = indefinite_reduced(dl);
    }
    std::vector<BinaryQuadraticForm> out;
    for (const SmallForm& f : forms) out.push_back(big(f));
    return out;
}

BinaryQuadraticForm rho(const BinaryQuadraticForm& f) {
    const BigInt disc = f.discriminant();
    if (disc <= 0 || !disc.fits_slong_p()) throw DomainError("rho needs a positive discriminant");
    return big(rho_small(disc.get_si(), small(f)));
}

ClassGroupSummary class_group(const OrderDescriptor& order, long limit) {
    const BigInt disc_big = order.discriminant();
    if (!disc_big.fits_slong_p() || abs(disc_big) > limit)
        throw BoundExceeded("discriminant " + disc_big.get_str() + " exceeds the enumeration limit");
    const long disc = disc_big.get_si();
    check_discriminant(disc, limit);
    ClassGroupSummary out;
    out.order = order;
    if (order.kind == FieldKind::imaginary) {
        for (const SmallForm& f : definite_reduced(disc)) out.representatives.push_back(big(f));
        out.h = out.h_narrow = static_cast<long>(out.representatives.size());
    } else {
        const IndefiniteClasses cls = indefinite_classes(disc);
        for (const SmallForm& f : cls.wide_reps) out.representatives.push_back(big(f));
        out.h = static_cast<long>(cls.wide_reps.size());
        out.h_narrow = cls.narrow;
    }
    return out;
}

std::vector<PseudoLatticeRep> pseudo_lattice_reps(const OrderDescriptor& order, long limit) {
    if (order.kind != FieldKind::real) throw DomainError("pseudo-lattices need a real order");
    const ClassGroupSummary cg = class_group(order, limit);
    // sqrt(Disc) = g sqrt d
    const long g = (order.d % 4 == 1) ? order.conductor : 2 * order.conductor;
    std::vector<PseudoLatticeRep> out;
    for (const BinaryQuadraticForm& f : cg.representatives) {
        if (f.a <= 0) throw std::logic_error("representative with a <= 0");
        const QuadraticIrrational theta(-f.b, g, 2 * f.a, order.d);
        // a theta^2 + b theta + c = 0 exactly
        const QuadraticIrrational value = theta * theta * QuadraticIrrational::integer(f.a, order.d) +
                                          theta * QuadraticIrrational::integer(f.b, order.d) + f.c;
        if (!(value == QuadraticIrrational::integer(0, order.d))) throw std::logic_error("theta is not a root");
        out.push_back({theta, f});
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = i + 1; j < out.size(); ++j) {
            if (sl2_equivalent(out[i].theta, out[j].theta).sl2)
                throw std::logic_error("pseudo-lattice representatives are equivalent");
        }
    }
    return out;
}

ConductorMatch match_conductor(const OrderDescriptor& given, long search_bound, long limit) {
    const long target = class_group(given, limit).h;
    ConductorMatch m;
    m.given_side = given.kind;
    m.given_conductor = given.conductor;
    const FieldKind other = given.kind == FieldKind::real ? FieldKind::imaginary : FieldKind::real;
    for (long f = 1; f <= search_bound; ++f) {
        const OrderDescriptor o{other, given.d, f};
        if (class_group(o, limit).h == target) {
            m.matched_conductor = f;
            m.h_common = target;
            return m;
        }
    }
    throw NoMatchWithinBound("no conductor up to " + std::to_string(search_bound) + " has class number " +
                             std::to_string(target));
}

} // namespace jv
