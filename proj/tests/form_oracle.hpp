#pragma once

// Class numbers by orbit closure: every primitive form of discriminant D in
// the box |a|, |b|, |c| <= |D|/4 + 1 is joined to its images under
// (a,b,c) -> (a, b+2a, a+b+c) and (a,b,c) -> (c, -b, a) when those stay in
// the box. Components are counted without any reduction theory.

#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <tuple>
#include <vector>

namespace oracle {

struct FormClasses {
    long proper = 0;  // classes under the two generators
    long wide = 0;    // additionally joining (a,b,c) with (-a,b,-c)
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void join(std::size_t x, std::size_t y) { parent_[find(x)] = find(y); }

private:
    std::vector<std::size_t> parent_;
};

inline FormClasses orbit_class_numbers(long disc) {
    using Form = std::tuple<long, long, long>;
    const long bound = std::labs(disc) / 4 + 1;
    std::map<Form, std::size_t> index;
    std::vector<Form> forms;
    for (long b = -bound; b <= bound; ++b) {
        if ((b * b - disc) % 4 != 0) continue;
        const long n = (b * b - disc) / 4;  // = a c
        if (n == 0) continue;
        for (long a = 1; a <= bound && a <= std::labs(n); ++a) {
            if (n % a != 0) continue;
            for (long s : {1L, -1L}) {
                const long aa = s * a, c = n / aa;
                if (std::labs(c) > bound) continue;
                if (disc < 0 && aa < 0) continue;
                if (std::gcd(std::gcd(aa, b), c) != 1) continue;
                index.emplace(Form{aa, b, c}, forms.size());
                forms.emplace_back(aa, b, c);
            }
        }
    }
    UnionFind proper(forms.size()), wide(forms.size());
    for (std::size_t i = 0; i < forms.size(); ++i) {
        const auto [a, b, c] = forms[i];
        for (const Form& g : {Form{a, b + 2 * a, a + b + c}, Form{c, -b, a}}) {
            auto it = index.find(g);
            if (it == index.end()) continue;
            proper.join(i, it->second);
            wide.join(i, it->second);
        }
        auto neg = index.find(Form{-a, b, -c});
        if (neg != index.end()) wide.join(i, neg->second);
    }
    // count components; for indefinite D restrict to components meeting the
    // small box |a|, |b|, |c| <= sqrt D, which every class meets
    const double small = disc > 0 ? std::sqrt(static_cast<double>(disc)) : 1e300;
    std::map<std::size_t, bool> p, w;
    for (std::size_t i = 0; i < forms.size(); ++i) {
        const auto [a, b, c] = forms[i];
        if (std::labs(a) > small || std::labs(b) > small || std::labs(c) > small) continue;
        p[proper.find(i)] = true;
        w[wide.find(i)] = true;
    }
    return {static_cast<long>(p.size()), static_cast<long>(w.size())};
}

inline bool is_fundamental(long disc) {
    auto square_free = [](long n) {
        n = std::labs(n);
        for (long q = 2; q * q <= n; ++q)
            if (n % (q * q) == 0) return false;
        return true;
    };
    const long r = ((disc % 4) + 4) % 4;
    if (r == 1) return square_free(disc);
    if (r != 0) return false;
    const long m = disc / 4;
    const long mr = ((m % 4) + 4) % 4;
    return (mr == 2 || mr == 3) && square_free(m);
}

} // namespace oracle
