#pragma once

// Klein's j-invariant by q-series, ring class polynomials of imaginary
// quadratic orders and a primitive element of the ring class field.

#include "jv/classforms.hpp"
#include "jv/polynomial.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace jv {

// Moves tau into |Re| <= 1/2, |tau| >= 1 by translations and tau -> -1/tau.
FixedComplex reduce_to_fundamental_domain(const FixedComplex& tau);

// j(tau) = E4^3 / Delta with Delta from the pentagonal series. The q-series
// tails are bounded and included in the error.
FixedComplex j_invariant(const FixedComplex& tau, int bits);

struct RingClassPolynomial {
    IntegerPolynomial poly;
    int bits = 0;                      // precision at which rounding was certified
    std::vector<BinaryQuadraticForm> forms;
    std::vector<FixedComplex> taus;    // (-b + sqrt disc) / 2a per form
    std::vector<FixedComplex> j_values;
};

// Retries at doubled precision until every coefficient is within 2^-32 of
// an integer; throws PrecisionInsufficient past max_bits.
RingClassPolynomial ring_class_polynomial_detailed(long d, long f, int bits, int max_bits = 1 << 15);
IntegerPolynomial ring_class_polynomial(long d, long f, int bits);

struct ClassFieldDescriptor {
    long d = 1;
    long f = 1;
    long t = 1;  // gamma = j(tau_1) + t f sqrt(-d)
    BinaryQuadraticForm principal_form;
    FixedComplex tau1;
    IntegerPolynomial ring_class_poly;
    IntegerPolynomial generator_minpoly;
    FixedComplex generator_embedding;
    int degree = 0;  // 2 h
};

ClassFieldDescriptor hcf_generator(long d, long f, int bits);
ClassFieldDescriptor hcf_generator(const RingClassPolynomial& h, long d, long f, int bits);
// The generator's embedding recomputed at any precision.
FixedComplex generator_embedding_at(const ClassFieldDescriptor& field, int bits);

// Minimal polynomial of j + s with s^2 = -c, from the minimal polynomial of j.
IntegerPolynomial shifted_norm(const IntegerPolynomial& h, const BigInt& c);

// Plain-text cache of ring class polynomials, one file per (d, f).
std::filesystem::path class_polynomial_cache_path(const std::filesystem::path& dir, long d, long f);
std::optional<IntegerPolynomial> load_class_polynomial(const std::filesystem::path& dir, long d, long f);
void store_class_polynomial(const std::filesystem::path& dir, long d, long f, const IntegerPolynomial& poly, int bits);

} // namespace jv
