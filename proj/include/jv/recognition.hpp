#pragma once

// J(theta, epsilon) = exp(2 pi i theta + log log epsilon), integer relation
// search by LLL, minimal polynomials, conjugacy grouping and membership in a
// ring class field.

#include "jv/modular.hpp"
#include "jv/quadfield.hpp"

#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"

namespace jv {

// A number that can be produced at any requested precision.
using NumberSource = std::function<FixedComplex(int bits)>;

NumberSource constant_source(const FixedComplex& z);

// Natural logarithm on x > 0.
FixedReal log_positive(const FixedReal& x, int bits);

struct JValue {
    QuadraticIrrational theta;
    UnitElement epsilon;
    FixedReal mu;  // log epsilon
    FixedComplex value;
    int precision = 0;
};

// Evaluates mu * cis(theta) and exp(2 pi i theta + log mu) separately and
// checks that they agree. Throws DomainError unless epsilon > 1.
JValue evaluate_J(const QuadraticIrrational& theta, const UnitElement& epsilon, int bits);
// The same on numeric arguments; y > 1.
FixedComplex evaluate_J_numeric(const FixedReal& theta, const FixedReal& y, int bits);
NumberSource j_value_source(const QuadraticIrrational& theta, const UnitElement& epsilon);

struct LLLResult {
    std::vector<std::vector<BigInt>> basis;
    std::vector<std::vector<BigInt>> transform;  // basis = transform * input
    std::vector<BigRat> gs_norms_sq;             // |b_i*|^2
};

// Integral LLL. delta in (1/4, 1). Throws DegenerateBasis on dependent rows.
// The transform's determinant is checked to be +-1 on every call.
LLLResult lll_reduce(const std::vector<std::vector<BigInt>>& basis, const BigRat& delta = BigRat(99, 100));

struct RecognitionResult {
    bool recognized = false;
    std::optional<IntegerPolynomial> minpoly;
    double residual_log10 = 0;           // log10 |P(z)| bound at the base precision
    double residual_log10_doubled = 0;   // the same at twice the precision
    int deg_bound = 0;
    BigInt height_bound;
    int precision_bits = 0;
    double excluded_height_log10 = 0;    // no relation up to this height (no_relation only)
};

RecognitionResult min_poly(const NumberSource& z, int deg_bound, const BigInt& height_bound, int bits);

struct ConjugacyResult {
    struct Group {
        IntegerPolynomial minpoly;
        std::vector<std::size_t> members;
    };
    std::vector<Group> groups;
    std::vector<std::size_t> unresolved;
    std::vector<RecognitionResult> per_value;
};

ConjugacyResult conjugacy_classes(const std::vector<NumberSource>& values, int deg_bound, const BigInt& height_bound,
                                  int bits);
ConjugacyResult conjugacy_classes(const std::vector<JValue>& values, int deg_bound, const BigInt& height_bound);

struct MembershipResult {
    bool found = false;
    std::vector<BigRat> coordinates;  // z = sum c_k gamma^k
    double residual_log10 = 0;
    BigInt height_bound;
    double excluded_height_log10 = 0;
    int precision_bits = 0;
};

MembershipResult member_of_field(const NumberSource& z, const ClassFieldDescriptor& field, int bits,
                                 const BigInt& height_bound);

nlohmann::json to_json(const RecognitionResult& r);
nlohmann::json to_json(const MembershipResult& r);
nlohmann::json bigint_json(const BigInt& n);

} // namespace jv
