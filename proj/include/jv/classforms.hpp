#pragma once

// Binary quadratic forms, class numbers of quadratic orders, the quadratic
// irrationals attached to the classes of a real order, and the search for a
// conductor with a prescribed class number.

#include "jv/quadfield.hpp"

#include <vector>

namespace jv {

/// a x^2 + b xy + c y^2.
struct BinaryQuadraticForm {
    BigInt a, b, c;
    BigInt discriminant() const { return b * b - 4 * a * c; }
    bool primitive() const;
    bool operator==(const BinaryQuadraticForm&) const = default;
    bool operator<(const BinaryQuadraticForm& o) const;
};

constexpr long kDefaultDiscriminantLimit = 100'000'000;

struct ClassGroupSummary {
    OrderDescriptor order;
    // For real orders h counts classes up to f ~ -f (the wide count); the
    // proper-equivalence count is h_narrow. Both agree for imaginary orders.
    long h = 0;
    long h_narrow = 0;
    std::vector<BinaryQuadraticForm> representatives;  // one per class counted by h
};

// Reduced forms of discriminant disc (definite: positive definite only).
std::vector<BinaryQuadraticForm> reduced_forms(const BigInt& disc);
// The reduction step on reduced indefinite forms.
BinaryQuadraticForm rho(const BinaryQuadraticForm& f);

ClassGroupSummary class_group(const OrderDescriptor& order, long limit = kDefaultDiscriminantLimit);

struct PseudoLatticeRep {
    QuadraticIrrational theta;
    BinaryQuadraticForm source_form;
};

// theta is the larger root of the source form (a > 0), so theta lies in (0, 1).
std::vector<PseudoLatticeRep> pseudo_lattice_reps(const OrderDescriptor& order,
                                                  long limit = kDefaultDiscriminantLimit);

struct ConductorMatch {
    FieldKind given_side = FieldKind::real;
    long given_conductor = 1;
    long matched_conductor = 1;
    long h_common = 1;
};

constexpr long kDefaultSearchBound = 100;

ConductorMatch match_conductor(const OrderDescriptor& given, long search_bound = kDefaultSearchBound,
                               long limit = kDefaultDiscriminantLimit);

} // namespace jv
