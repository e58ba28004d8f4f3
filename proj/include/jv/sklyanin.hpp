#pragma once

// Noncommutative polynomials in x1..x4 with formal monomial coefficients
// r * mu^a * phi^b * prod q_ij^e (phi stands for e^{2 pi i theta}), rewriting
// modulo quadratic relation systems, bounded completion and the involution
// x1* = x2, x3* = x4.

#include "jv/numerics.hpp"

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace jv {

// Formal parameters of the generic skew system, in rule order.
enum class QSymbol { q13 = 0, q24, q14, q23, q12, q34 };
constexpr int kQSymbols = 6;
std::string to_string(QSymbol s);

struct Exponents {
    int mu = 0;
    int phase = 0;
    std::array<int, 2 * kQSymbols> q{};  // q_ij then conj(q_ij)

    Exponents operator+(const Exponents& o) const;
    Exponents operator-() const;
    auto operator<=>(const Exponents&) const = default;
};

struct CoefficientMonomial {
    BigRat r = 1;
    Exponents e;

    static CoefficientMonomial mu_phase(int mu, int phase, BigRat r = 1);
    static CoefficientMonomial symbol(QSymbol s);

    CoefficientMonomial operator*(const CoefficientMonomial& o) const;
    CoefficientMonomial inverse() const;
    CoefficientMonomial conj() const;
    CoefficientMonomial pow(int k) const;
    bool operator==(const CoefficientMonomial& o) const { return r == o.r && e == o.e; }
    std::string to_string() const;
};

// Finite sum of coefficient monomials with like terms collected.
class Scalar {
public:
    Scalar() = default;
    Scalar(const CoefficientMonomial& m);

    bool is_zero() const { return terms_.empty(); }
    std::optional<CoefficientMonomial> as_monomial() const;
    const std::map<Exponents, BigRat>& terms() const { return terms_; }

    Scalar operator+(const Scalar& o) const;
    Scalar operator-() const;
    Scalar operator-(const Scalar& o) const { return *this + (-o); }
    Scalar operator*(const Scalar& o) const;
    Scalar conj() const;
    bool operator==(const Scalar& o) const { return terms_ == o.terms_; }
    std::string to_string() const;

private:
    std::map<Exponents, BigRat> terms_;
};

// Words are strings over '1'..'4'; the empty word is the unit e.
using Word = std::string;
// Degree-lexicographic order with x1 < x2 < x3 < x4.
struct DegLexLess {
    bool operator()(const Word& a, const Word& b) const {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    }
};
Word word(std::initializer_list<int> letters);
std::string word_to_string(const Word& w);  // "x3 x1 x4", "e" for the unit

class NCPolynomial {
public:
    NCPolynomial() = default;
    NCPolynomial(const Word& w, const Scalar& c = Scalar(CoefficientMonomial{}));
    static NCPolynomial unit() { return NCPolynomial(Word{}); }

    bool is_zero() const { return terms_.empty(); }
    const std::map<Word, Scalar, DegLexLess>& terms() const { return terms_; }
    void add_term(const Word& w, const Scalar& c);

    NCPolynomial operator+(const NCPolynomial& o) const;
    NCPolynomial operator-() const;
    NCPolynomial operator-(const NCPolynomial& o) const { return *this + (-o); }
    NCPolynomial operator*(const NCPolynomial& o) const;
    NCPolynomial operator*(const Scalar& c) const;
    bool operator==(const NCPolynomial& o) const { return terms_ == o.terms_; }
    std::string to_string() const;

private:
    std::map<Word, Scalar, DegLexLess> terms_;
};

// x1 <-> x2, x3 <-> x4, reversed words, conjugated coefficients.
Word star(const Word& w);
NCPolynomial star(const NCPolynomial& p);

// lhs -> coeff * rhs, or lhs -> 0.
struct Rule {
    std::string name;
    Word lhs;
    CoefficientMonomial coeff;
    Word rhs;
    bool to_zero = false;
    bool unit = false;  // x1x2 -> c e or x3x4 -> c e

    NCPolynomial as_polynomial() const;  // lhs - coeff * rhs
    std::string to_string() const;
};

// Orients a = c * b by the term order.
Rule make_rule(std::string name, const Word& a, const CoefficientMonomial& c, const Word& b, bool unit = false);

struct RelationSystem {
    std::string name;
    std::vector<Rule> rules;

    std::vector<Rule> unit_rules() const;
    std::vector<Rule> non_unit_rules() const;
};

enum class SystemKind {
    torus_uv,               // u = x1, u* = x2, v = x3, v* = x4
    sklyanin_normal_form,   // one-parameter family q = mu phi
    skew_generic,           // symbolic q_ij
    torus,
    sklyanin,
    torus_cubic,            // torus with the units used to cancel letters
    sklyanin_scaled,        // sklyanin plus x1x2 = x3x4 = (1/mu) e
    sklyanin_scaled_cubic
};
RelationSystem build_system(SystemKind kind);
std::string to_string(SystemKind kind);

// Sets every mu exponent to zero, i.e. specializes mu = 1.
RelationSystem specialize_mu_one(const RelationSystem& s);
// Replaces the constant of every unit rule by 1.
RelationSystem unit_constants_to_one(const RelationSystem& s);
// Each quadratic commutation x_a x_b = k x_i x_j is multiplied by the partner
// generator and collapsed with a unit rule; of the two collapses the one whose
// coefficient is free of mu is kept (right collapse when both or neither are).
RelationSystem unit_eliminated(const RelationSystem& s);

struct TraceStep {
    std::string rule;
    std::size_t position = 0;
    Word before;
    Scalar before_coeff;
    Word after;  // meaningless when the term vanished
    Scalar after_coeff;
    bool vanished = false;
};

struct Reduction {
    NCPolynomial normal_form;
    std::vector<TraceStep> trace;
};

constexpr long kDefaultStepBound = 10000;

// Rewrites the greatest reducible term at its leftmost match until nothing
// applies. Throws StepBoundExceeded.
Reduction reduce(const NCPolynomial& p, const RelationSystem& system, long step_bound = kDefaultStepBound);

// A critical pair rewrites one overlap word by parent_a and by parent_b; a
// re-oriented rule rewrites both sides of parent_a. The traces lead to two
// normal forms whose difference is a scalar multiple of the new rule.
struct DerivedRule {
    Rule rule;
    std::string parent_a, parent_b;  // parent_b empty for a re-oriented rule
    Word overlap;
    std::vector<TraceStep> trace_a, trace_b;
};

struct Completion {
    RelationSystem system;
    std::vector<DerivedRule> derived;
    std::vector<Word> skipped_overlaps;  // longer than the degree bound
    bool unit_in_ideal = false;
};

// Knuth-Bendix completion restricted to overlap words of length <= degree_bound.
// A difference (s1 - s2) w with s1 != s2 formally yields w -> 0, i.e.
// parameters are taken generic. Throws StepBoundExceeded past rule_limit rules.
Completion complete(const RelationSystem& system, int degree_bound, std::size_t rule_limit = 2000);

// Critical pairs of the given rules that plain reduction does not resolve.
std::vector<Word> non_confluent_overlaps(const RelationSystem& system, int degree_bound);

struct Derivation {
    bool success = false;
    NCPolynomial normal_form;
    std::vector<DerivedRule> lemmas;
    std::vector<TraceStep> trace;
};

Derivation check_derivation(const RelationSystem& premises, const NCPolynomial& lhs, const NCPolynomial& rhs,
                            int degree_bound = 6, long step_bound = kDefaultStepBound);
// Replays every lemma as a critical pair of earlier rules and every trace step
// as one rule application, ending at zero.
bool verify_derivation(const RelationSystem& premises, const NCPolynomial& lhs, const NCPolynomial& rhs,
                       const Derivation& d);

enum class EquivalenceMode { strict, scaled_unit };

struct EquivalenceReport {
    bool equivalent = false;
    EquivalenceMode mode = EquivalenceMode::strict;
    std::vector<std::string> a_not_in_b, b_not_in_a;  // rules failing to reduce to zero
    std::optional<NCPolynomial> separating;           // normal form of the first failure
    std::vector<Word> non_confluent_a, non_confluent_b;
    bool unit_in_ideal_a = false, unit_in_ideal_b = false;
};

EquivalenceReport systems_equivalent(const RelationSystem& a, const RelationSystem& b, int degree_bound,
                                     EquivalenceMode mode = EquivalenceMode::strict);

struct StarConstraint {
    QSymbol symbol;
    CoefficientMonomial value;  // symbol = value
    std::string to_string() const;
};

// Involution image of every rule of a system whose coefficients are single
// symbols, matched against the rule with the same left side.
std::vector<StarConstraint> star_invariance_constraints(const RelationSystem& generic);

using Assignment = std::map<QSymbol, CoefficientMonomial>;
RelationSystem substitute(const RelationSystem& s, const Assignment& values);

struct OneParameterFamily {
    Assignment values;  // every q_ij in terms of q13 = mu phi
    bool consistent = false;  // all constraints hold after substitution
    RelationSystem system;
};

// Adds q13 = conj(q14), q12 = q34 = 1, writes q13 = mu phi and solves the
// constraints for the remaining symbols.
OneParameterFamily one_parameter_family(const RelationSystem& generic, const std::vector<StarConstraint>& constraints);

struct JacobiCoefficients {
    BigRat A, B;
    bool constraint_holds = false;  // alpha + beta + gamma + alpha beta gamma == 0
    BigRat constraint_value;
};

// A = (1 - alpha)/(1 + beta), B = (1 + alpha)/(1 - gamma). Throws PoleError.
JacobiCoefficients jacobi_coefficients(const BigRat& alpha, const BigRat& beta, const BigRat& gamma);

nlohmann::json to_json(const CoefficientMonomial& m);
nlohmann::json to_json(const std::vector<TraceStep>& trace);
nlohmann::json to_json(const Derivation& d);
nlohmann::json to_json(const EquivalenceReport& r);

} // namespace jv
