#pragma once

// End-to-end case runner: class groups on both sides, conductor matching,
// unit and pseudo-lattice representatives, J values, recognition, conjugacy,
// the ring class field generator and membership. Also the batch runner and
// the fixed symbolic checklists.

#include "jv/recognition.hpp"
#include "jv/sklyanin.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace jv {

enum class ConductorDirection { real_to_imag, imag_to_real };

struct PipelineParams {
    int precision_bits = 512;
    int deg_bound = 0;  // 0: twice the degree of the ring class field
    BigInt height_bound{"10000000000000000000000000000000000000000"};
    ConductorDirection direction = ConductorDirection::real_to_imag;
    long given_conductor = 1;
    long search_bound = kDefaultSearchBound;
    std::optional<std::filesystem::path> cache_dir;
    unsigned workers = 0;  // 0: hardware concurrency
};

bool is_excluded(long d);

enum class CaseVerdict { recognized, no_relation, excluded, no_match, failed };
std::string to_string(CaseVerdict v);

struct CaseFailure {
    std::string stage;
    std::string error;
};

struct CaseReport {
    long d = 0;
    bool excluded_flag = false;
    CaseVerdict verdict = CaseVerdict::failed;
    PipelineParams params;

    std::optional<ClassGroupSummary> real_side, imaginary_side;
    std::optional<ConductorMatch> match;
    long real_conductor = 0, imag_conductor = 0, h_common = 0;

    std::optional<UnitElement> epsilon;
    std::optional<FixedReal> mu;
    std::vector<PseudoLatticeRep> thetas;
    std::vector<bool> theta_equivalent_to_sqrt_d;
    std::vector<JValue> j_values;
    int deg_bound = 0;
    std::optional<ConjugacyResult> conjugacy;
    std::optional<ClassFieldDescriptor> field;
    bool cache_hit = false;
    std::vector<MembershipResult> membership;
    std::vector<CaseFailure> failures;

    nlohmann::json timing = nlohmann::json::object();

    // "schema": 1; everything except "timing" is reproducible.
    nlohmann::json to_json() const;
};

// Throws NotSquareFree, or DomainError for d < 1. Stage failures are
// recorded in the report.
CaseReport run_case(long d, const PipelineParams& params = {});

struct RangeSummary {
    long recognized = 0, no_relation = 0, excluded = 0, no_match = 0, failed = 0;
};

struct RangeResult {
    std::vector<CaseReport> reports;
    RangeSummary summary;

    // d, h, f, frak_f, epsilon, verdict, minpoly_degree, residual_log10
    std::string csv() const;
    nlohmann::json to_json() const;
};

RangeResult run_range(long d_min, long d_max, const PipelineParams& params = {});

// Loads the class polynomial from the cache when present, computes and
// stores it otherwise.
ClassFieldDescriptor class_field(long d, long f, int bits, const std::optional<std::filesystem::path>& cache_dir,
                                 bool* cache_hit = nullptr);

enum class SymbolicSuite { remark1, lemma1, lemma2, jacobi };
std::optional<SymbolicSuite> parse_suite(const std::string& name);
std::string to_string(SymbolicSuite s);

struct SymbolicCheck {
    std::string name;
    bool passed = false;
    bool gating = true;  // a non-gating check records a finding
    nlohmann::json detail;
};

std::vector<SymbolicCheck> verify_symbolic(SymbolicSuite suite);
bool all_passed(const std::vector<SymbolicCheck>& checks);
nlohmann::json to_json(const std::vector<SymbolicCheck>& checks);

} // namespace jv
