#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jv/errors.hpp"
#include "jv/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <unistd.h>

using namespace jv;

namespace {

nlohmann::json without_timing(nlohmann::json j) {
    j.erase("timing");
    if (j.contains("reports"))
        for (auto& r : j["reports"]) r.erase("timing");
    return j;
}

PipelineParams quick() {
    PipelineParams p;
    p.precision_bits = 256;
    return p;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() / ("jv_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("the d = 15 case") {
    const CaseReport r = run_case(15);
    CHECK_FALSE(r.excluded_flag);
    CHECK(r.failures.empty());
    CHECK(r.real_conductor == 1);
    CHECK(r.imag_conductor == 1);
    CHECK(r.h_common == 2);
    REQUIRE(r.real_side);
    REQUIRE(r.imaginary_side);
    CHECK(r.real_side->h == 2);
    CHECK(r.imaginary_side->h == 2);
    REQUIRE(r.epsilon);
    CHECK(r.epsilon->value == QuadraticIrrational(4, 1, 1, 15));
    CHECK(r.epsilon->norm == 1);

    // theta = sqrt 15 - 3 is a translate of sqrt 15; the other class has denominator 2
    REQUIRE(r.thetas.size() == 2);
    int equivalent = 0;
    for (std::size_t i = 0; i < r.thetas.size(); ++i) {
        const QuadraticIrrational diff = r.thetas[i].theta - QuadraticIrrational::sqrt_of(15);
        const bool translate = diff.is_rational() && diff.c() == 1;
        CHECK(translate == r.theta_equivalent_to_sqrt_d[i]);
        equivalent += r.theta_equivalent_to_sqrt_d[i];
    }
    CHECK(equivalent == 1);

    // J = log(eps) * exp(2 pi i theta), checked in double precision
    REQUIRE(r.j_values.size() == 2);
    for (const JValue& v : r.j_values) {
        const double mu = std::log(4 + std::sqrt(15.0));
        const double t = v.theta.to_double();
        CHECK(v.value.re().to_double() == doctest::Approx(mu * std::cos(2 * M_PI * t)).epsilon(1e-12));
        CHECK(v.value.im().to_double() == doctest::Approx(mu * std::sin(2 * M_PI * t)).epsilon(1e-12));
    }

    // recognition and membership are definitive and the field has degree 4
    REQUIRE(r.conjugacy);
    CHECK(r.deg_bound == 4);
    for (const RecognitionResult& rr : r.conjugacy->per_value) {
        if (!rr.recognized) CHECK(rr.excluded_height_log10 > 0);
    }
    REQUIRE(r.field);
    CHECK(r.field->degree == 4);
    CHECK(r.field->generator_minpoly.degree() == 4);
    CHECK(r.field->ring_class_poly == IntegerPolynomial({BigInt(-121287375), BigInt(191025), BigInt(1)}));
    CHECK(r.membership.size() == 2);
    CHECK((r.verdict == CaseVerdict::recognized || r.verdict == CaseVerdict::no_relation));

    const nlohmann::json j = r.to_json();
    CHECK(j["schema"] == 1);
    CHECK(j["d"] == 15);
    CHECK(j["conductors"]["h_common"] == 2);
    CHECK(j["epsilon"]["value"]["a"] == 4);
    CHECK(j["mu"]["value"].get<std::string>().rfind("2.0634370688955605467", 0) == 0);
    CHECK(j["mu"]["precision_bits"] == 512);
    CHECK(j["mu"]["error_log10"].get<double>() < -150);
    CHECK(j["j_values"].size() == 2);
    CHECK(j["j_values"][0]["re"].contains("error_log10"));
    CHECK(j["recognition"].size() == 2);
    CHECK(j["membership"].size() == 2);
    CHECK(j["params"]["height_bound"] == "10000000000000000000000000000000000000000");
}

TEST_CASE("excluded and invalid d") {
    const CaseReport r = run_case(163);
    CHECK(r.excluded_flag);
    CHECK(r.verdict == CaseVerdict::excluded);
    CHECK_FALSE(r.match);
    CHECK(r.j_values.empty());
    const nlohmann::json j = r.to_json();
    CHECK(j["excluded_flag"] == true);
    CHECK_FALSE(j.contains("j_values"));

    for (long d : {1, 2, 3, 7, 11, 19, 43, 67, 163}) CHECK(run_case(d).excluded_flag);
    for (long d = 1; d <= 200; ++d) {
        const std::set<long> list = {1, 2, 3, 7, 11, 19, 43, 67, 163};
        CHECK(is_excluded(d) == (list.count(d) == 1));
    }

    CHECK_THROWS_AS(run_case(12), NotSquareFree);
    CHECK_THROWS_AS(run_case(0), DomainError);
    CHECK_THROWS_AS(run_case(-5), DomainError);
}

TEST_CASE("a conductor search failure is recorded") {
    // the real order of Q(sqrt 14) has h = 1, no imaginary order of Q(sqrt -14) does
    PipelineParams p = quick();
    p.search_bound = 5;
    const CaseReport r = run_case(14, p);
    CHECK(r.verdict == CaseVerdict::no_match);
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures.front().stage == "conductor_match");
    CHECK(r.to_json()["verdict"] == "no_match");
}

TEST_CASE("the mirrored conductor direction") {
    PipelineParams p = quick();
    p.direction = ConductorDirection::imag_to_real;
    const CaseReport r = run_case(15, p);
    REQUIRE(r.match);
    CHECK(r.match->given_side == FieldKind::imaginary);
    CHECK(r.real_conductor == 1);
    CHECK(r.h_common == 2);
    CHECK(r.to_json()["conductors"]["given_side"] == "imaginary");
}

TEST_CASE("ranges") {
    const RangeResult r = run_range(2, 20, quick());
    std::vector<long> ds;
    for (const CaseReport& c : r.reports) ds.push_back(c.d);
    CHECK(ds == std::vector<long>{2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19});
    std::vector<long> excluded;
    for (const CaseReport& c : r.reports)
        if (c.excluded_flag) excluded.push_back(c.d);
    CHECK(excluded == std::vector<long>{2, 3, 7, 11, 19});
    CHECK(r.summary.excluded == 5);
    CHECK(r.summary.recognized + r.summary.no_relation + r.summary.excluded + r.summary.no_match + r.summary.failed ==
          12);

    const std::string csv = r.csv();
    CHECK(csv.rfind("d,h,f,frak_f,epsilon,verdict,minpoly_degree,residual_log10\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
    CHECK(csv.find("15,2,1,1,\"4+sqrt(15)\"") != std::string::npos);

    CHECK(run_range(20, 2).reports.empty());

    const RangeResult one = run_range(15, 15, quick());
    REQUIRE(one.reports.size() == 1);
    CHECK(without_timing(one.reports.front().to_json()) == without_timing(run_case(15, quick()).to_json()));
}

TEST_CASE("reports are deterministic") {
    CHECK(without_timing(run_case(15).to_json()).dump() == without_timing(run_case(15).to_json()).dump());
    PipelineParams a = quick(), b = quick();
    a.workers = 1;
    b.workers = 4;
    CHECK(without_timing(run_range(2, 20, a).to_json()).dump() == without_timing(run_range(2, 20, b).to_json()).dump());
}

TEST_CASE("class polynomial cache") {
    TempDir dir("cache");
    bool hit = true;
    const ClassFieldDescriptor cold = class_field(15, 1, 256, std::nullopt, &hit);
    CHECK_FALSE(hit);
    const ClassFieldDescriptor stored = class_field(15, 1, 256, dir.path, &hit);
    CHECK_FALSE(hit);
    CHECK(std::filesystem::exists(class_polynomial_cache_path(dir.path, 15, 1)));
    const ClassFieldDescriptor warm = class_field(15, 1, 256, dir.path, &hit);
    CHECK(hit);
    for (const ClassFieldDescriptor* f : {&stored, &warm}) {
        CHECK(f->ring_class_poly == cold.ring_class_poly);
        CHECK(f->generator_minpoly == cold.generator_minpoly);
        CHECK(f->t == cold.t);
        CHECK(f->principal_form == cold.principal_form);
        CHECK(f->generator_embedding.indistinguishable(cold.generator_embedding));
    }

    // a case run reads the same data whether the cache is cold or warm
    PipelineParams p = quick();
    p.cache_dir = dir.path / "cases";
    const std::string first = without_timing(run_case(15, p).to_json()).dump();
    const std::string second = without_timing(run_case(15, p).to_json()).dump();
    p.cache_dir.reset();
    CHECK(first == second);
    CHECK(first == without_timing(run_case(15, p).to_json()).dump());

    // a damaged file is ignored and rewritten
    {
        std::ofstream out(class_polynomial_cache_path(dir.path, 15, 1));
        out << "garbage\n";
    }
    const ClassFieldDescriptor again = class_field(15, 1, 256, dir.path, &hit);
    CHECK_FALSE(hit);
    CHECK(again.ring_class_poly == cold.ring_class_poly);
    CHECK(load_class_polynomial(dir.path, 15, 1) == cold.ring_class_poly);

    // concurrent cases leave only complete files behind
    PipelineParams c = quick();
    c.cache_dir = dir.path / "range";
    c.workers = 4;
    run_range(2, 40, c);
    for (const auto& e : std::filesystem::directory_iterator(*c.cache_dir))
        CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("symbolic suites") {
    for (SymbolicSuite s : {SymbolicSuite::remark1, SymbolicSuite::lemma1, SymbolicSuite::lemma2, SymbolicSuite::jacobi}) {
        const std::vector<SymbolicCheck> checks = verify_symbolic(s);
        CHECK_FALSE(checks.empty());
        CHECK(all_passed(checks));
        for (const SymbolicCheck& c : checks) {
            INFO(c.name);
            CHECK(c.passed);
        }
        CHECK(parse_suite(to_string(s)) == s);
    }
    CHECK(verify_symbolic(SymbolicSuite::remark1).size() == 4);
    CHECK(verify_symbolic(SymbolicSuite::lemma1).size() == 2);
    const std::vector<SymbolicCheck> l2 = verify_symbolic(SymbolicSuite::lemma2);
    CHECK(std::count_if(l2.begin(), l2.end(), [](const SymbolicCheck& c) { return c.gating; }) == 3);
    CHECK_FALSE(parse_suite("lemma3"));

    const nlohmann::json j = to_json(verify_symbolic(SymbolicSuite::remark1));
    CHECK(j[0]["detail"]["trace"].is_array());
    CHECK(j[0]["passed"] == true);

    std::vector<SymbolicCheck> broken = verify_symbolic(SymbolicSuite::jacobi);
    broken.front().passed = false;
    CHECK_FALSE(all_passed(broken));
    broken.front().gating = false;
    CHECK(all_passed(broken));
}
