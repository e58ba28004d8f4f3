#include "jv/pipeline.hpp"

#include "jv/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>
#include <tuple>

namespace jv {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr long kExcluded[] = {1, 2, 3, 7, 11, 19, 43, 67, 163};

json fixed_json(const FixedReal& x) {
    const double err = x.error_log10();
    const int max_digits = static_cast<int>(digits_for_bits(x.bits()));
    const int digits = std::clamp(static_cast<int>(std::floor(-err)), 0, max_digits);
    return {{"value", x.to_decimal(digits)}, {"precision_bits", x.bits()}, {"error_log10", err}};
}

json fixed_json(const FixedComplex& z) {
    return {{"re", fixed_json(z.re())}, {"im", fixed_json(z.im())}};
}

json quadratic_json(const QuadraticIrrational& x) {
    return {{"a", bigint_json(x.a())}, {"b", bigint_json(x.b())}, {"c", bigint_json(x.c())}, {"d", x.d()},
            {"text", x.to_string()}};
}

json form_json(const BinaryQuadraticForm& f) {
    return json::array({bigint_json(f.a), bigint_json(f.b), bigint_json(f.c)});
}

json poly_json(const IntegerPolynomial& p) {
    json out = json::array();
    for (const BigInt& c : p.coefficients()) out.push_back(bigint_json(c));
    return out;
}

json group_json(const ClassGroupSummary& g) {
    json forms = json::array();
    for (const BinaryQuadraticForm& f : g.representatives) forms.push_back(form_json(f));
    return {{"discriminant", bigint_json(g.order.discriminant())},
            {"conductor", g.order.conductor},
            {"h", g.h},
            {"h_narrow", g.h_narrow},
            {"representatives", forms}};
}

json params_json(const PipelineParams& p) {
    return {{"precision_bits", p.precision_bits},
            {"deg_bound", p.deg_bound},
            {"height_bound", bigint_json(p.height_bound)},
            {"conductor_direction", p.direction == ConductorDirection::real_to_imag ? "real-to-imag" : "imag-to-real"},
            {"given_conductor", p.given_conductor},
            {"search_bound", p.search_bound}};
}

class StageTimer {
public:
    explicit StageTimer(json& timing) : timing_(timing) {}
    template <class F>
    void run(const std::string& name, F&& f) {
        const auto t0 = Clock::now();
        f();
        timing_[name] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    }

private:
    json& timing_;
};

} // namespace

bool is_excluded(long d) { return std::find(std::begin(kExcluded), std::end(kExcluded), d) != std::end(kExcluded); }

std::string to_string(CaseVerdict v) {
    switch (v) {
    case CaseVerdict::recognized: return "recognized";
    case CaseVerdict::no_relation: return "no_relation";
    case CaseVerdict::excluded: return "excluded";
    case CaseVerdict::no_match: return "no_match";
    case CaseVerdict::failed: return "failed";
    }
    return "failed";
}

ClassFieldDescriptor class_field(long d, long f, int bits, const std::optional<std::filesystem::path>& cache_dir,
                                 bool* cache_hit) {
    if (cache_hit) *cache_hit = false;
    if (cache_dir) {
        if (std::optional<IntegerPolynomial> poly = load_class_polynomial(*cache_dir, d, f)) {
            const OrderDescriptor order = imaginary_order(d, f);
            const BinaryQuadraticForm principal = class_group(order).representatives.front();
            const int wp = bits + 64;
            RingClassPolynomial rc;
            rc.poly = *poly;
            rc.bits = bits;
            rc.forms = {principal};
            rc.taus = {FixedComplex(FixedReal::from_int(-principal.b, wp), sqrt_fixed(-order.discriminant(), wp))
                           .div_int(2 * principal.a)};
            rc.j_values = {j_invariant(rc.taus.front(), bits)};
            if (cache_hit) *cache_hit = true;
            return hcf_generator(rc, d, f, bits);
        }
    }
    const RingClassPolynomial rc = ring_class_polynomial_detailed(d, f, bits);
    if (cache_dir) store_class_polynomial(*cache_dir, d, f, rc.poly, rc.bits);
    return hcf_generator(rc, d, f, bits);
}

CaseReport run_case(long d, const PipelineParams& params) {
    if (d < 1) throw DomainError("d must be a positive integer");
    if (!is_square_free(d)) throw NotSquareFree(std::to_string(d) + " is not square-free");
    if (params.precision_bits < 64) throw DomainError("precision must be at least 64 bits");
    if (params.given_conductor < 1) throw DomainError("conductor must be positive");

    CaseReport rep;
    rep.d = d;
    rep.params = params;
    rep.excluded_flag = is_excluded(d);
    if (rep.excluded_flag) {
        rep.verdict = CaseVerdict::excluded;
        return rep;
    }

    const auto t_start = Clock::now();
    StageTimer timer(rep.timing);
    auto stage = [&](const std::string& name, auto&& f) {
        try {
            timer.run(name, f);
            return true;
        } catch (const NoMatchWithinBound& e) {
            rep.failures.push_back({name, e.what()});
            rep.verdict = CaseVerdict::no_match;
        } catch (const Error& e) {
            rep.failures.push_back({name, e.what()});
            rep.verdict = CaseVerdict::failed;
        }
        return false;
    };
    auto finish = [&] {
        rep.timing["total"] = std::chrono::duration<double, std::milli>(Clock::now() - t_start).count();
        return rep;
    };

    const bool from_real = params.direction == ConductorDirection::real_to_imag;
    if (!stage("conductor_match", [&] {
            const OrderDescriptor given = from_real ? real_order(d, params.given_conductor)
                                                    : imaginary_order(d, params.given_conductor);
            rep.match = match_conductor(given, params.search_bound);
            rep.real_conductor = from_real ? params.given_conductor : rep.match->matched_conductor;
            rep.imag_conductor = from_real ? rep.match->matched_conductor : params.given_conductor;
            rep.h_common = rep.match->h_common;
        }))
        return finish();

    if (!stage("class_groups", [&] {
            rep.real_side = class_group(real_order(d, rep.real_conductor));
            rep.imaginary_side = class_group(imaginary_order(d, rep.imag_conductor));
        }))
        return finish();

    const OrderDescriptor real = real_order(d, rep.real_conductor);
    const int bits = params.precision_bits;
    if (!stage("unit", [&] {
            rep.epsilon = fundamental_unit(real);
            rep.mu = log_positive(rep.epsilon->value.to_fixed(bits + 32), bits + 32).at(bits);
        }))
        return finish();

    if (!stage("thetas", [&] {
            rep.thetas = pseudo_lattice_reps(real);
            const QuadraticIrrational root = QuadraticIrrational::sqrt_of(d);
            for (const PseudoLatticeRep& t : rep.thetas)
                rep.theta_equivalent_to_sqrt_d.push_back(sl2_equivalent(t.theta, root).sl2);
        }))
        return finish();

    if (!stage("j_values", [&] {
            for (const PseudoLatticeRep& t : rep.thetas) rep.j_values.push_back(evaluate_J(t.theta, *rep.epsilon, bits));
        }))
        return finish();

    rep.deg_bound = params.deg_bound > 0 ? params.deg_bound : static_cast<int>(2 * rep.h_common);
    if (!stage("recognition", [&] { rep.conjugacy = conjugacy_classes(rep.j_values, rep.deg_bound, params.height_bound); }))
        return finish();

    if (!stage("class_field", [&] {
            rep.field = class_field(d, rep.imag_conductor, bits, params.cache_dir, &rep.cache_hit);
        }))
        return finish();

    if (!stage("membership", [&] {
            for (const JValue& v : rep.j_values)
                rep.membership.push_back(
                    member_of_field(j_value_source(v.theta, v.epsilon), *rep.field, bits, params.height_bound));
        }))
        return finish();

    const auto& per = rep.conjugacy->per_value;
    rep.verdict = std::all_of(per.begin(), per.end(), [](const RecognitionResult& r) { return r.recognized; })
                      ? CaseVerdict::recognized
                      : CaseVerdict::no_relation;
    return finish();
}

json CaseReport::to_json() const {
    json j;
    j["schema"] = 1;
    j["d"] = d;
    j["excluded_flag"] = excluded_flag;
    j["verdict"] = jv::to_string(verdict);
    j["params"] = params_json(params);
    json fails = json::array();
    for (const CaseFailure& f : failures) fails.push_back({{"stage", f.stage}, {"error", f.error}});
    j["failures"] = fails;
    j["timing"] = timing;
    if (excluded_flag) return j;

    if (match)
        j["conductors"] = {{"real", real_conductor},
                           {"imaginary", imag_conductor},
                           {"h_common", h_common},
                           {"given_side", match->given_side == FieldKind::real ? "real" : "imaginary"}};
    if (real_side) j["class_group_real"] = group_json(*real_side);
    if (imaginary_side) j["class_group_imaginary"] = group_json(*imaginary_side);
    if (epsilon) j["epsilon"] = {{"value", quadratic_json(epsilon->value)}, {"norm", epsilon->norm}};
    if (mu) j["mu"] = fixed_json(*mu);

    json th = json::array();
    for (std::size_t i = 0; i < thetas.size(); ++i)
        th.push_back({{"theta", quadratic_json(thetas[i].theta)},
                      {"form", form_json(thetas[i].source_form)},
                      {"sl2_equivalent_to_sqrt_d", theta_equivalent_to_sqrt_d[i]}});
    j["thetas"] = th;

    json jv_values = json::array();
    for (const JValue& v : j_values) jv_values.push_back(fixed_json(v.value));
    j["j_values"] = jv_values;
    j["deg_bound"] = deg_bound;

    if (conjugacy) {
        json rec = json::array();
        for (const RecognitionResult& r : conjugacy->per_value) rec.push_back(jv::to_json(r));
        j["recognition"] = rec;
        json groups = json::array();
        for (const ConjugacyResult::Group& g : conjugacy->groups)
            groups.push_back({{"minpoly", poly_json(g.minpoly)}, {"members", g.members}});
        j["conjugacy"] = {{"groups", groups}, {"unresolved", conjugacy->unresolved}};
    }
    if (field)
        j["class_field"] = {{"d", field->d},
                            {"f", field->f},
                            {"t", field->t},
                            {"degree", field->degree},
                            {"ring_class_polynomial", poly_json(field->ring_class_poly)},
                            {"generator_minpoly", poly_json(field->generator_minpoly)},
                            {"generator", fixed_json(field->generator_embedding)}};
    json mem = json::array();
    for (const MembershipResult& m : membership) mem.push_back(jv::to_json(m));
    j["membership"] = mem;
    return j;
}

// ------------------------------------------------------------------ ranges

RangeResult run_range(long d_min, long d_max, const PipelineParams& params) {
    RangeResult out;
    if (d_min > d_max) return out;
    if (d_min < 1) throw DomainError("d must be a positive integer");
    std::vector<long> ds;
    for (long d = d_min; d <= d_max; ++d)
        if (is_square_free(d)) ds.push_back(d);
    out.reports.resize(ds.size());

    unsigned workers = params.workers ? params.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(ds.size(), 1)));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < ds.size(); i = next++) out.reports[i] = run_case(ds[i], params);
            } catch (...) {
                errors[w] = std::current_exception();
                next = ds.size();
            }
        });
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);

    for (const CaseReport& r : out.reports) {
        switch (r.verdict) {
        case CaseVerdict::recognized: ++out.summary.recognized; break;
        case CaseVerdict::no_relation: ++out.summary.no_relation; break;
        case CaseVerdict::excluded: ++out.summary.excluded; break;
        case CaseVerdict::no_match: ++out.summary.no_match; break;
        case CaseVerdict::failed: ++out.summary.failed; break;
        }
    }
    return out;
}

std::string RangeResult::csv() const {
    std::ostringstream out;
    out << "d,h,f,frak_f,epsilon,verdict,minpoly_degree,residual_log10\n";
    for (const CaseReport& r : reports) {
        out << r.d << ',';
        if (r.match) out << r.h_common << ',' << r.imag_conductor << ',' << r.real_conductor << ',';
        else out << ",,,";
        if (r.epsilon) out << '"' << r.epsilon->value.to_string() << '"';
        out << ',' << to_string(r.verdict) << ',';
        // the first J value; a case's values are conjugate when recognized
        if (r.conjugacy && !r.conjugacy->per_value.empty()) {
            const RecognitionResult& rr = r.conjugacy->per_value.front();
            if (rr.recognized) out << rr.minpoly->degree() << ',' << rr.residual_log10;
            else out << ',';
        } else {
            out << ',';
        }
        out << '\n';
    }
    return out.str();
}

json RangeResult::to_json() const {
    json reps = json::array();
    for (const CaseReport& r : reports) reps.push_back(r.to_json());
    return {{"schema", 1},
            {"reports", reps},
            {"summary",
             {{"recognized", summary.recognized},
              {"no_relation", summary.no_relation},
              {"excluded", summary.excluded},
              {"no_match", summary.no_match},
              {"failed", summary.failed}}}};
}

// ------------------------------------------------------------------ symbolic

namespace {

using CM = CoefficientMonomial;

NCPolynomial term(std::initializer_list<int> letters, const CM& c = CM{}) { return NCPolynomial(word(letters), c); }

RelationSystem rule_subset(const RelationSystem& s, const std::vector<std::string>& suffixes) {
    RelationSystem out;
    out.name = s.name;
    for (const std::string& suf : suffixes)
        for (const Rule& r : s.rules)
            if (r.name == s.name + ":" + suf) out.rules.push_back(r);
    return out;
}

std::vector<SymbolicCheck> remark1_checks() {
    const RelationSystem premises = rule_subset(build_system(SystemKind::torus_uv), {"1", "5", "6", "u12", "u34"});
    struct Target {
        std::string name;
        NCPolynomial lhs, rhs;
    };
    const std::vector<Target> targets = {
        {"v* u = phi^-1 u v*", term({4, 1}), term({1, 4}, CM::mu_phase(0, -1))},
        {"v u* = phi^-1 u* v", term({3, 2}), term({2, 3}, CM::mu_phase(0, -1))},
        {"v* u* = phi u* v*", term({4, 2}), term({2, 4}, CM::mu_phase(0, 1))},
        {"v u v* = phi u", term({3, 1, 4}), term({1}, CM::mu_phase(0, 1))},
    };
    std::vector<SymbolicCheck> out;
    for (const Target& t : targets) {
        const Derivation d = check_derivation(premises, t.lhs, t.rhs, 6);
        SymbolicCheck c;
        c.name = "remark1: " + t.name;
        c.passed = d.success && verify_derivation(premises, t.lhs, t.rhs, d);
        c.detail = to_json(d);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<SymbolicCheck> lemma1_checks() {
    const RelationSystem gen = build_system(SystemKind::skew_generic);
    const std::vector<StarConstraint> cs = star_invariance_constraints(gen);
    auto conj_power = [](QSymbol s, int k) {
        CM c;
        c.e.q[static_cast<int>(s) + kQSymbols] = k;
        return c;
    };
    const std::vector<std::pair<QSymbol, CM>> expected = {
        {QSymbol::q13, conj_power(QSymbol::q24, -1)}, {QSymbol::q24, conj_power(QSymbol::q13, -1)},
        {QSymbol::q14, conj_power(QSymbol::q23, -1)}, {QSymbol::q23, conj_power(QSymbol::q14, -1)},
        {QSymbol::q12, conj_power(QSymbol::q12, 1)},  {QSymbol::q34, conj_power(QSymbol::q34, 1)}};

    std::vector<SymbolicCheck> out;
    SymbolicCheck constraints{"lemma1: involution constraints on the generic system", cs.size() == expected.size(), true, {}};
    json lines = json::array();
    for (std::size_t i = 0; i < cs.size(); ++i) {
        lines.push_back(cs[i].to_string());
        if (i < expected.size() && !(cs[i].symbol == expected[i].first && cs[i].value == expected[i].second))
            constraints.passed = false;
    }
    constraints.detail = {{"constraints", lines}};
    out.push_back(constraints);

    const OneParameterFamily fam = one_parameter_family(gen, cs);
    const RelationSystem normal = build_system(SystemKind::sklyanin_normal_form);
    SymbolicCheck family{"lemma1: collapse to the one-parameter family q = mu phi", fam.consistent, true, {}};
    if (fam.system.rules.size() != normal.rules.size()) family.passed = false;
    json rules = json::array();
    for (std::size_t i = 0; i < fam.system.rules.size(); ++i) {
        const Rule& r = fam.system.rules[i];
        rules.push_back(r.to_string());
        if (i < normal.rules.size() &&
            !(r.lhs == normal.rules[i].lhs && r.rhs == normal.rules[i].rhs && r.coeff == normal.rules[i].coeff))
            family.passed = false;
    }
    json values = json::object();
    for (const auto& [s, v] : fam.values) values[to_string(s)] = v.to_string();
    family.detail = {{"values", values}, {"rules", rules}};
    out.push_back(family);
    return out;
}

std::vector<SymbolicCheck> lemma2_checks() {
    const RelationSystem torus = build_system(SystemKind::torus);
    const RelationSystem scaled = build_system(SystemKind::sklyanin_scaled);
    const RelationSystem cubic = build_system(SystemKind::sklyanin_scaled_cubic);
    std::vector<SymbolicCheck> out;
    auto add = [&](std::string name, const EquivalenceReport& r, bool expected, bool gating) {
        SymbolicCheck c{std::move(name), r.equivalent == expected, gating, to_json(r)};
        out.push_back(std::move(c));
    };
    add("lemma2: torus ~ sklyanin_scaled (scaled unit identified)",
        systems_equivalent(torus, scaled, 6, EquivalenceMode::scaled_unit), true, true);
    add("lemma2: sklyanin_scaled ~ sklyanin_scaled_cubic", systems_equivalent(scaled, cubic, 6), true, true);
    add("lemma2: sklyanin_scaled ~ sklyanin_scaled_cubic at mu = 1",
        systems_equivalent(specialize_mu_one(scaled), specialize_mu_one(cubic), 6), true, true);
    // finding: with generic mu the scaled system contains the unit, so the
    // strict comparison with the torus fails; at mu = 1 it holds
    add("torus ~ sklyanin_scaled strictly is false for generic mu", systems_equivalent(torus, scaled, 6), false,
        false);
    add("torus ~ sklyanin_scaled strictly at mu = 1", systems_equivalent(torus, specialize_mu_one(scaled), 6),
        true, false);
    return out;
}

std::vector<SymbolicCheck> jacobi_checks() {
    std::vector<SymbolicCheck> out;
    auto spot = [&](const BigRat& a, const BigRat& b, const BigRat& g, const BigRat& A, const BigRat& B, bool on) {
        const JacobiCoefficients k = jacobi_coefficients(a, b, g);
        SymbolicCheck c;
        c.name = "jacobi: (" + a.get_str() + ", " + b.get_str() + ", " + g.get_str() + ")";
        c.passed = k.A == A && k.B == B && k.constraint_holds == on;
        c.detail = {{"A", k.A.get_str()}, {"B", k.B.get_str()}, {"constraint_holds", k.constraint_holds},
                    {"constraint_value", k.constraint_value.get_str()}};
        out.push_back(std::move(c));
    };
    spot(0, 0, 0, 1, 1, true);
    spot(BigRat(1, 2), BigRat(-1, 5), BigRat(-1, 3), BigRat(5, 8), BigRat(9, 8), true);
    spot(1, 1, 0, 0, 2, false);
    for (const auto& [a, b, g] : {std::tuple<int, int, int>{1, -1, 0}, {1, 0, 1}}) {
        SymbolicCheck c{"jacobi: pole at (" + std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(g) + ")", false, true, {}};
        try {
            jacobi_coefficients(a, b, g);
        } catch (const PoleError& e) {
            c.passed = true;
            c.detail = {{"error", e.what()}};
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace

std::optional<SymbolicSuite> parse_suite(const std::string& name) {
    for (SymbolicSuite s : {SymbolicSuite::remark1, SymbolicSuite::lemma1, SymbolicSuite::lemma2, SymbolicSuite::jacobi})
        if (to_string(s) == name) return s;
    return std::nullopt;
}

std::string to_string(SymbolicSuite s) {
    switch (s) {
    case SymbolicSuite::remark1: return "remark1";
    case SymbolicSuite::lemma1: return "lemma1";
    case SymbolicSuite::lemma2: return "lemma2";
    case SymbolicSuite::jacobi: return "jacobi";
    }
    return "";
}

std::vector<SymbolicCheck> verify_symbolic(SymbolicSuite suite) {
    switch (suite) {
    case SymbolicSuite::remark1: return remark1_checks();
    case SymbolicSuite::lemma1: return lemma1_checks();
    case SymbolicSuite::lemma2: return lemma2_checks();
    case SymbolicSuite::jacobi: return jacobi_checks();
    }
    return {};
}

bool all_passed(const std::vector<SymbolicCheck>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const SymbolicCheck& c) { return c.passed || !c.gating; });
}

json to_json(const std::vector<SymbolicCheck>& checks) {
    json out = json::array();
    for (const SymbolicCheck& c : checks)
        out.push_back({{"name", c.name}, {"passed", c.passed}, {"gating", c.gating}, {"detail", c.detail}});
    return out;
}

} // namespace jv
