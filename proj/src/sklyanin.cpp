#include "jv/sklyanin.hpp"

#include "jv/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <stdexcept>

namespace jv {

std::string to_string(QSymbol s) {
    static const char* names[] = {"q13", "q24", "q14", "q23", "q12", "q34"};
    return names[static_cast<int>(s)];
}

// ------------------------------------------------------------------ coefficients

Exponents Exponents::operator+(const Exponents& o) const {
    Exponents r;
    r.mu = mu + o.mu;
    r.phase = phase + o.phase;
    for (int i = 0; i < 2 * kQSymbols; ++i) r.q[i] = q[i] + o.q[i];
    return r;
}

Exponents Exponents::operator-() const {
    Exponents r;
    r.mu = -mu;
    r.phase = -phase;
    for (int i = 0; i < 2 * kQSymbols; ++i) r.q[i] = -q[i];
    return r;
}

CoefficientMonomial CoefficientMonomial::mu_phase(int mu, int phase, BigRat r) {
    CoefficientMonomial m;
    m.r = r;
    m.r.canonicalize();
    m.e.mu = mu;
    m.e.phase = phase;
    return m;
}

CoefficientMonomial CoefficientMonomial::symbol(QSymbol s) {
    CoefficientMonomial m;
    m.e.q[static_cast<int>(s)] = 1;
    return m;
}

CoefficientMonomial CoefficientMonomial::operator*(const CoefficientMonomial& o) const {
    return {r * o.r, e + o.e};
}

CoefficientMonomial CoefficientMonomial::inverse() const {
    if (r == 0) throw DomainError("zero coefficient has no inverse");
    return {1 / r, -e};
}

CoefficientMonomial CoefficientMonomial::conj() const {
    CoefficientMonomial m = *this;
    m.e.phase = -e.phase;
    for (int i = 0; i < kQSymbols; ++i) std::swap(m.e.q[i], m.e.q[i + kQSymbols]);
    return m;
}

CoefficientMonomial CoefficientMonomial::pow(int k) const {
    if (k < 0) return inverse().pow(-k);
    CoefficientMonomial m;
    for (int i = 0; i < k; ++i) m = m * *this;
    return m;
}

namespace {

std::string power(const std::string& base, int k) {
    if (k == 1) return base;
    return base + "^" + std::to_string(k);
}

} // namespace

std::string CoefficientMonomial::to_string() const {
    std::vector<std::string> parts;
    if (e.mu) parts.push_back(power("mu", e.mu));
    if (e.phase) parts.push_back(power("phi", e.phase));
    for (int i = 0; i < kQSymbols; ++i) {
        const std::string s = jv::to_string(static_cast<QSymbol>(i));
        if (e.q[i]) parts.push_back(power(s, e.q[i]));
        if (e.q[i + kQSymbols]) parts.push_back(power("conj(" + s + ")", e.q[i + kQSymbols]));
    }
    std::string out;
    if (parts.empty() || r != 1) out = r == -1 && !parts.empty() ? "-" : r.get_str();
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!out.empty() && out != "-") out += "*";
        out += parts[i];
    }
    return out;
}

Scalar::Scalar(const CoefficientMonomial& m) {
    if (m.r != 0) terms_[m.e] = m.r;
}

std::optional<CoefficientMonomial> Scalar::as_monomial() const {
    if (terms_.size() != 1) return std::nullopt;
    return CoefficientMonomial{terms_.begin()->second, terms_.begin()->first};
}

Scalar Scalar::operator+(const Scalar& o) const {
    Scalar s = *this;
    for (const auto& [e, r] : o.terms_) {
        BigRat& slot = s.terms_[e];
        slot += r;
        if (slot == 0) s.terms_.erase(e);
    }
    return s;
}

Scalar Scalar::operator-() const {
    Scalar s = *this;
    for (auto& [e, r] : s.terms_) r = -r;
    return s;
}

Scalar Scalar::operator*(const Scalar& o) const {
    Scalar s;
    for (const auto& [e1, r1] : terms_)
        for (const auto& [e2, r2] : o.terms_) s = s + Scalar(CoefficientMonomial{r1 * r2, e1 + e2});
    return s;
}

Scalar Scalar::conj() const {
    Scalar s;
    for (const auto& [e, r] : terms_) s = s + Scalar(CoefficientMonomial{r, e}.conj());
    return s;
}

std::string Scalar::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [e, r] : terms_) {
        const std::string t = CoefficientMonomial{r, e}.to_string();
        if (out.empty())
            out = t;
        else if (t[0] == '-')
            out += " - " + t.substr(1);
        else
            out += " + " + t;
    }
    return terms_.size() > 1 ? "(" + out + ")" : out;
}

// ------------------------------------------------------------------ words and polynomials

Word word(std::initializer_list<int> letters) {
    Word w;
    for (int l : letters) {
        if (l < 1 || l > 4) throw DomainError("generators are x1..x4");
        w.push_back(static_cast<char>('0' + l));
    }
    return w;
}

std::string word_to_string(const Word& w) {
    if (w.empty()) return "e";
    std::string out;
    for (char c : w) {
        if (!out.empty()) out += ' ';
        out += 'x';
        out += c;
    }
    return out;
}

NCPolynomial::NCPolynomial(const Word& w, const Scalar& c) { add_term(w, c); }

void NCPolynomial::add_term(const Word& w, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        terms_.emplace(w, c);
        return;
    }
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
}

NCPolynomial NCPolynomial::operator+(const NCPolynomial& o) const {
    NCPolynomial p = *this;
    for (const auto& [w, c] : o.terms_) p.add_term(w, c);
    return p;
}

NCPolynomial NCPolynomial::operator-() const {
    NCPolynomial p;
    for (const auto& [w, c] : terms_) p.add_term(w, -c);
    return p;
}

NCPolynomial NCPolynomial::operator*(const NCPolynomial& o) const {
    NCPolynomial p;
    for (const auto& [w1, c1] : terms_)
        for (const auto& [w2, c2] : o.terms_) p.add_term(w1 + w2, c1 * c2);
    return p;
}

NCPolynomial NCPolynomial::operator*(const Scalar& c) const {
    NCPolynomial p;
    for (const auto& [w, k] : terms_) p.add_term(w, k * c);
    return p;
}

std::string NCPolynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!out.empty()) out += " + ";
        const std::string c = it->second.to_string();
        out += (c == "1" ? "" : c + "*") + word_to_string(it->first);
    }
    return out;
}

Word star(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (char& c : out) c = static_cast<char>(c == '1' ? '2' : c == '2' ? '1' : c == '3' ? '4' : '3');
    return out;
}

NCPolynomial star(const NCPolynomial& p) {
    NCPolynomial out;
    for (const auto& [w, c] : p.terms()) out.add_term(star(w), c.conj());
    return out;
}

// ------------------------------------------------------------------ rules and systems

NCPolynomial Rule::as_polynomial() const {
    NCPolynomial p(lhs);
    if (!to_zero) p = p - NCPolynomial(rhs, coeff);
    return p;
}

std::string Rule::to_string() const {
    const std::string c = coeff.to_string();
    const std::string right = to_zero ? "0" : (c == "1" ? "" : c + "*") + word_to_string(rhs);
    return word_to_string(lhs) + " -> " + right;
}

Rule make_rule(std::string name, const Word& a, const CoefficientMonomial& c, const Word& b, bool unit) {
    if (a == b) throw DomainError("relation between a word and itself");
    Rule r;
    r.name = std::move(name);
    r.unit = unit;
    if (DegLexLess()(b, a)) {
        r.lhs = a;
        r.coeff = c;
        r.rhs = b;
    } else {
        r.lhs = b;
        r.coeff = c.inverse();
        r.rhs = a;
    }
    return r;
}

std::vector<Rule> RelationSystem::unit_rules() const {
    std::vector<Rule> out;
    for (const Rule& r : rules)
        if (r.unit) out.push_back(r);
    return out;
}

std::vector<Rule> RelationSystem::non_unit_rules() const {
    std::vector<Rule> out;
    for (const Rule& r : rules)
        if (!r.unit) out.push_back(r);
    return out;
}

std::string to_string(SystemKind kind) {
    switch (kind) {
    case SystemKind::torus_uv: return "torus_uv";
    case SystemKind::sklyanin_normal_form: return "sklyanin_normal_form";
    case SystemKind::skew_generic: return "skew_generic";
    case SystemKind::torus: return "torus";
    case SystemKind::sklyanin: return "sklyanin";
    case SystemKind::torus_cubic: return "torus_cubic";
    case SystemKind::sklyanin_scaled: return "sklyanin_scaled";
    case SystemKind::sklyanin_scaled_cubic: return "sklyanin_scaled_cubic";
    }
    return "?";
}

namespace {

using CM = CoefficientMonomial;

CM mp(int mu, int phase) { return CM::mu_phase(mu, phase); }

// Four commutations with the given coefficients, then the two partner swaps.
std::vector<Rule> quadratic_rules(const std::string& n, const CM& c31, const CM& c42, const CM& c41, const CM& c32,
                                  const CM& c21, const CM& c43) {
    return {make_rule(n + ":1", word({3, 1}), c31, word({1, 3})), make_rule(n + ":2", word({4, 2}), c42, word({2, 4})),
            make_rule(n + ":3", word({4, 1}), c41, word({1, 4})), make_rule(n + ":4", word({3, 2}), c32, word({2, 3})),
            make_rule(n + ":5", word({2, 1}), c21, word({1, 2})), make_rule(n + ":6", word({4, 3}), c43, word({3, 4}))};
}

std::vector<Rule> cubic_rules(const std::string& n) {
    return {make_rule(n + ":1", word({3, 1, 4}), mp(0, 1), word({1})),
            make_rule(n + ":2", word({4}), mp(0, 1), word({2, 4, 1})),
            make_rule(n + ":3", word({4, 1, 3}), mp(0, -1), word({1})),
            make_rule(n + ":4", word({2}), mp(0, -1), word({4, 2, 3})),
            make_rule(n + ":5", word({2, 1}), mp(0, 0), word({1, 2})),
            make_rule(n + ":6", word({4, 3}), mp(0, 0), word({3, 4}))};
}

void add_units(std::vector<Rule>& rules, const std::string& n, const CM& c) {
    rules.push_back(make_rule(n + ":u12", word({1, 2}), c, Word{}, true));
    rules.push_back(make_rule(n + ":u34", word({3, 4}), c, Word{}, true));
}

} // namespace

RelationSystem build_system(SystemKind kind) {
    RelationSystem s;
    s.name = to_string(kind);
    const std::string& n = s.name;
    const CM one = mp(0, 0);
    switch (kind) {
    case SystemKind::torus_uv:
    case SystemKind::torus:
        s.rules = quadratic_rules(n, mp(0, 1), mp(0, 1), mp(0, -1), mp(0, -1), one, one);
        add_units(s.rules, n, one);
        break;
    case SystemKind::sklyanin_normal_form:
    case SystemKind::sklyanin:
        s.rules = quadratic_rules(n, mp(1, 1), mp(-1, 1), mp(1, -1), mp(-1, -1), one, one);
        break;
    case SystemKind::sklyanin_scaled:
        s.rules = quadratic_rules(n, mp(1, 1), mp(-1, 1), mp(1, -1), mp(-1, -1), one, one);
        add_units(s.rules, n, mp(-1, 0));
        break;
    case SystemKind::skew_generic:
        s.rules = quadratic_rules(n, CM::symbol(QSymbol::q13), CM::symbol(QSymbol::q24), CM::symbol(QSymbol::q14),
                                  CM::symbol(QSymbol::q23), CM::symbol(QSymbol::q12), CM::symbol(QSymbol::q34));
        break;
    case SystemKind::torus_cubic:
        s.rules = cubic_rules(n);
        add_units(s.rules, n, one);
        break;
    case SystemKind::sklyanin_scaled_cubic:
        s.rules = cubic_rules(n);
        add_units(s.rules, n, mp(-1, 0));
        break;
    }
    return s;
}

RelationSystem specialize_mu_one(const RelationSystem& s) {
    RelationSystem out = s;
    out.name = s.name + "|mu=1";
    for (Rule& r : out.rules) r.coeff.e.mu = 0;
    return out;
}

RelationSystem unit_constants_to_one(const RelationSystem& s) {
    RelationSystem out = s;
    out.name = s.name + "|e'=e";
    for (Rule& r : out.rules)
        if (r.unit) r.coeff = CM{};
    return out;
}

namespace {

char partner(char c) { return c == '1' ? '2' : c == '2' ? '1' : c == '3' ? '4' : '3'; }

} // namespace

RelationSystem unit_eliminated(const RelationSystem& s) {
    std::optional<CM> c12, c34;
    for (const Rule& r : s.rules) {
        if (!r.unit || !r.rhs.empty()) continue;
        if (r.lhs == word({1, 2})) c12 = r.coeff;
        if (r.lhs == word({3, 4})) c34 = r.coeff;
    }
    RelationSystem out;
    out.name = s.name + "|cubic";
    if (!c12 || !c34) {
        out.rules = s.rules;
        return out;
    }
    auto unit_of = [&](char c) { return c <= '2' ? *c12 : *c34; };
    for (const Rule& r : s.rules) {
        const bool quadratic = r.lhs.size() == 2 && r.rhs.size() == 2 && !r.to_zero && !r.unit;
        if (!quadratic || r.lhs[1] == partner(r.lhs[0])) {
            out.rules.push_back(r);
            continue;
        }
        // r: ab = k ij
        const char a = r.lhs[0], b = r.lhs[1], i = r.rhs[0], j = r.rhs[1];
        const CM right = r.coeff * unit_of(j);              // ab p(j) = k c_j i
        const CM left = r.coeff * unit_of(b).inverse();     // a = (k / c_b) ij p(b)
        if (right.e.mu == 0 || left.e.mu != 0)
            out.rules.push_back(make_rule(r.name + "r", Word{a, b, partner(j)}, right, Word{i}));
        else
            out.rules.push_back(make_rule(r.name + "l", Word{a}, left, Word{i, j, partner(b)}));
    }
    return out;
}

// ------------------------------------------------------------------ reduction

namespace {

struct Match {
    const Rule* rule = nullptr;
    std::size_t position = 0;
};

std::optional<Match> leftmost_match(const Word& w, const std::vector<const Rule*>& rules) {
    for (std::size_t pos = 0; pos <= w.size(); ++pos)
        for (const Rule* r : rules)
            if (pos + r->lhs.size() <= w.size() && w.compare(pos, r->lhs.size(), r->lhs) == 0) return Match{r, pos};
    return std::nullopt;
}

TraceStep apply_at(NCPolynomial& p, const Word& w, const Rule& r, std::size_t pos) {
    TraceStep step;
    step.rule = r.name;
    step.position = pos;
    step.before = w;
    step.before_coeff = p.terms().at(w);
    p.add_term(w, -step.before_coeff);
    if (r.to_zero) {
        step.vanished = true;
    } else {
        step.after = w.substr(0, pos) + r.rhs + w.substr(pos + r.lhs.size());
        step.after_coeff = step.before_coeff * Scalar(r.coeff);
        p.add_term(step.after, step.after_coeff);
    }
    return step;
}

Reduction reduce_with(const NCPolynomial& p, const std::vector<const Rule*>& rules, long step_bound) {
    Reduction out;
    out.normal_form = p;
    long steps = 0;
    while (true) {
        std::optional<Match> m;
        Word target;
        const auto& terms = out.normal_form.terms();
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
            m = leftmost_match(it->first, rules);
            if (m) {
                target = it->first;
                break;
            }
        }
        if (!m) return out;
        if (++steps > step_bound) throw StepBoundExceeded("reduction did not finish within the step bound");
        out.trace.push_back(apply_at(out.normal_form, target, *m->rule, m->position));
    }
}

std::vector<const Rule*> pointers(const std::vector<Rule>& rules) {
    std::vector<const Rule*> out;
    for (const Rule& r : rules) out.push_back(&r);
    return out;
}

struct Overlap {
    Word word;
    std::size_t pos_a, pos_b;
};

std::vector<Overlap> overlaps(const Rule& a, const Rule& b, bool same) {
    std::vector<Overlap> out;
    const Word &u = a.lhs, &v = b.lhs;
    if (u.empty() || v.empty()) return out;
    for (std::size_t k = 1; k < std::min(u.size(), v.size()); ++k)
        if (u.compare(u.size() - k, k, v, 0, k) == 0) out.push_back({u + v.substr(k), 0, u.size() - k});
    if (!same && v.size() <= u.size())
        for (std::size_t p = u.find(v); p != Word::npos; p = u.find(v, p + 1)) out.push_back({u, 0, p});
    return out;
}

// The two sides of one overlap, each normalized.
std::pair<Reduction, Reduction> resolve(const Overlap& o, const Rule& a, const Rule& b,
                                        const std::vector<const Rule*>& rules, long step_bound) {
    NCPolynomial pa(o.word), pb(o.word);
    const TraceStep sa = apply_at(pa, o.word, a, o.pos_a);
    const TraceStep sb = apply_at(pb, o.word, b, o.pos_b);
    Reduction ra = reduce_with(pa, rules, step_bound), rb = reduce_with(pb, rules, step_bound);
    ra.trace.insert(ra.trace.begin(), sa);
    rb.trace.insert(rb.trace.begin(), sb);
    return {ra, rb};
}

// Turns a nonzero difference into a rule; a lone term with a non-monomial
// scalar is sent to zero (generic parameters).
Rule rule_from(const NCPolynomial& d, const std::string& name) {
    const auto& t = d.terms();
    if (t.empty() || t.size() > 2) throw std::logic_error("unexpected relation shape in completion");
    auto lead = std::prev(t.end());
    Rule r;
    r.name = name;
    r.lhs = lead->first;
    if (t.size() == 1) {
        r.to_zero = true;
        return r;
    }
    const auto s1 = lead->second.as_monomial(), s2 = t.begin()->second.as_monomial();
    if (!s1 || !s2) throw std::logic_error("non-monomial coefficient in a binomial relation");
    r.coeff = (*s2 * s1->inverse()) * CM::mu_phase(0, 0, -1);
    r.rhs = t.begin()->first;
    return r;
}

bool contains(const Word& w, const Word& sub) { return w.find(sub) != Word::npos; }

} // namespace

Reduction reduce(const NCPolynomial& p, const RelationSystem& system, long step_bound) {
    if (step_bound < 1) throw DomainError("step bound must be positive");
    return reduce_with(p, pointers(system.rules), step_bound);
}

Completion complete(const RelationSystem& system, int degree_bound, std::size_t rule_limit) {
    std::deque<Rule> store(system.rules.begin(), system.rules.end());  // stable addresses
    std::vector<bool> alive(store.size(), true);
    std::vector<DerivedRule> derived;
    std::set<Word, DegLexLess> skipped;
    std::deque<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < store.size(); ++i)
        for (std::size_t j = 0; j < store.size(); ++j) pairs.emplace_back(i, j);

    auto active = [&] {
        std::vector<const Rule*> out;
        for (std::size_t i = 0; i < store.size(); ++i)
            if (alive[i]) out.push_back(&store[i]);
        return out;
    };
    const long step_bound = kDefaultStepBound;

    std::function<void(DerivedRule)> add = [&](DerivedRule dr) {
        if (store.size() >= rule_limit) throw StepBoundExceeded("completion exceeded the rule limit");
        dr.rule.name = system.name + ":L" + std::to_string(derived.size() + 1);
        store.push_back(dr.rule);
        alive.push_back(true);
        derived.push_back(dr);
        const std::size_t n = store.size() - 1;
        // rules whose left side now reduces are re-oriented
        std::vector<std::size_t> killed;
        for (std::size_t i = 0; i < n; ++i)
            if (alive[i] && contains(store[i].lhs, store[n].lhs)) {
                alive[i] = false;
                killed.push_back(i);
            }
        for (std::size_t i = 0; i < store.size(); ++i)
            if (alive[i]) {
                pairs.emplace_back(n, i);
                if (i != n) pairs.emplace_back(i, n);
            }
        for (std::size_t k : killed) {
            const Rule& old = store[k];
            const auto rules = active();
            Reduction ra = reduce_with(NCPolynomial(old.lhs), rules, step_bound);
            Reduction rb = reduce_with(old.to_zero ? NCPolynomial() : NCPolynomial(old.rhs, Scalar(old.coeff)), rules,
                                       step_bound);
            const NCPolynomial diff = ra.normal_form - rb.normal_form;
            if (diff.is_zero()) continue;
            DerivedRule next{rule_from(diff, ""), old.name, "", old.lhs, ra.trace, rb.trace};
            add(next);
        }
    };

    while (!pairs.empty()) {
        const auto [i, j] = pairs.front();
        pairs.pop_front();
        if (!alive[i] || !alive[j]) continue;
        for (const Overlap& o : overlaps(store[i], store[j], i == j)) {
            if (!alive[i] || !alive[j]) break;
            if (o.word.size() > static_cast<std::size_t>(degree_bound)) {
                skipped.insert(o.word);
                continue;
            }
            const auto [ra, rb] = resolve(o, store[i], store[j], active(), step_bound);
            const NCPolynomial diff = ra.normal_form - rb.normal_form;
            if (diff.is_zero()) continue;
            add(DerivedRule{rule_from(diff, ""), store[i].name, store[j].name, o.word, ra.trace, rb.trace});
        }
    }

    Completion out;
    out.system.name = system.name + "|completed";
    for (std::size_t i = 0; i < store.size(); ++i)
        if (alive[i]) out.system.rules.push_back(store[i]);
    out.derived = std::move(derived);
    out.skipped_overlaps.assign(skipped.begin(), skipped.end());
    out.unit_in_ideal = reduce(NCPolynomial::unit(), out.system).normal_form.is_zero();
    return out;
}

std::vector<Word> non_confluent_overlaps(const RelationSystem& system, int degree_bound) {
    const auto rules = pointers(system.rules);
    std::set<Word, DegLexLess> out;
    for (std::size_t i = 0; i < system.rules.size(); ++i)
        for (std::size_t j = 0; j < system.rules.size(); ++j)
            for (const Overlap& o : overlaps(system.rules[i], system.rules[j], i == j)) {
                if (o.word.size() > static_cast<std::size_t>(degree_bound)) continue;
                const auto [ra, rb] = resolve(o, system.rules[i], system.rules[j], rules, kDefaultStepBound);
                if (!(ra.normal_form == rb.normal_form)) out.insert(o.word);
            }
    return {out.begin(), out.end()};
}

// ------------------------------------------------------------------ derivations

Derivation check_derivation(const RelationSystem& premises, const NCPolynomial& lhs, const NCPolynomial& rhs,
                            int degree_bound, long step_bound) {
    const Completion c = complete(premises, degree_bound);
    const Reduction r = reduce(lhs - rhs, c.system, step_bound);
    Derivation d;
    d.success = r.normal_form.is_zero();
    d.normal_form = r.normal_form;
    d.trace = r.trace;
    // keep only the lemmas the trace depends on, with their ancestors
    std::map<std::string, const DerivedRule*> by_name;
    for (const DerivedRule& dr : c.derived) by_name[dr.rule.name] = &dr;
    std::set<std::string> needed;
    std::vector<std::string> stack;
    for (const TraceStep& s : r.trace) stack.push_back(s.rule);
    while (!stack.empty()) {
        const std::string n = stack.back();
        stack.pop_back();
        auto it = by_name.find(n);
        if (it == by_name.end() || !needed.insert(n).second) continue;
        const DerivedRule& dr = *it->second;
        stack.push_back(dr.parent_a);
        if (!dr.parent_b.empty()) stack.push_back(dr.parent_b);
        for (const TraceStep& s : dr.trace_a) stack.push_back(s.rule);
        for (const TraceStep& s : dr.trace_b) stack.push_back(s.rule);
    }
    for (const DerivedRule& dr : c.derived)
        if (needed.count(dr.rule.name)) d.lemmas.push_back(dr);
    return d;
}

namespace {

// Replays a trace from start; nullopt when a step does not match.
std::optional<NCPolynomial> replay(NCPolynomial p, const std::vector<TraceStep>& trace,
                                   const std::map<std::string, Rule>& rules) {
    for (const TraceStep& s : trace) {
        auto r = rules.find(s.rule);
        if (r == rules.end()) return std::nullopt;
        auto t = p.terms().find(s.before);
        if (t == p.terms().end() || !(t->second == s.before_coeff)) return std::nullopt;
        const Rule& rule = r->second;
        if (s.position + rule.lhs.size() > s.before.size() ||
            s.before.compare(s.position, rule.lhs.size(), rule.lhs) != 0)
            return std::nullopt;
        const TraceStep again = apply_at(p, s.before, rule, s.position);
        if (again.vanished != s.vanished) return std::nullopt;
        if (!s.vanished && (again.after != s.after || !(again.after_coeff == s.after_coeff))) return std::nullopt;
    }
    return p;
}

} // namespace

bool verify_derivation(const RelationSystem& premises, const NCPolynomial& lhs, const NCPolynomial& rhs,
                       const Derivation& d) {
    std::map<std::string, Rule> known;
    for (const Rule& r : premises.rules) known[r.name] = r;
    for (const DerivedRule& dr : d.lemmas) {
        NCPolynomial start_a, start_b;
        if (dr.parent_b.empty()) {
            auto parent = known.find(dr.parent_a);
            if (parent == known.end() || parent->second.lhs != dr.overlap) return false;
            start_a = NCPolynomial(parent->second.lhs);
            if (!parent->second.to_zero) start_b = NCPolynomial(parent->second.rhs, Scalar(parent->second.coeff));
        } else {
            // both sides start from the same word, first step by each parent
            if (dr.trace_a.empty() || dr.trace_b.empty() || dr.trace_a.front().rule != dr.parent_a ||
                dr.trace_b.front().rule != dr.parent_b)
                return false;
            start_a = start_b = NCPolynomial(dr.overlap);
        }
        const auto a = replay(start_a, dr.trace_a, known), b = replay(start_b, dr.trace_b, known);
        if (!a || !b) return false;
        const NCPolynomial diff = *a - *b;
        if (diff.is_zero()) return false;
        const Scalar lead = std::prev(diff.terms().end())->second;
        if (!(dr.rule.as_polynomial() * lead == diff)) return false;
        known[dr.rule.name] = dr.rule;
    }
    const auto end = replay(lhs - rhs, d.trace, known);
    return end && end->is_zero();
}

// ------------------------------------------------------------------ equivalence

namespace {

void strict_check(const RelationSystem& a, const RelationSystem& b, int degree_bound, EquivalenceReport& rep,
                  const std::string& tag) {
    const Completion ca = complete(a, degree_bound), cb = complete(b, degree_bound);
    auto check = [&](const RelationSystem& from, const RelationSystem& into, std::vector<std::string>& fails) {
        for (const Rule& r : from.rules) {
            const NCPolynomial nf = reduce(r.as_polynomial(), into).normal_form;
            if (nf.is_zero()) continue;
            fails.push_back(tag + r.name);
            if (!rep.separating) rep.separating = nf;
        }
    };
    check(a, cb.system, rep.a_not_in_b);
    check(b, ca.system, rep.b_not_in_a);
    rep.unit_in_ideal_a = rep.unit_in_ideal_a || ca.unit_in_ideal;
    rep.unit_in_ideal_b = rep.unit_in_ideal_b || cb.unit_in_ideal;
}

} // namespace

EquivalenceReport systems_equivalent(const RelationSystem& a, const RelationSystem& b, int degree_bound,
                                     EquivalenceMode mode) {
    if (degree_bound < 2) throw DomainError("degree bound must be at least 2");
    EquivalenceReport rep;
    rep.mode = mode;
    rep.non_confluent_a = non_confluent_overlaps(a, degree_bound);
    rep.non_confluent_b = non_confluent_overlaps(b, degree_bound);
    if (mode == EquivalenceMode::strict) {
        strict_check(a, b, degree_bound, rep, "");
    } else {
        if (a.unit_rules().empty()) rep.a_not_in_b.push_back(a.name + " has no unit relation");
        if (b.unit_rules().empty()) rep.b_not_in_a.push_back(b.name + " has no unit relation");
        if (rep.a_not_in_b.empty() && rep.b_not_in_a.empty()) {
            const RelationSystem ca = unit_eliminated(a), cb = unit_eliminated(b);
            strict_check(a, ca, degree_bound, rep, "own cubic form: ");
            strict_check(b, cb, degree_bound, rep, "own cubic form: ");
            // identifying the scaled unit with the unit
            EquivalenceReport scaled;
            strict_check(unit_constants_to_one(ca), unit_constants_to_one(cb), degree_bound, scaled, "");
            rep.a_not_in_b.insert(rep.a_not_in_b.end(), scaled.a_not_in_b.begin(), scaled.a_not_in_b.end());
            rep.b_not_in_a.insert(rep.b_not_in_a.end(), scaled.b_not_in_a.begin(), scaled.b_not_in_a.end());
            if (!rep.separating) rep.separating = scaled.separating;
        }
    }
    rep.equivalent = rep.a_not_in_b.empty() && rep.b_not_in_a.empty();
    return rep;
}

// ------------------------------------------------------------------ involution constraints

std::string StarConstraint::to_string() const { return jv::to_string(symbol) + " = " + value.to_string(); }

namespace {

std::optional<QSymbol> single_symbol(const CM& c) {
    if (c.r != 1 || c.e.mu != 0 || c.e.phase != 0) return std::nullopt;
    std::optional<QSymbol> found;
    for (int i = 0; i < 2 * kQSymbols; ++i) {
        if (c.e.q[i] == 0) continue;
        if (found || c.e.q[i] != 1 || i >= kQSymbols) return std::nullopt;
        found = static_cast<QSymbol>(i);
    }
    return found;
}

CM substitute(const CM& c, const Assignment& values) {
    CM out = c;
    for (int i = 0; i < kQSymbols; ++i) {
        auto it = values.find(static_cast<QSymbol>(i));
        if (it == values.end()) continue;
        out.e.q[i] = 0;
        out.e.q[i + kQSymbols] = 0;
        out = out * it->second.pow(c.e.q[i]) * it->second.conj().pow(c.e.q[i + kQSymbols]);
    }
    return out;
}

bool symbol_free(const CM& c) {
    return std::all_of(c.e.q.begin(), c.e.q.end(), [](int k) { return k == 0; });
}

} // namespace

std::vector<StarConstraint> star_invariance_constraints(const RelationSystem& generic) {
    std::vector<std::pair<std::size_t, StarConstraint>> found;
    for (const Rule& r : generic.rules) {
        if (r.to_zero) continue;
        const Rule img = make_rule("", star(r.lhs), r.coeff.conj(), star(r.rhs));
        for (std::size_t t = 0; t < generic.rules.size(); ++t) {
            const Rule& target = generic.rules[t];
            if (target.lhs != img.lhs || target.rhs != img.rhs) continue;
            if (auto s = single_symbol(target.coeff)) found.emplace_back(t, StarConstraint{*s, img.coeff});
        }
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<StarConstraint> out;
    for (const auto& f : found) out.push_back(f.second);
    return out;
}

RelationSystem substitute(const RelationSystem& s, const Assignment& values) {
    RelationSystem out = s;
    out.name = s.name + "|substituted";
    for (Rule& r : out.rules) r.coeff = substitute(r.coeff, values);
    return out;
}

OneParameterFamily one_parameter_family(const RelationSystem& generic, const std::vector<StarConstraint>& constraints) {
    OneParameterFamily fam;
    const CM q = CM::mu_phase(1, 1);
    fam.values[QSymbol::q13] = q;
    fam.values[QSymbol::q14] = q.conj();  // q13 = conj(q14)
    fam.values[QSymbol::q12] = CM{};
    fam.values[QSymbol::q34] = CM{};
    for (bool changed = true; changed;) {
        changed = false;
        for (const StarConstraint& c : constraints) {
            if (fam.values.count(c.symbol)) continue;
            const CM v = substitute(c.value, fam.values);
            if (!symbol_free(v)) continue;
            fam.values[c.symbol] = v;
            changed = true;
        }
    }
    fam.consistent = fam.values.size() == kQSymbols;
    for (const StarConstraint& c : constraints)
        if (!fam.values.count(c.symbol) || !(fam.values[c.symbol] == substitute(c.value, fam.values)))
            fam.consistent = false;
    fam.system = substitute(generic, fam.values);
    return fam;
}

// ------------------------------------------------------------------ Jacobi form

JacobiCoefficients jacobi_coefficients(const BigRat& alpha, const BigRat& beta, const BigRat& gamma) {
    if (beta == -1) throw PoleError("beta = -1");
    if (gamma == 1) throw PoleError("gamma = 1");
    JacobiCoefficients j;
    j.A = (1 - alpha) / (1 + beta);
    j.B = (1 + alpha) / (1 - gamma);
    j.constraint_value = alpha + beta + gamma + alpha * beta * gamma;
    j.constraint_holds = j.constraint_value == 0;
    return j;
}

// ------------------------------------------------------------------ JSON

nlohmann::json to_json(const CoefficientMonomial& m) {
    nlohmann::json j = {{"r", m.r.get_str()}, {"mu", m.e.mu}, {"phase", m.e.phase}};
    nlohmann::json q = nlohmann::json::object();
    for (int i = 0; i < kQSymbols; ++i) {
        const std::string s = to_string(static_cast<QSymbol>(i));
        if (m.e.q[i]) q[s] = m.e.q[i];
        if (m.e.q[i + kQSymbols]) q["conj(" + s + ")"] = m.e.q[i + kQSymbols];
    }
    if (!q.empty()) j["q"] = q;
    return j;
}

namespace {

nlohmann::json term_json(const Word& w, const Scalar& c) {
    nlohmann::json coeff = nlohmann::json::array();
    for (const auto& [e, r] : c.terms()) coeff.push_back(to_json(CoefficientMonomial{r, e}));
    return {{"word", word_to_string(w)}, {"coeff", coeff}};
}

nlohmann::json rule_json(const Rule& r) {
    nlohmann::json j = {{"name", r.name}, {"lhs", word_to_string(r.lhs)}};
    if (r.to_zero) {
        j["rhs"] = nullptr;
    } else {
        j["rhs"] = word_to_string(r.rhs);
        j["coeff"] = to_json(r.coeff);
    }
    return j;
}

} // namespace

nlohmann::json to_json(const std::vector<TraceStep>& trace) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TraceStep& s : trace)
        arr.push_back({{"rule", s.rule},
                       {"position", s.position},
                       {"before", term_json(s.before, s.before_coeff)},
                       {"after", s.vanished ? nlohmann::json(nullptr) : term_json(s.after, s.after_coeff)}});
    return arr;
}

nlohmann::json to_json(const Derivation& d) {
    nlohmann::json lemmas = nlohmann::json::array();
    for (const DerivedRule& dr : d.lemmas)
        lemmas.push_back({{"rule", rule_json(dr.rule)},
                          {"parents", dr.parent_b.empty() ? nlohmann::json::array({dr.parent_a})
                                                          : nlohmann::json::array({dr.parent_a, dr.parent_b})},
                          {"overlap", word_to_string(dr.overlap)},
                          {"trace_a", to_json(dr.trace_a)},
                          {"trace_b", to_json(dr.trace_b)}});
    return {{"success", d.success},
            {"normal_form", d.normal_form.to_string()},
            {"lemmas", lemmas},
            {"trace", to_json(d.trace)}};
}

nlohmann::json to_json(const EquivalenceReport& r) {
    auto words = [](const std::vector<Word>& ws) {
        nlohmann::json a = nlohmann::json::array();
        for (const Word& w : ws) a.push_back(word_to_string(w));
        return a;
    };
    return {{"equivalent", r.equivalent},
            {"mode", r.mode == EquivalenceMode::strict ? "strict" : "scaled_unit"},
            {"a_not_in_b", r.a_not_in_b},
            {"b_not_in_a", r.b_not_in_a},
            {"separating", r.separating ? nlohmann::json(r.separating->to_string()) : nlohmann::json(nullptr)},
            {"non_confluent_a", words(r.non_confluent_a)},
            {"non_confluent_b", words(r.non_confluent_b)},
            {"unit_in_ideal_a", r.unit_in_ideal_a},
            {"unit_in_ideal_b", r.unit_in_ideal_b}};
}

} // namespace jv
