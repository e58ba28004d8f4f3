// Command line front end: case, range and symbolic.

#include "jv/errors.hpp"
#include "jv/pipeline.hpp"

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"

namespace {

struct Options {
    int precision_bits = 512;
    int deg_bound = 0;
    std::string height_bound = "1e40";
    std::string direction = "real-to-imag";
    long conductor = 1;
    long search_bound = jv::kDefaultSearchBound;
    std::string cache_dir;
    std::string json_path;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--precision-bits", o.precision_bits, "working precision in bits")->check(CLI::Range(64, 1 << 20));
    cmd->add_option("--deg-bound", o.deg_bound, "degree bound for recognition (0: twice h)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--height-bound", o.height_bound, "height bound, an integer or 1eK");
    cmd->add_option("--conductor-direction", o.direction, "which side is given")
        ->check(CLI::IsMember({"real-to-imag", "imag-to-real"}));
    cmd->add_option("--conductor", o.conductor, "conductor of the given side")->check(CLI::PositiveNumber);
    cmd->add_option("--search-bound", o.search_bound, "largest conductor tried")->check(CLI::PositiveNumber);
    cmd->add_option("--cache-dir", o.cache_dir, "class polynomial cache");
    cmd->add_option("--json", o.json_path, "write the JSON report here");
}

jv::BigInt parse_height(const std::string& s) {
    const std::size_t e = s.find_first_of("eE");
    jv::BigInt out;
    if (e == std::string::npos) {
        if (out.set_str(s, 10) != 0 || out <= 0) throw jv::DomainError("bad height bound " + s);
        return out;
    }
    jv::BigInt mant;
    if (mant.set_str(s.substr(0, e), 10) != 0 || mant <= 0) throw jv::DomainError("bad height bound " + s);
    const int k = std::stoi(s.substr(e + 1));
    if (k < 0 || k > 10000) throw jv::DomainError("bad height bound " + s);
    mpz_ui_pow_ui(out.get_mpz_t(), 10, static_cast<unsigned long>(k));
    return mant * out;
}

jv::PipelineParams to_params(const Options& o) {
    jv::PipelineParams p;
    p.precision_bits = o.precision_bits;
    p.deg_bound = o.deg_bound;
    p.height_bound = parse_height(o.height_bound);
    p.direction = o.direction == "imag-to-real" ? jv::ConductorDirection::imag_to_real
                                                : jv::ConductorDirection::real_to_imag;
    p.given_conductor = o.conductor;
    p.search_bound = o.search_bound;
    if (!o.cache_dir.empty()) p.cache_dir = o.cache_dir;
    p.workers = o.workers;
    return p;
}

void emit(const nlohmann::json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("could not write " + path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"J values of real quadratic pseudo-lattices"};
    app.require_subcommand(1);

    Options opts;
    long d = 0, d_min = 0, d_max = 0;
    std::string suite, csv_path;

    CLI::App* case_cmd = app.add_subcommand("case", "run one square-free d");
    case_cmd->add_option("d", d, "square-free positive integer")->required();
    add_common(case_cmd, opts);

    CLI::App* range_cmd = app.add_subcommand("range", "run every square-free d in [d_min, d_max]");
    range_cmd->add_option("d_min", d_min)->required();
    range_cmd->add_option("d_max", d_max)->required();
    add_common(range_cmd, opts);
    range_cmd->add_option("--workers", opts.workers, "concurrent cases (0: all cores)");
    range_cmd->add_option("--csv", csv_path, "write the summary table here (default: stdout)");

    CLI::App* sym_cmd = app.add_subcommand("symbolic", "run a symbolic checklist");
    sym_cmd->add_option("suite", suite, "remark1, lemma1, lemma2, jacobi or all")
        ->required()
        ->check(CLI::IsMember({"remark1", "lemma1", "lemma2", "jacobi", "all"}));
    sym_cmd->add_option("--json", opts.json_path, "write the check list here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*case_cmd) {
            const jv::CaseReport rep = jv::run_case(d, to_params(opts));
            emit(rep.to_json(), opts.json_path);
            if (!opts.json_path.empty())
                std::cout << "d=" << d << " verdict=" << jv::to_string(rep.verdict) << "\n";
        } else if (*range_cmd) {
            const jv::RangeResult res = jv::run_range(d_min, d_max, to_params(opts));
            if (!opts.json_path.empty()) emit(res.to_json(), opts.json_path);
            if (csv_path.empty()) {
                std::cout << res.csv();
            } else {
                std::ofstream out(csv_path);
                out << res.csv();
            }
        } else if (*sym_cmd) {
            std::vector<jv::SymbolicCheck> checks;
            for (jv::SymbolicSuite s : {jv::SymbolicSuite::remark1, jv::SymbolicSuite::lemma1,
                                        jv::SymbolicSuite::lemma2, jv::SymbolicSuite::jacobi}) {
                if (suite != "all" && suite != jv::to_string(s)) continue;
                for (jv::SymbolicCheck& c : jv::verify_symbolic(s)) checks.push_back(std::move(c));
            }
            for (const jv::SymbolicCheck& c : checks)
                std::cout << (c.passed ? "PASS " : "FAIL ") << (c.gating ? "" : "(finding) ") << c.name << "\n";
            if (!opts.json_path.empty()) emit(jv::to_json(checks), opts.json_path);
        }
    } catch (const jv::DomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const jv::NotSquareFree& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
