#include "hqmc/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hqmc/equivalence.hpp"
#include "hqmc/errors.hpp"
#include "hqmc/io.hpp"
#include "hqmc/model_check.hpp"
#include "hqmc/transforms.hpp"

namespace hqmc::cli {

namespace {

constexpr double kDefaultTolerance = 1e-9;

struct Config {
    double tol = kDefaultTolerance;
    std::size_t max_word_len = 8;
    std::size_t max_iter = 100000;
    std::string output;
    std::string format = "json";
};

/// Restores the process-wide tolerance when a command finishes.
class ToleranceScope {
   public:
    explicit ToleranceScope(double tol) : saved_(default_tolerance()) { set_default_tolerance(tol); }
    ~ToleranceScope() { set_default_tolerance(saved_); }
    ToleranceScope(ToleranceScope const&) = delete;
    ToleranceScope& operator=(ToleranceScope const&) = delete;

   private:
    double saved_;
};

bool is_scalar_list(Json const& j) {
    return std::all_of(j.begin(), j.end(), [](Json const& x) { return x.is_primitive() || x.is_array(); });
}

void render_text(Json const& j, std::string const& prefix, std::ostream& os) {
    if (j.is_object()) {
        for (auto const& [key, value] : j.items()) {
            render_text(value, prefix.empty() ? key : prefix + "." + key, os);
        }
    } else if (j.is_array() && !j.empty() && !is_scalar_list(j)) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            render_text(j[i], prefix + "[" + std::to_string(i) + "]", os);
        }
    } else if (j.is_string()) {
        os << prefix << ": " << j.get<std::string>() << '\n';
    } else {
        os << prefix << ": " << j.dump() << '\n';
    }
}

void emit(Json const& j, Config const& cfg, std::ostream& out) {
    std::ofstream file;
    std::ostream* os = &out;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) {
            throw Error("cannot write '" + cfg.output + "'");
        }
        os = &file;
    }
    if (cfg.format == "text") {
        render_text(j, "", *os);
    } else {
        *os << j.dump(2) << '\n';
    }
}

template<typename T>
T const& expect(AnyModel const& m, char const* kind, std::string const& file) {
    if (auto const* p = std::get_if<T>(&m)) {
        return *p;
    }
    throw Error("'" + file + "' holds a " + kind_name(m) + " model; expected " + kind);
}

Matrix load_rho(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    auto const j = parse_json_text(buffer.str(), path);
    try {
        return matrix_from_json(j.is_object() && j.contains("rho") ? j["rho"] : j);
    } catch (ParseError const& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// The density used when none is given: mu0(s) normalized, or the maximally
/// mixed state when mu0(s) carries no mass.
std::pair<Matrix, std::string> resolve_rho(HqMC const& m, StateIndex s, std::string const& rho_file) {
    Matrix rho;
    std::string source;
    if (!rho_file.empty()) {
        rho = load_rho(rho_file);
        source = "file";
    } else {
        double const tr = m.init[s].trace().real();
        if (tr > m.tol) {
            rho = m.init[s] / tr;
            source = "initial";
        } else {
            rho = DensityOperator::maximally_mixed(m.dim).matrix();
            source = "maximally_mixed";
        }
    }
    if (rho.rows() != m.dim || rho.cols() != m.dim) {
        throw DimensionError("density must be " + std::to_string(m.dim) + "x" + std::to_string(m.dim));
    }
    DensityOperator const checked(rho, m.tol);
    return {checked.matrix(), source};
}

HqMC const& chain_of(AnyModel const& m, std::string const& file) {
    if (auto const* sl = std::get_if<SLHqMC>(&m)) {
        return sl->chain;
    }
    return expect<HqMC>(m, "hqmc or slhqmc", file);
}

// ---- commands ---------------------------------------------------------------

int cmd_validate(Config const& cfg, std::string const& file, std::ostream& out) {
    auto const model = load_model(file, cfg.tol);
    auto const report = std::visit([](auto const& m) { return validate(m); }, model);
    Json violations = Json::array();
    for (auto const& v : report.violations) {
        violations.push_back({{"what", v.what}, {"magnitude", v.magnitude}});
    }
    emit({{"file", file}, {"kind", kind_name(model)}, {"valid", report.ok()}, {"violations", violations}}, cfg, out);
    return report.ok() ? kSuccess : kNegative;
}

AnyModel convert(AnyModel const& model, std::string const& to, std::string const& file, std::string const& dfa_file,
                 double tol) {
    if (to == "qmc") {
        return hqmc_to_qmc(chain_of(model, file));
    }
    if (to == "chqa") {
        return sl_to_chqa(expect<SLHqMC>(model, "slhqmc", file));
    }
    if (to == "product") {
        if (dfa_file.empty()) {
            throw Error("--to product requires --dfa");
        }
        auto const dfa = load_model(dfa_file, tol);
        return product(expect<SLHqMC>(model, "slhqmc", file), expect<Dfa>(dfa, "dfa", dfa_file));
    }
    auto const as_qa = [&]() -> QA {
        if (auto const* sl = std::get_if<SLHqMC>(&model)) {
            return hqa_to_qa(sl_to_chqa(*sl));
        }
        if (auto const* a = std::get_if<HQA>(&model)) {
            return hqa_to_qa(*a);
        }
        if (auto const* a = std::get_if<QA>(&model)) {
            if (to == "qa") {
                throw Error("'" + file + "' is already a qa model");
            }
            return *a;
        }
        throw Error("cannot convert a " + kind_name(model) + " model to " + to);
    };
    if (to == "qa") {
        return as_qa();
    }
    if (to == "blm") {
        return qa_to_blm(as_qa());
    }
    throw Error("unknown conversion target '" + to + "'");
}

int cmd_convert(Config const& cfg, std::string const& file, std::string const& to, std::string const& dfa_file,
                std::ostream& out) {
    auto const model = load_model(file, cfg.tol);
    auto const result = convert(model, to, file, dfa_file, cfg.tol);
    emit(model_to_json(result), cfg, out);
    return kSuccess;
}

struct EquivInputs {
    BLM b1;
    BLM b2;
    WordMode mode = WordMode::IncludeEpsilon;
    std::optional<std::size_t> hqa_bound;
};

EquivInputs equiv_inputs(AnyModel const& m1, AnyModel const& m2, std::string const& f1, std::string const& f2,
                         WordMode requested) {
    if (m1.index() != m2.index()) {
        throw Error("kind mismatch: '" + f1 + "' is " + kind_name(m1) + ", '" + f2 + "' is " + kind_name(m2));
    }
    EquivInputs in;
    in.mode = requested;
    if (auto const* a = std::get_if<BLM>(&m1)) {
        in.b1 = *a;
        in.b2 = std::get<BLM>(m2);
    } else if (auto const* a = std::get_if<QA>(&m1)) {
        in.b1 = qa_to_blm(*a);
        in.b2 = qa_to_blm(std::get<QA>(m2));
    } else if (auto const* a = std::get_if<HQA>(&m1)) {
        auto const& other = std::get<HQA>(m2);
        in.b1 = qa_to_blm(hqa_to_qa(*a));
        in.b2 = qa_to_blm(hqa_to_qa(other));
        in.hqa_bound = hqa_equivalence_bound(*a, other);
    } else if (auto const* a = std::get_if<SLHqMC>(&m1)) {
        auto const& other = std::get<SLHqMC>(m2);
        if (a->ap != other.ap) {
            throw LookupError("labeled chains use different atomic propositions");
        }
        in.b1 = qa_to_blm(hqa_to_qa(sl_to_chqa(*a)));
        in.b2 = qa_to_blm(hqa_to_qa(sl_to_chqa(other)));
        in.mode = WordMode::PositiveWordsOnly;
    } else {
        throw Error("equivalence is defined for blm, qa, hqa and slhqmc models, not " + kind_name(m1));
    }
    in.b2 = reorder_alphabet(in.b2, in.b1.alphabet);
    return in;
}

int cmd_equiv(Config const& cfg, std::string const& f1, std::string const& f2, std::string const& mode_name,
              bool crosscheck, bool require_labeled, std::ostream& out, std::ostream& err) {
    auto const m1 = load_model(f1, cfg.tol);
    auto const m2 = load_model(f2, cfg.tol);
    if (require_labeled) {
        expect<SLHqMC>(m1, "slhqmc", f1);
        expect<SLHqMC>(m2, "slhqmc", f2);
    }
    auto const requested = mode_name == "plus" ? WordMode::PositiveWordsOnly : WordMode::IncludeEpsilon;
    auto const in = equiv_inputs(m1, m2, f1, f2, requested);
    auto const verdict = blm_equivalent(in.b1, in.b2, cfg.tol, in.mode);

    Json j = verdict_to_json(verdict, in.b1.alphabet);
    j["mode"] = in.mode == WordMode::PositiveWordsOnly ? "plus" : "eps";
    j["length_bound"] = blm_equivalence_bound(in.b1, in.b2);
    if (in.hqa_bound) {
        j["hqa_length_bound"] = *in.hqa_bound;
    }
    bool consistent = true;
    if (crosscheck) {
        auto const k = std::min(blm_equivalence_bound(in.b1, in.b2), cfg.max_word_len);
        auto const brute = blm_k_equivalent_bruteforce(in.b1, in.b2, k, cfg.tol, in.mode);
        // Brute force may miss a disagreement longer than its cap, nothing else.
        consistent = brute.equivalent == verdict.equivalent ||
                     (brute.equivalent && verdict.witness && verdict.witness->size() > k);
        j["crosscheck"] = verdict_to_json(brute, in.b1.alphabet);
        j["crosscheck"]["max_length"] = k;
        j["crosscheck"]["consistent"] = consistent;
    }
    emit(j, cfg, out);
    if (!consistent) {
        err << "error: forward-basis and brute-force verdicts disagree\n";
        return kError;
    }
    return verdict.equivalent ? kSuccess : kNegative;
}

int cmd_check_safety(Config const& cfg, std::string const& model_file, std::string const& dfa_file,
                     std::string const& state, std::string const& rho_file, std::ostream& out, std::ostream& err) {
    auto const model = load_model(model_file, cfg.tol);
    auto const dfa_model = load_model(dfa_file, cfg.tol);
    auto const& m = expect<SLHqMC>(model, "slhqmc", model_file);
    auto const& dfa = expect<Dfa>(dfa_model, "dfa", dfa_file);
    auto const s = m.chain.state_index(state);
    auto const [rho, source] = resolve_rho(m.chain, s, rho_file);

    ReachOptions options;
    options.tol = cfg.tol;
    options.max_iter = cfg.max_iter;
    auto const result = check_safety(m, dfa, s, rho, options);

    Json per_state = Json::array();
    for (auto const& st : result.per_state) {
        per_state.push_back({{"state", st.state}, {"satisfy_completeness", matrix_to_json(st.satisfy.completeness_sum())}});
    }
    bool const converged = result.residual <= cfg.tol;
    emit({{"state", result.state},
          {"probability_satisfy", result.probability_satisfy},
          {"probability_violate", result.violate.trace_on(rho)},
          {"empty_property", result.empty_property},
          {"rho_source", source},
          {"method", method_name(result.method)},
          {"iterations", result.iterations},
          {"residual", result.residual},
          {"converged", converged},
          {"per_state", per_state}},
         cfg, out);
    if (!converged) {
        err << "warning: reachability iteration stopped at residual " << result.residual << " after "
            << result.iterations << " sweeps\n";
    }
    return kSuccess;
}

int cmd_run(Config const& cfg, std::string const& file, std::size_t steps, std::ostream& out) {
    auto const model = load_model(file, cfg.tol);
    Json j = {{"kind", kind_name(model)}, {"steps", steps}};
    if (auto const* q = std::get_if<QMC>(&model)) {
        require_valid(*q, "qmc model");
        auto const rho = qmc_run(*q, steps);
        j["rho"] = matrix_to_json(rho);
        j["trace"] = rho.trace().real();
    } else {
        auto const& chain = chain_of(model, file);
        require_valid(chain, "hqmc model");
        auto const mu = hqmc_run(chain, steps);
        Json dist = Json::array();
        double total = 0.0;
        for (std::size_t s = 0; s < mu.size(); ++s) {
            double const tr = mu[s].trace().real();
            total += tr;
            dist.push_back({{"state", chain.states[s]}, {"trace", tr}, {"matrix", matrix_to_json(mu[s])}});
        }
        j["distribution"] = dist;
        j["trace"] = total;
    }
    emit(j, cfg, out);
    return kSuccess;
}

int cmd_measure(Config const& cfg, std::string const& file, std::vector<std::string> const& path,
                std::string const& rho_file, std::ostream& out) {
    auto const model = load_model(file, cfg.tol);
    auto const& chain = chain_of(model, file);
    require_valid(chain, "hqmc model");
    std::vector<StateIndex> indices;
    for (auto const& name : path) {
        indices.push_back(chain.state_index(name));
    }
    if (indices.empty()) {
        throw Error("--path needs at least one state");
    }
    auto const [rho, source] = resolve_rho(chain, indices.front(), rho_file);
    auto const q = path_superop(chain, indices);
    emit({{"path", path},
          {"probability", q.trace_on(rho)},
          {"rho_source", source},
          {"completeness_sum", matrix_to_json(q.completeness_sum())}},
         cfg, out);
    return kSuccess;
}

double initial_tolerance() {
    char const* env = std::getenv("HQMC_TOL");
    if (env == nullptr || *env == '\0') {
        return kDefaultTolerance;
    }
    char* end = nullptr;
    double const tol = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(tol > 0.0)) {
        throw Error(std::string("HQMC_TOL must be a positive number, got '") + env + "'");
    }
    return tol;
}

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    Config cfg;
    try {
        cfg.tol = initial_tolerance();
    } catch (Error const& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }

    CLI::App app{"Hybrid quantum Markov chain toolkit: validation, conversion, equivalence and safety checking",
                 "hqmc"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--tol", cfg.tol, "Numerical tolerance (default 1e-9, or $HQMC_TOL)")
        ->check(CLI::PositiveNumber);
    app.add_option("--max-iter", cfg.max_iter, "Iteration cap of the reachability solver")->check(CLI::PositiveNumber);
    app.add_option("--max-word-len", cfg.max_word_len, "Word-length cap of brute-force cross-checks")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--output", cfg.output, "Write the result to this file instead of standard output");

    std::string file;
    std::string file2;
    std::string to;
    std::string dfa_file;
    std::string mode = "eps";
    std::string state;
    std::string rho_file;
    std::size_t steps = 0;
    std::vector<std::string> path;
    bool crosscheck = false;

    auto* validate_cmd = app.add_subcommand("validate", "Check a model's structural invariants");
    validate_cmd->add_option("file", file, "Model file")->required();

    auto* convert_cmd = app.add_subcommand("convert", "Convert a model to another representation");
    convert_cmd->add_option("file", file, "Model file")->required();
    convert_cmd->add_option("--to", to, "Target representation")
        ->required()
        ->check(CLI::IsMember({"qmc", "qa", "blm", "chqa", "product"}));
    convert_cmd->add_option("--dfa", dfa_file, "DFA file, for --to product");

    auto const add_equiv_args = [&](CLI::App* cmd) {
        cmd->add_option("file1", file, "First model")->required();
        cmd->add_option("file2", file2, "Second model")->required();
        cmd->add_flag("--crosscheck", crosscheck, "Also compare all words up to the length bound (capped by --max-word-len)");
    };
    auto* equiv_cmd = app.add_subcommand("equiv", "Decide equivalence of two blm, qa, hqa or slhqmc models");
    add_equiv_args(equiv_cmd);
    equiv_cmd->add_option("--mode", mode, "Include the empty word (eps) or not (plus); slhqmc always uses plus")
        ->check(CLI::IsMember({"eps", "plus"}));
    auto* trace_cmd = app.add_subcommand("trace-equiv", "Decide trace equivalence of two slhqmc models");
    add_equiv_args(trace_cmd);

    auto* safety_cmd = app.add_subcommand("check-safety", "Probability that a safety property holds");
    safety_cmd->add_option("model", file, "slhqmc model")->required();
    safety_cmd->add_option("dfa", dfa_file, "DFA for the bad prefixes")->required();
    safety_cmd->add_option("--state", state, "Start state")->required();
    safety_cmd->add_option("--rho", rho_file, "Initial density (default: normalized initial mass of the state)");

    auto* run_cmd = app.add_subcommand("run", "Evolve an hqmc or qmc for a number of steps");
    run_cmd->add_option("model", file, "hqmc or qmc model")->required();
    run_cmd->add_option("--steps", steps, "Number of steps")->required()->check(CLI::NonNegativeNumber);

    auto* measure_cmd = app.add_subcommand("measure", "Cylinder probability of an explicit path");
    measure_cmd->add_option("model", file, "hqmc or slhqmc model")->required();
    measure_cmd->add_option("--path", path, "Comma-separated state names")->required()->delimiter(',');
    measure_cmd->add_option("--rho", rho_file, "Initial density (default: normalized initial mass of the first state)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kError;
    }

    ToleranceScope const scope(cfg.tol);
    try {
        if (*validate_cmd) {
            return cmd_validate(cfg, file, out);
        }
        if (*convert_cmd) {
            return cmd_convert(cfg, file, to, dfa_file, out);
        }
        if (*equiv_cmd) {
            return cmd_equiv(cfg, file, file2, mode, crosscheck, false, out, err);
        }
        if (*trace_cmd) {
            return cmd_equiv(cfg, file, file2, "plus", crosscheck, true, out, err);
        }
        if (*safety_cmd) {
            return cmd_check_safety(cfg, file, dfa_file, state, rho_file, out, err);
        }
        if (*run_cmd) {
            return cmd_run(cfg, file, steps, out);
        }
        if (*measure_cmd) {
            return cmd_measure(cfg, file, path, rho_file, out);
        }
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}

}  // namespace hqmc::cli
