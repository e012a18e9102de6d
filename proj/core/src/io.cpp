#include "hqmc/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hqmc/errors.hpp"

namespace hqmc {

namespace {

Json const& field(Json const& j, char const* key) {
    if (!j.is_object()) {
        throw ParseError(std::string("expected an object holding '") + key + "'");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError(std::string("missing field '") + key + "'");
    }
    return *it;
}

Complex complex_from_json(Json const& j) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError("complex entry must be [re, im], got " + j.dump());
    }
    Complex const z{j[0].get<double>(), j[1].get<double>()};
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw ParseError("non-finite complex entry");
    }
    return z;
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

std::vector<std::string> string_list(Json const& j, char const* what) {
    if (!j.is_array()) {
        throw ParseError(std::string(what) + " must be a list of strings");
    }
    std::vector<std::string> out;
    for (auto const& item : j) {
        if (!item.is_string()) {
            throw ParseError(std::string(what) + " must be a list of strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

void require_plain_names(std::vector<std::string> const& names, char const* what) {
    for (auto const& n : names) {
        if (n.empty() || n.find('|') != std::string::npos) {
            throw ParseError(std::string(what) + " name '" + n + "' must be nonempty and free of '|'");
        }
    }
}

std::size_t index_in(std::vector<std::string> const& names, std::string const& name, char const* what) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw ParseError(std::string("unknown ") + what + " '" + name + "'");
    }
    return static_cast<std::size_t>(it - names.begin());
}

std::pair<std::string, std::string> split_pair_key(std::string const& key) {
    auto const bar = key.find('|');
    if (bar == std::string::npos) {
        throw ParseError("transition key '" + key + "' must have the form 'to|from'");
    }
    return {key.substr(0, bar), key.substr(bar + 1)};
}

Eigen::Index read_dim(Json const& j) {
    auto const& d = field(j, "dim");
    if (!d.is_number_integer() || d.get<long long>() <= 0) {
        throw ParseError("'dim' must be a positive integer");
    }
    return static_cast<Eigen::Index>(d.get<long long>());
}

TransitionMatrix transitions_from_json(Json const& j, std::vector<std::string> const& states, Eigen::Index dim) {
    TransitionMatrix trans(states.size(), dim);
    if (!j.is_object()) {
        throw ParseError("'trans' must be an object keyed by 'to|from'");
    }
    for (auto const& [key, value] : j.items()) {
        auto const [to, from] = split_pair_key(key);
        trans.set(index_in(states, to, "state"), index_in(states, from, "state"), operation_from_json(value));
    }
    return trans;
}

Json transitions_to_json(TransitionMatrix const& trans, std::vector<std::string> const& states) {
    Json out = Json::object();
    for (StateIndex s = 0; s < states.size(); ++s) {
        for (StateIndex t = 0; t < states.size(); ++t) {
            auto const& op = trans.at(t, s);
            if (!op.is_zero(0.0)) {
                out[states[t] + "|" + states[s]] = operation_to_json(op);
            }
        }
    }
    return out;
}

Distribution distribution_from_json(Json const& j, std::vector<std::string> const& states, Eigen::Index dim) {
    Distribution out(states.size(), Matrix::Zero(dim, dim));
    if (!j.is_object()) {
        throw ParseError("'init' must be an object keyed by state");
    }
    for (auto const& [key, value] : j.items()) {
        out[index_in(states, key, "state")] = matrix_from_json(value);
    }
    return out;
}

Json distribution_to_json(Distribution const& mu, std::vector<std::string> const& states) {
    Json out = Json::object();
    for (std::size_t s = 0; s < states.size(); ++s) {
        if (!mu[s].isZero(0.0)) {
            out[states[s]] = matrix_to_json(mu[s]);
        }
    }
    return out;
}

std::vector<StateIndex> accepting_from_json(Json const& j, std::vector<std::string> const& states) {
    std::vector<StateIndex> out;
    for (auto const& name : string_list(j, "accept")) {
        out.push_back(index_in(states, name, "state"));
    }
    return out;
}

Json accepting_to_json(std::vector<StateIndex> const& acc, std::vector<std::string> const& states) {
    Json out = Json::array();
    for (auto s : acc) {
        out.push_back(states.at(s));
    }
    return out;
}

HqMC hqmc_from_json(Json const& j, double tol) {
    HqMC m;
    m.tol = tol;
    m.dim = read_dim(j);
    m.states = string_list(field(j, "states"), "states");
    require_plain_names(m.states, "state");
    m.trans = j.contains("trans") ? transitions_from_json(j["trans"], m.states, m.dim)
                                  : TransitionMatrix(m.states.size(), m.dim);
    m.init = distribution_from_json(field(j, "init"), m.states, m.dim);
    return m;
}

Json hqmc_fields(HqMC const& m) {
    return {{"dim", m.dim},
            {"states", m.states},
            {"trans", transitions_to_json(m.trans, m.states)},
            {"init", distribution_to_json(m.init, m.states)}};
}

SLHqMC slhqmc_from_json(Json const& j, double tol) {
    SLHqMC m;
    m.chain = hqmc_from_json(j, tol);
    auto const raw_ap = string_list(field(j, "ap"), "ap");
    m.ap = canonical_props(raw_ap);
    if (m.ap.size() != raw_ap.size()) {
        throw ParseError("duplicate atomic proposition");
    }
    if (m.ap.size() > 20) {
        throw ParseError("at most 20 atomic propositions are supported");
    }
    auto const& labels = field(j, "label");
    if (!labels.is_object()) {
        throw ParseError("'label' must be an object keyed by state");
    }
    m.label.assign(m.chain.states.size(), 0);
    std::vector<bool> seen(m.chain.states.size(), false);
    for (auto const& [key, value] : labels.items()) {
        auto const s = index_in(m.chain.states, key, "state");
        auto const props = string_list(value, "label");
        for (auto const& p : props) {
            index_in(m.ap, p, "atomic proposition");
        }
        m.label[s] = label_mask(m.ap, canonical_props(props));
        seen[s] = true;
    }
    for (std::size_t s = 0; s < seen.size(); ++s) {
        if (!seen[s]) {
            throw ParseError("state '" + m.chain.states[s] + "' has no label");
        }
    }
    return m;
}

Json slhqmc_to_json(SLHqMC const& m) {
    Json out = {{"kind", "slhqmc"}};
    out.update(hqmc_fields(m.chain));
    out["ap"] = m.ap;
    Json labels = Json::object();
    for (std::size_t s = 0; s < m.chain.states.size(); ++s) {
        labels[m.chain.states[s]] = label_props(m.ap, m.label[s]);
    }
    out["label"] = labels;
    return out;
}

HQA hqa_from_json(Json const& j, double tol) {
    HQA a;
    a.tol = tol;
    a.dim = read_dim(j);
    a.states = string_list(field(j, "states"), "states");
    require_plain_names(a.states, "state");
    a.alphabet = string_list(field(j, "alphabet"), "alphabet");
    a.init = distribution_from_json(field(j, "init"), a.states, a.dim);
    auto const& trans = field(j, "trans");
    if (!trans.is_object()) {
        throw ParseError("'trans' must be an object keyed by symbol");
    }
    a.trans.assign(a.alphabet.size(), TransitionMatrix(a.states.size(), a.dim));
    for (auto const& [sym, value] : trans.items()) {
        a.trans[index_in(a.alphabet, sym, "symbol")] = transitions_from_json(value, a.states, a.dim);
    }
    auto const& fashion = field(j, "fashion");
    if (fashion.contains("classical")) {
        a.acceptance = ClassicalAcceptance{accepting_from_json(field(fashion["classical"], "accept"), a.states)};
    } else if (fashion.contains("quantum")) {
        a.acceptance = QuantumAcceptance{matrix_from_json(field(fashion["quantum"], "p_acc"))};
    } else if (fashion.contains("mixed")) {
        auto const& mixed = fashion["mixed"];
        a.acceptance =
            MixedAcceptance{accepting_from_json(field(mixed, "accept"), a.states), matrix_from_json(field(mixed, "p_acc"))};
    } else {
        throw ParseError("'fashion' must hold one of 'classical', 'quantum', 'mixed'");
    }
    return a;
}

Json hqa_to_json(HQA const& a) {
    Json trans = Json::object();
    for (std::size_t sym = 0; sym < a.alphabet.size(); ++sym) {
        trans[a.alphabet[sym]] = transitions_to_json(a.trans[sym], a.states);
    }
    Json fashion = std::visit(
        [&](auto const& acc) -> Json {
            using T = std::decay_t<decltype(acc)>;
            if constexpr (std::is_same_v<T, ClassicalAcceptance>) {
                return {{"classical", {{"accept", accepting_to_json(acc.accepting, a.states)}}}};
            } else if constexpr (std::is_same_v<T, QuantumAcceptance>) {
                return {{"quantum", {{"p_acc", matrix_to_json(acc.p_acc)}}}};
            } else {
                return {{"mixed",
                         {{"accept", accepting_to_json(acc.accepting, a.states)}, {"p_acc", matrix_to_json(acc.p_acc)}}}};
            }
        },
        a.acceptance);
    return {{"kind", "hqa"},
            {"dim", a.dim},
            {"states", a.states},
            {"alphabet", a.alphabet},
            {"init", distribution_to_json(a.init, a.states)},
            {"trans", trans},
            {"fashion", fashion}};
}

QMC qmc_from_json(Json const& j, double tol) {
    QMC m;
    m.tol = tol;
    m.dim = read_dim(j);
    m.op = operation_from_json(field(j, "op"));
    m.init = matrix_from_json(field(j, "init"));
    return m;
}

QA qa_from_json(Json const& j, double tol) {
    QA a;
    a.tol = tol;
    a.dim = read_dim(j);
    a.alphabet = string_list(field(j, "alphabet"), "alphabet");
    a.init = matrix_from_json(field(j, "init"));
    a.p_acc = matrix_from_json(field(j, "p_acc"));
    auto const& ops = field(j, "ops");
    a.ops.assign(a.alphabet.size(), QuantumOperation::zero(a.dim));
    std::vector<bool> seen(a.alphabet.size(), false);
    for (auto const& [sym, value] : ops.items()) {
        auto const i = index_in(a.alphabet, sym, "symbol");
        a.ops[i] = operation_from_json(value);
        seen[i] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw ParseError("no operation for symbol '" + a.alphabet[i] + "'");
        }
    }
    return a;
}

BLM blm_from_json(Json const& j) {
    BLM a;
    a.alphabet = string_list(field(j, "alphabet"), "alphabet");
    a.pi = vector_from_json(field(j, "pi"));
    a.eta = vector_from_json(field(j, "eta"));
    if (j.contains("n") && j["n"].get<long long>() != a.pi.size()) {
        throw ParseError("'n' does not match the length of 'pi'");
    }
    auto const& mats = field(j, "mats");
    a.mats.assign(a.alphabet.size(), Matrix());
    std::vector<bool> seen(a.alphabet.size(), false);
    for (auto const& [sym, value] : mats.items()) {
        auto const i = index_in(a.alphabet, sym, "symbol");
        a.mats[i] = matrix_from_json(value);
        seen[i] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw ParseError("no matrix for symbol '" + a.alphabet[i] + "'");
        }
    }
    return a;
}

Json blm_to_json(BLM const& a) {
    Json mats = Json::object();
    for (std::size_t i = 0; i < a.alphabet.size(); ++i) {
        mats[a.alphabet[i]] = matrix_to_json(a.mats[i]);
    }
    return {{"kind", "blm"},
            {"n", a.num_states()},
            {"alphabet", a.alphabet},
            {"mats", mats},
            {"pi", vector_to_json(a.pi)},
            {"eta", vector_to_json(a.eta)}};
}

Dfa dfa_from_json(Json const& j) {
    Dfa a;
    a.states = string_list(field(j, "states"), "states");
    require_plain_names(a.states, "state");
    auto const& alphabet = field(j, "alphabet");
    if (!alphabet.is_array()) {
        throw ParseError("DFA 'alphabet' must be a list of proposition lists");
    }
    for (auto const& sym : alphabet) {
        a.alphabet.push_back(canonical_props(string_list(sym, "alphabet symbol")));
    }
    auto const& delta = field(j, "delta");
    if (!delta.is_object()) {
        throw ParseError("'delta' must be an object keyed by 'q|{props}'");
    }
    constexpr StateIndex kUnset = static_cast<StateIndex>(-1);
    a.delta.assign(a.states.size() * a.alphabet.size(), kUnset);
    for (auto const& [key, value] : delta.items()) {
        auto const [q, sym] = split_pair_key(key);
        auto const qi = index_in(a.states, q, "DFA state");
        auto const props = parse_props_name(sym);
        auto it = std::find(a.alphabet.begin(), a.alphabet.end(), props);
        if (it == a.alphabet.end()) {
            throw ParseError("DFA transition on undeclared symbol " + props_name(props));
        }
        if (!value.is_string()) {
            throw ParseError("DFA transition target must be a state name");
        }
        auto const ai = static_cast<std::size_t>(it - a.alphabet.begin());
        a.delta[qi * a.alphabet.size() + ai] = index_in(a.states, value.get<std::string>(), "DFA state");
    }
    for (std::size_t i = 0; i < a.delta.size(); ++i) {
        if (a.delta[i] == kUnset) {
            throw ParseError("DFA is not total: no transition from '" + a.states[i / a.alphabet.size()] + "' on " +
                             props_name(a.alphabet[i % a.alphabet.size()]));
        }
    }
    auto const& q0 = field(j, "q0");
    if (!q0.is_string()) {
        throw ParseError("'q0' must be a state name");
    }
    a.initial = index_in(a.states, q0.get<std::string>(), "DFA state");
    a.accepting.assign(a.states.size(), false);
    for (auto const& name : string_list(field(j, "accepting"), "accepting")) {
        a.accepting[index_in(a.states, name, "DFA state")] = true;
    }
    return a;
}

Json dfa_to_json(Dfa const& a) {
    Json alphabet = Json::array();
    for (auto const& sym : a.alphabet) {
        alphabet.push_back(sym);
    }
    Json delta = Json::object();
    for (StateIndex q = 0; q < a.states.size(); ++q) {
        for (SymbolIndex s = 0; s < a.alphabet.size(); ++s) {
            delta[a.states[q] + "|" + props_name(a.alphabet[s])] = a.states[a.next(q, s)];
        }
    }
    Json accepting = Json::array();
    for (StateIndex q = 0; q < a.states.size(); ++q) {
        if (a.accepting[q]) {
            accepting.push_back(a.states[q]);
        }
    }
    return {{"kind", "dfa"},
            {"states", a.states},
            {"alphabet", alphabet},
            {"delta", delta},
            {"q0", a.states.at(a.initial)},
            {"accepting", accepting}};
}

}  // namespace

std::string kind_name(AnyModel const& model) {
    static constexpr char const* kNames[] = {"hqmc", "qmc", "slhqmc", "hqa", "qa", "blm", "dfa"};
    return kNames[model.index()];
}

Json matrix_to_json(Matrix const& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back(complex_to_json(m(i, k)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(Json const& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw ParseError("matrix must be a nonempty list of rows");
    }
    auto const rows = static_cast<Eigen::Index>(j.size());
    auto const cols = static_cast<Eigen::Index>(j[0].size());
    if (cols == 0) {
        throw ParseError("matrix rows must be nonempty");
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        auto const& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ParseError("matrix rows must all have " + std::to_string(cols) + " entries");
        }
        for (Eigen::Index k = 0; k < cols; ++k) {
            m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
        }
    }
    return m;
}

Json vector_to_json(Vector const& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(complex_to_json(v(i)));
    }
    return out;
}

Vector vector_from_json(Json const& j) {
    if (!j.is_array() || j.empty()) {
        throw ParseError("vector must be a nonempty list of entries");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    }
    return v;
}

Json operation_to_json(QuantumOperation const& op) {
    Json kraus = Json::array();
    for (auto const& k : op.kraus()) {
        kraus.push_back(matrix_to_json(k));
    }
    return {{"kraus", kraus}};
}

QuantumOperation operation_from_json(Json const& j) {
    auto const& kraus = field(j, "kraus");
    if (!kraus.is_array() || kraus.empty()) {
        throw ParseError("'kraus' must be a nonempty list of matrices");
    }
    std::vector<Matrix> mats;
    for (auto const& m : kraus) {
        mats.push_back(matrix_from_json(m));
    }
    try {
        return QuantumOperation(std::move(mats));
    } catch (DimensionError const& e) {
        throw ParseError(e.what());
    }
}

AnyModel model_from_json(Json const& j, double tol) {
    auto const& kind_field = field(j, "kind");
    if (!kind_field.is_string()) {
        throw ParseError("'kind' must be a string");
    }
    auto const kind = kind_field.get<std::string>();
    try {
        if (kind == "hqmc") {
            return hqmc_from_json(j, tol);
        }
        if (kind == "qmc") {
            return qmc_from_json(j, tol);
        }
        if (kind == "slhqmc") {
            return slhqmc_from_json(j, tol);
        }
        if (kind == "hqa") {
            return hqa_from_json(j, tol);
        }
        if (kind == "qa") {
            return qa_from_json(j, tol);
        }
        if (kind == "blm") {
            return blm_from_json(j);
        }
        if (kind == "dfa") {
            return dfa_from_json(j);
        }
    } catch (nlohmann::json::exception const& e) {
        throw ParseError(std::string("malformed ") + kind + " document: " + e.what());
    } catch (DimensionError const& e) {
        throw ParseError(std::string("malformed ") + kind + " document: " + e.what());
    } catch (LookupError const& e) {
        throw ParseError(std::string("malformed ") + kind + " document: " + e.what());
    }
    throw ParseError("unknown model kind '" + kind + "'");
}

Json model_to_json(AnyModel const& model) {
    return std::visit(
        [](auto const& m) -> Json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, HqMC>) {
                Json out = {{"kind", "hqmc"}};
                out.update(hqmc_fields(m));
                return out;
            } else if constexpr (std::is_same_v<T, QMC>) {
                return {{"kind", "qmc"}, {"dim", m.dim}, {"op", operation_to_json(m.op)}, {"init", matrix_to_json(m.init)}};
            } else if constexpr (std::is_same_v<T, SLHqMC>) {
                return slhqmc_to_json(m);
            } else if constexpr (std::is_same_v<T, HQA>) {
                return hqa_to_json(m);
            } else if constexpr (std::is_same_v<T, QA>) {
                Json ops = Json::object();
                for (std::size_t i = 0; i < m.alphabet.size(); ++i) {
                    ops[m.alphabet[i]] = operation_to_json(m.ops[i]);
                }
                return {{"kind", "qa"},
                        {"dim", m.dim},
                        {"alphabet", m.alphabet},
                        {"init", matrix_to_json(m.init)},
                        {"ops", ops},
                        {"p_acc", matrix_to_json(m.p_acc)}};
            } else if constexpr (std::is_same_v<T, BLM>) {
                return blm_to_json(m);
            } else {
                return dfa_to_json(m);
            }
        },
        model);
}

Json parse_json_text(std::string_view text, std::string_view source) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (nlohmann::json::parse_error const& e) {
        // e.byte is 1-based and points one past the offending character.
        std::size_t const offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < offset; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": JSON syntax error: " + e.what());
    }
}

AnyModel load_model(std::filesystem::path const& path, double tol) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    auto const text = buffer.str();
    try {
        return model_from_json(parse_json_text(text, path.string()), tol);
    } catch (ParseError const& e) {
        std::string const what = e.what();
        if (what.rfind(path.string(), 0) == 0) {
            throw;
        }
        throw ParseError(path.string() + ": " + what);
    }
}

void save_model(AnyModel const& model, std::filesystem::path const& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << model_to_json(model).dump(2) << '\n';
}

Json verdict_to_json(EquivalenceVerdict const& v, std::vector<std::string> const& alphabet) {
    Json witness = nullptr;
    if (v.witness) {
        witness = word_names(alphabet, *v.witness);
    }
    return {{"equivalent", v.equivalent},
            {"witness", witness},
            {"basis_size", v.basis_size},
            {"words_explored", v.words_explored},
            {"margin", v.margin},
            {"max_discrepancy", v.max_discrepancy}};
}

char const* method_name(ReachMethod m) noexcept { return m == ReachMethod::Direct ? "direct" : "kleene"; }

}  // namespace hqmc
