#include "hqmc/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hqmc/errors.hpp"

namespace hqmc {

// ---- TransitionMatrix -------------------------------------------------------

TransitionMatrix::TransitionMatrix(std::size_t num_states, Eigen::Index dim)
    : n_(num_states), dim_(dim), entries_(num_states * num_states, QuantumOperation::zero(dim)) {}

QuantumOperation const& TransitionMatrix::at(StateIndex to, StateIndex from) const {
    if (to >= n_ || from >= n_) {
        throw LookupError("transition index out of range");
    }
    return entries_[to * n_ + from];
}

void TransitionMatrix::set(StateIndex to, StateIndex from, QuantumOperation op) {
    if (to >= n_ || from >= n_) {
        throw LookupError("transition index out of range");
    }
    if (op.dim() != dim_) {
        throw DimensionError("transition operation of dimension " + std::to_string(op.dim()) + " in a chain of dimension " +
                             std::to_string(dim_));
    }
    entries_[to * n_ + from] = std::move(op);
}

QuantumOperation TransitionMatrix::column_sum(StateIndex from) const {
    std::vector<Matrix> kraus;
    for (StateIndex t = 0; t < n_; ++t) {
        auto const& k = at(t, from).kraus();
        kraus.insert(kraus.end(), k.begin(), k.end());
    }
    if (kraus.empty()) {
        return QuantumOperation::zero(dim_);
    }
    return QuantumOperation(std::move(kraus));
}

bool TransitionMatrix::has_edge(StateIndex to, StateIndex from, double tol) const { return !at(to, from).is_zero(tol); }

// ---- ValidationReport -------------------------------------------------------

double ValidationReport::worst() const noexcept {
    double w = 0.0;
    for (auto const& v : violations) {
        w = std::max(w, v.magnitude);
    }
    return w;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i > 0) {
            os << "; ";
        }
        os << violations[i].what << " (magnitude " << violations[i].magnitude << ")";
    }
    return os.str();
}

void ValidationReport::merge(ValidationReport const& other, std::string_view prefix) {
    for (auto const& v : other.violations) {
        violations.push_back({std::string(prefix) + v.what, v.magnitude});
    }
}

// ---- names ------------------------------------------------------------------

namespace {
template<typename Names>
StateIndex find_name(Names const& names, std::string_view name, char const* what) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw LookupError(std::string("unknown ") + what + " '" + std::string(name) + "'");
    }
    return static_cast<StateIndex>(it - names.begin());
}
}  // namespace

StateIndex HqMC::state_index(std::string_view name) const { return find_name(states, name, "state"); }

StateIndex HQA::state_index(std::string_view name) const { return find_name(states, name, "state"); }

SymbolIndex Dfa::symbol_index(PropSet const& symbol) const {
    auto const canon = canonical_props(symbol);
    auto it = std::find(alphabet.begin(), alphabet.end(), canon);
    if (it == alphabet.end()) {
        throw LookupError("DFA has no symbol " + props_name(canon));
    }
    return static_cast<SymbolIndex>(it - alphabet.begin());
}

PropSet canonical_props(PropSet props) {
    std::sort(props.begin(), props.end());
    props.erase(std::unique(props.begin(), props.end()), props.end());
    return props;
}

LabelMask label_mask(std::span<std::string const> ap, PropSet const& props) {
    LabelMask mask = 0;
    for (auto const& p : props) {
        mask |= LabelMask{1} << find_name(ap, p, "atomic proposition");
    }
    return mask;
}

PropSet label_props(std::span<std::string const> ap, LabelMask mask) {
    PropSet out;
    for (std::size_t i = 0; i < ap.size(); ++i) {
        if (mask & (LabelMask{1} << i)) {
            out.push_back(ap[i]);
        }
    }
    return out;
}

std::string props_name(PropSet const& props) {
    std::string out = "{";
    for (std::size_t i = 0; i < props.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += props[i];
    }
    out += '}';
    return out;
}

PropSet parse_props_name(std::string_view text) {
    if (text.size() < 2 || text.front() != '{' || text.back() != '}') {
        throw ParseError("proposition set must look like {a,b}: '" + std::string(text) + "'");
    }
    text = text.substr(1, text.size() - 2);
    PropSet out;
    while (!text.empty()) {
        auto const comma = text.find(',');
        auto const item = text.substr(0, comma);
        if (item.empty()) {
            throw ParseError("empty proposition name in set");
        }
        out.emplace_back(item);
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
        if (text.empty()) {
            throw ParseError("trailing comma in proposition set");
        }
    }
    return canonical_props(std::move(out));
}

Word parse_word(std::span<std::string const> alphabet, std::span<std::string const> names) {
    Word out;
    out.reserve(names.size());
    for (auto const& n : names) {
        out.push_back(find_name(alphabet, n, "symbol"));
    }
    return out;
}

std::vector<std::string> word_names(std::span<std::string const> alphabet, std::span<SymbolIndex const> word) {
    std::vector<std::string> out;
    out.reserve(word.size());
    for (auto a : word) {
        if (a >= alphabet.size()) {
            throw LookupError("symbol index out of range");
        }
        out.push_back(alphabet[a]);
    }
    return out;
}

// ---- validation -------------------------------------------------------------

namespace {

void check_matrix_shape(ValidationReport& r, Matrix const& m, Eigen::Index dim, std::string const& what) {
    if (m.rows() != dim || m.cols() != dim) {
        r.add(what + " has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                  std::to_string(dim) + "x" + std::to_string(dim),
              static_cast<double>(std::abs(m.rows() - dim) + std::abs(m.cols() - dim)));
    } else if (!all_finite(m)) {
        r.add(what + " has non-finite entries", INFINITY);
    }
}

bool check_psd(ValidationReport& r, Matrix const& m, double tol, std::string const& what) {
    double const herm = max_abs(m - m.adjoint());
    if (herm > tol) {
        r.add(what + " is not Hermitian", herm);
        return false;
    }
    double const low = min_hermitian_eigenvalue(m);
    if (low < -tol) {
        r.add(what + " has negative eigenvalue", -low);
        return false;
    }
    return true;
}

void check_projector(ValidationReport& r, Matrix const& p, Eigen::Index dim, double tol, std::string const& what) {
    check_matrix_shape(r, p, dim, what);
    if (p.rows() != dim || p.cols() != dim) {
        return;
    }
    double const herm = max_abs(p - p.adjoint());
    if (herm > tol) {
        r.add(what + " is not Hermitian", herm);
    }
    double const idem = max_abs(p * p - p);
    if (idem > tol) {
        r.add(what + " is not idempotent", idem);
    }
}

void check_operation(ValidationReport& r, QuantumOperation const& op, Eigen::Index dim, double tol, bool trace_preserving,
                     std::string const& what) {
    if (op.dim() != dim) {
        r.add(what + " has dimension " + std::to_string(op.dim()) + ", expected " + std::to_string(dim),
              static_cast<double>(std::abs(op.dim() - dim)));
        return;
    }
    for (auto const& k : op.kraus()) {
        if (!all_finite(k)) {
            r.add(what + " has non-finite Kraus entries", INFINITY);
            return;
        }
    }
    Matrix const sum = op.completeness_sum();
    Matrix const id = Matrix::Identity(dim, dim);
    if (trace_preserving) {
        double const dev = max_abs(sum - id);
        if (dev > tol) {
            r.add(what + " is not trace-preserving", dev);
        }
    } else {
        double const low = min_hermitian_eigenvalue(id - sum);
        if (low < -tol) {
            r.add(what + " is not trace-nonincreasing", -low);
        }
    }
}

void check_distribution(ValidationReport& r, std::vector<std::string> const& states, Distribution const& init,
                        Eigen::Index dim, double tol) {
    if (init.size() != states.size()) {
        r.add("initial distribution has " + std::to_string(init.size()) + " entries for " +
                  std::to_string(states.size()) + " states",
              static_cast<double>(init.size() > states.size() ? init.size() - states.size() : states.size() - init.size()));
        return;
    }
    double total = 0.0;
    for (std::size_t s = 0; s < states.size(); ++s) {
        std::string const what = "initial operator at state '" + states[s] + "'";
        ValidationReport local;
        check_matrix_shape(local, init[s], dim, what);
        if (local.ok()) {
            check_psd(local, init[s], tol, what);
            total += init[s].trace().real();
        }
        r.merge(local);
    }
    double const dev = std::abs(total - 1.0);
    if (dev > tol) {
        r.add("initial distribution has total trace " + std::to_string(total) + ", expected 1", dev);
    }
}

void check_unique_names(ValidationReport& r, std::vector<std::string> const& names, char const* what) {
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    auto const dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
        r.add(std::string("duplicate ") + what + " '" + *dup + "'", 1.0);
    }
    if (names.empty()) {
        r.add(std::string("no ") + what + "s declared", 1.0);
    }
}

void check_transitions(ValidationReport& r, std::vector<std::string> const& states, TransitionMatrix const& trans,
                       Eigen::Index dim, double tol, std::string const& prefix) {
    if (trans.num_states() != states.size() || trans.dim() != dim) {
        r.add(prefix + "transition matrix shape does not match the state set", 1.0);
        return;
    }
    for (StateIndex s = 0; s < states.size(); ++s) {
        for (StateIndex t = 0; t < states.size(); ++t) {
            check_operation(r, trans.at(t, s), dim, tol, false,
                            prefix + "transition " + states[s] + " -> " + states[t]);
        }
        check_operation(r, trans.column_sum(s), dim, tol, true, prefix + "column '" + states[s] + "'");
    }
}

void check_accepting(ValidationReport& r, std::vector<StateIndex> const& accepting, std::size_t num_states) {
    for (auto s : accepting) {
        if (s >= num_states) {
            r.add("accepting state index " + std::to_string(s) + " out of range", 1.0);
        }
    }
}

}  // namespace

ValidationReport validate(HqMC const& m) {
    ValidationReport r;
    if (m.dim <= 0) {
        r.add("Hilbert dimension must be positive", 1.0);
        return r;
    }
    check_unique_names(r, m.states, "state");
    check_transitions(r, m.states, m.trans, m.dim, m.tol, "");
    check_distribution(r, m.states, m.init, m.dim, m.tol);
    return r;
}

ValidationReport validate(QMC const& m) {
    ValidationReport r;
    if (m.dim <= 0) {
        r.add("Hilbert dimension must be positive", 1.0);
        return r;
    }
    check_operation(r, m.op, m.dim, m.tol, true, "operation");
    ValidationReport init;
    check_matrix_shape(init, m.init, m.dim, "initial state");
    if (init.ok() && check_psd(init, m.init, m.tol, "initial state")) {
        double const dev = std::abs(m.init.trace().real() - 1.0);
        if (dev > m.tol) {
            init.add("initial state trace differs from 1", dev);
        }
    }
    r.merge(init);
    return r;
}

ValidationReport validate(SLHqMC const& m) {
    ValidationReport r = validate(m.chain);
    auto const sorted = canonical_props(m.ap);
    if (sorted != m.ap) {
        r.add("atomic propositions must be sorted and unique", 1.0);
    }
    if (m.ap.size() > 20) {
        r.add("too many atomic propositions for a 2^AP alphabet", static_cast<double>(m.ap.size()));
    }
    if (m.label.size() != m.chain.states.size()) {
        r.add("labeling is not total on states", 1.0);
    } else {
        LabelMask const all = m.ap.size() >= 32 ? ~LabelMask{0} : ((LabelMask{1} << m.ap.size()) - 1);
        for (std::size_t s = 0; s < m.label.size(); ++s) {
            if ((m.label[s] & ~all) != 0) {
                r.add("label of state '" + m.chain.states[s] + "' uses unknown propositions", 1.0);
            }
        }
    }
    return r;
}

ValidationReport validate(HQA const& a) {
    ValidationReport r;
    if (a.dim <= 0) {
        r.add("Hilbert dimension must be positive", 1.0);
        return r;
    }
    check_unique_names(r, a.states, "state");
    check_unique_names(r, a.alphabet, "symbol");
    if (a.trans.size() != a.alphabet.size()) {
        r.add("one transition matrix per symbol expected", 1.0);
    } else {
        for (std::size_t sym = 0; sym < a.alphabet.size(); ++sym) {
            check_transitions(r, a.states, a.trans[sym], a.dim, a.tol, "symbol '" + a.alphabet[sym] + "': ");
        }
    }
    check_distribution(r, a.states, a.init, a.dim, a.tol);
    std::visit(
        [&](auto const& acc) {
            using T = std::decay_t<decltype(acc)>;
            if constexpr (std::is_same_v<T, ClassicalAcceptance>) {
                check_accepting(r, acc.accepting, a.states.size());
            } else if constexpr (std::is_same_v<T, QuantumAcceptance>) {
                check_projector(r, acc.p_acc, a.dim, a.tol, "accepting projector");
            } else {
                check_accepting(r, acc.accepting, a.states.size());
                check_projector(r, acc.p_acc, a.dim, a.tol, "accepting projector");
            }
        },
        a.acceptance);
    return r;
}

ValidationReport validate(QA const& a) {
    ValidationReport r;
    if (a.dim <= 0) {
        r.add("Hilbert dimension must be positive", 1.0);
        return r;
    }
    check_unique_names(r, a.alphabet, "symbol");
    if (a.ops.size() != a.alphabet.size()) {
        r.add("one operation per symbol expected", 1.0);
    } else {
        for (std::size_t sym = 0; sym < a.alphabet.size(); ++sym) {
            check_operation(r, a.ops[sym], a.dim, a.tol, true, "operation for symbol '" + a.alphabet[sym] + "'");
        }
    }
    ValidationReport init;
    check_matrix_shape(init, a.init, a.dim, "initial state");
    if (init.ok() && check_psd(init, a.init, a.tol, "initial state")) {
        double const dev = std::abs(a.init.trace().real() - 1.0);
        if (dev > a.tol) {
            init.add("initial state trace differs from 1", dev);
        }
    }
    r.merge(init);
    check_projector(r, a.p_acc, a.dim, a.tol, "accepting projector");
    return r;
}

ValidationReport validate(BLM const& a) {
    ValidationReport r;
    auto const n = a.pi.size();
    if (n == 0) {
        r.add("bilinear machine needs at least one state", 1.0);
    }
    if (a.eta.size() != n) {
        r.add("eta length differs from pi length", static_cast<double>(std::abs(a.eta.size() - n)));
    }
    check_unique_names(r, a.alphabet, "symbol");
    if (a.mats.size() != a.alphabet.size()) {
        r.add("one matrix per symbol expected", 1.0);
    } else {
        for (std::size_t sym = 0; sym < a.mats.size(); ++sym) {
            check_matrix_shape(r, a.mats[sym], n, "matrix for symbol '" + a.alphabet[sym] + "'");
        }
    }
    if (!all_finite(a.pi) || !all_finite(a.eta)) {
        r.add("non-finite vector entries", INFINITY);
    }
    return r;
}

ValidationReport validate(Dfa const& a) {
    ValidationReport r;
    check_unique_names(r, a.states, "state");
    for (auto const& sym : a.alphabet) {
        if (canonical_props(sym) != sym) {
            r.add("symbol " + props_name(sym) + " is not a sorted proposition list", 1.0);
        }
    }
    auto sorted = a.alphabet;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        r.add("duplicate symbol in DFA alphabet", 1.0);
    }
    if (a.delta.size() != a.states.size() * a.alphabet.size()) {
        r.add("transition function is not total", 1.0);
    } else {
        for (auto q : a.delta) {
            if (q >= a.states.size()) {
                r.add("transition target out of range", 1.0);
                break;
            }
        }
    }
    if (a.initial >= a.states.size()) {
        r.add("initial state out of range", 1.0);
    }
    if (a.accepting.size() != a.states.size()) {
        r.add("accepting flags do not cover the state set", 1.0);
    }
    return r;
}

// ---- semantics --------------------------------------------------------------

namespace {

Distribution step_with(TransitionMatrix const& trans, Distribution const& mu) {
    auto const n = trans.num_states();
    if (mu.size() != n) {
        throw DimensionError("distribution has " + std::to_string(mu.size()) + " entries for " + std::to_string(n) +
                             " states");
    }
    Distribution out(n, Matrix::Zero(trans.dim(), trans.dim()));
    for (StateIndex t = 0; t < n; ++t) {
        if (mu[t].rows() != trans.dim() || mu[t].cols() != trans.dim()) {
            throw DimensionError("distribution entry has the wrong dimension");
        }
        for (StateIndex s = 0; s < n; ++s) {
            out[s] += hqmc::apply(trans.at(s, t), mu[t]);
        }
    }
    return out;
}

void check_word(std::span<SymbolIndex const> word, std::size_t alphabet_size) {
    for (auto a : word) {
        if (a >= alphabet_size) {
            throw LookupError("symbol index " + std::to_string(a) + " not in alphabet of size " +
                              std::to_string(alphabet_size));
        }
    }
}

}  // namespace

Distribution hqmc_step(HqMC const& m, Distribution const& mu) { return step_with(m.trans, mu); }

Distribution hqmc_run(HqMC const& m, std::size_t steps) {
    Distribution mu = m.init;
    for (std::size_t i = 0; i < steps; ++i) {
        mu = hqmc_step(m, mu);
    }
    return mu;
}

Matrix qmc_step(QMC const& m, Matrix const& rho) { return hqmc::apply(m.op, rho); }

DensityOperator qmc_step(QMC const& m, DensityOperator const& rho) {
    return DensityOperator(hqmc::apply(m.op, rho.matrix()), m.tol);
}

Matrix qmc_run(QMC const& m, std::size_t steps) {
    Matrix rho = m.init;
    for (std::size_t i = 0; i < steps; ++i) {
        rho = hqmc::apply(m.op, rho);
    }
    return rho;
}

Distribution hqa_distribution(HQA const& a, std::span<SymbolIndex const> word) {
    check_word(word, a.alphabet.size());
    Distribution mu = a.init;
    for (auto sym : word) {
        mu = step_with(a.trans[sym], mu);
    }
    return mu;
}

double hqa_accept_prob(HQA const& a, std::span<SymbolIndex const> word) {
    Distribution const mu = hqa_distribution(a, word);
    return std::visit(
        [&](auto const& acc) {
            using T = std::decay_t<decltype(acc)>;
            double p = 0.0;
            if constexpr (std::is_same_v<T, ClassicalAcceptance>) {
                for (auto s : acc.accepting) {
                    p += mu.at(s).trace().real();
                }
            } else if constexpr (std::is_same_v<T, QuantumAcceptance>) {
                for (auto const& m : mu) {
                    p += (acc.p_acc * m).trace().real();
                }
            } else {
                for (auto s : acc.accepting) {
                    p += (acc.p_acc * mu.at(s)).trace().real();
                }
            }
            return p;
        },
        a.acceptance);
}

double qa_accept_prob(QA const& a, std::span<SymbolIndex const> word) {
    check_word(word, a.alphabet.size());
    Matrix rho = a.init;
    for (auto sym : word) {
        rho = hqmc::apply(a.ops[sym], rho);
    }
    return (a.p_acc * rho).trace().real();
}

Complex blm_weight(BLM const& a, std::span<SymbolIndex const> word) {
    check_word(word, a.alphabet.size());
    Vector v = a.pi;
    for (auto sym : word) {
        v = a.mats[sym] * v;
    }
    return a.eta.transpose() * v;
}

double sl_trace_prob(SLHqMC const& m, std::span<LabelMask const> word) {
    if (word.empty()) {
        throw Error("trace probability is defined for nonempty words only");
    }
    auto const& chain = m.chain;
    auto const n = chain.num_states();
    double total = 0.0;
    // Depth-first over state sequences s_0 ... s_k with L(s_i) = word[i].
    auto visit = [&](auto&& self, std::size_t depth, StateIndex current, Matrix const& rho) -> void {
        if (depth + 1 == word.size()) {
            total += rho.trace().real();
            return;
        }
        for (StateIndex next = 0; next < n; ++next) {
            if (m.label[next] != word[depth + 1]) {
                continue;
            }
            self(self, depth + 1, next, hqmc::apply(chain.trans.at(next, current), rho));
        }
    };
    for (StateIndex s0 = 0; s0 < n; ++s0) {
        if (m.label[s0] == word[0]) {
            visit(visit, 0, s0, chain.init[s0]);
        }
    }
    return total;
}

}  // namespace hqmc
