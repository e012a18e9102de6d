#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hqmc/errors.hpp"
#include "hqmc/quantum_ops.hpp"

namespace hqmc {

using StateIndex = std::size_t;
using SymbolIndex = std::size_t;

/// A word over an automaton alphabet, as indices into the declared symbol list.
/// Symbols are read left to right.
using Word = std::vector<SymbolIndex>;

/// One d x d positive operator per classical state, in declared state order.
using Distribution = std::vector<Matrix>;

/// A subset of atomic propositions encoded as a bitmask over the (sorted)
/// proposition list. Bit i set means ap[i] holds. The symbol of 2^AP with mask
/// m has alphabet index m.
using LabelMask = std::uint32_t;

/// A subset of atomic propositions, sorted and free of duplicates.
using PropSet = std::vector<std::string>;

/// |S| x |S| matrix of quantum operations. Entry (t, s) is the operation applied
/// when moving from s to t, so column s lists the branches leaving s.
class TransitionMatrix {
   public:
    TransitionMatrix() = default;
    /// All entries start as the zero operation.
    TransitionMatrix(std::size_t num_states, Eigen::Index dim);

    std::size_t num_states() const noexcept { return n_; }
    Eigen::Index dim() const noexcept { return dim_; }

    QuantumOperation const& at(StateIndex to, StateIndex from) const;
    void set(StateIndex to, StateIndex from, QuantumOperation op);

    /// sum_t M(t, s)
    QuantumOperation column_sum(StateIndex from) const;

    /// Graph edge from -> to: M(to, from) is not the zero operation.
    bool has_edge(StateIndex to, StateIndex from, double tol) const;

   private:
    std::size_t n_ = 0;
    Eigen::Index dim_ = 0;
    std::vector<QuantumOperation> entries_;
};

struct Violation {
    std::string what;
    double magnitude = 0.0;
};

/// Every violated invariant with its magnitude, so hand-authored models can be
/// debugged.
struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    double worst() const noexcept;
    std::string summary() const;
    void add(std::string what, double magnitude) { violations.push_back({std::move(what), magnitude}); }
    void merge(ValidationReport const& other, std::string_view prefix = {});
};

struct HqMC {
    Eigen::Index dim = 0;
    std::vector<std::string> states;
    TransitionMatrix trans;
    Distribution init;
    double tol = default_tolerance();

    std::size_t num_states() const noexcept { return states.size(); }
    StateIndex state_index(std::string_view name) const;
};

struct QMC {
    Eigen::Index dim = 0;
    QuantumOperation op = QuantumOperation::zero(1);
    Matrix init;
    double tol = default_tolerance();
};

struct SLHqMC {
    HqMC chain;
    /// Sorted, duplicate free.
    std::vector<std::string> ap;
    /// Label of each state, indexed like chain.states.
    std::vector<LabelMask> label;

    std::size_t alphabet_size() const noexcept { return std::size_t{1} << ap.size(); }
};

struct ClassicalAcceptance {
    std::vector<StateIndex> accepting;
};
struct QuantumAcceptance {
    Matrix p_acc;
};
struct MixedAcceptance {
    std::vector<StateIndex> accepting;
    Matrix p_acc;
};
using Acceptance = std::variant<ClassicalAcceptance, QuantumAcceptance, MixedAcceptance>;

/// Hybrid quantum automaton: one hqMC-style transition matrix per input symbol.
struct HQA {
    Eigen::Index dim = 0;
    std::vector<std::string> states;
    std::vector<std::string> alphabet;
    Distribution init;
    /// Indexed like alphabet.
    std::vector<TransitionMatrix> trans;
    Acceptance acceptance = ClassicalAcceptance{};
    double tol = default_tolerance();

    std::size_t num_states() const noexcept { return states.size(); }
    StateIndex state_index(std::string_view name) const;
};

struct QA {
    Eigen::Index dim = 0;
    std::vector<std::string> alphabet;
    Matrix init;
    /// Indexed like alphabet.
    std::vector<QuantumOperation> ops;
    Matrix p_acc;
    double tol = default_tolerance();
};

/// Bilinear machine: weight(w) = eta^T M_{w_k} ... M_{w_1} pi.
struct BLM {
    std::vector<std::string> alphabet;
    std::vector<Matrix> mats;
    Vector pi;
    /// Row vector, stored as a column; applied without conjugation.
    Vector eta;

    Eigen::Index num_states() const noexcept { return pi.size(); }
};

/// Total DFA over 2^AP; symbols are proposition sets.
struct Dfa {
    std::vector<std::string> states;
    std::vector<PropSet> alphabet;
    /// delta[q * alphabet.size() + a]
    std::vector<StateIndex> delta;
    StateIndex initial = 0;
    std::vector<bool> accepting;

    StateIndex next(StateIndex q, SymbolIndex a) const { return delta.at(q * alphabet.size() + a); }
    SymbolIndex symbol_index(PropSet const& symbol) const;
};

// ---- labels and words -------------------------------------------------------

/// Sorts and deduplicates.
PropSet canonical_props(PropSet props);
LabelMask label_mask(std::span<std::string const> ap, PropSet const& props);
PropSet label_props(std::span<std::string const> ap, LabelMask mask);
/// "{a,b}" for the set {a, b}; "{}" for the empty set.
std::string props_name(PropSet const& props);
/// Inverse of props_name. Throws ParseError on malformed text.
PropSet parse_props_name(std::string_view text);

/// Maps symbol names to indices; throws LookupError on an unknown name.
Word parse_word(std::span<std::string const> alphabet, std::span<std::string const> names);
std::vector<std::string> word_names(std::span<std::string const> alphabet, std::span<SymbolIndex const> word);

// ---- validation -------------------------------------------------------------

ValidationReport validate(HqMC const& m);
ValidationReport validate(QMC const& m);
ValidationReport validate(SLHqMC const& m);
ValidationReport validate(HQA const& a);
ValidationReport validate(QA const& a);
ValidationReport validate(BLM const& a);
ValidationReport validate(Dfa const& a);

/// Throws ModelError carrying the report summary unless the model is valid.
template<typename Model>
void require_valid(Model const& m, std::string_view what) {
    auto const report = validate(m);
    if (!report.ok()) {
        throw ModelError(std::string(what) + " is invalid: " + report.summary());
    }
}

// ---- semantics --------------------------------------------------------------

/// out(s) = sum_t M(s, t)(mu(t))
Distribution hqmc_step(HqMC const& m, Distribution const& mu);
/// mu_n = M^n mu_0
Distribution hqmc_run(HqMC const& m, std::size_t steps);

Matrix qmc_step(QMC const& m, Matrix const& rho);
DensityOperator qmc_step(QMC const& m, DensityOperator const& rho);
/// rho_n = E^n(rho_0)
Matrix qmc_run(QMC const& m, std::size_t steps);

/// mu_w = M_w mu_0, the empty word leaving mu_0 untouched.
Distribution hqa_distribution(HQA const& a, std::span<SymbolIndex const> word);
double hqa_accept_prob(HQA const& a, std::span<SymbolIndex const> word);

double qa_accept_prob(QA const& a, std::span<SymbolIndex const> word);

Complex blm_weight(BLM const& a, std::span<SymbolIndex const> word);

/// Probability of observing the label word, by enumerating every state sequence
/// consistent with it. Exponential in |word|; this is the reference semantics
/// used to cross-check the automaton construction. Throws Error on an empty word.
double sl_trace_prob(SLHqMC const& m, std::span<LabelMask const> word);

}  // namespace hqmc
