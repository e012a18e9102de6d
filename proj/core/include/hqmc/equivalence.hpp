#pragma once

#include <cstddef>
#include <optional>

#include "hqmc/models.hpp"

namespace hqmc {

enum class WordMode {
    /// Compare weights on every word, including the empty one.
    IncludeEpsilon,
    /// Compare weights on nonempty words only (trace equivalence).
    PositiveWordsOnly,
};

struct EquivalenceVerdict {
    bool equivalent = true;
    /// Present iff not equivalent. Indices into the first automaton's alphabet.
    std::optional<Word> witness;
    /// Orthonormal basis size reached (the forward-reachable span dimension).
    std::size_t basis_size = 0;
    /// Weight comparisons performed.
    std::size_t words_explored = 0;
    /// Distance of the closest weight comparison to the decision threshold,
    /// min | |w1 - w2| - tol |. Small values flag near-threshold verdicts.
    double margin = 0.0;
    /// Largest weight discrepancy observed.
    double max_discrepancy = 0.0;
};

/// Forward-basis equivalence check for bilinear machines over the same
/// alphabet (symbols matched by name). Runs a FIFO exploration of the span of
/// the stacked vectors (M1_w pi1; M2_w pi2), extending an orthonormal basis with
/// modified Gram-Schmidt, and compares eta1 u1 against eta2 u2 for every
/// explored vector. Deterministic: FIFO queue, symbols in declared order.
EquivalenceVerdict blm_equivalent(BLM const& a1, BLM const& a2, double tol = default_tolerance(),
                                  WordMode mode = WordMode::IncludeEpsilon);

/// Exhaustive comparison over all words of length <= k (nonempty ones in
/// PositiveWordsOnly mode), in length-then-lexicographic order. Throws
/// CapExceededError when more than max_words words would be compared.
EquivalenceVerdict blm_k_equivalent_bruteforce(BLM const& a1, BLM const& a2, std::size_t k,
                                               double tol = default_tolerance(),
                                               WordMode mode = WordMode::IncludeEpsilon,
                                               std::size_t max_words = std::size_t{1} << 22);

/// Word-length bound n1 + n2 - 1 beyond which no disagreement can first appear.
std::size_t blm_equivalence_bound(BLM const& a1, BLM const& a2);

/// HQA language equivalence via HQA -> QA -> BLM and the forward-basis check.
EquivalenceVerdict hqa_equivalent(HQA const& a1, HQA const& a2, double tol = default_tolerance());

/// (n1 k1)^2 + (n2 k2)^2 - 1 with n = Hilbert dimension and k = state count.
std::size_t hqa_equivalence_bound(HQA const& a1, HQA const& a2);

/// Trace equivalence of labeled chains over the same propositions. Witness
/// symbols are label masks.
EquivalenceVerdict sl_trace_equivalent(SLHqMC const& m1, SLHqMC const& m2, double tol = default_tolerance());

/// Reorders the alphabet of `a` (and its matrices) to follow `order`. Throws
/// LookupError unless both name the same symbol set.
BLM reorder_alphabet(BLM const& a, std::vector<std::string> const& order);

}  // namespace hqmc
