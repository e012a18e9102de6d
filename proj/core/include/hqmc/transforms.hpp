#pragma once

#include <string>

#include "hqmc/models.hpp"

namespace hqmc {

/// Name given to the extra sink state added by sl_to_chqa, before collision
/// suffixing.
inline constexpr char const* kSinkStateName = "__sink";

/// sum_s |s><s| (x) mu(s). The classical index is the major (slow) index of
/// the tensor space, the quantum index the minor one.
Matrix embed_distribution(Distribution const& mu);

/// Kraus operators {|t><s| (x) M_ts^k} of the joint classical-quantum
/// operation simulating one step of the transition matrix.
QuantumOperation embed_transitions(TransitionMatrix const& trans);

/// Simulates an hqMC by a qMC on H_S (x) H with rho_n = embed(mu_n).
QMC hqmc_to_qmc(HqMC const& m);

/// QA with the same acceptance function. The accepting projector depends on
/// the acceptance fashion: sum_{s in F} |s><s| (x) I, I (x) P_acc, or
/// sum_{s in F} |s><s| (x) P_acc.
QA hqa_to_qa(HQA const& a);

/// Vectorized form: n = d^2, M_sigma = superop_matrix(E_sigma), pi = vec(rho_0),
/// eta = vec(P_acc^T), so that eta^T vec(X) = Tr(P_acc X).
BLM qa_to_blm(QA const& a);

/// Classical-fashion HQA over 2^AP whose acceptance probability on every
/// nonempty word equals the trace probability of the labeled chain. Adds one
/// sink state; symbol k of the output alphabet is the label with mask k.
HQA sl_to_chqa(SLHqMC const& m);

/// Product of a labeled chain with a total DFA over 2^AP. States are pairs
/// (s, q) in s-major order named "(s,q)"; the single proposition "accept"
/// holds where q is accepting.
SLHqMC product(SLHqMC const& m, Dfa const& a);

/// Index of the pair (s, q) in the product state list.
inline StateIndex product_index(StateIndex s, StateIndex q, std::size_t dfa_states) { return s * dfa_states + q; }

/// For each label mask k of m, the DFA symbol index of that label set. Throws
/// LookupError unless the DFA alphabet is exactly 2^AP.
std::vector<SymbolIndex> dfa_symbol_map(SLHqMC const& m, Dfa const& a);

}  // namespace hqmc
