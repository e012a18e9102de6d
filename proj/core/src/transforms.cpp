#include "hqmc/transforms.hpp"

#include <algorithm>

#include "hqmc/errors.hpp"

namespace hqmc {

namespace {

/// Drops Kraus matrices that are exactly zero. The represented map is
/// unchanged; only the list shrinks.
QuantumOperation drop_exact_zeros(QuantumOperation const& op) {
    std::vector<Matrix> kept;
    for (auto const& k : op.kraus()) {
        if (!k.isZero(0.0)) {
            kept.push_back(k);
        }
    }
    if (kept.empty()) {
        return QuantumOperation::zero(op.dim());
    }
    return QuantumOperation(std::move(kept));
}

/// (A B)(t, s) = sum_u A(t, u) o B(u, s)
TransitionMatrix multiply(TransitionMatrix const& a, TransitionMatrix const& b) {
    auto const n = a.num_states();
    TransitionMatrix out(n, a.dim());
    for (StateIndex t = 0; t < n; ++t) {
        for (StateIndex s = 0; s < n; ++s) {
            std::vector<Matrix> kraus;
            for (StateIndex u = 0; u < n; ++u) {
                auto const term = drop_exact_zeros(op_compose(a.at(t, u), b.at(u, s)));
                for (auto const& k : term.kraus()) {
                    if (!k.isZero(0.0)) {
                        kraus.push_back(k);
                    }
                }
            }
            if (!kraus.empty()) {
                out.set(t, s, QuantumOperation(std::move(kraus)));
            }
        }
    }
    return out;
}

Matrix classical_projector(std::size_t num_states, std::vector<StateIndex> const& accepting, Matrix const& quantum) {
    auto const n = static_cast<Eigen::Index>(num_states);
    Matrix selector = Matrix::Zero(n, n);
    for (auto s : accepting) {
        selector(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = 1.0;
    }
    return kron(selector, quantum);
}

std::string fresh_name(std::vector<std::string> const& taken, std::string const& base) {
    auto const used = [&](std::string const& n) { return std::find(taken.begin(), taken.end(), n) != taken.end(); };
    if (!used(base)) {
        return base;
    }
    for (std::size_t i = 1;; ++i) {
        auto candidate = base + "_" + std::to_string(i);
        if (!used(candidate)) {
            return candidate;
        }
    }
}

}  // namespace

Matrix embed_distribution(Distribution const& mu) {
    if (mu.empty()) {
        throw DimensionError("cannot embed an empty distribution");
    }
    auto const n = static_cast<Eigen::Index>(mu.size());
    auto const d = mu.front().rows();
    Matrix out = Matrix::Zero(n * d, n * d);
    for (Eigen::Index s = 0; s < n; ++s) {
        auto const& block = mu[static_cast<std::size_t>(s)];
        if (block.rows() != d || block.cols() != d) {
            throw DimensionError("distribution entries differ in dimension");
        }
        out.block(s * d, s * d, d, d) = block;
    }
    return out;
}

QuantumOperation embed_transitions(TransitionMatrix const& trans) {
    auto const n = static_cast<Eigen::Index>(trans.num_states());
    std::vector<Matrix> kraus;
    for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index t = 0; t < n; ++t) {
            Matrix const jump = ket_bra(n, t, s);
            for (auto const& k : trans.at(static_cast<StateIndex>(t), static_cast<StateIndex>(s)).kraus()) {
                if (!k.isZero(0.0)) {
                    kraus.push_back(kron(jump, k));
                }
            }
        }
    }
    if (kraus.empty()) {
        return QuantumOperation::zero(n * trans.dim());
    }
    return QuantumOperation(std::move(kraus));
}

QMC hqmc_to_qmc(HqMC const& m) {
    require_valid(m, "hqMC");
    QMC out;
    out.dim = static_cast<Eigen::Index>(m.num_states()) * m.dim;
    out.op = embed_transitions(m.trans);
    out.init = embed_distribution(m.init);
    out.tol = m.tol;
    return out;
}

QA hqa_to_qa(HQA const& a) {
    require_valid(a, "HQA");
    auto const n = a.num_states();
    QA out;
    out.dim = static_cast<Eigen::Index>(n) * a.dim;
    out.alphabet = a.alphabet;
    out.init = embed_distribution(a.init);
    out.ops.reserve(a.trans.size());
    for (auto const& t : a.trans) {
        out.ops.push_back(embed_transitions(t));
    }
    out.p_acc = std::visit(
        [&](auto const& acc) -> Matrix {
            using T = std::decay_t<decltype(acc)>;
            if constexpr (std::is_same_v<T, ClassicalAcceptance>) {
                return classical_projector(n, acc.accepting, Matrix::Identity(a.dim, a.dim));
            } else if constexpr (std::is_same_v<T, QuantumAcceptance>) {
                auto const k = static_cast<Eigen::Index>(n);
                return kron(Matrix::Identity(k, k), acc.p_acc);
            } else {
                return classical_projector(n, acc.accepting, acc.p_acc);
            }
        },
        a.acceptance);
    out.tol = a.tol;
    return out;
}

BLM qa_to_blm(QA const& a) {
    require_valid(a, "QA");
    BLM out;
    out.alphabet = a.alphabet;
    out.mats.reserve(a.ops.size());
    for (auto const& op : a.ops) {
        out.mats.push_back(superop_matrix(op));
    }
    out.pi = vec(a.init);
    out.eta = vec(a.p_acc.transpose());
    return out;
}

HQA sl_to_chqa(SLHqMC const& m) {
    require_valid(m, "SL-hqMC");
    auto const& chain = m.chain;
    auto const n = chain.num_states();
    auto const d = chain.dim;
    StateIndex const sink = n;

    HQA out;
    out.dim = d;
    out.tol = chain.tol;
    out.states = chain.states;
    out.states.push_back(fresh_name(chain.states, kSinkStateName));
    out.init = chain.init;
    out.init.push_back(Matrix::Zero(d, d));

    // Block-diagonal extension of M with an identity self-loop at the sink.
    TransitionMatrix extended(n + 1, d);
    for (StateIndex t = 0; t < n; ++t) {
        for (StateIndex s = 0; s < n; ++s) {
            extended.set(t, s, chain.trans.at(t, s));
        }
    }
    extended.set(sink, sink, QuantumOperation::identity(d));

    auto const alphabet_size = m.alphabet_size();
    out.alphabet.reserve(alphabet_size);
    out.trans.reserve(alphabet_size);
    for (std::size_t sym = 0; sym < alphabet_size; ++sym) {
        out.alphabet.push_back(props_name(label_props(m.ap, static_cast<LabelMask>(sym))));
        // Route each state to itself when it carries this label, to the sink otherwise.
        TransitionMatrix filter(n + 1, d);
        for (StateIndex s = 0; s < n; ++s) {
            if (m.label[s] == sym) {
                filter.set(s, s, QuantumOperation::identity(d));
            } else {
                filter.set(sink, s, QuantumOperation::identity(d));
            }
        }
        filter.set(sink, sink, QuantumOperation::identity(d));
        out.trans.push_back(multiply(extended, filter));
    }

    ClassicalAcceptance acc;
    for (StateIndex s = 0; s < n; ++s) {
        acc.accepting.push_back(s);
    }
    out.acceptance = std::move(acc);
    return out;
}

std::vector<SymbolIndex> dfa_symbol_map(SLHqMC const& m, Dfa const& a) {
    auto const size = m.alphabet_size();
    if (a.alphabet.size() != size) {
        throw LookupError("DFA alphabet has " + std::to_string(a.alphabet.size()) + " symbols, 2^AP has " +
                          std::to_string(size));
    }
    std::vector<SymbolIndex> map(size);
    for (std::size_t k = 0; k < size; ++k) {
        map[k] = a.symbol_index(label_props(m.ap, static_cast<LabelMask>(k)));
    }
    return map;
}

SLHqMC product(SLHqMC const& m, Dfa const& a) {
    require_valid(m, "SL-hqMC");
    require_valid(a, "DFA");
    auto const symbols = dfa_symbol_map(m, a);
    auto const& chain = m.chain;
    auto const ns = chain.num_states();
    auto const nq = a.states.size();
    auto const d = chain.dim;
    auto const step = [&](StateIndex q, StateIndex s) { return a.next(q, symbols[m.label[s]]); };

    SLHqMC out;
    out.ap = {"accept"};
    out.chain.dim = d;
    out.chain.tol = chain.tol;
    out.chain.states.reserve(ns * nq);
    out.chain.init.reserve(ns * nq);
    out.label.reserve(ns * nq);
    for (StateIndex s = 0; s < ns; ++s) {
        StateIndex const q_start = step(a.initial, s);
        for (StateIndex q = 0; q < nq; ++q) {
            out.chain.states.push_back("(" + chain.states[s] + "," + a.states[q] + ")");
            out.chain.init.push_back(q == q_start ? chain.init[s] : Matrix::Zero(d, d));
            out.label.push_back(a.accepting[q] ? LabelMask{1} : LabelMask{0});
        }
    }
    out.chain.trans = TransitionMatrix(ns * nq, d);
    for (StateIndex s = 0; s < ns; ++s) {
        for (StateIndex q = 0; q < nq; ++q) {
            for (StateIndex s2 = 0; s2 < ns; ++s2) {
                auto const& op = chain.trans.at(s2, s);
                if (op.is_zero(0.0)) {
                    continue;
                }
                out.chain.trans.set(product_index(s2, step(q, s2), nq), product_index(s, q, nq), op);
            }
        }
    }
    return out;
}

}  // namespace hqmc
