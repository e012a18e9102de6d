#include "hqmc/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "hqmc/errors.hpp"
#include "hqmc/linalg.hpp"
#include "hqmc/transforms.hpp"

namespace hqmc {

namespace {

/// Below this fraction of |u| the first Gram-Schmidt pass has cancelled most of
/// the vector and is repeated once.
constexpr double kReorthogonalizeRatio = 1e-4;

/// Bookkeeping shared by the exact and brute-force procedures.
class WeightComparator {
   public:
    WeightComparator(BLM const& a1, BLM const& a2, double tol) : a1_(a1), a2_(a2), tol_(tol) {}

    /// True if the weights agree within tol.
    bool agree(Vector const& u1, Vector const& u2, EquivalenceVerdict& verdict) {
        Complex const w1 = a1_.eta.transpose() * u1;
        Complex const w2 = a2_.eta.transpose() * u2;
        double const diff = std::abs(w1 - w2);
        ++verdict.words_explored;
        verdict.max_discrepancy = std::max(verdict.max_discrepancy, diff);
        margin_ = std::min(margin_, std::abs(diff - tol_));
        verdict.margin = margin_;
        return diff <= tol_;
    }

   private:
    BLM const& a1_;
    BLM const& a2_;
    double tol_;
    double margin_ = std::numeric_limits<double>::infinity();
};

Vector stack(Vector const& v1, Vector const& v2) {
    Vector out(v1.size() + v2.size());
    out << v1, v2;
    return out;
}

void finish_margin(EquivalenceVerdict& v) {
    if (!std::isfinite(v.margin)) {
        v.margin = 0.0;
    }
}

}  // namespace

BLM reorder_alphabet(BLM const& a, std::vector<std::string> const& order) {
    if (order.size() != a.alphabet.size()) {
        throw LookupError("alphabets differ in size");
    }
    BLM out;
    out.alphabet = order;
    out.pi = a.pi;
    out.eta = a.eta;
    out.mats.reserve(order.size());
    for (auto const& name : order) {
        auto it = std::find(a.alphabet.begin(), a.alphabet.end(), name);
        if (it == a.alphabet.end()) {
            throw LookupError("symbol '" + name + "' missing from the other alphabet");
        }
        out.mats.push_back(a.mats[static_cast<std::size_t>(it - a.alphabet.begin())]);
    }
    return out;
}

EquivalenceVerdict blm_equivalent(BLM const& a1, BLM const& a2_in, double tol, WordMode mode) {
    require_valid(a1, "first bilinear machine");
    require_valid(a2_in, "second bilinear machine");
    BLM const a2 = reorder_alphabet(a2_in, a1.alphabet);

    auto const n1 = a1.num_states();
    auto const n = static_cast<std::size_t>(n1 + a2.num_states());
    EquivalenceVerdict verdict;
    WeightComparator cmp(a1, a2, tol);

    if (mode == WordMode::IncludeEpsilon && !cmp.agree(a1.pi, a2.pi, verdict)) {
        verdict.equivalent = false;
        verdict.witness = Word{};
        finish_margin(verdict);
        return verdict;
    }

    struct Pending {
        Vector u;
        Word word;
    };
    std::vector<Vector> basis;
    std::deque<Pending> queue;

    // Zero test for "u lies in span(basis)": absolute for small vectors,
    // relative once |u| exceeds 1.
    auto const try_extend = [&](Vector const& u, Word const& word) {
        double const unorm = u.norm();
        auto r = gram_schmidt_residual(u, basis);
        if (!basis.empty() && r.norm < kReorthogonalizeRatio * unorm) {
            r = gram_schmidt_residual(r.residual, basis);
        }
        if (r.norm <= tol * std::max(1.0, unorm)) {
            return;
        }
        if (basis.size() >= n) {
            throw std::logic_error("forward basis would exceed n1 + n2 vectors");
        }
        basis.push_back(r.residual / r.norm);
        queue.push_back({u, word});
    };

    try_extend(stack(a1.pi, a2.pi), Word{});

    while (!queue.empty()) {
        Pending const current = std::move(queue.front());
        queue.pop_front();
        Vector const v1 = current.u.head(n1);
        Vector const v2 = current.u.tail(a2.num_states());
        for (SymbolIndex sym = 0; sym < a1.alphabet.size(); ++sym) {
            Vector const u1 = a1.mats[sym] * v1;
            Vector const u2 = a2.mats[sym] * v2;
            Word word = current.word;
            word.push_back(sym);
            if (!cmp.agree(u1, u2, verdict)) {
                verdict.equivalent = false;
                verdict.witness = std::move(word);
                verdict.basis_size = basis.size();
                finish_margin(verdict);
                return verdict;
            }
            try_extend(stack(u1, u2), word);
        }
    }
    verdict.equivalent = true;
    verdict.basis_size = basis.size();
    finish_margin(verdict);
    return verdict;
}

EquivalenceVerdict blm_k_equivalent_bruteforce(BLM const& a1, BLM const& a2_in, std::size_t k, double tol,
                                               WordMode mode, std::size_t max_words) {
    require_valid(a1, "first bilinear machine");
    require_valid(a2_in, "second bilinear machine");
    BLM const a2 = reorder_alphabet(a2_in, a1.alphabet);
    auto const sigma = a1.alphabet.size();

    // Count words before doing any work.
    std::size_t total = 0;
    std::size_t layer = 1;
    for (std::size_t len = 0; len <= k; ++len) {
        if (len > 0) {
            if (sigma != 0 && layer > max_words / sigma) {
                throw CapExceededError("brute-force enumeration over words of length <= " + std::to_string(k) +
                                       " exceeds the cap of " + std::to_string(max_words) + " words");
            }
            layer *= sigma;
        }
        if (len == 0 && mode == WordMode::PositiveWordsOnly) {
            continue;
        }
        total += layer;
        if (total > max_words) {
            throw CapExceededError("brute-force enumeration exceeds the cap of " + std::to_string(max_words) +
                                   " words");
        }
    }

    EquivalenceVerdict verdict;
    WeightComparator cmp(a1, a2, tol);
    std::size_t const start = mode == WordMode::PositiveWordsOnly ? 1 : 0;
    for (std::size_t len = start; len <= k; ++len) {
        // Depth-first in lexicographic order, keeping prefix images on a stack.
        Word word;
        std::vector<Vector> stack1{a1.pi};
        std::vector<Vector> stack2{a2.pi};
        bool found = false;
        auto visit = [&](auto&& self) -> void {
            if (found) {
                return;
            }
            if (word.size() == len) {
                if (!cmp.agree(stack1.back(), stack2.back(), verdict)) {
                    found = true;
                    verdict.equivalent = false;
                    verdict.witness = word;
                }
                return;
            }
            for (SymbolIndex sym = 0; sym < sigma && !found; ++sym) {
                word.push_back(sym);
                stack1.push_back(a1.mats[sym] * stack1.back());
                stack2.push_back(a2.mats[sym] * stack2.back());
                self(self);
                stack1.pop_back();
                stack2.pop_back();
                word.pop_back();
            }
        };
        visit(visit);
        if (found) {
            finish_margin(verdict);
            return verdict;
        }
    }
    verdict.equivalent = true;
    finish_margin(verdict);
    return verdict;
}

std::size_t blm_equivalence_bound(BLM const& a1, BLM const& a2) {
    auto const n = static_cast<std::size_t>(a1.num_states() + a2.num_states());
    return n == 0 ? 0 : n - 1;
}

EquivalenceVerdict hqa_equivalent(HQA const& a1, HQA const& a2, double tol) {
    auto const b1 = qa_to_blm(hqa_to_qa(a1));
    auto const b2 = qa_to_blm(hqa_to_qa(a2));
    return blm_equivalent(b1, reorder_alphabet(b2, b1.alphabet), tol, WordMode::IncludeEpsilon);
}

std::size_t hqa_equivalence_bound(HQA const& a1, HQA const& a2) {
    auto const side = [](HQA const& a) {
        auto const nk = static_cast<std::size_t>(a.dim) * a.num_states();
        return nk * nk;
    };
    return side(a1) + side(a2) - 1;
}

EquivalenceVerdict sl_trace_equivalent(SLHqMC const& m1, SLHqMC const& m2, double tol) {
    if (canonical_props(m1.ap) != canonical_props(m2.ap)) {
        throw LookupError("labeled chains use different atomic propositions");
    }
    auto const b1 = qa_to_blm(hqa_to_qa(sl_to_chqa(m1)));
    auto const b2 = qa_to_blm(hqa_to_qa(sl_to_chqa(m2)));
    return blm_equivalent(b1, b2, tol, WordMode::PositiveWordsOnly);
}

}  // namespace hqmc
