#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>

namespace hqmc::testing {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Matrix random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = Complex(normal(rng), normal(rng));
        }
    }
    return m;
}

Matrix random_unitary(Rng& rng, Eigen::Index d) {
    Eigen::HouseholderQR<Matrix> qr(random_gaussian(rng, d, d));
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    Matrix const r = qr.matrixQR();
    // Fix column phases so the distribution is Haar.
    for (Eigen::Index j = 0; j < d; ++j) {
        double const a = std::abs(r(j, j));
        if (a > 0) {
            q.col(j) *= r(j, j) / a;
        }
    }
    return q;
}

Matrix random_density(Rng& rng, Eigen::Index d, double trace, Eigen::Index rank) {
    if (rank < 0) {
        rank = uniform_int(rng, 1, static_cast<int>(d));
    }
    Matrix const g = random_gaussian(rng, d, rank);
    Matrix rho = g * g.adjoint();
    return rho * (trace / rho.trace().real());
}

Matrix random_projector(Rng& rng, Eigen::Index d, Eigen::Index rank) {
    if (rank < 0) {
        rank = uniform_int(rng, 0, static_cast<int>(d));
    }
    Matrix const u = random_unitary(rng, d);
    Matrix const v = u.leftCols(rank);
    return v * v.adjoint();
}

std::vector<Matrix> random_isometry_blocks(Rng& rng, Eigen::Index d, int k) {
    Matrix const v = random_unitary(rng, d * k).leftCols(d);
    std::vector<Matrix> out;
    for (int i = 0; i < k; ++i) {
        out.push_back(v.block(i * d, 0, d, d));
    }
    return out;
}

QuantumOperation random_channel(Rng& rng, Eigen::Index d, int kraus_count) {
    return QuantumOperation(random_isometry_blocks(rng, d, kraus_count));
}

QuantumOperation random_subchannel(Rng& rng, Eigen::Index d, int kraus_count) {
    auto blocks = random_isometry_blocks(rng, d, kraus_count + 1);
    blocks.pop_back();
    return QuantumOperation(std::move(blocks));
}

TransitionMatrix random_transitions(Rng& rng, std::size_t n, Eigen::Index d, double edge_prob) {
    TransitionMatrix trans(n, d);
    for (StateIndex s = 0; s < n; ++s) {
        std::vector<StateIndex> succ;
        for (StateIndex t = 0; t < n; ++t) {
            if (coin(rng, edge_prob)) {
                succ.push_back(t);
            }
        }
        if (succ.empty()) {
            succ.push_back(static_cast<StateIndex>(uniform_int(rng, 0, static_cast<int>(n) - 1)));
        }
        std::vector<int> counts;
        int total = 0;
        for (std::size_t i = 0; i < succ.size(); ++i) {
            counts.push_back(uniform_int(rng, 1, 2));
            total += counts.back();
        }
        auto const blocks = random_isometry_blocks(rng, d, total);
        std::size_t next = 0;
        for (std::size_t i = 0; i < succ.size(); ++i) {
            std::vector<Matrix> kraus(blocks.begin() + static_cast<std::ptrdiff_t>(next),
                                      blocks.begin() + static_cast<std::ptrdiff_t>(next + counts[i]));
            next += static_cast<std::size_t>(counts[i]);
            trans.set(succ[i], s, QuantumOperation(std::move(kraus)));
        }
    }
    return trans;
}

Distribution random_distribution(Rng& rng, std::size_t n, Eigen::Index d) {
    std::vector<double> weights(n);
    for (auto& w : weights) {
        w = coin(rng, 0.3) ? 0.0 : uniform_real(rng, 0.1, 1.0);
    }
    if (std::accumulate(weights.begin(), weights.end(), 0.0) == 0.0) {
        weights[0] = 1.0;
    }
    double const total = std::accumulate(weights.begin(), weights.end(), 0.0);
    Distribution mu;
    for (auto w : weights) {
        mu.push_back(w == 0.0 ? Matrix(Matrix::Zero(d, d)) : random_density(rng, d, w / total));
    }
    return mu;
}

namespace {
std::vector<std::string> names(char prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(std::string(1, prefix) + std::to_string(i));
    }
    return out;
}
}  // namespace

HqMC random_hqmc(Rng& rng, std::size_t n, Eigen::Index d) {
    HqMC m;
    m.dim = d;
    m.states = names('s', n);
    m.trans = random_transitions(rng, n, d);
    m.init = random_distribution(rng, n, d);
    return m;
}

SLHqMC random_slhqmc(Rng& rng, std::size_t n, Eigen::Index d, std::size_t num_ap) {
    SLHqMC m;
    m.chain = random_hqmc(rng, n, d);
    for (std::size_t i = 0; i < num_ap; ++i) {
        m.ap.push_back("p" + std::to_string(i));
    }
    for (std::size_t s = 0; s < n; ++s) {
        m.label.push_back(static_cast<LabelMask>(uniform_int(rng, 0, (1 << num_ap) - 1)));
    }
    return m;
}

HQA random_hqa(Rng& rng, std::size_t n, Eigen::Index d, std::size_t sigma, Fashion fashion) {
    HQA a;
    a.dim = d;
    a.states = names('h', n);
    for (std::size_t i = 0; i < sigma; ++i) {
        a.alphabet.push_back(std::string(1, static_cast<char>('a' + i)));
        a.trans.push_back(random_transitions(rng, n, d));
    }
    a.init = random_distribution(rng, n, d);
    std::vector<StateIndex> accepting;
    for (StateIndex s = 0; s < n; ++s) {
        if (coin(rng)) {
            accepting.push_back(s);
        }
    }
    switch (fashion) {
        case Fashion::Classical:
            a.acceptance = ClassicalAcceptance{accepting};
            break;
        case Fashion::Quantum:
            a.acceptance = QuantumAcceptance{random_projector(rng, d)};
            break;
        case Fashion::Mixed:
            a.acceptance = MixedAcceptance{accepting, random_projector(rng, d)};
            break;
    }
    return a;
}

QA random_qa(Rng& rng, Eigen::Index d, std::size_t sigma) {
    QA a;
    a.dim = d;
    for (std::size_t i = 0; i < sigma; ++i) {
        a.alphabet.push_back(std::string(1, static_cast<char>('a' + i)));
        a.ops.push_back(random_channel(rng, d, uniform_int(rng, 1, 3)));
    }
    a.init = random_density(rng, d);
    a.p_acc = random_projector(rng, d);
    return a;
}

BLM random_blm(Rng& rng, Eigen::Index n, std::size_t sigma) {
    BLM a;
    bool const complex_entries = coin(rng);
    auto const draw = [&](Eigen::Index r, Eigen::Index c) {
        Matrix m = random_gaussian(rng, r, c);
        if (!complex_entries) {
            m = m.real().cast<Complex>();
        }
        return m;
    };
    for (std::size_t i = 0; i < sigma; ++i) {
        a.alphabet.push_back(std::string(1, static_cast<char>('a' + i)));
        a.mats.push_back(draw(n, n) / std::sqrt(2.0 * static_cast<double>(n)));
    }
    a.pi = draw(n, 1).col(0);
    a.eta = draw(n, 1).col(0);
    return a;
}

BLM similar_blm(Rng& rng, BLM const& a) {
    auto const n = a.num_states();
    // Unitary times a well-conditioned diagonal keeps the weights accurate.
    Matrix t = random_unitary(rng, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        t.col(j) *= uniform_real(rng, 0.5, 2.0);
    }
    Matrix const tinv = t.inverse();
    BLM out;
    out.alphabet = a.alphabet;
    for (auto const& m : a.mats) {
        out.mats.push_back(t * m * tinv);
    }
    out.pi = t * a.pi;
    out.eta = (a.eta.transpose() * tinv).transpose();
    return out;
}

BLM permuted_blm(Rng& rng, BLM const& a) {
    auto const n = a.num_states();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix p = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        p(perm[static_cast<std::size_t>(i)], i) = 1.0;
    }
    BLM out;
    out.alphabet = a.alphabet;
    for (auto const& m : a.mats) {
        out.mats.push_back(p * m * p.transpose());
    }
    out.pi = p * a.pi;
    out.eta = p * a.eta;
    return out;
}

BLM padded_blm(Rng& rng, BLM const& a, Eigen::Index extra) {
    auto const n = a.num_states();
    BLM const junk = random_blm(rng, extra, a.alphabet.size());
    BLM out;
    out.alphabet = a.alphabet;
    for (std::size_t i = 0; i < a.mats.size(); ++i) {
        Matrix m = Matrix::Zero(n + extra, n + extra);
        m.topLeftCorner(n, n) = a.mats[i];
        m.bottomRightCorner(extra, extra) = junk.mats[i];
        out.mats.push_back(m);
    }
    // The extra block is reachable but invisible: its eta entries are zero.
    out.pi = Vector::Zero(n + extra);
    out.pi.head(n) = a.pi;
    out.pi.tail(extra) = junk.pi;
    out.eta = Vector::Zero(n + extra);
    out.eta.head(n) = a.eta;
    return out;
}

Dfa random_dfa(Rng& rng, std::vector<std::string> const& ap, std::size_t num_states) {
    Dfa a;
    for (std::size_t q = 0; q < num_states; ++q) {
        a.states.push_back("q" + std::to_string(q));
    }
    auto const sigma = std::size_t{1} << ap.size();
    for (LabelMask k = 0; k < sigma; ++k) {
        a.alphabet.push_back(label_props(ap, k));
    }
    for (std::size_t i = 0; i < num_states * sigma; ++i) {
        a.delta.push_back(static_cast<StateIndex>(uniform_int(rng, 0, static_cast<int>(num_states) - 1)));
    }
    a.initial = 0;
    a.accepting.assign(num_states, false);
    for (std::size_t q = 1; q < num_states; ++q) {
        a.accepting[q] = coin(rng);
    }
    return a;
}

std::vector<Word> all_words(std::size_t sigma, std::size_t length) {
    std::vector<Word> out;
    Word w(length, 0);
    while (true) {
        out.push_back(w);
        std::size_t i = length;
        while (i > 0 && w[i - 1] + 1 == sigma) {
            w[i - 1] = 0;
            --i;
        }
        if (i == 0) {
            return out;
        }
        ++w[i - 1];
    }
}


TruncatedReach truncated_reach(HqMC const& m, std::vector<bool> const& target, StateIndex s, Matrix const& rho,
                               std::size_t depth) {
    auto const n = m.num_states();
    TruncatedReach out;
    if (target[s]) {
        out.reached = rho.trace().real();
        return out;
    }
    Distribution mu(n, Matrix::Zero(m.dim, m.dim));
    mu[s] = rho;
    for (std::size_t step = 0; step < depth; ++step) {
        Distribution next(n, Matrix::Zero(m.dim, m.dim));
        for (StateIndex from = 0; from < n; ++from) {
            if (mu[from].isZero(0.0)) {
                continue;
            }
            for (StateIndex to = 0; to < n; ++to) {
                next[to] += hqmc::apply(m.trans.at(to, from), mu[from]);
            }
        }
        for (StateIndex t = 0; t < n; ++t) {
            if (target[t]) {
                out.reached += next[t].trace().real();
                next[t].setZero();
            }
        }
        mu = std::move(next);
    }
    for (auto const& x : mu) {
        out.remaining += x.trace().real();
    }
    return out;
}

}  // namespace hqmc::testing
