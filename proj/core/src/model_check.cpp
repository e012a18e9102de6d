#include "hqmc/model_check.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "hqmc/errors.hpp"
#include "hqmc/transforms.hpp"

namespace hqmc {

namespace {
/// Above this many scalar unknowns per column the direct solve is skipped.
constexpr Eigen::Index kMaxDirectUnknowns = 4096;
}  // namespace

// ---- PathMeasure ------------------------------------------------------------

PathMeasure PathMeasure::identity(Eigen::Index dim) {
    return {dim, Matrix::Identity(dim * dim, dim * dim)};
}

PathMeasure PathMeasure::zero(Eigen::Index dim) { return {dim, Matrix::Zero(dim * dim, dim * dim)}; }

Matrix PathMeasure::apply(Matrix const& rho) const {
    if (rho.rows() != dim || rho.cols() != dim) {
        throw DimensionError("path measure of dimension " + std::to_string(dim) + " applied to a " +
                             std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) + " matrix");
    }
    return unvec(rep * vec(rho));
}

double PathMeasure::trace_on(Matrix const& rho) const { return apply(rho).trace().real(); }

Matrix PathMeasure::completeness_sum() const {
    // Tr(Q(rho)) = vec(I)^T rep vec(rho) = sum_ij c(i d + j) rho(i, j) = Tr(C rho), C(j, i) = c(i d + j).
    Vector const c = (vec(Matrix::Identity(dim, dim)).transpose() * rep).transpose();
    return unvec(c).transpose();
}

// ---- paths ------------------------------------------------------------------

PathMeasure path_superop(HqMC const& m, std::span<StateIndex const> path) {
    if (path.empty()) {
        throw Error("path must contain at least one state");
    }
    for (auto s : path) {
        if (s >= m.num_states()) {
            throw LookupError("path state index " + std::to_string(s) + " out of range");
        }
    }
    PathMeasure out = PathMeasure::identity(m.dim);
    for (std::size_t i = 1; i < path.size(); ++i) {
        out.rep = superop_matrix(m.trans.at(path[i], path[i - 1])) * out.rep;
    }
    return out;
}

double cylinder_measure(HqMC const& m, StateIndex s, std::span<StateIndex const> prefix, Matrix const& rho) {
    if (prefix.empty() || prefix.front() != s) {
        throw Error("cylinder prefix must start at the given state");
    }
    return path_superop(m, prefix).trace_on(rho);
}

// ---- ReachSystem ------------------------------------------------------------

ReachSystem::ReachSystem(HqMC const& m, std::vector<bool> target) : dim_(m.dim), target_(std::move(target)) {
    auto const n = m.num_states();
    if (target_.size() != n) {
        throw DimensionError("target set must have one flag per state");
    }
    // Backward graph search from the target: only exactly-zero operations are
    // treated as missing edges.
    std::vector<bool> can_reach = target_;
    std::deque<StateIndex> frontier;
    for (StateIndex s = 0; s < n; ++s) {
        if (target_[s]) {
            frontier.push_back(s);
        }
    }
    while (!frontier.empty()) {
        auto const t = frontier.front();
        frontier.pop_front();
        for (StateIndex s = 0; s < n; ++s) {
            if (!can_reach[s] && m.trans.has_edge(t, s, 0.0)) {
                can_reach[s] = true;
                frontier.push_back(s);
            }
        }
    }
    for (StateIndex s = 0; s < n; ++s) {
        if (target_[s] || !can_reach[s]) {
            continue;
        }
        unknowns_.push_back(s);
        // Outgoing transitions of target states are never read: paths are
        // counted on first entry.
        for (StateIndex t = 0; t < n; ++t) {
            if (can_reach[t] && m.trans.has_edge(t, s, 0.0)) {
                edges_.push_back({s, t, superop_matrix(m.trans.at(t, s))});
            }
        }
    }
}

std::vector<Matrix> ReachSystem::initial_iterate() const {
    auto const big = dim_ * dim_;
    std::vector<Matrix> out(num_states(), Matrix::Zero(big, big));
    for (StateIndex s = 0; s < num_states(); ++s) {
        if (target_[s]) {
            out[s].setIdentity();
        }
    }
    return out;
}

std::vector<Matrix> ReachSystem::sweep(std::vector<Matrix> const& current) const {
    std::vector<Matrix> next = initial_iterate();
    for (auto const& e : edges_) {
        next[e.from].noalias() += current[e.to] * e.superop;
    }
    return next;
}

double ReachSystem::residual(std::vector<Matrix> const& current) const {
    auto const next = sweep(current);
    double r = 0.0;
    for (std::size_t s = 0; s < next.size(); ++s) {
        r = std::max(r, max_abs(next[s] - current[s]));
    }
    return r;
}

bool ReachSystem::solve_direct(double max_condition, std::vector<Matrix>& out) const {
    auto const big = dim_ * dim_;
    auto const nu = static_cast<Eigen::Index>(unknowns_.size());
    if (nu == 0) {
        out = initial_iterate();
        return true;
    }
    if (nu * big > kMaxDirectUnknowns) {
        return false;
    }
    std::vector<Eigen::Index> slot(num_states(), -1);
    for (Eigen::Index i = 0; i < nu; ++i) {
        slot[unknowns_[static_cast<std::size_t>(i)]] = i;
    }
    // Transposed system: X_s^T - sum_t M^(t,s)^T X_t^T = sum_{t in target} M^(t,s)^T.
    Matrix system = Matrix::Identity(nu * big, nu * big);
    Matrix rhs = Matrix::Zero(nu * big, big);
    for (auto const& e : edges_) {
        auto const row = slot[e.from] * big;
        if (target_[e.to]) {
            rhs.block(row, 0, big, big) += e.superop.transpose();
        } else {
            system.block(row, slot[e.to] * big, big, big) -= e.superop.transpose();
        }
    }
    Eigen::PartialPivLU<Matrix> lu(system);
    double const rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > max_condition) {
        return false;
    }
    Matrix const solution = lu.solve(rhs);
    if (!all_finite(solution)) {
        return false;
    }
    out = initial_iterate();
    for (Eigen::Index i = 0; i < nu; ++i) {
        out[unknowns_[static_cast<std::size_t>(i)]] = solution.block(i * big, 0, big, big).transpose();
    }
    return true;
}

ReachResult ReachSystem::solve(ReachOptions const& options) const {
    ReachResult result;
    std::vector<Matrix> values;
    if (options.try_direct && solve_direct(options.max_condition, values)) {
        result.method = ReachMethod::Direct;
        result.residual = residual(values);
        result.iterations = 0;
    }
    // A direct solution that does not reproduce itself under the fixpoint map
    // is discarded in favour of iteration.
    if (result.method != ReachMethod::Direct || !(result.residual <= options.tol)) {
        result.method = ReachMethod::Kleene;
        values = initial_iterate();
        result.residual = 0.0;
        result.iterations = 0;
        while (result.iterations < options.max_iter) {
            auto next = sweep(values);
            double change = 0.0;
            for (std::size_t s = 0; s < next.size(); ++s) {
                change = std::max(change, max_abs(next[s] - values[s]));
            }
            values = std::move(next);
            ++result.iterations;
            result.residual = change;
            if (change <= options.tol) {
                break;
            }
        }
    }
    result.measures.reserve(values.size());
    for (auto& v : values) {
        result.measures.push_back({dim_, std::move(v)});
    }
    return result;
}

ReachResult reach_measure(HqMC const& m, std::vector<StateIndex> const& target, ReachOptions const& options) {
    std::vector<bool> flags(m.num_states(), false);
    for (auto s : target) {
        if (s >= m.num_states()) {
            throw LookupError("target state index " + std::to_string(s) + " out of range");
        }
        flags[s] = true;
    }
    return ReachSystem(m, std::move(flags)).solve(options);
}

// ---- safety -----------------------------------------------------------------

SafetyResult check_safety(SLHqMC const& m, Dfa const& bad_prefixes, StateIndex s, Matrix const& rho,
                          ReachOptions const& options) {
    require_valid(m, "SL-hqMC");
    require_valid(bad_prefixes, "DFA");
    auto const& chain = m.chain;
    if (s >= chain.num_states()) {
        throw LookupError("state index out of range");
    }
    if (rho.rows() != chain.dim || rho.cols() != chain.dim) {
        throw DimensionError("initial quantum state has the wrong dimension");
    }
    auto const symbols = dfa_symbol_map(m, bad_prefixes);
    auto const d = chain.dim;

    SafetyResult out;
    out.state = chain.states[s];
    if (bad_prefixes.accepting[bad_prefixes.initial]) {
        out.empty_property = true;
        for (StateIndex i = 0; i < chain.num_states(); ++i) {
            out.per_state.push_back({chain.states[i], PathMeasure::zero(d), PathMeasure::identity(d)});
        }
        out.satisfy = PathMeasure::zero(d);
        out.violate = PathMeasure::identity(d);
        out.probability_satisfy = 0.0;
        return out;
    }

    auto const prod = product(m, bad_prefixes);
    auto const nq = bad_prefixes.states.size();
    std::vector<bool> target(prod.chain.num_states(), false);
    for (StateIndex i = 0; i < chain.num_states(); ++i) {
        for (StateIndex q = 0; q < nq; ++q) {
            target[product_index(i, q, nq)] = bad_prefixes.accepting[q];
        }
    }
    auto reach = ReachSystem(prod.chain, std::move(target)).solve(options);
    out.residual = reach.residual;
    out.iterations = reach.iterations;
    out.method = reach.method;

    auto const id = PathMeasure::identity(d);
    for (StateIndex i = 0; i < chain.num_states(); ++i) {
        auto const q_start = bad_prefixes.next(bad_prefixes.initial, symbols[m.label[i]]);
        auto const& violate = reach.measures[product_index(i, q_start, nq)];
        out.per_state.push_back({chain.states[i], {d, id.rep - violate.rep}, violate});
    }
    out.satisfy = out.per_state[s].satisfy;
    out.violate = out.per_state[s].violate;
    out.probability_satisfy = out.satisfy.trace_on(rho);
    return out;
}

}  // namespace hqmc
