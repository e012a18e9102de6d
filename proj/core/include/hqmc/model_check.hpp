#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hqmc/models.hpp"

namespace hqmc {

/// A superoperator in vectorized form: rep * vec(rho) = vec(Q(rho)).
struct PathMeasure {
    Eigen::Index dim = 0;
    Matrix rep;

    static PathMeasure identity(Eigen::Index dim);
    static PathMeasure zero(Eigen::Index dim);

    Matrix apply(Matrix const& rho) const;
    /// Tr(Q(rho)), the probability mass assigned given the quantum state rho.
    double trace_on(Matrix const& rho) const;
    /// Completeness sum C with Tr(Q(rho)) = Tr(C rho), recovered from rep.
    Matrix completeness_sum() const;
};

/// Accumulated superoperator M(s_n, s_{n-1}) ... M(s_1, s_0) along a path;
/// identity for a single-state path. Throws LookupError on unknown states and
/// Error on an empty path.
PathMeasure path_superop(HqMC const& m, std::span<StateIndex const> path);

/// Tr(path_superop(prefix)(rho)): the cylinder mass of prefix given state rho
/// at its first state. Throws Error unless prefix starts at s.
double cylinder_measure(HqMC const& m, StateIndex s, std::span<StateIndex const> prefix, Matrix const& rho);

enum class ReachMethod { Direct, Kleene };

struct ReachOptions {
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    /// Attempt a direct linear solve first when the system is well-conditioned.
    bool try_direct = true;
    /// Largest accepted condition estimate for the direct solve.
    double max_condition = 1e12;
};

struct ReachResult {
    /// Indexed like the chain's states.
    std::vector<PathMeasure> measures;
    /// Max entrywise change of one more fixpoint sweep applied to the result.
    double residual = 0.0;
    std::size_t iterations = 0;
    ReachMethod method = ReachMethod::Kleene;

    bool converged(double tol) const noexcept { return residual <= tol; }
};

/// The equation system R_s = I (s in target), R_s = sum_t R_t M^(t, s)
/// (otherwise), with M^ the vectorized transition operations. Its least
/// solution is the reachability measure. States with no graph path to the
/// target are fixed at zero; nothing else is pruned.
class ReachSystem {
   public:
    ReachSystem(HqMC const& m, std::vector<bool> target);

    std::size_t num_states() const noexcept { return target_.size(); }
    Eigen::Index dim() const noexcept { return dim_; }
    std::vector<bool> const& target() const noexcept { return target_; }
    /// States that are neither targets nor pruned.
    std::vector<StateIndex> const& unknowns() const noexcept { return unknowns_; }

    /// R^(0): identity on targets, zero elsewhere.
    std::vector<Matrix> initial_iterate() const;
    /// One Jacobi sweep of the fixpoint map.
    std::vector<Matrix> sweep(std::vector<Matrix> const& current) const;
    /// Max entrywise change of one sweep.
    double residual(std::vector<Matrix> const& current) const;

    ReachResult solve(ReachOptions const& options = {}) const;

   private:
    bool solve_direct(double max_condition, std::vector<Matrix>& out) const;

    Eigen::Index dim_ = 0;
    std::vector<bool> target_;
    std::vector<StateIndex> unknowns_;
    /// superop_matrix(M(t, s)) for every pair with a nonzero edge.
    struct Edge {
        StateIndex from;
        StateIndex to;
        Matrix superop;
    };
    std::vector<Edge> edges_;
};

/// Least-fixpoint reachability measure for every state.
ReachResult reach_measure(HqMC const& m, std::vector<StateIndex> const& target, ReachOptions const& options = {});

struct StateSafety {
    std::string state;
    PathMeasure satisfy;
    PathMeasure violate;
};

struct SafetyResult {
    std::string state;
    /// Satisfaction and violation measures from every state of the chain, each
    /// started in its product state (s, delta(q0, L(s))).
    std::vector<StateSafety> per_state;
    PathMeasure satisfy;
    PathMeasure violate;
    /// Tr(satisfy(rho)) for the requested state and rho.
    double probability_satisfy = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    ReachMethod method = ReachMethod::Kleene;
    /// The DFA accepts the empty word: every word is a bad prefix, the
    /// property is empty and the satisfaction measure is zero.
    bool empty_property = false;
};

/// Quantitative check of a regular safety property given by a DFA for its bad
/// prefixes: violate is the measure of reaching an accepting DFA state in the
/// product, satisfy = I - violate.
SafetyResult check_safety(SLHqMC const& m, Dfa const& bad_prefixes, StateIndex s, Matrix const& rho,
                          ReachOptions const& options = {});

}  // namespace hqmc
