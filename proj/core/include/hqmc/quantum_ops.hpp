#pragma once

#include <vector>

#include "hqmc/linalg.hpp"

namespace hqmc {

/// A completely positive map in Kraus form, E(A) = sum_k E_k A E_k^dagger.
///
/// The Kraus list is never empty: the zero operation is stored as a single
/// d x d zero matrix. Lists are not simplified; composition multiplies their
/// lengths (see compact()).
class QuantumOperation {
   public:
    /// Throws DimensionError if the list is empty, or a matrix is not square
    /// or differs in size from the first one.
    explicit QuantumOperation(std::vector<Matrix> kraus);

    static QuantumOperation identity(Eigen::Index dim);
    static QuantumOperation zero(Eigen::Index dim);
    /// The map A -> p * A, i.e. a single Kraus operator sqrt(p) * I.
    static QuantumOperation scaled_identity(Eigen::Index dim, double p);

    Eigen::Index dim() const noexcept { return dim_; }
    std::vector<Matrix> const& kraus() const noexcept { return kraus_; }

    /// sum_k E_k^dagger E_k
    Matrix completeness_sum() const;

    /// True iff every Kraus matrix has Frobenius norm <= tol.
    bool is_zero(double tol) const;

   private:
    Eigen::Index dim_;
    std::vector<Matrix> kraus_;
};

/// A quantum state: PSD with trace in [0, 1 + tol]. Partial states (trace < 1)
/// are allowed.
class DensityOperator {
   public:
    /// Throws ModelError when the matrix is not PSD within tol or its trace is
    /// outside [-tol, 1 + tol].
    explicit DensityOperator(Matrix m, double tol = default_tolerance());

    static DensityOperator maximally_mixed(Eigen::Index dim);

    Eigen::Index dim() const noexcept { return matrix_.rows(); }
    Matrix const& matrix() const noexcept { return matrix_; }
    double trace() const { return matrix_.trace().real(); }

   private:
    Matrix matrix_;
};

Matrix apply(QuantumOperation const& e, Matrix const& a);

bool is_trace_preserving(QuantumOperation const& e, double tol = default_tolerance());
bool is_trace_nonincreasing(QuantumOperation const& e, double tol = default_tolerance());

/// Pointwise sum; the Kraus list is the concatenation. The result may exceed
/// the trace-nonincreasing bound, which validators report.
QuantumOperation op_sum(QuantumOperation const& e, QuantumOperation const& f);

/// e after f: Kraus list {E_j F_k}.
QuantumOperation op_compose(QuantumOperation const& e, QuantumOperation const& f);

/// sum_k E_k (x) conj(E_k), so that superop_matrix(e) * vec(A) == vec(e(A)).
Matrix superop_matrix(QuantumOperation const& e);

/// Tr(e(rho)) == Tr(f(rho)) for all rho, decided by comparing completeness sums.
bool eqsim(QuantumOperation const& e, QuantumOperation const& f, double tol = default_tolerance());

/// Drops Kraus matrices with Frobenius norm <= tol; keeps one zero matrix if
/// nothing survives.
QuantumOperation compact(QuantumOperation const& e, double tol = default_tolerance());

}  // namespace hqmc
