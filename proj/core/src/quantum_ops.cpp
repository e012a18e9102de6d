#include "hqmc/quantum_ops.hpp"

#include <cmath>
#include <string>

#include "hqmc/errors.hpp"

namespace hqmc {

namespace {
void require_same_dim(QuantumOperation const& e, QuantumOperation const& f, char const* what) {
    if (e.dim() != f.dim()) {
        throw DimensionError(std::string(what) + ": dimension " + std::to_string(e.dim()) + " vs " +
                             std::to_string(f.dim()));
    }
}
}  // namespace

QuantumOperation::QuantumOperation(std::vector<Matrix> kraus) : dim_(0), kraus_(std::move(kraus)) {
    if (kraus_.empty()) {
        throw DimensionError("quantum operation needs at least one Kraus matrix");
    }
    dim_ = kraus_.front().rows();
    for (auto const& k : kraus_) {
        if (k.rows() != k.cols() || k.rows() != dim_) {
            throw DimensionError("Kraus matrix of shape " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                                 " in an operation of dimension " + std::to_string(dim_));
        }
    }
    if (dim_ == 0) {
        throw DimensionError("quantum operation of dimension 0");
    }
}

QuantumOperation QuantumOperation::identity(Eigen::Index dim) { return QuantumOperation({Matrix::Identity(dim, dim)}); }

QuantumOperation QuantumOperation::zero(Eigen::Index dim) { return QuantumOperation({Matrix::Zero(dim, dim)}); }

QuantumOperation QuantumOperation::scaled_identity(Eigen::Index dim, double p) {
    if (p < 0.0) {
        throw Error("scaled_identity: negative weight");
    }
    return QuantumOperation({std::sqrt(p) * Matrix::Identity(dim, dim)});
}

Matrix QuantumOperation::completeness_sum() const {
    Matrix sum = Matrix::Zero(dim_, dim_);
    for (auto const& k : kraus_) {
        sum.noalias() += k.adjoint() * k;
    }
    return sum;
}

bool QuantumOperation::is_zero(double tol) const {
    for (auto const& k : kraus_) {
        if (k.norm() > tol) {
            return false;
        }
    }
    return true;
}

DensityOperator::DensityOperator(Matrix m, double tol) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw DimensionError("density operator must be a non-empty square matrix");
    }
    if (!is_positive_semidefinite(matrix_, tol)) {
        throw ModelError("density operator is not positive semidefinite");
    }
    double const tr = trace();
    if (tr < -tol || tr > 1.0 + tol) {
        throw ModelError("density operator trace " + std::to_string(tr) + " outside [0, 1]");
    }
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index dim) {
    return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

Matrix apply(QuantumOperation const& e, Matrix const& a) {
    if (a.rows() != e.dim() || a.cols() != e.dim()) {
        throw DimensionError("apply: operation of dimension " + std::to_string(e.dim()) + " on a " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " matrix");
    }
    Matrix out = Matrix::Zero(e.dim(), e.dim());
    for (auto const& k : e.kraus()) {
        out.noalias() += k * a * k.adjoint();
    }
    return out;
}

bool is_trace_preserving(QuantumOperation const& e, double tol) {
    Matrix const sum = e.completeness_sum();
    return max_abs(sum - Matrix::Identity(e.dim(), e.dim())) <= tol;
}

bool is_trace_nonincreasing(QuantumOperation const& e, double tol) {
    Matrix const gap = Matrix::Identity(e.dim(), e.dim()) - e.completeness_sum();
    return is_positive_semidefinite(gap, tol);
}

QuantumOperation op_sum(QuantumOperation const& e, QuantumOperation const& f) {
    require_same_dim(e, f, "op_sum");
    std::vector<Matrix> kraus = e.kraus();
    kraus.insert(kraus.end(), f.kraus().begin(), f.kraus().end());
    return QuantumOperation(std::move(kraus));
}

QuantumOperation op_compose(QuantumOperation const& e, QuantumOperation const& f) {
    require_same_dim(e, f, "op_compose");
    std::vector<Matrix> kraus;
    kraus.reserve(e.kraus().size() * f.kraus().size());
    for (auto const& ej : e.kraus()) {
        for (auto const& fk : f.kraus()) {
            kraus.emplace_back(ej * fk);
        }
    }
    return QuantumOperation(std::move(kraus));
}

Matrix superop_matrix(QuantumOperation const& e) {
    auto const n = e.dim() * e.dim();
    Matrix out = Matrix::Zero(n, n);
    for (auto const& k : e.kraus()) {
        out += kron(k, k.conjugate());
    }
    return out;
}

bool eqsim(QuantumOperation const& e, QuantumOperation const& f, double tol) {
    require_same_dim(e, f, "eqsim");
    return max_abs(e.completeness_sum() - f.completeness_sum()) <= tol;
}

QuantumOperation compact(QuantumOperation const& e, double tol) {
    std::vector<Matrix> kept;
    for (auto const& k : e.kraus()) {
        if (k.norm() > tol) {
            kept.push_back(k);
        }
    }
    if (kept.empty()) {
        return QuantumOperation::zero(e.dim());
    }
    return QuantumOperation(std::move(kept));
}

}  // namespace hqmc
