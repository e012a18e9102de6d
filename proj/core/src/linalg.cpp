#include "hqmc/linalg.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "hqmc/errors.hpp"

namespace hqmc {

namespace {
std::atomic<double> g_default_tolerance{1e-9};

void require_square(Matrix const& m, char const* what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + ": expected a square matrix, got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
}
}  // namespace

double default_tolerance() noexcept { return g_default_tolerance.load(std::memory_order_relaxed); }

void set_default_tolerance(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw Error("tolerance must be positive and finite");
    }
    g_default_tolerance.store(tol, std::memory_order_relaxed);
}

Vector vec(Matrix const& m) {
    require_square(m, "vec");
    auto const n = m.rows();
    Vector out(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i * n + j) = m(i, j);
        }
    }
    return out;
}

Matrix unvec(Vector const& v) {
    auto const n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size()) {
        throw DimensionError("unvec: length " + std::to_string(v.size()) + " is not a perfect square");
    }
    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = v(i * n + j);
        }
    }
    return out;
}

Matrix kron(Matrix const& a, Matrix const& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix ket_bra(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
    Matrix out = Matrix::Zero(n, n);
    out(i, j) = 1.0;
    return out;
}

double max_abs(Matrix const& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(Matrix const& m, double tol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

double min_hermitian_eigenvalue(Matrix const& m) {
    require_square(m, "min_hermitian_eigenvalue");
    if (m.size() == 0) {
        return 0.0;
    }
    Matrix const h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool is_positive_semidefinite(Matrix const& m, double tol) {
    require_square(m, "is_positive_semidefinite");
    if (!is_hermitian(m, tol)) {
        return false;
    }
    return min_hermitian_eigenvalue(m) >= -tol;
}

bool is_projector(Matrix const& p, double tol) {
    if (p.rows() != p.cols()) {
        return false;
    }
    return is_hermitian(p, tol) && max_abs(p * p - p) <= tol;
}

bool all_finite(Matrix const& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        auto const z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            return false;
        }
    }
    return true;
}

Residual gram_schmidt_residual(Vector const& u, std::span<Vector const> basis) {
    Vector b = u;
    for (auto const& q : basis) {
        if (q.size() != u.size()) {
            throw DimensionError("gram_schmidt_residual: basis vector of length " + std::to_string(q.size()) +
                                 " against input of length " + std::to_string(u.size()));
        }
        // modified Gram-Schmidt: project the running residual
        b -= q.dot(b) * q;
    }
    double const norm = b.norm();
    return {std::move(b), norm};
}

}  // namespace hqmc
