#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hqmc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Process-wide default tolerance for zero and equality tests. Starts at 1e-9.
double default_tolerance() noexcept;
void set_default_tolerance(double tol);

/// Row-stacking: vec(m)[i*n + j] = m(i, j) (0-based). Throws DimensionError
/// unless m is square.
Vector vec(Matrix const& m);

/// Inverse of vec for a vector of length n*n.
Matrix unvec(Vector const& v);

Matrix kron(Matrix const& a, Matrix const& b);

/// |i><j| on an n-dimensional space.
Matrix ket_bra(Eigen::Index n, Eigen::Index i, Eigen::Index j);

/// Largest absolute entry, the norm used by all entrywise tolerance checks.
double max_abs(Matrix const& m);

bool is_hermitian(Matrix const& m, double tol);

/// Smallest eigenvalue of the Hermitian part (m + m^dagger) / 2.
double min_hermitian_eigenvalue(Matrix const& m);

/// True iff m is Hermitian within tol (entrywise) and every eigenvalue of the
/// symmetrized matrix is >= -tol.
bool is_positive_semidefinite(Matrix const& m, double tol);

/// P^2 = P = P^dagger within tol.
bool is_projector(Matrix const& p, double tol);

/// All entries finite (no NaN / infinity).
bool all_finite(Matrix const& m);

struct Residual {
    Vector residual;
    double norm = 0.0;
};

/// u minus its orthogonal projection onto span(basis). The basis is assumed
/// orthonormal; inner products use the conjugate-linear first slot.
Residual gram_schmidt_residual(Vector const& u, std::span<Vector const> basis);

}  // namespace hqmc
