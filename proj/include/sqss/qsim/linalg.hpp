#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace sqss::qsim {

using cxd = std::complex<double>;

/// Absolute tolerance for algebraic identities built from exact constructions.
inline constexpr double kTolExact = 1e-12;
/// Absolute tolerance for chained numerics (gate sequences, partial traces).
inline constexpr double kTolNumeric = 1e-9;

/// Dense square complex matrix, row-major. Dimensions stay tiny here
/// (gates up to 8x8, density operators up to 4x4).
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t dim) : dim_(dim), a_(dim * dim, cxd{0.0, 0.0}) {}

    static Matrix identity(std::size_t dim);

    std::size_t dim() const { return dim_; }

    cxd& operator()(std::size_t r, std::size_t c) { return a_[r * dim_ + c]; }
    const cxd& operator()(std::size_t r, std::size_t c) const { return a_[r * dim_ + c]; }

    Matrix adjoint() const;
    Matrix operator*(const Matrix& rhs) const;
    Matrix operator+(const Matrix& rhs) const;
    Matrix& operator+=(const Matrix& rhs);
    Matrix scaled(cxd factor) const;

    cxd trace() const;

    /// Largest absolute entry of (this - rhs).
    double max_abs_diff(const Matrix& rhs) const;

    bool is_unitary(double tol = kTolNumeric) const;
    bool is_hermitian(double tol = kTolNumeric) const;

    /// Hermitian + unit trace + positive semidefinite, all within tol.
    bool is_density(double tol = kTolNumeric) const;

private:
    std::size_t dim_ = 0;
    std::vector<cxd> a_;
};

/// Kronecker product (lhs ⊗ rhs).
Matrix kron(const Matrix& lhs, const Matrix& rhs);

/// Eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi rotations.
std::vector<double> hermitian_eigenvalues(const Matrix& m);

/// Von Neumann entropy S(rho) in bits; eigenvalues below `cutoff` are
/// treated as exact zeros to keep p*log(p) stable.
double von_neumann_entropy(const Matrix& rho, double cutoff = 1e-12);

} // namespace sqss::qsim
