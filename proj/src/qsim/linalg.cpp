#include "sqss/qsim/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "sqss/errors.hpp"

namespace sqss::qsim {

Matrix Matrix::identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix m(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (dim_ != rhs.dim_) throw InvalidArgument("Matrix::operator*: dimension mismatch");
    Matrix m(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t k = 0; k < dim_; ++k) {
            const cxd v = (*this)(r, k);
            if (v == cxd{0.0, 0.0}) continue;
            for (std::size_t c = 0; c < dim_; ++c) m(r, c) += v * rhs(k, c);
        }
    return m;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
    Matrix m = *this;
    m += rhs;
    return m;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (dim_ != rhs.dim_) throw InvalidArgument("Matrix::operator+=: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += rhs.a_[i];
    return *this;
}

Matrix Matrix::scaled(cxd factor) const {
    Matrix m = *this;
    for (auto& v : m.a_) v *= factor;
    return m;
}

cxd Matrix::trace() const {
    cxd t{0.0, 0.0};
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::max_abs_diff(const Matrix& rhs) const {
    if (dim_ != rhs.dim_) throw InvalidArgument("Matrix::max_abs_diff: dimension mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) worst = std::max(worst, std::abs(a_[i] - rhs.a_[i]));
    return worst;
}

bool Matrix::is_unitary(double tol) const {
    return (adjoint() * *this).max_abs_diff(identity(dim_)) <= tol;
}

bool Matrix::is_hermitian(double tol) const {
    return max_abs_diff(adjoint()) <= tol;
}

bool Matrix::is_density(double tol) const {
    if (!is_hermitian(tol)) return false;
    if (std::abs(trace() - cxd{1.0, 0.0}) > tol) return false;
    const auto eigs = hermitian_eigenvalues(*this);
    return eigs.empty() || eigs.front() >= -tol;
}

Matrix kron(const Matrix& lhs, const Matrix& rhs) {
    const std::size_t n = lhs.dim(), m = rhs.dim();
    Matrix out(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const cxd v = lhs(i, j);
            if (v == cxd{0.0, 0.0}) continue;
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) out(i * m + k, j * m + l) = v * rhs(k, l);
        }
    return out;
}

std::vector<double> hermitian_eigenvalues(const Matrix& m) {
    if (!m.is_hermitian(1e-7)) throw InvalidArgument("hermitian_eigenvalues: matrix is not Hermitian");
    const std::size_t n = m.dim();
    Matrix a = m;
    // symmetrize to kill the last bits of asymmetry
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const cxd avg = 0.5 * (a(r, c) + std::conj(a(c, r)));
            a(r, c) = avg;
        }

    // Cyclic Jacobi with complex plane rotations. For a_pq = m*e^{i*phi} the
    // rotation J (identity outside the p,q plane) with
    //   J_pp = cos t, J_pq = -sin t * e^{i*phi},
    //   J_qp = sin t * e^{-i*phi}, J_qq = cos t,
    //   tan(2t) = 2m / (a_pp - a_qq)
    // zeroes the (p,q) entry of J^dagger * A * J.
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (off < 1e-30) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cxd apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag < 1e-18) continue;
                const cxd phase = apq / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = 0.5 * std::atan2(2.0 * mag, app - aqq);
                const double c = std::cos(theta);
                const double s = std::sin(theta);

                Matrix j = Matrix::identity(n);
                j(p, p) = c;
                j(p, q) = -s * phase;
                j(q, p) = s * std::conj(phase);
                j(q, q) = c;
                a = j.adjoint() * a * j;
            }
        }
    }

    std::vector<double> eigs(n);
    for (std::size_t i = 0; i < n; ++i) eigs[i] = a(i, i).real();
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

double von_neumann_entropy(const Matrix& rho, double cutoff) {
    double s = 0.0;
    for (double lambda : hermitian_eigenvalues(rho)) {
        if (lambda < cutoff) continue;
        s -= lambda * std::log2(lambda);
    }
    return s;
}

} // namespace sqss::qsim
