#pragma once

// Test-only brute-force reference implementations. These deliberately avoid
// the library's gate/partial-trace code paths: gates are embedded into full
// 2^n x 2^n matrices via Kronecker products and applied by dense
// matrix-vector multiplication, and partial traces are explicit double sums.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

using cxd = std::complex<double>;
using Vec = std::vector<cxd>;
using Mat = std::vector<std::vector<cxd>>;  // row-major dense

inline Mat identity(std::size_t n) {
    Mat m(n, std::vector<cxd>(n, cxd{0, 0}));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
    const std::size_t ra = a.size(), ca = a[0].size();
    const std::size_t rb = b.size(), cb = b[0].size();
    Mat m(ra * rb, std::vector<cxd>(ca * cb, cxd{0, 0}));
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ca; ++j)
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < cb; ++l) m[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
    return m;
}

inline Vec kron_vec(const Vec& a, const Vec& b) {
    Vec v(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) v[i * b.size() + j] = a[i] * b[j];
    return v;
}

inline Vec matvec(const Mat& m, const Vec& v) {
    Vec out(m.size(), cxd{0, 0});
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

inline Mat hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    return Mat{{r, r}, {r, -r}};
}

inline Mat cnot() {
    return Mat{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
}

/// Embeds a single-qubit gate at `qubit` of an n-qubit register (big-endian).
inline Mat embed1(const Mat& gate, int qubit, int n) {
    Mat m = identity(1);
    for (int q = 0; q < n; ++q) m = kron(m, q == qubit ? gate : identity(2));
    return m;
}

/// Embeds CNOT(control -> target) into n qubits by summing projector terms:
/// |0><0|_c (x) I + |1><1|_c (x) X_t.
inline Mat embed_cnot(int control, int target, int n) {
    Mat p0{{1, 0}, {0, 0}}, p1{{0, 0}, {0, 1}}, x{{0, 1}, {1, 0}};
    Mat term0 = identity(1), term1 = identity(1);
    for (int q = 0; q < n; ++q) {
        term0 = kron(term0, q == control ? p0 : identity(2));
        term1 = kron(term1, q == control ? p1 : (q == target ? x : identity(2)));
    }
    Mat m = term0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) m[i][j] += term1[i][j];
    return m;
}

/// Explicit-summation partial trace onto `kept` (ascending order of qubit
/// indices, big-endian register of n qubits).
inline Mat partial_trace(const Vec& amps, const std::vector<int>& kept, int n) {
    const std::size_t kd = std::size_t{1} << kept.size();
    Mat rho(kd, std::vector<cxd>(kd, cxd{0, 0}));
    const std::size_t dim = amps.size();

    auto kept_bits = [&](std::size_t index) {
        std::size_t out = 0;
        for (std::size_t k = 0; k < kept.size(); ++k) {
            const int bit = static_cast<int>((index >> (n - 1 - kept[k])) & 1u);
            out = (out << 1) | static_cast<std::size_t>(bit);
        }
        return out;
    };
    auto env_bits = [&](std::size_t index) {
        std::size_t out = 0;
        for (int q = 0; q < n; ++q) {
            bool is_kept = false;
            for (int kq : kept) is_kept |= (kq == q);
            if (is_kept) continue;
            out = (out << 1) | ((index >> (n - 1 - q)) & 1u);
        }
        return out;
    };

    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (env_bits(i) == env_bits(j)) rho[kept_bits(i)][kept_bits(j)] += amps[i] * std::conj(amps[j]);
    return rho;
}

inline Vec ket(std::size_t index, std::size_t dim) {
    Vec v(dim, cxd{0, 0});
    v[index] = 1.0;
    return v;
}

} // namespace oracle
