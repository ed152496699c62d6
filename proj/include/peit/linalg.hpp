#pragma once

// Small dense complex matrices for the 3-level state space and the 9-dimensional
// Liouville space. Sizes are compile-time constants, so dimension agreement is
// checked by the type system.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace peit
{

using Complex = std::complex<double>;

inline constexpr Complex I_unit{0.0, 1.0};

template <std::size_t N>
class Vector
{
public:
    Vector() { data_.fill(Complex{}); }
    Vector(std::array<Complex, N> const& entries) : data_(entries) {}

    static Vector basis(std::size_t k)
    {
        Vector v;
        v[k] = 1.0;
        return v;
    }

    static constexpr std::size_t size() { return N; }

    Complex& operator[](std::size_t i) { return data_[i]; }
    Complex const& operator[](std::size_t i) const { return data_[i]; }

    std::span<Complex const, N> entries() const { return data_; }

    double norm() const
    {
        double s = 0.0;
        for (auto const& z : data_) {
            s += std::norm(z);
        }
        return std::sqrt(s);
    }

    Vector& operator+=(Vector const& o)
    {
        for (std::size_t i = 0; i < N; ++i) data_[i] += o.data_[i];
        return *this;
    }
    Vector& operator-=(Vector const& o)
    {
        for (std::size_t i = 0; i < N; ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Vector& operator*=(Complex s)
    {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend Vector operator+(Vector a, Vector const& b) { return a += b; }
    friend Vector operator-(Vector a, Vector const& b) { return a -= b; }
    friend Vector operator*(Complex s, Vector v) { return v *= s; }

private:
    std::array<Complex, N> data_;
};

/// <a|b>, conjugate-linear in the first argument.
template <std::size_t N>
Complex inner(Vector<N> const& a, Vector<N> const& b)
{
    Complex s{};
    for (std::size_t i = 0; i < N; ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

/// Row-major N x N complex matrix with value semantics.
template <std::size_t N>
class Matrix
{
public:
    Matrix() { data_.fill(Complex{}); }

    static constexpr std::size_t dim() { return N; }

    static Matrix zero() { return Matrix{}; }

    static Matrix identity()
    {
        Matrix m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(std::span<Complex const, N> d)
    {
        Matrix m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
        return m;
    }

    static Matrix diagonal(std::array<double, N> const& d)
    {
        Matrix m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
        return m;
    }

    /// |u><v|
    static Matrix outer(Vector<N> const& u, Vector<N> const& v)
    {
        Matrix m;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) m(i, j) = u[i] * std::conj(v[j]);
        return m;
    }

    /// |i><j|
    static Matrix unit(std::size_t i, std::size_t j)
    {
        Matrix m;
        m(i, j) = 1.0;
        return m;
    }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * N + j]; }
    Complex const& operator()(std::size_t i, std::size_t j) const { return data_[i * N + j]; }

    Matrix adjoint() const
    {
        Matrix m;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) m(i, j) = std::conj((*this)(j, i));
        return m;
    }

    Matrix transpose() const
    {
        Matrix m;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) m(i, j) = (*this)(j, i);
        return m;
    }

    Matrix conjugate() const
    {
        Matrix m;
        for (std::size_t k = 0; k < N * N; ++k) m.data_[k] = std::conj(data_[k]);
        return m;
    }

    Complex trace() const
    {
        Complex s{};
        for (std::size_t i = 0; i < N; ++i) s += (*this)(i, i);
        return s;
    }

    bool is_finite() const
    {
        return std::all_of(data_.begin(), data_.end(), [](Complex const& z) {
            return std::isfinite(z.real()) && std::isfinite(z.imag());
        });
    }

    Matrix& operator+=(Matrix const& o)
    {
        for (std::size_t k = 0; k < N * N; ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(Matrix const& o)
    {
        for (std::size_t k = 0; k < N * N; ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(Complex s)
    {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, Matrix const& b) { return a += b; }
    friend Matrix operator-(Matrix a, Matrix const& b) { return a -= b; }
    friend Matrix operator-(Matrix a)
    {
        for (auto& z : a.data_) z = -z;
        return a;
    }
    friend Matrix operator*(Complex s, Matrix m) { return m *= s; }
    friend Matrix operator*(Matrix m, Complex s) { return m *= s; }

    friend Matrix operator*(Matrix const& a, Matrix const& b)
    {
        Matrix c;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < N; ++k) {
                Complex const aik = a(i, k);
                if (aik == Complex{}) continue;
                for (std::size_t j = 0; j < N; ++j) c(i, j) += aik * b(k, j);
            }
        }
        return c;
    }

    friend Vector<N> operator*(Matrix const& a, Vector<N> const& v)
    {
        Vector<N> r;
        for (std::size_t i = 0; i < N; ++i) {
            Complex s{};
            for (std::size_t j = 0; j < N; ++j) s += a(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }

    friend bool operator==(Matrix const&, Matrix const&) = default;

private:
    std::array<Complex, N * N> data_;
};

using Mat3 = Matrix<3>;
using Mat9 = Matrix<9>;
using Vec3 = Vector<3>;
using Vec9 = Vector<9>;

template <std::size_t N>
double frobenius_norm(Matrix<N> const& m)
{
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

/// Maximum absolute column sum.
template <std::size_t N>
double one_norm(Matrix<N> const& m)
{
    double best = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

template <std::size_t N>
double max_abs(Matrix<N> const& m)
{
    double best = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) best = std::max(best, std::abs(m(i, j)));
    return best;
}

/// ||M - M^dagger||_F
template <std::size_t N>
double hermiticity_defect(Matrix<N> const& m)
{
    return frobenius_norm(m - m.adjoint());
}

template <std::size_t N>
bool is_hermitian(Matrix<N> const& m, double rel_tol = 1e-10)
{
    return hermiticity_defect(m) <= rel_tol * frobenius_norm(m);
}

template <std::size_t N>
void require_hermitian(Matrix<N> const& m, char const* where)
{
    double const defect = hermiticity_defect(m);
    double const scale = frobenius_norm(m);
    if (!m.is_finite() || defect > 1e-10 * scale) {
        throw std::invalid_argument(std::string(where) + ": matrix is not Hermitian (||M-M^+||="
                                    + std::to_string(defect) + ", ||M||=" + std::to_string(scale)
                                    + ")");
    }
}

/// AB - BA
template <std::size_t N>
Matrix<N> commutator(Matrix<N> const& a, Matrix<N> const& b)
{
    return a * b - b * a;
}

/// AB + BA
template <std::size_t N>
Matrix<N> anticommutator(Matrix<N> const& a, Matrix<N> const& b)
{
    return a * b + b * a;
}

/// Kronecker product; kron(A, B)(i*M + k, j*M + l) = A(i, j) B(k, l).
template <std::size_t M>
Matrix<M * M> kron(Matrix<M> const& a, Matrix<M> const& b)
{
    Matrix<M * M> r;
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < M; ++j)
            for (std::size_t k = 0; k < M; ++k)
                for (std::size_t l = 0; l < M; ++l) r(i * M + k, j * M + l) = a(i, j) * b(k, l);
    return r;
}

/// Column-stacking vectorization: vec(X)[i + M*j] = X(i, j).
template <std::size_t M>
Vector<M * M> vectorize(Matrix<M> const& x)
{
    Vector<M * M> v;
    for (std::size_t j = 0; j < M; ++j)
        for (std::size_t i = 0; i < M; ++i) v[i + M * j] = x(i, j);
    return v;
}

template <std::size_t M>
Matrix<M> unvectorize(Vector<M * M> const& v)
{
    Matrix<M> x;
    for (std::size_t j = 0; j < M; ++j)
        for (std::size_t i = 0; i < M; ++i) x(i, j) = v[i + M * j];
    return x;
}

template <std::size_t N>
struct Eigensystem
{
    std::array<double, N> values;  // ascending
    Matrix<N> vectors;             // column k belongs to values[k]
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Within a degenerate eigenvalue block any orthonormal basis may be returned.
template <std::size_t N>
Eigensystem<N> hermitian_eig(Matrix<N> const& m)
{
    require_hermitian(m, "hermitian_eig");

    Matrix<N> a = m;
    for (std::size_t i = 0; i < N; ++i) a(i, i) = a(i, i).real();
    Matrix<N> v = Matrix<N>::identity();

    double const scale = frobenius_norm(a);
    auto off_norm = [&a] {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                if (i != j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };

    constexpr int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_norm() <= 1e-17 * scale) break;
        for (std::size_t p = 0; p + 1 < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                Complex const apq = a(p, q);
                double const mag = std::abs(apq);
                if (mag == 0.0) continue;

                // Phase-rotate the pair to a real symmetric 2x2 block, then
                // apply the classical Jacobi rotation that annihilates it.
                Complex const phase = std::conj(apq) / mag;  // e^{-i arg a_pq}
                double const app = a(p, p).real();
                double const aqq = a(q, q).real();
                double const theta = (aqq - app) / (2.0 * mag);
                double const t = (theta >= 0.0 ? 1.0 : -1.0)
                                 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                double const c = 1.0 / std::sqrt(1.0 + t * t);
                double const s = t * c;

                // G = diag(1, phase) * [[c, s], [-s, c]]
                Complex const gpp = c;
                Complex const gpq = s;
                Complex const gqp = -s * phase;
                Complex const gqq = c * phase;

                for (std::size_t k = 0; k < N; ++k) {
                    Complex const akp = a(k, p);
                    Complex const akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    Complex const apk = a(p, k);
                    Complex const aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                for (std::size_t k = 0; k < N; ++k) {
                    Complex const vkp = v(k, p);
                    Complex const vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
            }
        }
    }

    std::array<std::size_t, N> order;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&a](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

    Eigensystem<N> out;
    for (std::size_t k = 0; k < N; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < N; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

/// V * diag(f(lambda)) * V^dagger
template <std::size_t N, class F>
Matrix<N> apply_spectral(Eigensystem<N> const& es, F&& f)
{
    Matrix<N> r;
    for (std::size_t k = 0; k < N; ++k) {
        Complex const fk = f(es.values[k]);
        for (std::size_t i = 0; i < N; ++i) {
            Complex const vik = es.vectors(i, k) * fk;
            for (std::size_t j = 0; j < N; ++j) r(i, j) += vik * std::conj(es.vectors(j, k));
        }
    }
    return r;
}

/// exp(-i H t) for Hermitian H.
template <std::size_t N>
Matrix<N> expm_hermitian(Matrix<N> const& h, double t)
{
    if (t == 0.0) {
        require_hermitian(h, "expm_hermitian");
        return Matrix<N>::identity();
    }
    auto const es = hermitian_eig(h);
    return apply_spectral(es, [t](double lambda) { return std::exp(Complex{0.0, -lambda * t}); });
}

/// Solves A X = B by Gaussian elimination with partial pivoting.
template <std::size_t N>
Matrix<N> solve(Matrix<N> a, Matrix<N> b)
{
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) == 0.0) {
            throw std::domain_error("solve: singular matrix");
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < N; ++j) {
                std::swap(a(col, j), a(pivot, j));
                std::swap(b(col, j), b(pivot, j));
            }
        }
        Complex const inv = 1.0 / a(col, col);
        for (std::size_t r = col + 1; r < N; ++r) {
            Complex const f = a(r, col) * inv;
            if (f == Complex{}) continue;
            for (std::size_t j = col; j < N; ++j) a(r, j) -= f * a(col, j);
            for (std::size_t j = 0; j < N; ++j) b(r, j) -= f * b(col, j);
        }
    }
    for (std::size_t ri = N; ri-- > 0;) {
        Complex const inv = 1.0 / a(ri, ri);
        for (std::size_t j = 0; j < N; ++j) {
            Complex s = b(ri, j);
            for (std::size_t k = ri + 1; k < N; ++k) s -= a(ri, k) * b(k, j);
            b(ri, j) = s * inv;
        }
    }
    return b;
}

namespace detail
{

inline constexpr int pade_degree = 8;

// c_k = (2q-k)! q! / ((2q)! k! (q-k)!)
inline std::array<double, pade_degree + 1> pade_coefficients()
{
    std::array<double, pade_degree + 1> c{};
    c[0] = 1.0;
    constexpr int q = pade_degree;
    for (int k = 1; k <= q; ++k) {
        c[k] = c[k - 1] * double(q - k + 1) / double(k * (2 * q - k + 1));
    }
    return c;
}

}  // namespace detail

/// e^M by scaling and squaring around a diagonal [8/8] Pade approximant.
/// s = max(0, ceil(log2 ||M||_1)) halvings bring the norm to at most 1.
template <std::size_t N>
Matrix<N> expm_general(Matrix<N> const& m)
{
    if (!m.is_finite()) {
        throw std::invalid_argument("expm_general: matrix has non-finite entries");
    }
    double const norm = one_norm(m);
    int const squarings = norm > 1.0 ? static_cast<int>(std::ceil(std::log2(norm))) : 0;
    Matrix<N> const x = m * Complex{std::ldexp(1.0, -squarings)};

    static auto const c = detail::pade_coefficients();
    Matrix<N> const id = Matrix<N>::identity();

    // Horner for P(X) = sum c_k X^k and Q(X) = P(-X).
    Matrix<N> p = id * Complex{c[detail::pade_degree]};
    Matrix<N> q = p;
    for (int k = detail::pade_degree - 1; k >= 0; --k) {
        p = x * p + id * Complex{c[k]};
        q = (-x) * q + id * Complex{c[k]};
    }
    Matrix<N> r = solve(q, p);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

}  // namespace peit
