#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "steerkit/errors.hpp"

namespace steerkit {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

/// Dense row-major complex matrix; the workhorse for 2x2 and 4x4 operators.
class ComplexMatrix {
public:
    ComplexMatrix() : dim_(0) {}
    explicit ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, cplx{0.0, 0.0}) {}
    ComplexMatrix(std::size_t dim, std::initializer_list<cplx> vals) : dim_(dim), entries_(vals) {
        if (entries_.size() != dim * dim)
            throw DimensionMismatch("ComplexMatrix: initializer size does not match dim^2");
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return dim_; }

    cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

    const std::vector<cplx>& entries() const { return entries_; }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    ComplexMatrix dagger() const {
        ComplexMatrix r(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    /// max_ij |A_ij - A_ji^*|
    double hermiticity_defect() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return worst;
    }

    bool is_hermitian(double tol) const { return hermiticity_defect() <= tol; }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        check_same_dim(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        check_same_dim(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
        return *this;
    }
    ComplexMatrix& operator*=(cplx s) {
        for (auto& e : entries_) e *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        a.check_same_dim(b);
        ComplexMatrix r(a.dim_);
        for (std::size_t i = 0; i < a.dim_; ++i)
            for (std::size_t k = 0; k < a.dim_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{0.0, 0.0}) continue;
                for (std::size_t j = 0; j < a.dim_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& e : entries_) s += std::norm(e);
        return std::sqrt(s);
    }

    double max_abs_diff(const ComplexMatrix& o) const {
        check_same_dim(o);
        double worst = 0.0;
        for (std::size_t i = 0; i < entries_.size(); ++i)
            worst = std::max(worst, std::abs(entries_[i] - o.entries_[i]));
        return worst;
    }

private:
    void check_same_dim(const ComplexMatrix& o) const {
        if (dim_ != o.dim_) throw DimensionMismatch("ComplexMatrix: dimension mismatch");
    }

    std::size_t dim_;
    std::vector<cplx> entries_;
};

/// Re(tr(A^dagger B)), the Hilbert-Schmidt inner product for Hermitian operands.
inline double hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("hs_inner: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            s += std::real(std::conj(a(i, j)) * b(i, j));
    return s;
}

inline const ComplexMatrix& pauli_x() {
    static const ComplexMatrix m(2, {cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)});
    return m;
}
inline const ComplexMatrix& pauli_y() {
    static const ComplexMatrix m(2, {cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0)});
    return m;
}
inline const ComplexMatrix& pauli_z() {
    static const ComplexMatrix m(2, {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(-1, 0)});
    return m;
}
inline const ComplexMatrix& pauli(int i) {
    switch (i) {
        case 0: return pauli_x();
        case 1: return pauli_y();
        default: return pauli_z();
    }
}

/// (I + v . sigma)/2 : rank-1 projector onto the +1 eigenstate of v.sigma for unit v.
inline ComplexMatrix bloch_projector(const Vec3& v) {
    ComplexMatrix m = ComplexMatrix::identity(2);
    m += v[0] * pauli_x() + v[1] * pauli_y() + v[2] * pauli_z();
    m *= 0.5;
    return m;
}

} // namespace steerkit
