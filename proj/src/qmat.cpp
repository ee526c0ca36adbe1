#include "steerkit/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace steerkit {

namespace {

constexpr double kHermTol = 1e-9;

// One complex Jacobi rotation zeroing H(p,q). Accumulates the unitary into V.
// The rotation is the phase twist that makes H(p,q) real followed by the
// classical symmetric Givens rotation (Golub & Van Loan sym.schur2).
void jacobi_rotate(ComplexMatrix& h, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const cplx hpq = h(p, q);
    const double habs = std::abs(hpq);
    if (habs == 0.0) return;
    const cplx phase = hpq / habs; // e^{i phi}

    const double app = std::real(h(p, p));
    const double aqq = std::real(h(q, q));
    const double theta = (aqq - app) / (2.0 * habs);
    // root of t^2 - 2*theta*t - 1 = 0 with the smaller magnitude
    const double t = (theta >= 0.0) ? -1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                    : 1.0 / (-theta + std::sqrt(1.0 + theta * theta));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    // Combined unitary acts on columns p,q as
    //   col_p' =  c*col_p + s*conj(phase)*col_q
    //   col_q' = -s*phase*col_p + c*col_q
    const std::size_t n = h.dim();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx hip = h(i, p), hiq = h(i, q);
        h(i, p) = c * hip + s * std::conj(phase) * hiq;
        h(i, q) = -s * phase * hip + c * hiq;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const cplx hpj = h(p, j), hqj = h(q, j);
        h(p, j) = c * hpj + s * phase * hqj;
        h(q, j) = -s * std::conj(phase) * hpj + c * hqj;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const cplx vip = v(i, p), viq = v(i, q);
        v(i, p) = c * vip + s * std::conj(phase) * viq;
        v(i, q) = -s * phase * vip + c * viq;
    }
}

double offdiag_norm(const ComplexMatrix& h) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.dim(); ++i)
        for (std::size_t j = 0; j < h.dim(); ++j)
            if (i != j) s += std::norm(h(i, j));
    return std::sqrt(s);
}

} // namespace

EigResult hermitian_eig(const ComplexMatrix& m) {
    if (!m.is_hermitian(kHermTol))
        throw NonHermitianInput("hermitian_eig: input exceeds Hermiticity tolerance");

    const std::size_t n = m.dim();
    // Symmetrize so the iteration works on an exactly Hermitian matrix.
    ComplexMatrix h(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double scale = std::max(h.frobenius_norm(), 1e-300);
    for (int sweep = 0; sweep < 80; ++sweep) {
        if (offdiag_norm(h) <= 1e-15 * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                if (std::abs(h(p, q)) > 1e-18 * scale) jacobi_rotate(h, v, p, q);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::real(h(a, a)) > std::real(h(b, b)); });

    EigResult res;
    res.eigenvalues.resize(n);
    res.eigenvectors = ComplexMatrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        res.eigenvalues[k] = std::real(h(order[k], order[k]));
        for (std::size_t i = 0; i < n; ++i) res.eigenvectors(i, k) = v(i, order[k]);
    }
    return res;
}

DensityMatrix::DensityMatrix(ComplexMatrix mat, double tolerance) : mat_(std::move(mat)), tol_(tolerance) {
    if (tol_ < 0.0) throw ParamOutOfRange("DensityMatrix: negative tolerance");
    if (mat_.dim() != 2 && mat_.dim() != 4)
        throw DimensionMismatch("DensityMatrix: only 2x2 and 4x4 states supported");
    if (mat_.hermiticity_defect() > tol_)
        throw NonHermitianInput("DensityMatrix: Hermiticity defect exceeds tolerance");
    const cplx tr = mat_.trace();
    if (std::abs(std::real(tr) - 1.0) > tol_ || std::abs(std::imag(tr)) > tol_)
        throw InvalidState("DensityMatrix: trace differs from 1 beyond tolerance");
    const auto eig = hermitian_eig(mat_);
    if (eig.eigenvalues.back() < -tol_)
        throw InvalidState("DensityMatrix: negative eigenvalue beyond tolerance");
}

ComplexMatrix tensor(const ComplexMatrix& x, const ComplexMatrix& y) {
    const std::size_t dx = x.dim(), dy = y.dim();
    ComplexMatrix r(dx * dy);
    for (std::size_t i = 0; i < dx; ++i)
        for (std::size_t j = 0; j < dx; ++j) {
            const cplx xij = x(i, j);
            if (xij == cplx{0.0, 0.0}) continue;
            for (std::size_t k = 0; k < dy; ++k)
                for (std::size_t l = 0; l < dy; ++l)
                    r(i * dy + k, j * dy + l) = xij * y(k, l);
        }
    return r;
}

ComplexMatrix partial_trace_raw(const ComplexMatrix& rho, Side traced_out) {
    if (rho.dim() != 4) throw DimensionMismatch("partial_trace: expected 4x4 input");
    ComplexMatrix r(2);
    if (traced_out == Side::A) {
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                r(i, j) = rho(0 * 2 + i, 0 * 2 + j) + rho(1 * 2 + i, 1 * 2 + j);
    } else {
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                r(i, j) = rho(i * 2 + 0, j * 2 + 0) + rho(i * 2 + 1, j * 2 + 1);
    }
    return r;
}

DensityMatrix partial_trace(const DensityMatrix& rho, Side traced_out) {
    return DensityMatrix(partial_trace_raw(rho.mat(), traced_out),
                         std::max(rho.tolerance(), 1e-12));
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, Side side) {
    if (rho.dim() != 4) throw DimensionMismatch("partial_transpose: expected 4x4 input");
    ComplexMatrix r(4);
    for (std::size_t ia = 0; ia < 2; ++ia)
        for (std::size_t ib = 0; ib < 2; ++ib)
            for (std::size_t ja = 0; ja < 2; ++ja)
                for (std::size_t jb = 0; jb < 2; ++jb) {
                    if (side == Side::A)
                        r(ia * 2 + ib, ja * 2 + jb) = rho(ja * 2 + ib, ia * 2 + jb);
                    else
                        r(ia * 2 + ib, ja * 2 + jb) = rho(ia * 2 + jb, ja * 2 + ib);
                }
    return r;
}

namespace {

// Eigenvalue-clipped matrix square root; tomography outputs sit on the PSD
// boundary, so small negative eigenvalues are zeroed rather than rejected.
ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    const auto eig = hermitian_eig(m);
    const std::size_t n = m.dim();
    ComplexMatrix r(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = std::max(eig.eigenvalues[k], 0.0);
        const double s = std::sqrt(lam);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                r(i, j) += s * eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k));
    }
    return r;
}

} // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& rho0) {
    if (rho.dim() != rho0.dim()) throw DimensionMismatch("fidelity: dimension mismatch");
    const ComplexMatrix s = psd_sqrt(rho.mat());
    const ComplexMatrix inner = s * rho0.mat() * s;
    const auto eig = hermitian_eig(inner);
    double t = 0.0;
    for (double lam : eig.eigenvalues) t += std::sqrt(std::max(lam, 0.0));
    const double f = t * t;
    return std::clamp(f, 0.0, 1.0);
}

ComplexMatrix swap_parties_raw(const ComplexMatrix& rho) {
    if (rho.dim() != 4) throw DimensionMismatch("swap_parties: expected 4x4 input");
    static const std::size_t perm[4] = {0, 2, 1, 3};
    ComplexMatrix r(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) r(i, j) = rho(perm[i], perm[j]);
    return r;
}

DensityMatrix swap_parties(const DensityMatrix& rho) {
    return DensityMatrix(swap_parties_raw(rho.mat()), rho.tolerance());
}

BlochRep bloch_decompose(const ComplexMatrix& rho) {
    if (rho.dim() != 4) throw DimensionMismatch("bloch_decompose: expected 4x4 input");
    BlochRep rep;
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    for (int i = 0; i < 3; ++i) {
        rep.a[i] = std::real((tensor(pauli(i), id2) * rho).trace());
        rep.b[i] = std::real((tensor(id2, pauli(i)) * rho).trace());
        for (int j = 0; j < 3; ++j)
            rep.T[i][j] = std::real((tensor(pauli(i), pauli(j)) * rho).trace());
    }
    return rep;
}

ComplexMatrix bloch_assemble(const BlochRep& rep) {
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    ComplexMatrix r = tensor(id2, id2);
    for (int i = 0; i < 3; ++i) {
        r += rep.a[i] * tensor(pauli(i), id2);
        r += rep.b[i] * tensor(id2, pauli(i));
        for (int j = 0; j < 3; ++j) r += rep.T[i][j] * tensor(pauli(i), pauli(j));
    }
    r *= 0.25;
    return r;
}

double min_eigenvalue(const ComplexMatrix& m) {
    return hermitian_eig(m).eigenvalues.back();
}

const ComplexMatrix& singlet_projector() {
    static const ComplexMatrix psi = [] {
        ComplexMatrix m(4);
        m(1, 1) = m(1, 2) = m(2, 1) = m(2, 2) = 0.5;
        return m;
    }();
    return psi;
}

} // namespace steerkit
