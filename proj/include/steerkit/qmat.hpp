#pragma once

#include <utility>
#include <vector>

#include "steerkit/complex_matrix.hpp"

namespace steerkit {

struct EigResult {
    std::vector<double> eigenvalues; ///< sorted descending
    ComplexMatrix eigenvectors;      ///< columns, orthonormal
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Throws NonHermitianInput if the symmetry defect exceeds 1e-9.
EigResult hermitian_eig(const ComplexMatrix& m);

/// Hermitian, positive-semidefinite, unit-trace matrix with validation slack.
class DensityMatrix {
public:
    static constexpr double kDefaultTolerance = 1e-9;

    explicit DensityMatrix(ComplexMatrix mat, double tolerance = kDefaultTolerance);

    const ComplexMatrix& mat() const { return mat_; }
    double tolerance() const { return tol_; }
    std::size_t dim() const { return mat_.dim(); }

private:
    ComplexMatrix mat_;
    double tol_;
};

struct BlochRep {
    Vec3 a{};                            ///< Alice local vector
    Vec3 b{};                            ///< Bob local vector
    std::array<std::array<double, 3>, 3> T{}; ///< correlation matrix
};

enum class Side { A, B };

/// Kronecker product; dim = dim(x) * dim(y).
ComplexMatrix tensor(const ComplexMatrix& x, const ComplexMatrix& y);

/// Trace out one party of a 4x4 two-qubit operator (basis order 00,01,10,11).
ComplexMatrix partial_trace_raw(const ComplexMatrix& rho, Side traced_out);
DensityMatrix partial_trace(const DensityMatrix& rho, Side traced_out);

/// Transpose the indices of one party; Hermitian in, Hermitian out, involutive.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, Side side);

/// Uhlmann fidelity [tr sqrt(sqrt(rho) rho0 sqrt(rho))]^2, negative eigenvalues
/// clipped to zero before the square roots.
double fidelity(const DensityMatrix& rho, const DensityMatrix& rho0);

/// Conjugation by the SWAP permutation (00,01,10,11 -> 00,10,01,11).
ComplexMatrix swap_parties_raw(const ComplexMatrix& rho);
DensityMatrix swap_parties(const DensityMatrix& rho);

/// a_i = tr(rho sigma_i x I), b_j = tr(rho I x sigma_j), T_ij = tr(rho sigma_i x sigma_j).
BlochRep bloch_decompose(const ComplexMatrix& rho);

/// (1/4)(IxI + a.sigma x I + I x b.sigma + sum_ij T_ij sigma_i x sigma_j)
ComplexMatrix bloch_assemble(const BlochRep& rep);

/// Minimum eigenvalue of a Hermitian matrix (convenience over hermitian_eig).
double min_eigenvalue(const ComplexMatrix& m);

/// |Psi+> = (|01> + |10>)/sqrt(2), as a 4x4 projector.
const ComplexMatrix& singlet_projector();

} // namespace steerkit
