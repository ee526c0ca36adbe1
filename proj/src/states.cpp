#include "steerkit/states.hpp"

#include <algorithm>
#include <cmath>

namespace steerkit {

DensityMatrix family_state(const FamilyParams& params) {
    const double p = params.p, r = params.r;
    ComplexMatrix rho_r(2);
    rho_r(0, 0) = 0.5 * (1.0 + r);
    rho_r(1, 1) = 0.5 * (1.0 - r);
    ComplexMatrix half_id(2);
    half_id(0, 0) = half_id(1, 1) = 0.5;

    ComplexMatrix m = p * singlet_projector() + (1.0 - p) * tensor(rho_r, half_id);
    return DensityMatrix(std::move(m));
}

ComplexMatrix depolarize_alice_raw(const ComplexMatrix& rho, double x) {
    if (rho.dim() != 4) throw DimensionMismatch("depolarize_alice: expected 4x4 input");
    const ComplexMatrix rho_b = partial_trace_raw(rho, Side::A);
    ComplexMatrix half_id(2);
    half_id(0, 0) = half_id(1, 1) = 0.5;
    return x * rho + (1.0 - x) * tensor(half_id, rho_b);
}

DepolarizeResult depolarize_alice(const DensityMatrix& rho, double x) {
    if (x < 0.0) throw ParamOutOfRange("depolarize_alice: x must be nonnegative");
    ComplexMatrix out = depolarize_alice_raw(rho.mat(), x);
    const bool psd = min_eigenvalue(out) >= -1e-10;
    return {std::move(out), psd};
}

RetrievedParams retrieve_params(const ComplexMatrix& rho) {
    if (rho.dim() != 4) throw DimensionMismatch("retrieve_params: expected 4x4 input");

    ComplexMatrix quarter_id = ComplexMatrix::identity(4);
    quarter_id *= 0.25;
    const ComplexMatrix m1 = singlet_projector() - quarter_id;
    ComplexMatrix p0_half(4);
    p0_half(0, 0) = p0_half(1, 1) = 0.5;
    const ComplexMatrix m2 = p0_half - quarter_id;

    const ComplexMatrix d = rho - quarter_id;
    // <M1,M1> = 3/4, <M2,M2> = 1/4, <M1,M2> = 0
    double p = hs_inner(d, m1) / 0.75;
    double q = hs_inner(d, m2) / 0.25;

    RetrievedParams out;
    const double p_clamped = std::clamp(p, 0.0, 1.0);
    out.clamped = (p != p_clamped);
    p = p_clamped;
    if (p >= 1.0 - 1e-9) {
        out.degenerate_r = true;
        out.p = p;
        out.r = 0.0;
    } else {
        double r = q / (1.0 - p);
        const double r_clamped = std::clamp(r, 0.0, 1.0);
        out.clamped = out.clamped || (r != r_clamped);
        out.p = p;
        out.r = r_clamped;
    }
    const DensityMatrix recon = family_state(FamilyParams(out.p, out.r));
    out.residual = (rho - recon.mat()).frobenius_norm();
    return out;
}

SeparabilityResult is_separable_ppt(const DensityMatrix& rho) {
    const double lam = min_eigenvalue(partial_transpose(rho.mat(), Side::B));
    return {lam >= -1e-10, lam};
}

DensityMatrix theta_state(const ThetaFamilyParams& params) {
    const double c = std::cos(params.theta), s = std::sin(params.theta);
    ComplexMatrix proj(4);
    proj(0, 0) = c * c;
    proj(0, 3) = proj(3, 0) = c * s;
    proj(3, 3) = s * s;

    ComplexMatrix rho_b(2);
    rho_b(0, 0) = c * c;
    rho_b(1, 1) = s * s;
    ComplexMatrix half_id(2);
    half_id(0, 0) = half_id(1, 1) = 0.5;

    ComplexMatrix m = params.p * proj + (1.0 - params.p) * tensor(half_id, rho_b);
    return DensityMatrix(std::move(m));
}

bool bowles_one_way_predicate(const ThetaFamilyParams& params) {
    const double p = params.p;
    if (!(p > 0.5)) return false;
    const double c2 = std::cos(2.0 * params.theta);
    const double lhs = c2 * c2;
    const double rhs = (2.0 * p - 1.0) / ((2.0 - p) * p * p * p);
    return lhs >= rhs;
}

} // namespace steerkit
