#pragma once

#include "steerkit/qmat.hpp"

namespace steerkit {

/// Two-parameter mixture of the singlet-like |Psi+> with a biased product state.
struct FamilyParams {
    double p; ///< entangled weight, in [0,1]
    double r; ///< Alice bias of rho_r, in [0,1]

    FamilyParams(double p_, double r_) : p(p_), r(r_) {
        if (!(p >= 0.0 && p <= 1.0 && r >= 0.0 && r <= 1.0))
            throw ParamOutOfRange("FamilyParams: p and r must lie in [0,1]");
    }
};

struct ThetaFamilyParams {
    double theta; ///< entanglement angle, in [0, pi/4]
    double p;     ///< mixing weight, in [0,1]

    ThetaFamilyParams(double theta_, double p_) : theta(theta_), p(p_) {
        constexpr double quarter_pi = 0.78539816339744830961;
        if (!(theta >= 0.0 && theta <= quarter_pi + 1e-15))
            throw ParamOutOfRange("ThetaFamilyParams: theta must lie in [0, pi/4]");
        if (!(p >= 0.0 && p <= 1.0))
            throw ParamOutOfRange("ThetaFamilyParams: p must lie in [0,1]");
    }
};

struct RetrievedParams {
    double p = 0.0;
    double r = 0.0;
    double residual = 0.0;          ///< Frobenius distance to the clamped family member
    bool clamped = false;           ///< least-squares solution left [0,1] and was clamped
    bool degenerate_r = false;      ///< p ~ 1, r undefined and reported as 0
};

/// rho = p |Psi+><Psi+| + (1-p) rho_r x I/2  with rho_r = (I + r sigma_z)/2.
DensityMatrix family_state(const FamilyParams& params);

struct DepolarizeResult {
    ComplexMatrix state; ///< Hermitian; may be non-PSD for x > 1
    bool psd;            ///< min eigenvalue >= -1e-10
};

/// rho^(x) = x rho + (1-x) (I_A/2 x rho_B); Bob marginal preserved exactly.
/// x > 1 is permitted and may leave the PSD cone.
DepolarizeResult depolarize_alice(const DensityMatrix& rho, double x);
ComplexMatrix depolarize_alice_raw(const ComplexMatrix& rho, double x);

/// Closest family member in Frobenius distance, via the orthogonal basis
/// M1 = Psi - I/4, M2 = |0><0| x I/2 - I/4 (Gram diag(3/4, 1/4)).
RetrievedParams retrieve_params(const ComplexMatrix& rho);

struct SeparabilityResult {
    bool separable;
    double min_pt_eigenvalue;
};

/// PPT criterion; exact for two qubits.
SeparabilityResult is_separable_ppt(const DensityMatrix& rho);

/// rho = p |theta><theta| + (1-p) (I_A/2) x rho_B, rho_B = Tr_A |theta><theta|,
/// |theta> = cos(theta)|00> + sin(theta)|11>.
DensityMatrix theta_state(const ThetaFamilyParams& params);

/// p > 1/2 and cos^2(2 theta) >= (2p-1)/[(2-p) p^3].
bool bowles_one_way_predicate(const ThetaFamilyParams& params);

} // namespace steerkit
