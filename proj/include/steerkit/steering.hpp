#pragma once

#include <optional>
#include <vector>

#include "steerkit/lp.hpp"
#include "steerkit/mesh.hpp"
#include "steerkit/qmat.hpp"
#include "steerkit/states.hpp"

namespace steerkit {

/// Bob-side conditional blocks sigma_{a|k} induced by Alice's measurement
/// axes; the object an LHS model has to reproduce.
struct Assemblage {
    std::vector<ComplexMatrix> plus;  ///< sigma_{+|k}, 2x2 Hermitian
    std::vector<ComplexMatrix> minus; ///< sigma_{-|k}
    bool source_state_psd = true;

    std::size_t settings() const { return plus.size(); }
    ComplexMatrix total() const { return plus.at(0) + minus.at(0); }
};

/// sigma_{+-|k} = Tr_A[(Pi_{+-n_k} x I) chi]. For steering_party B the input
/// is swapped first. chi must be Hermitian with unit trace; PSD not required.
Assemblage make_assemblage(const ComplexMatrix& chi, const DirectionMesh& mesh, Side steering_party);

struct LhsColumn {
    std::uint32_t strategy; ///< bit k set = answer "+" for setting k
    Vec3 bloch;             ///< hidden pure state
    double weight;          ///< >= 0
};

struct LhsModel {
    std::vector<LhsColumn> columns;
    double residual = 0.0; ///< max entrywise reconstruction error
};

struct SteeringCertificate {
    std::vector<ComplexMatrix> f_plus;  ///< F_{+|k}
    std::vector<ComplexMatrix> f_minus; ///< F_{-|k}
    double lhs_bound = 0.0;  ///< max over 2^N strategies of lambda_max(sum_k F)
    double violation = 0.0;  ///< sum_{a,k} tr(F_{a|k} sigma_{a|k})
    double margin = 0.0;     ///< violation - lhs_bound
};

struct LhsFeasibility {
    bool feasible = false;
    std::optional<LhsModel> model;            ///< set when feasible
    std::optional<SteeringCertificate> certificate; ///< set when infeasible and verified
    double phase1_objective = 0.0;
    int lp_iterations = 0;
};

/// Solves the LHS feasibility LP with exact pricing over all 2^N strategies.
/// Throws IterationLimit when the solver cannot decide; never returns an
/// unverified certificate in either direction.
LhsFeasibility lhs_feasible(const Assemblage& asm_, double tol = 1e-9);

/// Steering inequality from the Farkas dual, re-verified by direct evaluation
/// (exhaustive strategy enumeration with the closed-form lambda_max).
/// Returns nullopt when the assemblage is LHS-feasible or the margin check
/// fails; throws IterationLimit when undecided.
std::optional<SteeringCertificate> steering_certificate(const Assemblage& asm_);

/// Max entrywise error of the model's reconstruction of the assemblage.
double lhs_model_residual(const LhsModel& model, const Assemblage& asm_);

/// Recomputes the model residual from scratch; true iff weights >= 0,
/// Bloch norms <= 1 + 1e-12 and the reconstruction matches within tol.
bool verify_lhs_model(const LhsModel& model, const Assemblage& asm_, double tol = 1e-8);

/// Recomputes lhs_bound and violation from scratch; true iff margin >= 1e-9.
bool verify_certificate(const SteeringCertificate& cert, const Assemblage& asm_);

enum class SteerDirection { AtoB, BtoA };

struct RadiusBracket {
    SteerDirection direction = SteerDirection::AtoB;
    double lo = 0.0;                 ///< eta * largest LHS-feasible x
    std::optional<double> hi;        ///< smallest steering-certified x; nullopt = +inf
    int mesh_size = 0;
    double eta = 0.0;
    std::optional<LhsModel> lo_certificate;
    std::optional<SteeringCertificate> hi_certificate;
    double lo_probe_x = 0.0;         ///< largest feasible depolarization tested
    bool indeterminate_probes = false;
};

/// Two-sided bracket of the critical radius by bisection over x in [0, 1/eta].
/// Soundness: lo <= R <= hi via the polytope-lifting theorem on the feasible
/// side and finite-measurement steering on the certified side.
RadiusBracket critical_radius_bracket(const DensityMatrix& rho, SteerDirection direction,
                                      const DirectionMesh& mesh, int bisection_steps = 20,
                                      double tol = 1e-9);

enum class CertStatus { CertifiedSteerable, CertifiedUnsteerable, Indeterminate };

enum class VerdictLabel {
    Separable,
    TwoWayUnsteerable,
    OneWayAToB,
    OneWayBToA,
    TwoWaySteerable,
    Indeterminate
};

struct Verdict {
    CertStatus steerable_ab = CertStatus::Indeterminate;
    CertStatus steerable_ba = CertStatus::Indeterminate;
    VerdictLabel label = VerdictLabel::Indeterminate;
    double min_pt_eigenvalue = 0.0;
};

const char* to_string(CertStatus s);       ///< STEERABLE | UNSTEERABLE | INDETERMINATE
const char* to_string(VerdictLabel label); ///< SEPARABLE | ... | INDETERMINATE

/// PPT first; then per direction a steering certificate at x = 1 or an LHS
/// model at x = 1/eta. Indeterminate absorbs solver failures.
Verdict classify(const DensityMatrix& rho, const DirectionMesh& mesh, unsigned threads = 1);

struct RegionCell {
    double p = 0.0, r = 0.0;
    Verdict verdict;
};

/// classify(family_state(p, r)) at every grid point; deterministic, cells
/// evaluated in parallel with results in row-major (p outer, r inner) order.
std::vector<RegionCell> region_scan(const std::vector<double>& p_grid,
                                    const std::vector<double>& r_grid,
                                    const DirectionMesh& mesh, unsigned threads = 0);

} // namespace steerkit
