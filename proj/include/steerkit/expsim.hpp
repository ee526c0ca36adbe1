#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "steerkit/mesh.hpp"
#include "steerkit/qmat.hpp"
#include "steerkit/states.hpp"
#include "steerkit/steering.hpp"

namespace steerkit {

/// Tomography outcome tokens, in storage order.
enum class Outcome : int { X0 = 0, X1, Y0, Y1, Z0, Z1 };
constexpr int kOutcomes = 6;

const char* outcome_token(int idx);                  ///< "X0" .. "Z1"
std::optional<int> outcome_index(const std::string&); ///< inverse of outcome_token

/// Normalized single-qubit outcome state |X_m>, |Y_n>, |Z_l>.
const ComplexMatrix& outcome_projector(int idx);

enum class FrameKind { Entangled, PurePart, Isotropic };

struct Frame {
    FrameKind kind;
    int alice_outcome = -1; ///< index into outcomes, or -1
    int bob_outcome = -1;
    double flux;            ///< relative photon yield per exposure
};

/// 43 frames: 1 entangled marker, 6 pure-part (|0> x outcome), 36 isotropic
/// (outcome x outcome). Fluxes (1, 1, 1/2) make the flux-weighted average of
/// the exact sampling probabilities reproduce the targeted family state.
struct HologramPool {
    std::vector<Frame> frames;

    static const HologramPool& standard();
    /// Two-qubit state realized by one frame (|Psi+><Psi+| for the marker).
    ComplexMatrix frame_state(int index) const;
};

struct SamplerConfig {
    double p_ipt = 0.36875;
    double r_ipt = 0.95;
    double alpha = 1.106;     ///< entangled/product generation imbalance
    int frames = 800;
    double exposure_s = 0.02;
    double accumulation_s = 20.0;
    std::uint64_t seed = 0;
    /// Optional 6x6 row-stochastic outcome confusion matrix (both sides);
    /// empty = identity.
    std::vector<std::array<double, kOutcomes>> crosstalk;

    void validate() const;
};

struct SamplerProbabilities {
    double p_e; ///< entangled frame
    double p_s; ///< each of the 6 pure-part frames
    double p_i; ///< each of the 36 isotropic frames
    bool degenerate = false; ///< p = 1: the product pool is empty
};

/// Appendix-level sampling rule: p_e = p/[(1-p)(2-r)+p]; the pure-part
/// selection fraction is r/(2-r), which reproduces the stated pure:isotropic
/// count ratio r/[2(1-r)]. p_e + 6 p_s + 36 p_i = 1.
SamplerProbabilities sampler_probabilities(double p, double r);

struct AnimationSpec {
    std::vector<int> frame_indices; ///< values in [0, 42]
    std::array<double, 3> class_frequency{}; ///< entangled, pure-part, isotropic
};

/// Four-generator sampling chain; deterministic for a fixed seed.
AnimationSpec sample_animation(const SamplerConfig& cfg);

/// Flux-weighted average over exact class probabilities; equals
/// family_state(p, r) entrywise (the pool's defining identity).
DensityMatrix effective_state(double p, double r);

/// Flux-weighted average over the sampled frames.
DensityMatrix effective_state_of(const AnimationSpec& animation, const HologramPool& pool);

struct CountsTable {
    std::array<std::array<std::uint64_t, kOutcomes>, kOutcomes> counts{}; ///< [alice][bob]
    double duration_s = 0.0;
    std::uint64_t total = 0;

    void recompute_total();
};

/// Poissonian coincidence counts over the 36 joint outcome projectors with
/// equal dwell per setting. The generation imbalance alpha shifts the
/// realized state to family(alpha*p, r/alpha) (clamped), the configured
/// parameter map of the apparatus. Deterministic per seed.
CountsTable simulate_counts(const AnimationSpec* animation, const HologramPool& pool,
                            const SamplerConfig& cfg, double rate_hz, double efficiency,
                            std::uint64_t seed);

/// Least-squares Pauli reconstruction from the 36 outcome counts; Hermitian,
/// unit trace, possibly non-PSD.
ComplexMatrix tomo_linear_inversion(const CountsTable& counts);

/// Closest PSD unit-trace matrix in Frobenius distance (eigenvalue
/// water-filling clip).
DensityMatrix project_to_physical(const ComplexMatrix& h);

struct BootstrapResult {
    double sigma_p = 0.0;
    double sigma_r = 0.0;
    std::vector<RetrievedParams> per_resample;
};

/// Poisson-resamples each cell and reruns inversion -> projection ->
/// retrieval; sigmas are sample standard deviations.
BootstrapResult bootstrap(const CountsTable& counts, int variations, std::uint64_t seed,
                          unsigned threads = 0);

struct TomographyResult {
    DensityMatrix rho_hat;
    double fidelity_to_target = 0.0;
    RetrievedParams retrieved;
    double bootstrap_sigma_p = 0.0;
    double bootstrap_sigma_r = 0.0;
};

struct ExperimentReport {
    SamplerConfig config;
    double p_cfg = 0.0, r_cfg = 0.0; ///< alpha-adjusted targets
    int bootstrap_variations = 0;
    CountsTable counts;
    TomographyResult tomography;
    Verdict verdict;
    RadiusBracket bracket_ab;
    RadiusBracket bracket_ba;
};

/// Configured targets p_cfg = alpha * p_ipt, r_cfg = r_ipt / alpha, clamped
/// into [0, 1].
std::pair<double, double> configured_params(const SamplerConfig& cfg);

/// End-to-end pipeline: animation -> counts -> reconstruction -> fidelity to
/// family(p_cfg, r_cfg) -> retrieval + bootstrap -> classification + brackets.
ExperimentReport run_experiment(const SamplerConfig& cfg, double rate_hz, double efficiency,
                                const DirectionMesh& mesh, int bootstrap_variations = 20,
                                int bisection_steps = 20, unsigned threads = 0);

} // namespace steerkit
