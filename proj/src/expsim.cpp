#include "steerkit/expsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "steerkit/parallel.hpp"
#include "steerkit/rng.hpp"

namespace steerkit {

namespace {

const std::array<const char*, kOutcomes> kTokens = {"X0", "X1", "Y0", "Y1", "Z0", "Z1"};

ComplexMatrix make_outcome_projector(int idx) {
    const double s = 1.0 / std::sqrt(2.0);
    cplx a0, a1;
    switch (idx) {
        case 0: a0 = s; a1 = s; break;            // |X0> = (|0>+|1>)/sqrt2
        case 1: a0 = s; a1 = -s; break;           // |X1>
        case 2: a0 = s; a1 = cplx(0, s); break;   // |Y0> = (|0>+i|1>)/sqrt2
        case 3: a0 = s; a1 = cplx(0, -s); break;  // |Y1>
        case 4: a0 = 1.0; a1 = 0.0; break;        // |Z0>
        default: a0 = 0.0; a1 = 1.0; break;       // |Z1>
    }
    ComplexMatrix m(2);
    m(0, 0) = a0 * std::conj(a0);
    m(0, 1) = a0 * std::conj(a1);
    m(1, 0) = a1 * std::conj(a0);
    m(1, 1) = a1 * std::conj(a1);
    return m;
}

} // namespace

const char* outcome_token(int idx) { return kTokens.at(static_cast<std::size_t>(idx)); }

std::optional<int> outcome_index(const std::string& token) {
    for (int i = 0; i < kOutcomes; ++i)
        if (token == kTokens[static_cast<std::size_t>(i)]) return i;
    return std::nullopt;
}

const ComplexMatrix& outcome_projector(int idx) {
    static const std::array<ComplexMatrix, kOutcomes> projs = [] {
        std::array<ComplexMatrix, kOutcomes> p;
        for (int i = 0; i < kOutcomes; ++i) p[static_cast<std::size_t>(i)] = make_outcome_projector(i);
        return p;
    }();
    return projs.at(static_cast<std::size_t>(idx));
}

const HologramPool& HologramPool::standard() {
    static const HologramPool pool = [] {
        HologramPool p;
        p.frames.push_back({FrameKind::Entangled, -1, -1, 1.0});
        for (int j = 0; j < kOutcomes; ++j)
            p.frames.push_back({FrameKind::PurePart, static_cast<int>(Outcome::Z0), j, 1.0});
        for (int i = 0; i < kOutcomes; ++i)
            for (int j = 0; j < kOutcomes; ++j)
                p.frames.push_back({FrameKind::Isotropic, i, j, 0.5});
        return p;
    }();
    return pool;
}

ComplexMatrix HologramPool::frame_state(int index) const {
    const Frame& f = frames.at(static_cast<std::size_t>(index));
    if (f.kind == FrameKind::Entangled) return singlet_projector();
    return tensor(outcome_projector(f.alice_outcome), outcome_projector(f.bob_outcome));
}

void SamplerConfig::validate() const {
    if (!(p_ipt >= 0.0 && p_ipt <= 1.0 && r_ipt >= 0.0 && r_ipt <= 1.0))
        throw ParamOutOfRange("SamplerConfig: p_ipt and r_ipt must lie in [0,1]");
    if (!(alpha > 0.0)) throw ParamOutOfRange("SamplerConfig: alpha must be positive");
    if (frames <= 0) throw ParamOutOfRange("SamplerConfig: frames must be positive");
    if (!(exposure_s > 0.0) || !(accumulation_s > 0.0))
        throw ParamOutOfRange("SamplerConfig: exposure and accumulation must be positive");
    if (!crosstalk.empty()) {
        if (crosstalk.size() != kOutcomes)
            throw ParamOutOfRange("SamplerConfig: crosstalk must be 6x6");
        for (const auto& row : crosstalk) {
            double s = 0.0;
            for (double v : row) {
                if (v < 0.0) throw ParamOutOfRange("SamplerConfig: crosstalk entries must be >= 0");
                s += v;
            }
            if (std::abs(s - 1.0) > 1e-9)
                throw ParamOutOfRange("SamplerConfig: crosstalk rows must sum to 1");
        }
    }
}

SamplerProbabilities sampler_probabilities(double p, double r) {
    if (!(p >= 0.0 && p <= 1.0 && r >= 0.0 && r <= 1.0))
        throw ParamOutOfRange("sampler_probabilities: p and r must lie in [0,1]");
    SamplerProbabilities out{};
    const double denom = (1.0 - p) * (2.0 - r) + p;
    out.p_e = p / denom;
    if (p >= 1.0) {
        out.p_e = 1.0;
        out.p_s = 0.0;
        out.p_i = 0.0;
        out.degenerate = true;
        return out;
    }
    const double p_p = 1.0 - out.p_e;
    const double sel = r / (2.0 - r); // pure-part selection fraction
    out.p_s = sel * p_p / 6.0;
    out.p_i = (1.0 - sel) * p_p / 36.0;
    return out;
}

AnimationSpec sample_animation(const SamplerConfig& cfg) {
    cfg.validate();
    const SamplerProbabilities pr = sampler_probabilities(cfg.p_ipt, cfg.r_ipt);
    const double sel = cfg.r_ipt / (2.0 - cfg.r_ipt);

    AnimationSpec spec;
    spec.frame_indices.reserve(static_cast<std::size_t>(cfg.frames));
    Rng rng = Rng(cfg.seed).fork(0xA11CE);
    std::array<std::uint64_t, 3> tally{0, 0, 0};
    for (int f = 0; f < cfg.frames; ++f) {
        const double l1 = rng.uniform();
        int idx;
        if (l1 <= pr.p_e) {
            idx = 0;
            ++tally[0];
        } else if (rng.uniform() <= sel) {
            idx = 1 + static_cast<int>(rng.uniform_below(6));
            ++tally[1];
        } else {
            idx = 7 + static_cast<int>(rng.uniform_below(36));
            ++tally[2];
        }
        spec.frame_indices.push_back(idx);
    }
    for (int c = 0; c < 3; ++c)
        spec.class_frequency[static_cast<std::size_t>(c)] =
            static_cast<double>(tally[static_cast<std::size_t>(c)]) / cfg.frames;
    return spec;
}

namespace {

/// Flux-weighted class decomposition of a frame mixture: total weights and
/// class-normalized average states for the pure-part and isotropic sectors.
struct ClassMix {
    double w_ent = 0.0, w_pure = 0.0, w_iso = 0.0;
    ComplexMatrix pure_avg;    ///< unit-trace, defaults to |0><0| x I/2
    ComplexMatrix iso_avg;     ///< unit-trace, defaults to I/4
};

ComplexMatrix ideal_pure_avg() {
    ComplexMatrix m(4);
    m(0, 0) = m(1, 1) = 0.5;
    return m;
}

ComplexMatrix ideal_iso_avg() {
    ComplexMatrix m = ComplexMatrix::identity(4);
    m *= 0.25;
    return m;
}

ClassMix exact_class_mix(double p, double r) {
    const SamplerProbabilities pr = sampler_probabilities(p, r);
    ClassMix mix;
    mix.w_ent = pr.p_e * 1.0;
    mix.w_pure = 6.0 * pr.p_s * 1.0;
    mix.w_iso = 36.0 * pr.p_i * 0.5;
    mix.pure_avg = ideal_pure_avg();
    mix.iso_avg = ideal_iso_avg();
    return mix;
}

ClassMix animation_class_mix(const AnimationSpec& animation, const HologramPool& pool) {
    if (animation.frame_indices.empty())
        throw EmptyAnimation("animation class mix: no frames");
    ClassMix mix;
    ComplexMatrix pure_sum(4), iso_sum(4);
    const double n = static_cast<double>(animation.frame_indices.size());
    for (int idx : animation.frame_indices) {
        const Frame& f = pool.frames.at(static_cast<std::size_t>(idx));
        const double w = f.flux / n;
        switch (f.kind) {
            case FrameKind::Entangled: mix.w_ent += w; break;
            case FrameKind::PurePart:
                mix.w_pure += w;
                pure_sum += w * pool.frame_state(idx);
                break;
            case FrameKind::Isotropic:
                mix.w_iso += w;
                iso_sum += w * pool.frame_state(idx);
                break;
        }
    }
    mix.pure_avg = mix.w_pure > 0.0 ? (1.0 / mix.w_pure) * pure_sum : ideal_pure_avg();
    mix.iso_avg = mix.w_iso > 0.0 ? (1.0 / mix.w_iso) * iso_sum : ideal_iso_avg();
    return mix;
}

ComplexMatrix mix_to_state(const ClassMix& mix) {
    const double total = mix.w_ent + mix.w_pure + mix.w_iso;
    if (!(total > 0.0)) throw EmptyAnimation("mix_to_state: zero total flux");
    ComplexMatrix m = (mix.w_ent / total) * singlet_projector();
    m += (mix.w_pure / total) * mix.pure_avg;
    m += (mix.w_iso / total) * mix.iso_avg;
    return m;
}

/// The generation imbalance realizes the configured-parameter map
/// p -> alpha p, r -> r/alpha on the class totals; the within-class frame
/// mixtures are untouched. alpha = 1 is the identity.
ClassMix apply_imbalance(ClassMix mix, double alpha) {
    const double total = mix.w_ent + mix.w_pure + mix.w_iso;
    if (!(total > 0.0)) return mix;
    const double p_hat = mix.w_ent / total;
    const double w_prod = mix.w_pure + mix.w_iso;
    if (w_prod <= 0.0) return mix; // no product light to rebalance against
    const double r_hat = mix.w_pure / w_prod;
    const double p_cfg = std::clamp(alpha * p_hat, 0.0, 1.0);
    const double r_cfg = std::clamp(r_hat / alpha, 0.0, 1.0);
    mix.w_ent = total * p_cfg;
    mix.w_pure = total * (1.0 - p_cfg) * r_cfg;
    mix.w_iso = total * (1.0 - p_cfg) * (1.0 - r_cfg);
    return mix;
}

} // namespace

DensityMatrix effective_state(double p, double r) {
    return DensityMatrix(mix_to_state(exact_class_mix(p, r)));
}

DensityMatrix effective_state_of(const AnimationSpec& animation, const HologramPool& pool) {
    return DensityMatrix(mix_to_state(animation_class_mix(animation, pool)));
}

void CountsTable::recompute_total() {
    total = 0;
    for (const auto& row : counts)
        for (std::uint64_t c : row) total += c;
}

CountsTable simulate_counts(const AnimationSpec* animation, const HologramPool& pool,
                            const SamplerConfig& cfg, double rate_hz, double efficiency,
                            std::uint64_t seed) {
    cfg.validate();
    if (!(rate_hz > 0.0)) throw InvalidRate("simulate_counts: rate must be positive");
    if (!(efficiency > 0.0 && efficiency <= 1.0))
        throw InvalidRate("simulate_counts: efficiency must lie in (0,1]");

    ClassMix mix = animation ? animation_class_mix(*animation, pool)
                             : exact_class_mix(cfg.p_ipt, cfg.r_ipt);
    mix = apply_imbalance(std::move(mix), cfg.alpha);
    const ComplexMatrix rho = mix_to_state(mix);

    std::array<std::array<double, kOutcomes>, kOutcomes> q{};
    for (int a = 0; a < kOutcomes; ++a)
        for (int b = 0; b < kOutcomes; ++b)
            q[a][b] = std::max(
                0.0, hs_inner(tensor(outcome_projector(a), outcome_projector(b)), rho));

    if (!cfg.crosstalk.empty()) {
        std::array<std::array<double, kOutcomes>, kOutcomes> qc{};
        for (int a = 0; a < kOutcomes; ++a)
            for (int b = 0; b < kOutcomes; ++b)
                for (int a2 = 0; a2 < kOutcomes; ++a2)
                    for (int b2 = 0; b2 < kOutcomes; ++b2)
                        qc[a2][b2] += cfg.crosstalk[a][a2] * cfg.crosstalk[b][b2] * q[a][b];
        q = qc;
    }

    CountsTable table;
    table.duration_s = cfg.accumulation_s;
    const double dwell = cfg.accumulation_s / 36.0;
    Rng base = Rng(seed).fork(0xC0137);
    for (int a = 0; a < kOutcomes; ++a)
        for (int b = 0; b < kOutcomes; ++b) {
            Rng cell = base.fork(static_cast<std::uint64_t>(a * kOutcomes + b));
            table.counts[a][b] = cell.poisson(rate_hz * efficiency * dwell * q[a][b]);
        }
    table.recompute_total();
    return table;
}

ComplexMatrix tomo_linear_inversion(const CountsTable& table) {
    if (table.total == 0) throw EmptyCounts("tomo_linear_inversion: no counts");

    // basis w = 0,1,2 (X,Y,Z); outcome index = 2w + bit
    double t_est[3][3] = {};
    double a_marg[3][3], b_marg[3][3];
    bool avail[3][3] = {};
    for (int wa = 0; wa < 3; ++wa)
        for (int wb = 0; wb < 3; ++wb) {
            double n[2][2];
            double s = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    n[i][j] = static_cast<double>(table.counts[2 * wa + i][2 * wb + j]);
                    s += n[i][j];
                }
            if (s <= 0.0) continue;
            avail[wa][wb] = true;
            t_est[wa][wb] = (n[0][0] - n[0][1] - n[1][0] + n[1][1]) / s;
            a_marg[wa][wb] = (n[0][0] + n[0][1] - n[1][0] - n[1][1]) / s;
            b_marg[wa][wb] = (n[0][0] - n[0][1] + n[1][0] - n[1][1]) / s;
        }

    BlochRep rep;
    for (int w = 0; w < 3; ++w) {
        double sa = 0.0, sb = 0.0;
        int ca = 0, cb = 0;
        for (int o = 0; o < 3; ++o) {
            if (avail[w][o]) { sa += a_marg[w][o]; ++ca; }
            if (avail[o][w]) { sb += b_marg[o][w]; ++cb; }
        }
        rep.a[w] = ca > 0 ? sa / ca : 0.0;
        rep.b[w] = cb > 0 ? sb / cb : 0.0;
        for (int o = 0; o < 3; ++o) rep.T[w][o] = t_est[w][o];
    }
    return bloch_assemble(rep);
}

DensityMatrix project_to_physical(const ComplexMatrix& h) {
    if (h.dim() != 4) throw DimensionMismatch("project_to_physical: expected 4x4 input");
    if (h.hermiticity_defect() > 1e-9)
        throw NonHermitianInput("project_to_physical: input not Hermitian");

    const EigResult eig = hermitian_eig(h);
    std::vector<double> lam = eig.eigenvalues;
    std::vector<bool> alive(lam.size(), true);

    // water-filling clip: zero the most negative eigenvalue, spread its mass
    // over the surviving ones, repeat
    for (;;) {
        int worst = -1;
        for (std::size_t i = 0; i < lam.size(); ++i)
            if (alive[i] && lam[i] < 0.0 && (worst < 0 || lam[i] < lam[static_cast<std::size_t>(worst)]))
                worst = static_cast<int>(i);
        if (worst < 0) break;
        const double mass = lam[static_cast<std::size_t>(worst)];
        lam[static_cast<std::size_t>(worst)] = 0.0;
        alive[static_cast<std::size_t>(worst)] = false;
        int remaining = 0;
        for (bool a : alive)
            if (a) ++remaining;
        if (remaining == 0) break;
        for (std::size_t i = 0; i < lam.size(); ++i)
            if (alive[i]) lam[i] += mass / remaining;
    }

    double s = 0.0;
    for (double v : lam) s += v;
    if (s > 0.0)
        for (double& v : lam) v /= s; // exact unit trace after clipping

    ComplexMatrix out(4);
    for (std::size_t k = 0; k < 4; ++k) {
        if (lam[k] == 0.0) continue;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                out(i, j) += lam[k] * eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k));
    }
    return DensityMatrix(std::move(out), 1e-8);
}

namespace {

RetrievedParams retrieve_from_counts(const CountsTable& table) {
    return retrieve_params(project_to_physical(tomo_linear_inversion(table)).mat());
}

} // namespace

BootstrapResult bootstrap(const CountsTable& table, int variations, std::uint64_t seed,
                          unsigned threads) {
    if (table.total == 0) throw EmptyCounts("bootstrap: no counts");
    if (variations < 2) throw ParamOutOfRange("bootstrap: need at least 2 variations");

    BootstrapResult out;
    out.per_resample.resize(static_cast<std::size_t>(variations));
    Rng base = Rng(seed).fork(0xB005);
    parallel_for(static_cast<std::size_t>(variations), threads, [&](std::size_t v) {
        Rng rng = base.fork(v);
        CountsTable resampled = table;
        for (int a = 0; a < kOutcomes; ++a)
            for (int b = 0; b < kOutcomes; ++b)
                resampled.counts[a][b] = rng.poisson(static_cast<double>(table.counts[a][b]));
        resampled.recompute_total();
        out.per_resample[v] = resampled.total > 0 ? retrieve_from_counts(resampled) : RetrievedParams{};
    });

    double mp = 0.0, mr = 0.0;
    for (const auto& r : out.per_resample) { mp += r.p; mr += r.r; }
    mp /= variations;
    mr /= variations;
    double vp = 0.0, vr = 0.0;
    for (const auto& r : out.per_resample) {
        vp += (r.p - mp) * (r.p - mp);
        vr += (r.r - mr) * (r.r - mr);
    }
    out.sigma_p = std::sqrt(vp / (variations - 1));
    out.sigma_r = std::sqrt(vr / (variations - 1));
    return out;
}

std::pair<double, double> configured_params(const SamplerConfig& cfg) {
    return {std::clamp(cfg.alpha * cfg.p_ipt, 0.0, 1.0),
            std::clamp(cfg.r_ipt / cfg.alpha, 0.0, 1.0)};
}

ExperimentReport run_experiment(const SamplerConfig& cfg, double rate_hz, double efficiency,
                                const DirectionMesh& mesh, int bootstrap_variations,
                                int bisection_steps, unsigned threads) {
    cfg.validate();
    const AnimationSpec animation = sample_animation(cfg);
    const CountsTable counts =
        simulate_counts(&animation, HologramPool::standard(), cfg, rate_hz, efficiency, cfg.seed);

    const auto [p_cfg, r_cfg] = configured_params(cfg);
    const DensityMatrix target = family_state(FamilyParams(p_cfg, r_cfg));

    DensityMatrix rho_hat = project_to_physical(tomo_linear_inversion(counts));
    const RetrievedParams retrieved = retrieve_params(rho_hat.mat());
    const BootstrapResult boot = bootstrap(counts, bootstrap_variations, cfg.seed, threads);

    ExperimentReport report{cfg,
                            p_cfg,
                            r_cfg,
                            bootstrap_variations,
                            counts,
                            TomographyResult{rho_hat, fidelity(rho_hat, target), retrieved,
                                             boot.sigma_p, boot.sigma_r},
                            classify(rho_hat, mesh, threads),
                            critical_radius_bracket(rho_hat, SteerDirection::AtoB, mesh, bisection_steps),
                            critical_radius_bracket(rho_hat, SteerDirection::BtoA, mesh, bisection_steps)};
    return report;
}

} // namespace steerkit
