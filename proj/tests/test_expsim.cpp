#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "steerkit/expsim.hpp"
#include "steerkit/rng.hpp"

using namespace steerkit;

TEST_CASE("outcome projectors decompose the maximally mixed state") {
    ComplexMatrix sum(2);
    for (int i = 0; i < kOutcomes; ++i) {
        const ComplexMatrix& p = outcome_projector(i);
        CHECK(std::abs(p.trace() - cplx(1.0)) < 1e-14); // normalized outcomes
        sum += p;
    }
    // (1/6) sum = I/2
    sum *= 1.0 / 6.0;
    ComplexMatrix half = ComplexMatrix::identity(2);
    half *= 0.5;
    CHECK(sum.max_abs_diff(half) < 1e-14);
}

TEST_CASE("hologram pool: 43 frames with the stated fluxes") {
    const HologramPool& pool = HologramPool::standard();
    REQUIRE(pool.frames.size() == 43);
    CHECK(pool.frames[0].kind == FrameKind::Entangled);
    CHECK(pool.frames[0].flux == 1.0);
    int pure = 0, iso = 0;
    for (const auto& f : pool.frames) {
        if (f.kind == FrameKind::PurePart) {
            CHECK(f.flux == 1.0);
            CHECK(f.alice_outcome == static_cast<int>(Outcome::Z0));
            ++pure;
        } else if (f.kind == FrameKind::Isotropic) {
            CHECK(f.flux == 0.5);
            ++iso;
        }
    }
    CHECK(pure == 6);
    CHECK(iso == 36);
    CHECK(pool.frame_state(0).max_abs_diff(singlet_projector()) == 0.0);
}

TEST_CASE("sampler_probabilities: degenerate, Table values, normalization") {
    const auto deg = sampler_probabilities(1.0, 0.3);
    CHECK(deg.degenerate);
    CHECK(deg.p_e == 1.0);
    CHECK(deg.p_s == 0.0);
    CHECK(deg.p_i == 0.0);

    // Table-style point, recomputed through the eta_e ratio form as an oracle
    const double p = 0.36875, r = 0.95;
    const auto pr = sampler_probabilities(p, r);
    const double eta_e = p / ((1.0 - p) * (r + 2.0 * (1.0 - r)));
    CHECK(pr.p_e == doctest::Approx(eta_e / (1.0 + eta_e)).epsilon(1e-14));
    CHECK(pr.p_e == doctest::Approx(0.3574678).epsilon(1e-6));
    CHECK(pr.p_s == doctest::Approx(0.0968898).epsilon(1e-5));
    CHECK(pr.p_i == doctest::Approx(0.0016998).epsilon(1e-4));
    CHECK(pr.p_e + 6.0 * pr.p_s + 36.0 * pr.p_i == doctest::Approx(1.0).epsilon(1e-14));
    // the paper's pure:isotropic count ratio r/[2(1-r)]
    CHECK((6.0 * pr.p_s) / (36.0 * pr.p_i) == doctest::Approx(r / (2.0 * (1.0 - r))).epsilon(1e-12));

    const auto r0 = sampler_probabilities(0.5, 0.0);
    CHECK(r0.p_s == 0.0);
    CHECK(r0.p_i > 0.0);

    // normalization across a grid
    for (double pp = 0.0; pp <= 0.999; pp += 0.1)
        for (double rr = 0.0; rr <= 1.0; rr += 0.1) {
            const auto g = sampler_probabilities(pp, rr);
            CHECK(g.p_e + 6.0 * g.p_s + 36.0 * g.p_i == doctest::Approx(1.0).epsilon(1e-13));
        }
}

TEST_CASE("sample_animation: degenerate, determinism, class frequencies") {
    SamplerConfig cfg;
    cfg.p_ipt = 1.0;
    cfg.frames = 800;
    const AnimationSpec all_ent = sample_animation(cfg);
    for (int idx : all_ent.frame_indices) CHECK(idx == 0);

    cfg.p_ipt = 0.36875;
    cfg.r_ipt = 0.95;
    cfg.seed = 12345;
    const AnimationSpec a1 = sample_animation(cfg);
    const AnimationSpec a2 = sample_animation(cfg);
    REQUIRE(a1.frame_indices.size() == a2.frame_indices.size());
    for (std::size_t i = 0; i < a1.frame_indices.size(); ++i)
        CHECK(a1.frame_indices[i] == a2.frame_indices[i]);

    // 1e5 frames: class frequencies within 4 multinomial sigma, plus a
    // chi-square goodness-of-fit at significance 1e-3 (df = 2 -> 13.8155)
    cfg.frames = 100000;
    cfg.seed = 777;
    const AnimationSpec big = sample_animation(cfg);
    const auto pr = sampler_probabilities(cfg.p_ipt, cfg.r_ipt);
    const double expect[3] = {pr.p_e, 6.0 * pr.p_s, 36.0 * pr.p_i};
    double chi2 = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double sigma = std::sqrt(expect[c] * (1.0 - expect[c]) / cfg.frames);
        CHECK(std::abs(big.class_frequency[c] - expect[c]) <= 4.0 * sigma);
        const double diff = big.class_frequency[c] * cfg.frames - expect[c] * cfg.frames;
        chi2 += diff * diff / (expect[c] * cfg.frames);
    }
    CHECK(chi2 < 13.8155);
}

TEST_CASE("effective_state identity with the family on a grid") {
    for (double p = 0.0; p <= 1.0; p += 0.05)
        for (double r = 0.0; r <= 1.0; r += 0.05)
            CHECK(effective_state(p, r).mat().max_abs_diff(
                      family_state(FamilyParams(p, r)).mat()) < 1e-12);

    // empirical animation converges toward the family state
    SamplerConfig cfg;
    cfg.p_ipt = 0.4;
    cfg.r_ipt = 0.8;
    cfg.frames = 200000;
    cfg.seed = 31337;
    const DensityMatrix emp = effective_state_of(sample_animation(cfg), HologramPool::standard());
    CHECK(emp.mat().max_abs_diff(family_state(FamilyParams(0.4, 0.8)).mat()) < 2e-2);
}

TEST_CASE("simulate_counts: isotropy, singlet anti-correlation, determinism") {
    SamplerConfig cfg;
    cfg.p_ipt = 0.0;
    cfg.r_ipt = 0.0;
    cfg.alpha = 1.0;
    cfg.seed = 5;
    // I/4: all 36 expected counts equal = rate*eff*dwell/4; at high rate every
    // cell sits within 6 Poisson sigmas of the common mean
    const CountsTable iso =
        simulate_counts(nullptr, HologramPool::standard(), cfg, 2.0e6, 0.172, cfg.seed);
    const double mean = 2.0e6 * 0.172 * (cfg.accumulation_s / 36.0) * 0.25;
    for (int a = 0; a < kOutcomes; ++a)
        for (int b = 0; b < kOutcomes; ++b)
            CHECK(std::abs(static_cast<double>(iso.counts[a][b]) - mean) <= 6.0 * std::sqrt(mean));

    // singlet: (Z0, Z0) has zero amplitude, so zero counts at any rate
    cfg.p_ipt = 1.0;
    const CountsTable sing =
        simulate_counts(nullptr, HologramPool::standard(), cfg, 1.0e6, 0.172, cfg.seed);
    const int z0 = static_cast<int>(Outcome::Z0);
    const int z1 = static_cast<int>(Outcome::Z1);
    CHECK(sing.counts[z0][z0] == 0);
    CHECK(sing.counts[z1][z1] == 0);
    CHECK(sing.counts[z0][z1] > 0);

    const CountsTable again =
        simulate_counts(nullptr, HologramPool::standard(), cfg, 1.0e6, 0.172, cfg.seed);
    for (int a = 0; a < kOutcomes; ++a)
        for (int b = 0; b < kOutcomes; ++b) CHECK(sing.counts[a][b] == again.counts[a][b]);

    CHECK_THROWS_AS(simulate_counts(nullptr, HologramPool::standard(), cfg, -1.0, 0.172, 0),
                    InvalidRate);
}

namespace {

CountsTable exact_counts(const ComplexMatrix& rho, double scale) {
    CountsTable t;
    t.duration_s = 20.0;
    for (int a = 0; a < kOutcomes; ++a)
        for (int b = 0; b < kOutcomes; ++b) {
            const double q = hs_inner(tensor(outcome_projector(a), outcome_projector(b)), rho);
            t.counts[a][b] = static_cast<std::uint64_t>(std::llround(scale * std::max(q, 0.0)));
        }
    t.recompute_total();
    return t;
}

} // namespace

TEST_CASE("tomo_linear_inversion: noiseless round trips and degenerate input") {
    ComplexMatrix q = ComplexMatrix::identity(4);
    q *= 0.25;
    const ComplexMatrix mixed = tomo_linear_inversion(exact_counts(q, 4.0e6));
    CHECK(mixed.max_abs_diff(q) < 1e-12);

    const ComplexMatrix fam = family_state(FamilyParams(0.4078, 0.859)).mat();
    const ComplexMatrix recon = tomo_linear_inversion(exact_counts(fam, 1.0e12));
    CHECK(recon.max_abs_diff(fam) < 1e-10);
    CHECK(std::abs(std::real(recon.trace()) - 1.0) < 1e-12);
    CHECK(recon.hermiticity_defect() < 1e-13);

    // single count in one cell: still a valid Hermitian unit-trace output
    CountsTable one;
    one.counts[0][0] = 1;
    one.recompute_total();
    const ComplexMatrix h = tomo_linear_inversion(one);
    CHECK(h.hermiticity_defect() < 1e-13);
    CHECK(std::abs(std::real(h.trace()) - 1.0) < 1e-12);

    CountsTable empty;
    empty.recompute_total();
    CHECK_THROWS_AS(tomo_linear_inversion(empty), EmptyCounts);
}

TEST_CASE("tomography consistency on random states") {
    std::mt19937_64 gen(909);
    for (int t = 0; t < 10; ++t) {
        const ComplexMatrix rho = oracles::random_state(gen);
        const DensityMatrix recon =
            project_to_physical(tomo_linear_inversion(exact_counts(rho, 1.0e12)));
        CHECK(recon.mat().max_abs_diff(rho) < 1e-5); // rounding-limited
        CHECK(fidelity(recon, DensityMatrix(rho)) > 1.0 - 1e-9);
    }
}

TEST_CASE("project_to_physical: fixed points, water-filling example, optimality") {
    std::mt19937_64 gen(1001);
    const ComplexMatrix rho = oracles::random_state(gen);
    CHECK(project_to_physical(rho).mat().max_abs_diff(rho) < 1e-12);

    ComplexMatrix d(4);
    d(0, 0) = 0.6;
    d(1, 1) = 0.6;
    d(2, 2) = 0.0;
    d(3, 3) = -0.2;
    const DensityMatrix proj = project_to_physical(d);
    CHECK(std::real(proj.mat()(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::real(proj.mat()(1, 1)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::real(proj.mat()(2, 2)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::real(proj.mat()(3, 3)) == doctest::Approx(0.0).epsilon(1e-12));

    // brute-force check over the diagonal 3-simplex: nothing closer exists
    const double base = (d - proj.mat()).frobenius_norm();
    const int steps = 60;
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; i + j <= steps; ++j)
            for (int k = 0; i + j + k <= steps; ++k) {
                ComplexMatrix cand(4);
                cand(0, 0) = static_cast<double>(i) / steps;
                cand(1, 1) = static_cast<double>(j) / steps;
                cand(2, 2) = static_cast<double>(k) / steps;
                cand(3, 3) = 1.0 - (cand(0, 0) + cand(1, 1) + cand(2, 2));
                CHECK((d - cand).frobenius_norm() >= base - 1e-9);
            }

    // random perturbations of the projection are never closer
    for (int t = 0; t < 50; ++t) {
        const ComplexMatrix other = oracles::random_state(gen);
        ComplexMatrix cand = proj.mat();
        cand *= 0.999;
        cand += 0.001 * other;
        CHECK((d - cand).frobenius_norm() >= base - 1e-9);
    }

    ComplexMatrix nh(4);
    nh(0, 1) = 1.0;
    CHECK_THROWS_AS(project_to_physical(nh), NonHermitianInput);
}

TEST_CASE("bootstrap: vanishing noise, determinism, 1/sqrt(total) scaling") {
    const ComplexMatrix fam = family_state(FamilyParams(0.4, 0.8)).mat();
    const BootstrapResult quiet = bootstrap(exact_counts(fam, 1.0e12), 20, 42);
    CHECK(quiet.sigma_p < 1e-3);
    CHECK(quiet.sigma_r < 1e-3);
    CHECK(quiet.per_resample.size() == 20);

    const BootstrapResult b1 = bootstrap(exact_counts(fam, 1.0e5), 20, 7);
    const BootstrapResult b2 = bootstrap(exact_counts(fam, 1.0e5), 20, 7);
    CHECK(b1.sigma_p == b2.sigma_p);
    CHECK(b1.sigma_r == b2.sigma_r);

    // log-log slope of sigma against total over two decades: -0.5 +- 0.05
    std::vector<double> log_total, log_sigma;
    for (double scale : {3.0e4, 1.0e5, 3.0e5, 1.0e6, 3.0e6}) {
        const CountsTable counts = exact_counts(fam, scale);
        const BootstrapResult b = bootstrap(counts, 200, 99);
        log_total.push_back(std::log(static_cast<double>(counts.total)));
        log_sigma.push_back(std::log(b.sigma_p));
    }
    const std::size_t n = log_total.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += log_total[i];
        my += log_sigma[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (log_total[i] - mx) * (log_sigma[i] - my);
        sxx += (log_total[i] - mx) * (log_total[i] - mx);
    }
    const double slope = sxy / sxx;
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.1));

    CountsTable empty;
    CHECK_THROWS_AS(bootstrap(empty, 20, 0), EmptyCounts);
}

TEST_CASE("configured_params and the imbalance map") {
    SamplerConfig cfg;
    cfg.p_ipt = 0.36875;
    cfg.r_ipt = 0.95;
    cfg.alpha = 1.106;
    const auto [p_cfg, r_cfg] = configured_params(cfg);
    CHECK(p_cfg == doctest::Approx(0.4078).epsilon(1e-3));
    CHECK(r_cfg == doctest::Approx(0.859).epsilon(1e-3));

    // high statistics: retrieval lands on the configured parameters
    const CountsTable counts =
        simulate_counts(nullptr, HologramPool::standard(), cfg, 2.0e6, 0.172, 11);
    const RetrievedParams got =
        retrieve_params(project_to_physical(tomo_linear_inversion(counts)).mat());
    CHECK(got.p == doctest::Approx(p_cfg).epsilon(5e-3));
    CHECK(got.r == doctest::Approx(r_cfg).epsilon(5e-3));

    // alpha = 1 is the identity map
    cfg.alpha = 1.0;
    const auto [p1, r1] = configured_params(cfg);
    CHECK(p1 == cfg.p_ipt);
    CHECK(r1 == cfg.r_ipt);
}

TEST_CASE("run_experiment: determinism and the degenerate singlet input") {
    SamplerConfig cfg;
    cfg.p_ipt = 1.0;
    cfg.r_ipt = 0.5;
    cfg.alpha = 1.0;
    cfg.frames = 400;
    cfg.seed = 314159;
    const DirectionMesh mesh = fibonacci_mesh(6);
    const ExperimentReport rep = run_experiment(cfg, 40000.0, 0.172, mesh, 20, 12, 2);
    CHECK(rep.tomography.retrieved.p > 0.9);
    CHECK(rep.verdict.label == VerdictLabel::TwoWaySteerable);

    const ExperimentReport rep2 = run_experiment(cfg, 40000.0, 0.172, mesh, 20, 12, 1);
    CHECK(rep.tomography.retrieved.p == rep2.tomography.retrieved.p);
    CHECK(rep.tomography.bootstrap_sigma_p == rep2.tomography.bootstrap_sigma_p);
    CHECK(rep.counts.total == rep2.counts.total);
    CHECK(rep.bracket_ab.lo == rep2.bracket_ab.lo);
}

TEST_CASE("crosstalk knob: identity default, row-stochastic mixing conserves counts") {
    SamplerConfig cfg;
    cfg.p_ipt = 0.4;
    cfg.r_ipt = 0.8;
    cfg.alpha = 1.0;
    cfg.seed = 21;
    const CountsTable clean =
        simulate_counts(nullptr, HologramPool::standard(), cfg, 1.0e5, 0.172, cfg.seed);

    // heavy uniform crosstalk pushes every cell toward the global mean but
    // keeps the Poisson means' total fixed
    cfg.crosstalk.assign(kOutcomes, {});
    for (int i = 0; i < kOutcomes; ++i)
        for (int j = 0; j < kOutcomes; ++j)
            cfg.crosstalk[i][j] = i == j ? 0.5 : 0.1;
    const CountsTable mixed =
        simulate_counts(nullptr, HologramPool::standard(), cfg, 1.0e5, 0.172, cfg.seed);
    const double rel =
        std::abs(static_cast<double>(mixed.total) - static_cast<double>(clean.total)) /
        static_cast<double>(clean.total);
    CHECK(rel < 0.05);

    cfg.crosstalk[0][0] = 0.9; // row no longer sums to 1
    CHECK_THROWS_AS(cfg.validate(), ParamOutOfRange);
}

TEST_CASE("poisson sampler: mean and variance across regimes") {
    for (double lam : {3.0, 12.0, 300.0, 48000.0}) {
        Rng rng(static_cast<std::uint64_t>(lam * 1000));
        const int n = 20000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(lam));
            s += k;
            s2 += k * k;
        }
        const double mean = s / n;
        const double var = s2 / n - mean * mean;
        // mean within 6 standard errors; variance/mean ratio near 1
        CHECK(std::abs(mean - lam) <= 6.0 * std::sqrt(lam / n));
        CHECK(var / lam == doctest::Approx(1.0).epsilon(0.05));
    }
    Rng rng(1);
    CHECK(rng.poisson(0.0) == 0);
    // large-mean draw is O(1) and lands within 10 sigma
    const double big = 2.25e12;
    const double draw = static_cast<double>(rng.poisson(big));
    CHECK(std::abs(draw - big) <= 10.0 * std::sqrt(big));
}
