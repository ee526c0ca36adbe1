#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "steerkit/steering.hpp"

using namespace steerkit;

namespace {

DensityMatrix werner(double x) {
    ComplexMatrix m = ComplexMatrix::identity(4);
    m *= (1.0 - x) * 0.25;
    m += x * singlet_projector();
    return DensityMatrix(std::move(m));
}

/// Bloch-form contraction oracle:
/// sigma_{+-|n} = (1/4)[(1 +- n.a) I + (b +- T^T n).sigma]
ComplexMatrix bloch_form_block(const ComplexMatrix& chi, const Vec3& n, int sign) {
    const BlochRep rep = bloch_decompose(chi);
    const double s = sign >= 0 ? 1.0 : -1.0;
    Vec3 tn{0, 0, 0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) tn[j] += rep.T[i][j] * n[i];
    ComplexMatrix out = ComplexMatrix::identity(2);
    out *= 1.0 + s * dot(n, rep.a);
    for (int j = 0; j < 3; ++j) out += (rep.b[j] + s * tn[j]) * pauli(j);
    out *= 0.25;
    return out;
}

} // namespace

TEST_CASE("assemblage: maximally mixed, singlet z axis, family Bloch entries") {
    ComplexMatrix q = ComplexMatrix::identity(4);
    q *= 0.25;
    const DirectionMesh mesh = fibonacci_mesh(3);
    const Assemblage a = make_assemblage(q, mesh, Side::A);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::real(a.plus[k](0, 0)) == doctest::Approx(0.25).epsilon(1e-13));
        CHECK(std::real(a.plus[k](1, 1)) == doctest::Approx(0.25).epsilon(1e-13));
        CHECK(std::abs(a.plus[k](0, 1)) < 1e-14);
    }

    // singlet measured along z: sigma_{+|z} = |1><1|/2, sigma_{-|z} = |0><0|/2
    const DirectionMesh zmesh({Vec3{0, 0, 1}, Vec3{1, 0, 0}});
    const Assemblage s = make_assemblage(singlet_projector(), zmesh, Side::A);
    CHECK(std::abs(s.plus[0](0, 0)) < 1e-14);
    CHECK(std::real(s.plus[0](1, 1)) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::real(s.minus[0](0, 0)) == doctest::Approx(0.5).epsilon(1e-13));

    // family (0.4, 0.8) along z: entries driven by a_z = 0.48, T_zz = -0.4
    const ComplexMatrix fam = family_state(FamilyParams(0.4, 0.8)).mat();
    const Assemblage f = make_assemblage(fam, zmesh, Side::A);
    CHECK(std::real(f.plus[0](0, 0)) == doctest::Approx((1.0 + 0.48 - 0.4) / 4.0).epsilon(1e-12));
    CHECK(std::real(f.plus[0](1, 1)) == doctest::Approx((1.0 + 0.48 + 0.4) / 4.0).epsilon(1e-12));
}

TEST_CASE("assemblage matches the Bloch-form contraction oracle") {
    std::mt19937_64 gen(2024);
    const DirectionMesh mesh = fibonacci_mesh(8);
    for (int t = 0; t < 12; ++t) {
        const ComplexMatrix chi = oracles::random_state(gen);
        for (Side party : {Side::A, Side::B}) {
            const Assemblage a = make_assemblage(chi, mesh, party);
            const ComplexMatrix eff = party == Side::B ? swap_parties_raw(chi) : chi;
            for (std::size_t k = 0; k < mesh.size(); ++k) {
                CHECK(a.plus[k].max_abs_diff(bloch_form_block(eff, mesh.directions()[k], +1)) < 1e-12);
                CHECK(a.minus[k].max_abs_diff(bloch_form_block(eff, mesh.directions()[k], -1)) < 1e-12);
            }
            // completeness: sum_a sigma_{a|k} identical for all k, unit trace
            const ComplexMatrix tot = a.total();
            CHECK(std::abs(std::real(tot.trace()) - 1.0) < 1e-12);
            for (std::size_t k = 0; k < mesh.size(); ++k)
                CHECK((a.plus[k] + a.minus[k]).max_abs_diff(tot) < 1e-12);
        }
    }
}

TEST_CASE("lhs_feasible: trivial, Werner thresholds on the 3-axis mesh") {
    const DirectionMesh mesh = fibonacci_mesh(3);
    ComplexMatrix q = ComplexMatrix::identity(4);
    q *= 0.25;
    const LhsFeasibility triv = lhs_feasible(make_assemblage(q, mesh, Side::A));
    CHECK(triv.feasible);
    CHECK(triv.model->residual <= 1e-8);

    // Werner x = 0.5 < 1/sqrt(3): feasible; independent dense-grid LP agrees
    const Assemblage half = make_assemblage(werner(0.5).mat(), mesh, Side::A);
    const LhsFeasibility r_half = lhs_feasible(half);
    CHECK(r_half.feasible);
    CHECK(oracles::GridLp::feasible(half, 5000));

    // Werner x = 1: infeasible with a verified certificate
    const Assemblage full = make_assemblage(werner(1.0).mat(), mesh, Side::A);
    const LhsFeasibility r_full = lhs_feasible(full);
    CHECK_FALSE(r_full.feasible);
    REQUIRE(r_full.certificate.has_value());
    CHECK(r_full.certificate->margin >= 1e-9);
    CHECK(verify_certificate(*r_full.certificate, full));
}

TEST_CASE("steering_certificate: Werner anchors and product states") {
    const DirectionMesh mesh = fibonacci_mesh(3);
    const auto cert = steering_certificate(make_assemblage(werner(1.0).mat(), mesh, Side::A));
    REQUIRE(cert.has_value());
    CHECK(cert->margin > 0.0);
    CHECK(cert->violation > cert->lhs_bound);

    CHECK_FALSE(steering_certificate(make_assemblage(werner(0.5).mat(), mesh, Side::A)).has_value());

    std::mt19937_64 gen(55);
    for (int t = 0; t < 8; ++t) {
        const ComplexMatrix prod = oracles::random_product_state(gen);
        for (int n : {3, 6}) {
            const DirectionMesh m2 = fibonacci_mesh(n);
            CHECK_FALSE(steering_certificate(make_assemblage(prod, m2, Side::A)).has_value());
            CHECK_FALSE(steering_certificate(make_assemblage(prod, m2, Side::B)).has_value());
        }
    }
}

TEST_CASE("every LHS model reconstructs its assemblage; every certificate re-verifies") {
    std::mt19937_64 gen(77);
    const DirectionMesh mesh = fibonacci_mesh(6);
    for (int t = 0; t < 30; ++t) {
        const ComplexMatrix rho = oracles::random_state(gen);
        const Assemblage a = make_assemblage(rho, mesh, Side::A);
        try {
            const LhsFeasibility res = lhs_feasible(a);
            if (res.feasible) {
                CHECK(res.model->residual <= 1e-8);
                CHECK(verify_lhs_model(*res.model, a));
                for (const auto& col : res.model->columns) {
                    CHECK(col.weight >= 0.0);
                    CHECK(norm(col.bloch) <= 1.0 + 1e-12);
                }
            } else {
                CHECK(verify_certificate(*res.certificate, a));
            }
        } catch (const IterationLimit&) {
            // undecided is acceptable, never unsound
        }
    }
}

TEST_CASE("soundness mini-fuzz: never steerable at x=1 and unsteerable at cap") {
    std::mt19937_64 gen(4242);
    for (int n : {3, 6}) {
        const DirectionMesh mesh = fibonacci_mesh(n);
        const double x_cap = 1.0 / mesh.eta();
        for (int t = 0; t < 25; ++t) {
            const ComplexMatrix rho = oracles::random_state(gen);
            for (Side party : {Side::A, Side::B}) {
                bool cert_at_one = false, lhs_at_cap = false;
                try {
                    cert_at_one =
                        steering_certificate(make_assemblage(rho, mesh, party)).has_value();
                } catch (const IterationLimit&) {}
                try {
                    const ComplexMatrix chi =
                        depolarize_alice_raw(party == Side::B ? swap_parties_raw(rho) : rho, x_cap);
                    lhs_at_cap = lhs_feasible(make_assemblage(chi, mesh, Side::A)).feasible;
                } catch (const IterationLimit&) {}
                CHECK_FALSE((cert_at_one && lhs_at_cap));
            }
        }
    }
}

TEST_CASE("critical_radius_bracket: singlet contains 0.5; maximally mixed unbounded") {
    const DirectionMesh mesh = fibonacci_mesh(12);
    const RadiusBracket b =
        critical_radius_bracket(DensityMatrix(singlet_projector()), SteerDirection::AtoB, mesh);
    CHECK(b.lo <= 0.5);
    REQUIRE(b.hi.has_value());
    CHECK(*b.hi >= 0.5);
    CHECK(*b.hi - b.lo <= 0.15);
    REQUIRE(b.lo_certificate.has_value());
    CHECK(b.lo_certificate->residual <= 1e-8);
    REQUIRE(b.hi_certificate.has_value());
    CHECK(b.hi_certificate->margin >= 1e-9);
    CHECK(b.lo == doctest::Approx(mesh.eta() * b.lo_probe_x).epsilon(1e-10));

    ComplexMatrix q = ComplexMatrix::identity(4);
    q *= 0.25;
    const RadiusBracket u = critical_radius_bracket(DensityMatrix(q), SteerDirection::AtoB, mesh);
    CHECK(u.lo >= 1.0);
    CHECK_FALSE(u.hi.has_value());
}

TEST_CASE("depolarization transfer: nested depolarization is the same LP input") {
    const DensityMatrix rho = family_state(FamilyParams(0.55, 0.6));
    const DirectionMesh mesh = fibonacci_mesh(6);
    const double y = 0.5, x0 = 0.4;

    const ComplexMatrix direct = depolarize_alice_raw(rho.mat(), x0);
    const ComplexMatrix nested =
        depolarize_alice_raw(depolarize_alice_raw(rho.mat(), y), x0 / y);
    CHECK(nested.max_abs_diff(direct) < 1e-14);

    const Assemblage a1 = make_assemblage(direct, mesh, Side::A);
    const Assemblage a2 = make_assemblage(nested, mesh, Side::A);
    for (std::size_t k = 0; k < mesh.size(); ++k)
        CHECK(a1.plus[k].max_abs_diff(a2.plus[k]) < 1e-14);
    CHECK(lhs_feasible(a1).feasible == lhs_feasible(a2).feasible);
}

TEST_CASE("classify: canonical states and pair consistency") {
    const DirectionMesh mesh = fibonacci_mesh(6);

    ComplexMatrix q = ComplexMatrix::identity(4);
    q *= 0.25;
    const Verdict sep = classify(DensityMatrix(q), mesh);
    CHECK(sep.label == VerdictLabel::Separable);
    CHECK(sep.steerable_ab == CertStatus::CertifiedUnsteerable);
    CHECK(sep.steerable_ba == CertStatus::CertifiedUnsteerable);

    const Verdict psi = classify(DensityMatrix(singlet_projector()), mesh, 2);
    CHECK(psi.label == VerdictLabel::TwoWaySteerable);

    // the red-region example point: certified or indeterminate, never both
    // steerable-and-unsteerable in one direction (soundness), never separable
    const Verdict red = classify(family_state(FamilyParams(0.43, 0.85)), fibonacci_mesh(12), 2);
    CHECK(red.label != VerdictLabel::Separable);
    CHECK(red.label != VerdictLabel::TwoWayUnsteerable);

    // separable random mixtures are never steering-certified
    std::mt19937_64 gen(808);
    for (int t = 0; t < 10; ++t) {
        const DensityMatrix rho{oracles::random_separable_state(gen)};
        const Verdict v = classify(rho, mesh);
        CHECK(v.steerable_ab != CertStatus::CertifiedSteerable);
        CHECK(v.steerable_ba != CertStatus::CertifiedSteerable);
    }
}

TEST_CASE("region_scan: shape, determinism across thread counts, anchors") {
    const DirectionMesh mesh = fibonacci_mesh(3);
    const std::vector<double> ps{0.0, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> rs{0.0, 0.5, 1.0};

    const auto cells1 = region_scan(ps, rs, mesh, 1);
    const auto cells4 = region_scan(ps, rs, mesh, 4);
    REQUIRE(cells1.size() == 15);
    REQUIRE(cells4.size() == 15);
    for (std::size_t i = 0; i < cells1.size(); ++i) {
        CHECK(cells1[i].p == cells4[i].p);
        CHECK(cells1[i].r == cells4[i].r);
        CHECK(cells1[i].verdict.label == cells4[i].verdict.label);
        CHECK(cells1[i].verdict.steerable_ab == cells4[i].verdict.steerable_ab);
        CHECK(cells1[i].verdict.steerable_ba == cells4[i].verdict.steerable_ba);
    }
    // p = 1 column two-way steerable regardless of r
    for (const auto& c : cells1)
        if (c.p == 1.0) CHECK(c.verdict.label == VerdictLabel::TwoWaySteerable);
    // p = 0 column separable (product states)
    for (const auto& c : cells1)
        if (c.p == 0.0) CHECK(c.verdict.label == VerdictLabel::Separable);
}
