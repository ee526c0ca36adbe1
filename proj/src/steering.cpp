#include "steerkit/steering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "steerkit/parallel.hpp"

namespace steerkit {

namespace {

ComplexMatrix contract_alice(const ComplexMatrix& projector, const ComplexMatrix& chi) {
    // Tr_A[(P x I) chi] without forming the 4x4 product:
    //   out(ib, jb) = sum_{ia, ja} P(ja, ia) chi(ia ib, ja jb)
    ComplexMatrix out(2);
    for (std::size_t ib = 0; ib < 2; ++ib)
        for (std::size_t jb = 0; jb < 2; ++jb) {
            cplx s = 0.0;
            for (std::size_t ia = 0; ia < 2; ++ia)
                for (std::size_t ja = 0; ja < 2; ++ja)
                    s += projector(ja, ia) * chi(ia * 2 + ib, ja * 2 + jb);
            out(ib, jb) = s;
        }
    return out;
}

std::vector<double> assemblage_rhs(const Assemblage& asm_) {
    const std::size_t n = asm_.settings();
    std::vector<double> rhs(4 * n + 4);
    for (std::size_t k = 0; k < n; ++k) {
        const auto h = lp::pauli_coords(asm_.plus[k]);
        std::copy(h.begin(), h.end(), rhs.begin() + 4 * k);
    }
    const auto ht = lp::pauli_coords(asm_.total());
    std::copy(ht.begin(), ht.end(), rhs.begin() + 4 * n);
    return rhs;
}

/// max over all 2^N strategies of lambda_max(sum_k F_{lambda(k)|k}), walked in
/// Gray-code order over the Pauli coordinates; lambda_max(c0 I + c.sigma) =
/// c0 + |c|.
double exhaustive_lhs_bound(const std::vector<ComplexMatrix>& f_plus,
                            const std::vector<ComplexMatrix>& f_minus) {
    const int n = static_cast<int>(f_plus.size());
    std::array<double, 4> acc{0, 0, 0, 0};
    std::vector<std::array<double, 4>> delta(n);
    for (int k = 0; k < n; ++k) {
        const auto hp = lp::pauli_coords(f_plus[k]);
        const auto hm = lp::pauli_coords(f_minus[k]);
        for (int i = 0; i < 4; ++i) {
            acc[i] += hm[i];
            delta[k][i] = hp[i] - hm[i];
        }
    }
    double best = -std::numeric_limits<double>::infinity();
    std::uint32_t gray = 0;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t g = 0;; ++g) {
        const double c0 = 0.5 * acc[0];
        const double cn =
            0.5 * std::sqrt(acc[1] * acc[1] + acc[2] * acc[2] + acc[3] * acc[3]);
        best = std::max(best, c0 + cn);
        if (g + 1 == count) break;
        const int bit = __builtin_ctzll(g + 1);
        const std::uint32_t mask = std::uint32_t{1} << bit;
        const double s = (gray & mask) ? -1.0 : 1.0;
        gray ^= mask;
        for (int i = 0; i < 4; ++i) acc[i] += s * delta[bit][i];
    }
    return best;
}

double certificate_violation(const std::vector<ComplexMatrix>& f_plus,
                             const std::vector<ComplexMatrix>& f_minus, const Assemblage& asm_) {
    double v = 0.0;
    for (std::size_t k = 0; k < asm_.settings(); ++k) {
        v += std::real((f_plus[k] * asm_.plus[k]).trace());
        v += std::real((f_minus[k] * asm_.minus[k]).trace());
    }
    return v;
}

SteeringCertificate farkas_to_certificate(const std::vector<double>& y, const Assemblage& asm_) {
    const std::size_t n = asm_.settings();
    SteeringCertificate cert;
    const ComplexMatrix g_tot = lp::from_pauli_coords({y[4 * n], y[4 * n + 1], y[4 * n + 2], y[4 * n + 3]});
    ComplexMatrix g_share = g_tot;
    g_share *= 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const ComplexMatrix g_k =
            lp::from_pauli_coords({y[4 * k], y[4 * k + 1], y[4 * k + 2], y[4 * k + 3]});
        cert.f_plus.push_back(g_k + g_share);
        cert.f_minus.push_back(g_share);
    }
    cert.lhs_bound = exhaustive_lhs_bound(cert.f_plus, cert.f_minus);
    cert.violation = certificate_violation(cert.f_plus, cert.f_minus, asm_);
    cert.margin = cert.violation - cert.lhs_bound;
    return cert;
}

} // namespace

Assemblage make_assemblage(const ComplexMatrix& chi_in, const DirectionMesh& mesh, Side steering_party) {
    if (chi_in.dim() != 4) throw DimensionMismatch("make_assemblage: expected 4x4 input");
    if (chi_in.hermiticity_defect() > 1e-8)
        throw NonHermitianInput("make_assemblage: input not Hermitian");
    if (std::abs(std::real(chi_in.trace()) - 1.0) > 1e-8)
        throw InvalidState("make_assemblage: input trace differs from 1");

    const ComplexMatrix chi = steering_party == Side::B ? swap_parties_raw(chi_in) : chi_in;
    Assemblage out;
    out.source_state_psd = min_eigenvalue(chi) >= -1e-10;
    for (const auto& n : mesh.directions()) {
        const Vec3 neg{-n[0], -n[1], -n[2]};
        out.plus.push_back(contract_alice(bloch_projector(n), chi));
        out.minus.push_back(contract_alice(bloch_projector(neg), chi));
    }
    return out;
}

LhsFeasibility lhs_feasible(const Assemblage& asm_, double tol) {
    const int n = static_cast<int>(asm_.settings());
    if (n < 1 || n > 16) throw ParamOutOfRange("lhs_feasible: N must lie in [1,16]");

    lp::Options opt;
    opt.feasibility_tol = tol;
    const lp::Result lpres = lp::solve_lhs_lp(assemblage_rhs(asm_), n, opt);

    LhsFeasibility out;
    out.phase1_objective = lpres.objective;
    out.lp_iterations = lpres.iterations;

    if (lpres.status == lp::Status::Feasible) {
        LhsModel model;
        for (std::size_t j = 0; j < lpres.columns.size(); ++j)
            model.columns.push_back({lpres.columns[j].strategy, lpres.columns[j].bloch, lpres.weights[j]});
        model.residual = lhs_model_residual(model, asm_);
        if (!verify_lhs_model(model, asm_, 1e-8))
            throw IterationLimit("lhs_feasible: model failed re-verification");
        out.feasible = true;
        out.model = std::move(model);
        return out;
    }
    if (lpres.status == lp::Status::Infeasible) {
        SteeringCertificate cert = farkas_to_certificate(lpres.farkas, asm_);
        if (!(cert.margin >= 1e-9))
            throw IterationLimit("lhs_feasible: Farkas certificate margin below threshold");
        out.feasible = false;
        out.certificate = std::move(cert);
        return out;
    }
    throw IterationLimit("lhs_feasible: LP iteration limit reached");
}

std::optional<SteeringCertificate> steering_certificate(const Assemblage& asm_) {
    const LhsFeasibility res = lhs_feasible(asm_);
    if (res.feasible) return std::nullopt;
    return res.certificate;
}

double lhs_model_residual(const LhsModel& model, const Assemblage& asm_) {
    const std::size_t n = asm_.settings();
    std::vector<ComplexMatrix> recon(n, ComplexMatrix(2));
    ComplexMatrix recon_total(2);
    for (const auto& col : model.columns) {
        ComplexMatrix omega = bloch_projector(col.bloch);
        omega *= col.weight;
        for (std::size_t k = 0; k < n; ++k)
            if (col.strategy >> k & 1u) recon[k] += omega;
        recon_total += omega;
    }
    double worst = recon_total.max_abs_diff(asm_.total());
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, recon[k].max_abs_diff(asm_.plus[k]));
    return worst;
}

bool verify_lhs_model(const LhsModel& model, const Assemblage& asm_, double tol) {
    for (const auto& col : model.columns) {
        if (!(col.weight >= 0.0)) return false;
        if (norm(col.bloch) > 1.0 + 1e-12) return false;
    }
    return lhs_model_residual(model, asm_) <= tol;
}

bool verify_certificate(const SteeringCertificate& cert, const Assemblage& asm_) {
    if (cert.f_plus.size() != asm_.settings()) return false;
    const double bound = exhaustive_lhs_bound(cert.f_plus, cert.f_minus);
    const double viol = certificate_violation(cert.f_plus, cert.f_minus, asm_);
    return viol - bound >= 1e-9;
}

namespace {

enum class ProbeKind { Feasible, Certified, Indeterminate };

struct ProbeResult {
    ProbeKind kind = ProbeKind::Indeterminate;
    std::optional<LhsModel> model;
    std::optional<SteeringCertificate> certificate;
};

ProbeResult probe(const ComplexMatrix& rho_dir, const DirectionMesh& mesh, double x, double tol) {
    ProbeResult out;
    try {
        const ComplexMatrix chi = depolarize_alice_raw(rho_dir, x);
        const Assemblage asm_ = make_assemblage(chi, mesh, Side::A);
        LhsFeasibility res = lhs_feasible(asm_, tol);
        if (res.feasible) {
            out.kind = ProbeKind::Feasible;
            out.model = std::move(res.model);
        } else {
            out.kind = ProbeKind::Certified;
            out.certificate = std::move(res.certificate);
        }
    } catch (const IterationLimit&) {
        out.kind = ProbeKind::Indeterminate;
    }
    return out;
}

} // namespace

RadiusBracket critical_radius_bracket(const DensityMatrix& rho, SteerDirection direction,
                                      const DirectionMesh& mesh, int bisection_steps, double tol) {
    const ComplexMatrix rho_dir =
        direction == SteerDirection::BtoA ? swap_parties_raw(rho.mat()) : rho.mat();

    RadiusBracket out;
    out.direction = direction;
    out.mesh_size = static_cast<int>(mesh.size());
    out.eta = mesh.eta();
    const double x_cap = 1.0 / out.eta;

    // x = 0 is the trivial assemblage of I/2 x rho_B; seeds the lo certificate
    ProbeResult base = probe(rho_dir, mesh, 0.0, tol);
    if (base.kind == ProbeKind::Feasible) {
        out.lo_certificate = std::move(base.model);
        out.lo_probe_x = 0.0;
    } else {
        out.indeterminate_probes = true;
    }

    ProbeResult cap = probe(rho_dir, mesh, x_cap, tol);
    if (cap.kind == ProbeKind::Feasible) {
        out.lo_probe_x = x_cap;
        out.lo = 1.0; // eta * (1/eta), computed exactly
        out.lo_certificate = std::move(cap.model);
        return out;
    }

    double a = 0.0;
    double b_search = x_cap;
    if (cap.kind == ProbeKind::Certified) {
        out.hi = x_cap;
        out.hi_certificate = std::move(cap.certificate);
    } else {
        out.indeterminate_probes = true;
    }

    for (int step = 0; step < bisection_steps; ++step) {
        const double mid = 0.5 * (a + b_search);
        ProbeResult pr = probe(rho_dir, mesh, mid, tol);
        if (pr.kind == ProbeKind::Feasible) {
            a = mid;
            out.lo_probe_x = mid;
            out.lo_certificate = std::move(pr.model);
        } else if (pr.kind == ProbeKind::Certified) {
            b_search = mid;
            out.hi = mid;
            out.hi_certificate = std::move(pr.certificate);
        } else {
            out.indeterminate_probes = true;
            break; // cannot move either side soundly
        }
    }
    out.lo = out.lo_probe_x / x_cap; // == eta * x, exact at the cap
    return out;
}

const char* to_string(CertStatus s) {
    switch (s) {
        case CertStatus::CertifiedSteerable: return "STEERABLE";
        case CertStatus::CertifiedUnsteerable: return "UNSTEERABLE";
        default: return "INDETERMINATE";
    }
}

const char* to_string(VerdictLabel label) {
    switch (label) {
        case VerdictLabel::Separable: return "SEPARABLE";
        case VerdictLabel::TwoWayUnsteerable: return "TWO_WAY_UNSTEERABLE";
        case VerdictLabel::OneWayAToB: return "ONE_WAY_A_TO_B";
        case VerdictLabel::OneWayBToA: return "ONE_WAY_B_TO_A";
        case VerdictLabel::TwoWaySteerable: return "TWO_WAY_STEERABLE";
        default: return "INDETERMINATE";
    }
}

namespace {

VerdictLabel label_from_pair(CertStatus ab, CertStatus ba) {
    using C = CertStatus;
    if (ab == C::CertifiedSteerable && ba == C::CertifiedSteerable) return VerdictLabel::TwoWaySteerable;
    if (ab == C::CertifiedSteerable && ba == C::CertifiedUnsteerable) return VerdictLabel::OneWayAToB;
    if (ab == C::CertifiedUnsteerable && ba == C::CertifiedSteerable) return VerdictLabel::OneWayBToA;
    if (ab == C::CertifiedUnsteerable && ba == C::CertifiedUnsteerable)
        return VerdictLabel::TwoWayUnsteerable;
    return VerdictLabel::Indeterminate;
}

CertStatus classify_direction(const DensityMatrix& rho, SteerDirection dir, const DirectionMesh& mesh) {
    const ComplexMatrix rho_dir =
        dir == SteerDirection::BtoA ? swap_parties_raw(rho.mat()) : rho.mat();
    try {
        const Assemblage at_one = make_assemblage(rho_dir, mesh, Side::A);
        if (auto cert = steering_certificate(at_one); cert && verify_certificate(*cert, at_one))
            return CertStatus::CertifiedSteerable;
    } catch (const IterationLimit&) {
        // fall through to the unsteerability probe
    }
    try {
        const double x_cap = 1.0 / mesh.eta();
        const ComplexMatrix chi = depolarize_alice_raw(rho_dir, x_cap);
        const Assemblage at_cap = make_assemblage(chi, mesh, Side::A);
        const LhsFeasibility res = lhs_feasible(at_cap);
        if (res.feasible) return CertStatus::CertifiedUnsteerable;
    } catch (const IterationLimit&) {
    }
    return CertStatus::Indeterminate;
}

} // namespace

Verdict classify(const DensityMatrix& rho, const DirectionMesh& mesh, unsigned threads) {
    Verdict v;
    const SeparabilityResult sep = is_separable_ppt(rho);
    v.min_pt_eigenvalue = sep.min_pt_eigenvalue;
    if (sep.separable) {
        v.steerable_ab = CertStatus::CertifiedUnsteerable;
        v.steerable_ba = CertStatus::CertifiedUnsteerable;
        v.label = VerdictLabel::Separable;
        return v;
    }
    if (resolve_threads(threads) >= 2) {
        CertStatus results[2];
        parallel_for(2, 2, [&](std::size_t i) {
            results[i] = classify_direction(rho, i == 0 ? SteerDirection::AtoB : SteerDirection::BtoA, mesh);
        });
        v.steerable_ab = results[0];
        v.steerable_ba = results[1];
    } else {
        v.steerable_ab = classify_direction(rho, SteerDirection::AtoB, mesh);
        v.steerable_ba = classify_direction(rho, SteerDirection::BtoA, mesh);
    }
    v.label = label_from_pair(v.steerable_ab, v.steerable_ba);
    return v;
}

std::vector<RegionCell> region_scan(const std::vector<double>& p_grid,
                                    const std::vector<double>& r_grid,
                                    const DirectionMesh& mesh, unsigned threads) {
    for (double p : p_grid)
        if (p < 0.0 || p > 1.0) throw ParamOutOfRange("region_scan: p grid outside [0,1]");
    for (double r : r_grid)
        if (r < 0.0 || r > 1.0) throw ParamOutOfRange("region_scan: r grid outside [0,1]");

    std::vector<RegionCell> cells(p_grid.size() * r_grid.size());
    parallel_for(cells.size(), threads, [&](std::size_t idx) {
        const double p = p_grid[idx / r_grid.size()];
        const double r = r_grid[idx % r_grid.size()];
        RegionCell cell;
        cell.p = p;
        cell.r = r;
        cell.verdict = classify(family_state(FamilyParams(p, r)), mesh, 1);
        cells[idx] = std::move(cell);
    });
    return cells;
}

} // namespace steerkit
