// steerkit command-line interface: steering certification, region scans,
// experiment simulation, tomography of external counts, and predicate grids.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "steerkit/expsim.hpp"
#include "steerkit/json_io.hpp"
#include "steerkit/mesh.hpp"
#include "steerkit/steering.hpp"

namespace {

using namespace steerkit;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIndeterminate = 3;
constexpr int kExitSolver = 4;

struct CommonOpts {
    int mesh_size = 12;
    double tol = 1e-9;
    int bisection_steps = 20;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string output_path;
    bool strict = false;
    bool no_validate = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_mesh = true) {
    if (with_mesh)
        cmd->add_option("--mesh", o.mesh_size, "number of measurement directions (3-16)")
            ->check(CLI::Range(3, 16));
    cmd->add_option("--tol", o.tol, "LP feasibility tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--steps", o.bisection_steps, "bisection steps for radius brackets")
        ->check(CLI::Range(1, 60));
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--threads", o.threads, "worker threads (0 = auto)");
    cmd->add_option("-o,--out", o.output_path, "output file (default: stdout)");
    cmd->add_flag("--strict", o.strict, "exit 3 on indeterminate results");
}

unsigned effective_threads(unsigned cli_threads) {
    if (const char* env = std::getenv("STEERKIT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 0) return static_cast<unsigned>(v);
    }
    return cli_threads;
}

void emit(const CommonOpts& o, const std::string& text) {
    if (o.output_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream f(o.output_path);
        if (!f) throw ParseError("cannot open output file: " + o.output_path);
        f << text;
        if (text.empty() || text.back() != '\n') f << '\n';
    }
}

DensityMatrix load_state(const std::string& path, bool no_validate, double tol) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open state file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return density_matrix_from_json(j, !no_validate, tol);
}

std::optional<FamilyParams> parse_family(const std::string& spec) {
    if (spec.empty()) return std::nullopt;
    const auto comma = spec.find(',');
    if (comma == std::string::npos) throw ParseError("--family expects p,r");
    try {
        const double p = std::stod(spec.substr(0, comma));
        const double r = std::stod(spec.substr(comma + 1));
        return FamilyParams(p, r);
    } catch (const ParamOutOfRange&) {
        throw;
    } catch (...) {
        throw ParseError("--family expects two numbers p,r");
    }
}

std::vector<double> linspace01(int steps) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        v.push_back(steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1));
    return v;
}

int run_radius(const std::string& state_path, const std::string& direction, const CommonOpts& o) {
    const DensityMatrix rho = load_state(state_path, o.no_validate, o.tol);
    const SteerDirection dir = direction == "BtoA" ? SteerDirection::BtoA : SteerDirection::AtoB;
    const DirectionMesh mesh = fibonacci_mesh(o.mesh_size);
    const RadiusBracket bracket = critical_radius_bracket(rho, dir, mesh, o.bisection_steps, o.tol);
    emit(o, bracket_to_json(bracket).dump(2));
    if (o.strict && bracket.indeterminate_probes) return kExitIndeterminate;
    return kExitOk;
}

int run_classify(const std::string& state_path, const std::string& family, const CommonOpts& o) {
    std::optional<DensityMatrix> rho;
    if (const auto fam = parse_family(family)) {
        rho = family_state(*fam);
    } else {
        if (state_path.empty()) throw ParseError("classify: need a state file or --family p,r");
        rho = load_state(state_path, o.no_validate, o.tol);
    }
    const DirectionMesh mesh = fibonacci_mesh(o.mesh_size);
    const Verdict v = classify(*rho, mesh, effective_threads(o.threads));
    json out = verdict_to_json(v);
    out["mesh_size"] = o.mesh_size;
    out["eta"] = mesh.eta();
    emit(o, out.dump(2));
    if (o.strict && (v.steerable_ab == CertStatus::Indeterminate ||
                     v.steerable_ba == CertStatus::Indeterminate))
        return kExitIndeterminate;
    return kExitOk;
}

int run_region(int p_steps, int r_steps, const CommonOpts& o) {
    const DirectionMesh mesh = fibonacci_mesh(o.mesh_size);
    std::cerr << "region scan: " << p_steps << " x " << r_steps << " cells, mesh "
              << o.mesh_size << "\n";
    const auto cells = region_scan(linspace01(p_steps), linspace01(r_steps), mesh,
                                   effective_threads(o.threads));
    std::ostringstream ss;
    write_region_csv(ss, cells);
    emit(o, ss.str());
    return kExitOk;
}

int run_simulate(const SamplerConfig& cfg, double rate, double efficiency,
                 const std::string& dump_counts, int variations, const CommonOpts& o) {
    const DirectionMesh mesh = fibonacci_mesh(o.mesh_size);
    const ExperimentReport report = run_experiment(cfg, rate, efficiency, mesh, variations,
                                                   o.bisection_steps, effective_threads(o.threads));
    if (!dump_counts.empty()) {
        std::ofstream f(dump_counts);
        if (!f) throw ParseError("cannot open counts file: " + dump_counts);
        write_counts_csv(f, report.counts);
        std::ofstream side(dump_counts + ".meta.json");
        if (!side) throw ParseError("cannot open sidecar file: " + dump_counts + ".meta.json");
        side << json{{"duration_s", report.counts.duration_s},
                     {"alpha", cfg.alpha},
                     {"seed", cfg.seed}}
                    .dump(2)
             << '\n';
    }
    emit(o, report_to_json(report).dump(2));
    if (o.strict && (report.verdict.steerable_ab == CertStatus::Indeterminate ||
                     report.verdict.steerable_ba == CertStatus::Indeterminate))
        return kExitIndeterminate;
    return kExitOk;
}

int run_tomo(const std::string& counts_path, const std::string& sidecar_path, int variations,
             const CommonOpts& o) {
    std::ifstream f(counts_path);
    if (!f) throw ParseError("cannot open counts file: " + counts_path);
    CountsTable counts = read_counts_csv(f);
    if (counts.total == 0) throw ParseError("counts CSV: all counts are zero");

    std::uint64_t seed = o.seed;
    if (!sidecar_path.empty()) {
        std::ifstream sf(sidecar_path);
        if (!sf) throw ParseError("cannot open sidecar file: " + sidecar_path);
        json sj;
        try {
            sf >> sj;
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed sidecar JSON: ") + e.what());
        }
        if (sj.contains("seed")) seed = sj.at("seed").get<std::uint64_t>();
        if (sj.contains("duration_s")) counts.duration_s = sj.at("duration_s").get<double>();
    }

    const DensityMatrix rho_hat = project_to_physical(tomo_linear_inversion(counts));
    const RetrievedParams retrieved = retrieve_params(rho_hat.mat());
    const BootstrapResult boot = bootstrap(counts, variations, seed, effective_threads(o.threads));
    const DensityMatrix target = family_state(FamilyParams(retrieved.p, retrieved.r));
    const DirectionMesh mesh = fibonacci_mesh(o.mesh_size);
    const Verdict verdict = classify(rho_hat, mesh, effective_threads(o.threads));

    const TomographyResult tomo{rho_hat, fidelity(rho_hat, target), retrieved, boot.sigma_p,
                                boot.sigma_r};
    json out = tomography_to_json(tomo);
    out["verdict"] = verdict_to_json(verdict);
    out["counts_total"] = counts.total;
    emit(o, out.dump(2));
    if (o.strict && (verdict.steerable_ab == CertStatus::Indeterminate ||
                     verdict.steerable_ba == CertStatus::Indeterminate))
        return kExitIndeterminate;
    return kExitOk;
}

int run_bowles(int theta_steps, int p_steps, const CommonOpts& o) {
    constexpr double quarter_pi = 0.78539816339744830961;
    std::ostringstream ss;
    ss << "theta,p,predicted\n";
    for (int i = 0; i < theta_steps; ++i) {
        const double theta =
            theta_steps == 1 ? 0.0 : quarter_pi * static_cast<double>(i) / (theta_steps - 1);
        for (int j = 0; j < p_steps; ++j) {
            const double p = p_steps == 1 ? 0.0 : static_cast<double>(j) / (p_steps - 1);
            const bool pred = bowles_one_way_predicate(ThetaFamilyParams(theta, p));
            ss << theta << ',' << p << ',' << (pred ? 1 : 0) << '\n';
        }
    }
    emit(o, ss.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"steerkit: certified one-way EPR steering analysis for two-qubit states"};
    app.require_subcommand(1);

    CommonOpts radius_opts, classify_opts, region_opts, simulate_opts, tomo_opts, bowles_opts;

    // radius
    auto* radius = app.add_subcommand("radius", "bracket the critical radius of a state");
    std::string radius_state, radius_direction = "AtoB";
    radius->add_option("state", radius_state, "density-matrix JSON file")->required();
    radius->add_option("--direction", radius_direction, "AtoB or BtoA")
        ->check(CLI::IsMember({"AtoB", "BtoA"}));
    radius->add_flag("--no-validate", radius_opts.no_validate, "skip state validation");
    add_common(radius, radius_opts);

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "steering-hierarchy verdict for a state");
    std::string classify_state, classify_family;
    classify_cmd->add_option("state", classify_state, "density-matrix JSON file");
    classify_cmd->add_option("--family", classify_family, "construct the family state p,r");
    classify_cmd->add_flag("--no-validate", classify_opts.no_validate, "skip state validation");
    add_common(classify_cmd, classify_opts);

    // region
    auto* region = app.add_subcommand("region", "scan the (p, r) family grid");
    int p_steps = 21, r_steps = 21;
    region->add_option("--p-steps", p_steps, "grid points along p")->check(CLI::Range(1, 201));
    region->add_option("--r-steps", r_steps, "grid points along r")->check(CLI::Range(1, 201));
    add_common(region, region_opts);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run the full experiment pipeline");
    SamplerConfig cfg;
    double rate = 15000.0, efficiency = 0.172;
    int variations = 20;
    std::string dump_counts;
    simulate->add_option("--p-ipt", cfg.p_ipt, "input parameter p")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--r-ipt", cfg.r_ipt, "input parameter r")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--alpha", cfg.alpha, "generation imbalance ratio")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--frames", cfg.frames, "animation frames")->check(CLI::Range(1, 10000000));
    simulate->add_option("--exposure", cfg.exposure_s, "exposure per frame, seconds")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--accumulation", cfg.accumulation_s, "coincidence accumulation, seconds")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--rate", rate, "pair generation rate, Hz")->check(CLI::PositiveNumber);
    simulate->add_option("--efficiency", efficiency, "overall detection efficiency")
        ->check(CLI::Range(1e-9, 1.0));
    simulate->add_option("--bootstrap", variations, "bootstrap variations")->check(CLI::Range(2, 10000));
    simulate->add_option("--dump-counts", dump_counts, "also write counts CSV (+ .meta.json sidecar)");
    add_common(simulate, simulate_opts);

    // tomo
    auto* tomo = app.add_subcommand("tomo", "reconstruct and certify external counts");
    std::string tomo_counts, tomo_sidecar;
    int tomo_variations = 20;
    tomo->add_option("counts", tomo_counts, "counts CSV file")->required();
    tomo->add_option("sidecar", tomo_sidecar, "sidecar JSON with duration/alpha/seed");
    tomo->add_option("--bootstrap", tomo_variations, "bootstrap variations")->check(CLI::Range(2, 10000));
    add_common(tomo, tomo_opts);

    // bowles
    auto* bowles = app.add_subcommand("bowles", "one-way predicate grid for the theta family");
    int theta_steps = 21, bowles_p_steps = 21;
    bowles->add_option("--theta-steps", theta_steps, "grid points along theta")
        ->check(CLI::Range(1, 2001));
    bowles->add_option("--p-steps", bowles_p_steps, "grid points along p")->check(CLI::Range(1, 2001));
    add_common(bowles, bowles_opts, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (radius->parsed()) return run_radius(radius_state, radius_direction, radius_opts);
        if (classify_cmd->parsed()) return run_classify(classify_state, classify_family, classify_opts);
        if (region->parsed()) return run_region(p_steps, r_steps, region_opts);
        if (simulate->parsed()) {
            cfg.seed = simulate_opts.seed;
            return run_simulate(cfg, rate, efficiency, dump_counts, variations, simulate_opts);
        }
        if (tomo->parsed()) return run_tomo(tomo_counts, tomo_sidecar, tomo_variations, tomo_opts);
        if (bowles->parsed()) return run_bowles(theta_steps, bowles_p_steps, bowles_opts);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ParamOutOfRange& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NonHermitianInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InvalidState& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitOk;
}
