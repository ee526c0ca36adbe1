#include "steerkit/json_io.hpp"

#include <ostream>
#include <sstream>

namespace steerkit {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& m) {
    const std::size_t n = m.dim();
    json re = json::array(), im = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json rrow = json::array(), irow = json::array();
        for (std::size_t j = 0; j < n; ++j) {
            rrow.push_back(std::real(m(i, j)));
            irow.push_back(std::imag(m(i, j)));
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json{{"dim", n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im"))
        throw ParseError("matrix JSON: expected object with dim, re, im");
    const auto dim = j.at("dim").get<std::size_t>();
    if (dim != 2 && dim != 4) throw ParseError("matrix JSON: dim must be 2 or 4");
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (!re.is_array() || !im.is_array() || re.size() != dim || im.size() != dim)
        throw ParseError("matrix JSON: re/im must be dim x dim arrays");
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (!re[i].is_array() || !im[i].is_array() || re[i].size() != dim || im[i].size() != dim)
            throw ParseError("matrix JSON: re/im must be dim x dim arrays");
        for (std::size_t k = 0; k < dim; ++k) {
            if (!re[i][k].is_number() || !im[i][k].is_number())
                throw ParseError("matrix JSON: entries must be numbers");
            m(i, k) = cplx(re[i][k].get<double>(), im[i][k].get<double>());
        }
    }
    return m;
}

DensityMatrix density_matrix_from_json(const json& j, bool validate, double tolerance) {
    ComplexMatrix m = matrix_from_json(j);
    if (validate) {
        try {
            return DensityMatrix(std::move(m), tolerance);
        } catch (const Error& e) {
            throw ParseError(std::string("density matrix validation failed: ") + e.what());
        }
    }
    // unvalidated path: symmetrize and normalize so downstream algebra is sane
    ComplexMatrix h(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t k = 0; k < m.dim(); ++k) h(i, k) = 0.5 * (m(i, k) + std::conj(m(k, i)));
    const double tr = std::real(h.trace());
    if (tr != 0.0) h *= 1.0 / tr;
    return DensityMatrix(std::move(h), 1e9); // effectively unchecked
}

json bracket_to_json(const RadiusBracket& b) {
    json out{{"direction", b.direction == SteerDirection::AtoB ? "AtoB" : "BtoA"},
             {"lo", b.lo},
             {"eta", b.eta},
             {"mesh_size", b.mesh_size}};
    if (b.hi)
        out["hi"] = *b.hi;
    else
        out["hi"] = nullptr;
    out["lhs_residual"] = b.lo_certificate ? json(b.lo_certificate->residual) : json();
    out["certificate_margin"] = b.hi_certificate ? json(b.hi_certificate->margin) : json();
    out["lo_probe_x"] = b.lo_probe_x;
    out["indeterminate_probes"] = b.indeterminate_probes;
    return out;
}

json verdict_to_json(const Verdict& v) {
    return json{{"steerable_ab", to_string(v.steerable_ab)},
                {"steerable_ba", to_string(v.steerable_ba)},
                {"label", to_string(v.label)},
                {"min_pt_eigenvalue", v.min_pt_eigenvalue}};
}

json tomography_to_json(const TomographyResult& t) {
    return json{{"rho_hat", matrix_to_json(t.rho_hat.mat())},
                {"fidelity_to_target", t.fidelity_to_target},
                {"retrieved",
                 json{{"p", t.retrieved.p},
                      {"r", t.retrieved.r},
                      {"residual", t.retrieved.residual},
                      {"clamped", t.retrieved.clamped},
                      {"degenerate_r", t.retrieved.degenerate_r}}},
                {"bootstrap_sigma_p", t.bootstrap_sigma_p},
                {"bootstrap_sigma_r", t.bootstrap_sigma_r}};
}

json report_to_json(const ExperimentReport& r) {
    return json{{"p_ipt", r.config.p_ipt},
                {"r_ipt", r.config.r_ipt},
                {"alpha", r.config.alpha},
                {"p_cfg", r.p_cfg},
                {"r_cfg", r.r_cfg},
                {"frames", r.config.frames},
                {"seed", r.config.seed},
                {"bootstrap_variations", r.bootstrap_variations},
                {"counts_total", r.counts.total},
                {"duration_s", r.counts.duration_s},
                {"tomography", tomography_to_json(r.tomography)},
                {"verdict", verdict_to_json(r.verdict)},
                {"bracket_ab", bracket_to_json(r.bracket_ab)},
                {"bracket_ba", bracket_to_json(r.bracket_ba)}};
}

void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells) {
    os << "p,r,verdict_ab,verdict_ba,label\n";
    for (const auto& c : cells) {
        os << c.p << ',' << c.r << ',' << to_string(c.verdict.steerable_ab) << ','
           << to_string(c.verdict.steerable_ba) << ',' << to_string(c.verdict.label) << '\n';
    }
}

void write_counts_csv(std::ostream& os, const CountsTable& table) {
    os << "outcome_a,outcome_b,counts\n";
    for (int a = 0; a < kOutcomes; ++a)
        for (int b = 0; b < kOutcomes; ++b)
            os << outcome_token(a) << ',' << outcome_token(b) << ',' << table.counts[a][b] << '\n';
}

CountsTable read_counts_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("counts CSV: empty file");
    // tolerate a UTF-8 BOM and trailing CR
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "outcome_a,outcome_b,counts")
        throw ParseError("counts CSV: bad header, expected outcome_a,outcome_b,counts");

    CountsTable table;
    bool seen[kOutcomes][kOutcomes] = {};
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string ta, tb, tc;
        if (!std::getline(ss, ta, ',') || !std::getline(ss, tb, ',') || !std::getline(ss, tc))
            throw ParseError("counts CSV: malformed row: " + line);
        const auto ia = outcome_index(ta);
        const auto ib = outcome_index(tb);
        if (!ia || !ib) throw ParseError("counts CSV: unknown outcome token in row: " + line);
        std::uint64_t value = 0;
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(tc, &pos);
            if (pos != tc.size() || v < 0) throw ParseError("");
            value = static_cast<std::uint64_t>(v);
        } catch (...) {
            throw ParseError("counts CSV: bad count value in row: " + line);
        }
        if (seen[*ia][*ib]) throw ParseError("counts CSV: duplicate outcome pair: " + line);
        seen[*ia][*ib] = true;
        table.counts[*ia][*ib] = value;
    }
    for (int a = 0; a < kOutcomes; ++a)
        for (int b = 0; b < kOutcomes; ++b)
            if (!seen[a][b])
                throw ParseError(std::string("counts CSV: missing outcome pair ") + outcome_token(a) +
                                 "," + outcome_token(b));
    table.recompute_total();
    return table;
}

} // namespace steerkit
