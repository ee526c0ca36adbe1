#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "steerkit/json_io.hpp"

using namespace steerkit;
using nlohmann::json;

TEST_CASE("matrix JSON round trip") {
    std::mt19937_64 gen(64);
    for (int t = 0; t < 8; ++t) {
        const ComplexMatrix m = oracles::random_state(gen, t % 2 == 0 ? 2 : 4);
        const ComplexMatrix back = matrix_from_json(matrix_to_json(m));
        CHECK(back.max_abs_diff(m) == 0.0); // exact through shortest-round-trip floats
    }
}

TEST_CASE("density matrix JSON validation") {
    // valid state parses
    const json good = matrix_to_json(family_state(FamilyParams(0.4, 0.8)).mat());
    CHECK_NOTHROW(density_matrix_from_json(good));

    // non-Hermitian rejected unless validation is off
    json bad = good;
    bad["re"][0][1] = 0.9;
    CHECK_THROWS_AS(density_matrix_from_json(bad), ParseError);
    CHECK_NOTHROW(density_matrix_from_json(bad, false));

    // malformed documents
    CHECK_THROWS_AS(matrix_from_json(json{{"dim", 3}}), ParseError);
    CHECK_THROWS_AS(matrix_from_json(json::parse("{\"dim\":2,\"re\":[[1,0]],\"im\":[]}")),
                    ParseError);
}

TEST_CASE("counts CSV round trip, missing rows, unknown tokens") {
    CountsTable t;
    std::mt19937_64 gen(5150);
    for (int a = 0; a < kOutcomes; ++a)
        for (int b = 0; b < kOutcomes; ++b) t.counts[a][b] = gen() % 1000;
    t.duration_s = 20.0;
    t.recompute_total();

    std::ostringstream out;
    write_counts_csv(out, t);
    std::istringstream in(out.str());
    const CountsTable back = read_counts_csv(in);
    CHECK(back.total == t.total);
    for (int a = 0; a < kOutcomes; ++a)
        for (int b = 0; b < kOutcomes; ++b) CHECK(back.counts[a][b] == t.counts[a][b]);

    // drop the last row
    std::string text = out.str();
    text.erase(text.rfind("Z1,Z1"));
    std::istringstream missing(text);
    CHECK_THROWS_AS(read_counts_csv(missing), ParseError);

    std::istringstream unknown("outcome_a,outcome_b,counts\nQ0,X0,5\n");
    CHECK_THROWS_AS(read_counts_csv(unknown), ParseError);

    std::istringstream badheader("a,b,c\n");
    CHECK_THROWS_AS(read_counts_csv(badheader), ParseError);
}

TEST_CASE("bracket and verdict JSON carry the specified fields") {
    const DirectionMesh mesh = fibonacci_mesh(6);
    const RadiusBracket b =
        critical_radius_bracket(DensityMatrix(singlet_projector()), SteerDirection::AtoB, mesh, 10);
    const json j = bracket_to_json(b);
    CHECK(j.at("direction") == "AtoB");
    CHECK(j.at("lo").is_number());
    CHECK((j.at("hi").is_number() || j.at("hi").is_null()));
    CHECK(j.at("eta").is_number());
    CHECK(j.at("mesh_size") == 6);
    CHECK(j.contains("lhs_residual"));
    CHECK(j.contains("certificate_margin"));

    ComplexMatrix q = ComplexMatrix::identity(4);
    q *= 0.25;
    const json v = verdict_to_json(classify(DensityMatrix(q), mesh));
    CHECK(v.at("label") == "SEPARABLE");
    CHECK(v.at("steerable_ab") == "UNSTEERABLE");
    CHECK(v.at("steerable_ba") == "UNSTEERABLE");
}

TEST_CASE("region CSV format") {
    const DirectionMesh mesh = fibonacci_mesh(3);
    const auto cells = region_scan({0.0, 1.0}, {0.0}, mesh, 1);
    std::ostringstream out;
    write_region_csv(out, cells);
    const std::string text = out.str();
    CHECK(text.rfind("p,r,verdict_ab,verdict_ba,label\n", 0) == 0);
    CHECK(text.find("SEPARABLE") != std::string::npos);
    CHECK(text.find("TWO_WAY_STEERABLE") != std::string::npos);
    // exactly 3 lines: header + 2 cells
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
