#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "steerkit/complex_matrix.hpp"

namespace steerkit::lp {

/// One generated LP column: a deterministic response strategy over the N
/// settings (bit k set = answer "+" for setting k) paired with a pure hidden
/// state on the Bloch sphere.
struct Column {
    std::uint32_t strategy = 0;
    Vec3 bloch{0.0, 0.0, 1.0};
};

struct Options {
    double feasibility_tol = 1e-9;
    double pricing_tol = 1e-10;
    /// Stop as infeasible once objective - best_price exceeds this; the dual
    /// is already a verifiable Farkas certificate at that point.
    double early_margin = 1e-7;
    int max_iterations = 0; ///< 0 = auto (scales with N)
    int stall_limit = 60;   ///< iterations without progress before Bland's rule
};

enum class Status { Feasible, Infeasible, IterationLimit };

struct Result {
    Status status = Status::IterationLimit;
    double objective = 0.0; ///< phase-1 optimum (l1 residual mass)
    int iterations = 0;
    std::vector<Column> columns; ///< model columns (Feasible)
    std::vector<double> weights; ///< matching weights >= 0
    std::vector<double> farkas;  ///< dual vector, l2-normalized (Infeasible)
};

/// Phase-1 revised simplex with exact column generation for the LHS
/// feasibility problem.  rhs packs, in Pauli coordinates
/// (tr M, tr M sx, tr M sy, tr M sz), the N "+" blocks followed by the total
/// block; m = 4N + 4 rows.  Pricing maximizes y.a over all (strategy, bloch)
/// pairs in closed form, enumerating all 2^N strategies per round.
Result solve_lhs_lp(const std::vector<double>& rhs, int n_settings, const Options& opt = {});

/// Pauli coordinates of a 2x2 Hermitian matrix.
std::array<double, 4> pauli_coords(const ComplexMatrix& m);

/// Inverse of pauli_coords.
ComplexMatrix from_pauli_coords(const std::array<double, 4>& h);

} // namespace steerkit::lp
