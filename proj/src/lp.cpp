#include "steerkit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "steerkit/errors.hpp"

namespace steerkit::lp {

std::array<double, 4> pauli_coords(const ComplexMatrix& m) {
    if (m.dim() != 2) throw DimensionMismatch("pauli_coords: expected 2x2 input");
    return {std::real(m(0, 0) + m(1, 1)), 2.0 * std::real(m(0, 1)),
            -2.0 * std::imag(m(0, 1)), std::real(m(0, 0) - m(1, 1))};
}

ComplexMatrix from_pauli_coords(const std::array<double, 4>& h) {
    ComplexMatrix m(2);
    m(0, 0) = 0.5 * (h[0] + h[3]);
    m(1, 1) = 0.5 * (h[0] - h[3]);
    m(0, 1) = cplx(0.5 * h[1], -0.5 * h[2]);
    m(1, 0) = std::conj(m(0, 1));
    return m;
}

namespace {

// Dense LU with partial pivoting; m <= 68 here, so refactorizing each
// pivot is cheaper than maintaining an update.
class Lu {
public:
    bool factor(std::vector<double> a, int n) {
        n_ = n;
        lu_ = std::move(a);
        piv_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) piv_[static_cast<std::size_t>(i)] = i;
        for (int col = 0; col < n; ++col) {
            int best = col;
            double bv = std::abs(lu_[static_cast<std::size_t>(col * n + col)]);
            for (int r = col + 1; r < n; ++r) {
                const double v = std::abs(lu_[static_cast<std::size_t>(r * n + col)]);
                if (v > bv) { bv = v; best = r; }
            }
            if (bv < 1e-13) return false;
            if (best != col) {
                for (int j = 0; j < n; ++j)
                    std::swap(lu_[static_cast<std::size_t>(col * n + j)],
                              lu_[static_cast<std::size_t>(best * n + j)]);
                std::swap(piv_[static_cast<std::size_t>(col)], piv_[static_cast<std::size_t>(best)]);
            }
            const double d = lu_[static_cast<std::size_t>(col * n + col)];
            for (int r = col + 1; r < n; ++r) {
                const double f = lu_[static_cast<std::size_t>(r * n + col)] / d;
                lu_[static_cast<std::size_t>(r * n + col)] = f;
                if (f == 0.0) continue;
                for (int j = col + 1; j < n; ++j)
                    lu_[static_cast<std::size_t>(r * n + j)] -= f * lu_[static_cast<std::size_t>(col * n + j)];
            }
        }
        return true;
    }

    // solve A x = b
    void solve(const std::vector<double>& b, std::vector<double>& x) const {
        const int n = n_;
        x.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(piv_[static_cast<std::size_t>(i)])];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j)
                x[static_cast<std::size_t>(i)] -= lu_[static_cast<std::size_t>(i * n + j)] * x[static_cast<std::size_t>(j)];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j)
                x[static_cast<std::size_t>(i)] -= lu_[static_cast<std::size_t>(i * n + j)] * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] /= lu_[static_cast<std::size_t>(i * n + i)];
        }
    }

    // solve A^T y = c
    void solve_transposed(const std::vector<double>& c, std::vector<double>& y) const {
        const int n = n_;
        std::vector<double> t(c);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j)
                t[static_cast<std::size_t>(i)] -= lu_[static_cast<std::size_t>(j * n + i)] * t[static_cast<std::size_t>(j)];
            t[static_cast<std::size_t>(i)] /= lu_[static_cast<std::size_t>(i * n + i)];
        }
        for (int i = n - 1; i >= 0; --i)
            for (int j = i + 1; j < n; ++j)
                t[static_cast<std::size_t>(i)] -= lu_[static_cast<std::size_t>(j * n + i)] * t[static_cast<std::size_t>(j)];
        y.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(piv_[static_cast<std::size_t>(i)])] = t[static_cast<std::size_t>(i)];
    }

private:
    int n_ = 0;
    std::vector<double> lu_;
    std::vector<int> piv_;
};

void materialize(const Column& col, int n, std::vector<double>& a) {
    const int m = 4 * n + 4;
    a.assign(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < n; ++k) {
        if (col.strategy >> k & 1u) {
            a[static_cast<std::size_t>(4 * k)] = 1.0;
            a[static_cast<std::size_t>(4 * k + 1)] = col.bloch[0];
            a[static_cast<std::size_t>(4 * k + 2)] = col.bloch[1];
            a[static_cast<std::size_t>(4 * k + 3)] = col.bloch[2];
        }
    }
    a[static_cast<std::size_t>(4 * n)] = 1.0;
    a[static_cast<std::size_t>(4 * n + 1)] = col.bloch[0];
    a[static_cast<std::size_t>(4 * n + 2)] = col.bloch[1];
    a[static_cast<std::size_t>(4 * n + 3)] = col.bloch[2];
}

struct Generated {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<Column> top; ///< best column per strategy, highest values
};

// Exact pricing over the whole column universe: for duals y,
// max over (strategy, bloch) of y.a = c0(strategy) + |cvec(strategy)| with
// the strategy sums walked in Gray-code order (O(1) per strategy). Returns
// the top_k best distinct strategies with their maximizing Bloch vectors.
Generated price_universe(const std::vector<double>& y, int n, double tol, std::size_t top_k) {
    const int tail = 4 * n;
    double c0 = y[static_cast<std::size_t>(tail)];
    double cv0 = y[static_cast<std::size_t>(tail + 1)];
    double cv1 = y[static_cast<std::size_t>(tail + 2)];
    double cv2 = y[static_cast<std::size_t>(tail + 3)];

    struct Entry {
        double value;
        Column col;
    };
    std::vector<Entry> heap; // min-heap on value, size <= top_k
    auto cmp = [](const Entry& a, const Entry& b) { return a.value > b.value; };

    Generated out;
    std::uint32_t gray = 0;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t g = 0;; ++g) {
        const double cn = std::sqrt(cv0 * cv0 + cv1 * cv1 + cv2 * cv2);
        const double val = c0 + cn;
        out.best = std::max(out.best, val);
        if (val > tol && (heap.size() < top_k || val > heap.front().value)) {
            Entry e{val, Column{gray, cn > 1e-14 ? Vec3{cv0 / cn, cv1 / cn, cv2 / cn}
                                                 : Vec3{0, 0, 1}}};
            if (heap.size() == top_k) {
                std::pop_heap(heap.begin(), heap.end(), cmp);
                heap.back() = e;
            } else {
                heap.push_back(e);
            }
            std::push_heap(heap.begin(), heap.end(), cmp);
        }
        if (g + 1 == count) break;
        const int bit = __builtin_ctzll(g + 1);
        const std::uint32_t mask = std::uint32_t{1} << bit;
        const double s = (gray & mask) ? -1.0 : 1.0;
        gray ^= mask;
        c0 += s * y[static_cast<std::size_t>(4 * bit)];
        cv0 += s * y[static_cast<std::size_t>(4 * bit + 1)];
        cv1 += s * y[static_cast<std::size_t>(4 * bit + 2)];
        cv2 += s * y[static_cast<std::size_t>(4 * bit + 3)];
    }
    out.top.reserve(heap.size());
    for (const auto& e : heap) out.top.push_back(e.col);
    return out;
}

// Candidate hidden states read off the assemblage itself: the normalized
// Bloch vectors of the blocks and of the total, plus the coordinate axes.
// For each candidate u the full nested chain of threshold strategies is
// seeded (answer "+" for the j settings whose block direction overlaps u
// most). Assemblages whose optimal model sits at one hidden point (pure
// product states) are then exactly solvable from the seed pool.
std::vector<Column> seed_columns(const std::vector<double>& rhs, int n) {
    std::vector<Vec3> us = {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
    auto add_unit = [&](double x, double y, double z) {
        const double nn = std::sqrt(x * x + y * y + z * z);
        if (nn > 1e-9) us.push_back({x / nn, y / nn, z / nn});
    };
    const double t1 = rhs[static_cast<std::size_t>(4 * n + 1)];
    const double t2 = rhs[static_cast<std::size_t>(4 * n + 2)];
    const double t3 = rhs[static_cast<std::size_t>(4 * n + 3)];
    add_unit(t1, t2, t3);
    add_unit(-t1, -t2, -t3);
    for (int k = 0; k < n; ++k) {
        const double b1 = rhs[static_cast<std::size_t>(4 * k + 1)];
        const double b2 = rhs[static_cast<std::size_t>(4 * k + 2)];
        const double b3 = rhs[static_cast<std::size_t>(4 * k + 3)];
        add_unit(b1, b2, b3);                          // sigma_{+|k} direction
        add_unit(t1 - b1, t2 - b2, t3 - b3);           // sigma_{-|k} direction
    }

    std::vector<Column> cols;
    cols.reserve(us.size() * static_cast<std::size_t>(n + 1));
    std::vector<int> order(static_cast<std::size_t>(n));
    std::vector<double> overlap(static_cast<std::size_t>(n));
    for (const auto& u : us) {
        for (int k = 0; k < n; ++k) {
            const double b1 = rhs[static_cast<std::size_t>(4 * k + 1)];
            const double b2 = rhs[static_cast<std::size_t>(4 * k + 2)];
            const double b3 = rhs[static_cast<std::size_t>(4 * k + 3)];
            overlap[static_cast<std::size_t>(k)] =
                u[0] * (2.0 * b1 - t1) + u[1] * (2.0 * b2 - t2) + u[2] * (2.0 * b3 - t3);
            order[static_cast<std::size_t>(k)] = k;
        }
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return overlap[static_cast<std::size_t>(a)] > overlap[static_cast<std::size_t>(b)];
        });
        std::uint32_t lam = 0;
        cols.push_back({lam, u});
        for (int j = 0; j < n; ++j) {
            lam |= std::uint32_t{1} << order[static_cast<std::size_t>(j)];
            cols.push_back({lam, u});
        }
    }
    return cols;
}

} // namespace

Result solve_lhs_lp(const std::vector<double>& rhs, int n_settings, const Options& opt) {
    const int n = n_settings;
    const int m = 4 * n + 4;
    if (static_cast<int>(rhs.size()) != m)
        throw DimensionMismatch("solve_lhs_lp: rhs size does not match 4N+4");
    if (n < 1 || n > 16) throw ParamOutOfRange("solve_lhs_lp: N must lie in [1,16]");

    const int max_pivots = opt.max_iterations > 0 ? opt.max_iterations : 4000 + 400 * n;
    const int max_rounds = 400;

    std::vector<Column> pool = seed_columns(rhs, n);
    std::vector<std::vector<double>> pool_vecs;
    pool_vecs.reserve(pool.size() + 256);
    for (const auto& c : pool) {
        pool_vecs.emplace_back();
        materialize(c, n, pool_vecs.back());
    }
    std::vector<char> in_basis(pool.size(), 0);
    std::vector<char> banned(pool.size(), 0);

    // basis entry: >= 0 index into pool; < 0 encodes artificial for row -idx-1
    std::vector<int> basis(static_cast<std::size_t>(m));
    std::vector<double> art_sign(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        basis[static_cast<std::size_t>(i)] = -i - 1;
        art_sign[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i)] >= 0.0 ? 1.0 : -1.0;
    }

    std::vector<double> bmat(static_cast<std::size_t>(m * m)), xb, y, cb(static_cast<std::size_t>(m)), d;
    Lu lu;
    Result res;
    int pivots = 0;

    // factorize current basis and refresh primal/dual quantities
    auto refresh = [&]() -> bool {
        std::fill(bmat.begin(), bmat.end(), 0.0);
        for (int j = 0; j < m; ++j) {
            const int bj = basis[static_cast<std::size_t>(j)];
            if (bj < 0) {
                bmat[static_cast<std::size_t>((-bj - 1) * m + j)] = art_sign[static_cast<std::size_t>(-bj - 1)];
            } else {
                const auto& a = pool_vecs[static_cast<std::size_t>(bj)];
                for (int i = 0; i < m; ++i) bmat[static_cast<std::size_t>(i * m + j)] = a[static_cast<std::size_t>(i)];
            }
        }
        if (!lu.factor(bmat, m)) return false;
        lu.solve(rhs, xb);
        for (int j = 0; j < m; ++j) cb[static_cast<std::size_t>(j)] = basis[static_cast<std::size_t>(j)] < 0 ? 1.0 : 0.0;
        lu.solve_transposed(cb, y);
        return true;
    };

    auto objective = [&]() {
        double obj = 0.0;
        for (int j = 0; j < m; ++j)
            if (basis[static_cast<std::size_t>(j)] < 0) obj += xb[static_cast<std::size_t>(j)];
        return obj;
    };

    auto pivot_in = [&](int col_idx) -> bool {
        lu.solve(pool_vecs[static_cast<std::size_t>(col_idx)], d);
        int leave = -1;
        double theta = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            if (d[static_cast<std::size_t>(j)] > 1e-11) {
                const double ratio =
                    std::max(xb[static_cast<std::size_t>(j)], 0.0) / d[static_cast<std::size_t>(j)];
                if (ratio < theta - 1e-12) {
                    theta = ratio;
                    leave = j;
                } else if (ratio <= theta + 1e-12 && leave >= 0) {
                    // on ties drive artificials out first, then lowest entry
                    const bool cand_art = basis[static_cast<std::size_t>(j)] < 0;
                    const bool cur_art = basis[static_cast<std::size_t>(leave)] < 0;
                    if (cand_art && !cur_art) leave = j;
                    else if (cand_art == cur_art &&
                             basis[static_cast<std::size_t>(j)] < basis[static_cast<std::size_t>(leave)])
                        leave = j;
                }
            }
        }
        if (leave < 0) return false; // phase-1 cannot be unbounded; numerical guard
        const int old = basis[static_cast<std::size_t>(leave)];
        if (old >= 0) in_basis[static_cast<std::size_t>(old)] = 0;
        basis[static_cast<std::size_t>(leave)] = col_idx;
        in_basis[static_cast<std::size_t>(col_idx)] = 1;
        ++pivots;
        return true;
    };

    if (!refresh()) {
        res.status = Status::IterationLimit;
        return res;
    }

    for (int round = 0; round < max_rounds; ++round) {
        // ---- restricted master: optimize over the current pool ----
        double prev_obj = std::numeric_limits<double>::infinity();
        int stall = 0;
        bool bland = false;
        for (;;) {
            const double obj = objective();
            res.objective = obj;
            res.iterations = pivots;
            if (obj <= opt.feasibility_tol) {
                for (int j = 0; j < m; ++j) {
                    const int bj = basis[static_cast<std::size_t>(j)];
                    if (bj >= 0 && xb[static_cast<std::size_t>(j)] > 1e-14) {
                        res.columns.push_back(pool[static_cast<std::size_t>(bj)]);
                        res.weights.push_back(std::max(xb[static_cast<std::size_t>(j)], 0.0));
                    }
                }
                res.status = Status::Feasible;
                return res;
            }
            if (pivots >= max_pivots) {
                res.status = Status::IterationLimit;
                return res;
            }
            if (obj >= prev_obj - 1e-13) {
                if (++stall >= opt.stall_limit) bland = true;
            } else {
                stall = 0;
            }
            prev_obj = obj;

            // price the pool: reduced cost of column a is -y.a
            int enter = -1;
            double best_rc = opt.pricing_tol;
            for (std::size_t c = 0; c < pool_vecs.size(); ++c) {
                if (in_basis[c] || banned[c]) continue;
                double ya = 0.0;
                for (int i = 0; i < m; ++i)
                    ya += y[static_cast<std::size_t>(i)] * pool_vecs[c][static_cast<std::size_t>(i)];
                if (ya > best_rc) {
                    best_rc = ya;
                    enter = static_cast<int>(c);
                    if (bland) break; // first improving column
                }
            }
            if (enter < 0) break; // pool priced out
            if (!pivot_in(enter)) {
                // numerically unusable direction; exclude it and move on
                banned[static_cast<std::size_t>(enter)] = 1;
                continue;
            }
            if (!refresh()) {
                res.status = Status::IterationLimit;
                return res;
            }
        }

        // ---- exact pricing over the full column universe ----
        const Generated gen = price_universe(y, n, opt.pricing_tol, 8);

        double ynorm = 0.0;
        for (double v : y) ynorm += v * v;
        ynorm = std::sqrt(ynorm);

        // Any dual with y.b - max(y.a) > 0 proves infeasibility outright; the
        // threshold scales with |y| so the certificate survives normalization.
        if (res.objective - std::max(gen.best, 0.0) >= opt.early_margin * std::max(1.0, ynorm) ||
            gen.best <= opt.pricing_tol) {
            res.farkas.resize(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) res.farkas[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] / ynorm;
            res.status = Status::Infeasible;
            return res;
        }
        for (const auto& col : gen.top) {
            pool.push_back(col);
            pool_vecs.emplace_back();
            materialize(col, n, pool_vecs.back());
            in_basis.push_back(0);
            banned.push_back(0);
        }
    }
    res.status = Status::IterationLimit;
    return res;
}

} // namespace steerkit::lp
