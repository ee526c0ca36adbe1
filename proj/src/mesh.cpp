#include "steerkit/mesh.hpp"

#include <cmath>
#include <limits>

namespace steerkit {

DirectionMesh::DirectionMesh(std::vector<Vec3> directions) : dirs_(std::move(directions)) {
    for (auto& d : dirs_) {
        const double n = norm(d);
        if (std::abs(n - 1.0) > 1e-12)
            throw ParamOutOfRange("DirectionMesh: direction norm differs from 1 beyond 1e-12");
        d = (1.0 / n) * d;
    }
    for (std::size_t i = 0; i < dirs_.size(); ++i)
        for (std::size_t j = i + 1; j < dirs_.size(); ++j) {
            const double c = std::abs(dot(dirs_[i], dirs_[j]));
            // |cos| close to 1 means parallel or antiparallel within ~1e-6 rad
            if (c >= 1.0 - 5e-13)
                throw ParamOutOfRange("DirectionMesh: parallel or antiparallel directions");
        }
}

double DirectionMesh::eta() const {
    if (!eta_) eta_ = shrinking_factor(*this);
    return *eta_;
}

DirectionMesh fibonacci_mesh(int n) {
    if (n < 2) throw MeshTooSmall("fibonacci_mesh: need at least 2 directions");
    if (n > 16) throw MeshTooLarge("fibonacci_mesh: at most 16 directions supported");

    std::vector<Vec3> dirs;
    if (n == 3) {
        dirs = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    } else if (n == 6) {
        const double phi = 0.5 * (1.0 + std::sqrt(5.0));
        const double s = 1.0 / std::sqrt(1.0 + phi * phi);
        dirs = {Vec3{0, s, phi * s},  Vec3{0, s, -phi * s}, Vec3{s, phi * s, 0},
                Vec3{s, -phi * s, 0}, Vec3{phi * s, 0, s},  Vec3{-phi * s, 0, s}};
    } else {
        // golden-angle spiral on the upper hemisphere; antipodes never collide
        const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < n; ++i) {
            const double z = (i + 0.5) / n;
            const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = golden_angle * i;
            dirs.push_back({rxy * std::cos(th), rxy * std::sin(th), z});
        }
    }
    DirectionMesh mesh(std::move(dirs));
    if (n >= 3) mesh.eta(); // precompute; n = 2 is degenerate by construction
    return mesh;
}

double shrinking_factor(const DirectionMesh& mesh) {
    std::vector<Vec3> verts;
    verts.reserve(2 * mesh.size());
    for (const auto& d : mesh.directions()) {
        verts.push_back(d);
        verts.push_back({-d[0], -d[1], -d[2]});
    }
    const std::size_t m = verts.size();

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t k = j + 1; k < m; ++k) {
                Vec3 nrm = cross(verts[j] - verts[i], verts[k] - verts[i]);
                const double len = norm(nrm);
                if (len < 1e-12) continue; // collinear triple
                nrm = (1.0 / len) * nrm;
                const double c = dot(nrm, verts[i]);
                bool below = true, above = true;
                for (std::size_t t = 0; t < m; ++t) {
                    const double d = dot(nrm, verts[t]);
                    if (d > c + 1e-9) below = false;
                    if (d < c - 1e-9) above = false;
                    if (!below && !above) break;
                }
                if (!below && !above) continue;
                // a supporting plane through the origin means all vertices are
                // coplanar (the vertex set is antipodally symmetric)
                if (std::abs(c) < 1e-9)
                    throw DegenerateHull("shrinking_factor: coplanar direction set");
                best = std::min(best, std::abs(c));
            }
    if (!std::isfinite(best))
        throw DegenerateHull("shrinking_factor: no facets found (degenerate hull)");
    return best;
}

} // namespace steerkit
