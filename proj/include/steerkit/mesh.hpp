#pragma once

#include <optional>
#include <vector>

#include "steerkit/complex_matrix.hpp"

namespace steerkit {

/// Finite set of Alice measurement axes together with its shrinking factor.
/// The shrinking factor eta is the inradius of conv{+-n_k}; an LHS model on
/// the mesh at depolarization x lifts to all projective measurements at eta*x.
class DirectionMesh {
public:
    explicit DirectionMesh(std::vector<Vec3> directions);

    const std::vector<Vec3>& directions() const { return dirs_; }
    std::size_t size() const { return dirs_.size(); }

    /// Cached shrinking factor; computed on first use. Throws DegenerateHull
    /// for coplanar direction sets.
    double eta() const;

private:
    std::vector<Vec3> dirs_;
    mutable std::optional<double> eta_;
};

/// Spiral-distributed axes on the upper hemisphere, deterministic for fixed n.
/// n = 3 is the canonical octahedron {x,y,z}; n = 6 the icosahedral axes.
DirectionMesh fibonacci_mesh(int n);

/// Inradius of conv{+-n_k}: brute-force facet enumeration over vertex triples.
/// Throws DegenerateHull when all points are coplanar.
double shrinking_factor(const DirectionMesh& mesh);

} // namespace steerkit
