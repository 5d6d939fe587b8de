#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hfrac/solver.hpp"

namespace hfrac {

struct PropertyCheck {
    std::string name;
    std::size_t samples = 0;
    double max_rel_err = 0.0;
};

/// Associativity, identity, inverse, norm homogeneity, norm symmetry and left
/// invariance of the distance on random points of H^N.
std::vector<PropertyCheck> group_axiom_suite(int n, std::size_t samples, std::uint64_t seed);

/// Irregular point cloud: `interior` uniform points in [-1,1]^{2N+1}, `collar`
/// points in the shell 1 < |coord|_inf < 1.5, all with volume `vol`.
std::shared_ptr<const Mesh> random_cloud_mesh(int n, std::size_t interior, std::size_t collar, double vol,
                                              std::uint64_t seed);

/// Uniform values in [lo, hi] on interior nodes, zero on the collar.
Field random_interior_field(const Mesh& mesh, std::mt19937_64& rng, double lo, double hi);

/// max_i |R_i - D_i| / max_i |R_i| where D is the central difference of (1/p) energy
/// with step `step` (scaled by max(1, |u_i|)).
double gradient_fd_error(const KernelGraph& graph, const Field& u, double step = 1e-5);

/// Root of 2 W u^{p-1} = f_n (u + 1/n)^{-delta} vol by bisection: the level-n
/// solution at a single interior node whose neighbours are all collar nodes.
double scalar_oracle(double collar_weight, double p, double f, double vol, double n, double delta,
                     double tol = 1e-15);

/// One interior node at the origin of H^N; its 3^{2N+1} - 1 lattice neighbours form the collar.
std::shared_ptr<const Mesh> single_node_mesh(int n, double h);

}  // namespace hfrac
