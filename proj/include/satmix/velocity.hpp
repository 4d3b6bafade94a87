#pragma once

#include <vector>

#include "satmix/grid.hpp"

namespace satmix {

// Face-normal difference quotient of a cell field: (phi_plus - phi_minus)/h
// on interior fluid-fluid faces (wrapping on periodic axes), 0 on wall
// boundary and fluid-solid faces.
FaceField face_gradient(const ScalarField& phi, const Grid& g);

// First-order fast marching solution of |grad D| = 1 with D = 0 on target
// cells. Solid cells and fluid cells unreachable from the target hold +inf;
// unreachable fluid cells are allowed and counted via count_unreachable.
ScalarField fast_march_distance(const Grid& g, const std::vector<std::uint8_t>& target);

int count_unreachable(const ScalarField& dist, const Grid& g);

enum class VelocityKind { constant_vector, explicit_potential, geodesic_to_target, chemotaxis };

struct PotentialSpec {
    VelocityKind kind = VelocityKind::constant_vector;
    double ux = 0.0, uy = 0.0;            // constant_vector
    std::vector<double> potential;        // explicit_potential, cell values
    std::vector<std::uint8_t> target;     // geodesic_to_target, cell mask
};

// Desired (unconstrained) velocity on faces:
//   constant_vector    the vector broadcast to interior fluid-fluid faces
//   explicit_potential face_gradient of -potential
//   geodesic_to_target face_gradient of -fast_march_distance
//   chemotaxis         face_gradient of the chemoattractant potential of rho
FaceField desired_velocity(const PotentialSpec& spec, const ScalarField& rho,
                           const Grid& g, double tol = 1e-10);

}  // namespace satmix
