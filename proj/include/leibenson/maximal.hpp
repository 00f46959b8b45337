#pragma once

namespace leibenson {

/// Sphere of radius R centred at the origin, seen from a ball centred at
/// distance x_norm from the origin.
struct CapGeometry {
  double sphere_radius = 1.0;
  double x_norm = 0.0;
};

/// Height of the part of the sphere inside B_r(x): 0 below |x_norm - R|,
/// 2R above x_norm + R. Throws DomainError for x_norm <= 0 or R <= 0.
double cap_height(const CapGeometry& geom, double r);

/// Surface measure 2πR·h(r) of that part (d = 3).
double cap_area(const CapGeometry& geom, double r);

/// sup_r cap_area(r)/|B_r| in closed form for d = 3. Throws DomainError at
/// x_norm = 0 and on the sphere itself, where the value is +∞.
double maximal_surface_d3(const CapGeometry& geom);

/// Dimension-checked entry point; only d = 3 is available in closed form.
double maximal_surface(const CapGeometry& geom, int d);

struct BruteForceMaximum {
  double value = 0.0;
  double argmax = 0.0;
};

/// Log-spaced scan of r on (|x_norm - R|(1 - 1e-6), 1.01(x_norm + R)], refined
/// by golden-section search around the best grid point.
BruteForceMaximum maximal_surface_bruteforce(const CapGeometry& geom, int grid_size = 4096);

}  // namespace leibenson
