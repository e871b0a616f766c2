#ifndef TOROIDSIM_GEOMETRY_HPP
#define TOROIDSIM_GEOMETRY_HPP

#include "toroidsim/config.hpp"

#include <string>
#include <vector>

namespace tsim {

// Cylindrical point around the toroid axis. d = rho - D_p/2 is the mode's
// radial coordinate measured from the outer equator.
struct CylPoint {
    double rho = 0; // m
    double z = 0;   // m
    double phi = 0; // rad, normalized to [0, 2pi)

    static CylPoint make(double rho, double z, double phi);
    double d(double principal_diameter) const { return rho - principal_diameter / 2.0; }
};

struct ModeGradient {
    double d_rho = 0; // rad/s per m
    double d_z = 0;
};

// Parametrized evanescent coupling field:
//   g(d, z) = g_max * exp(-d/lambda_bar) * exp(-(z/w0)^2),   d >= 0
// |g| is phi-uniform; phi enters only through the traveling-wave phase.
class ModeField {
  public:
    ModeField(double g_max, double lambda_bar, double w0, double k_phi,
              double principal_diameter);
    static ModeField from_config(const PhysicsConfig& cfg);

    // Scalar coupling at (d, z). Throws for d < 0 (inside the dielectric).
    double coupling(const CylPoint& p) const;
    double coupling_dz(double d, double z) const; // direct (d, z) form

    // Analytic gradient in (rho, z). Requires d >= 0.
    ModeGradient coupling_gradient(const CylPoint& p) const;

    // Phase of traveling mode a at the atom's azimuth; mode b carries the
    // negative. theta = k_phi * (D_p/2) * phi.
    double traveling_phase(const CylPoint& p) const;
    // d(theta)/ds along the azimuthal direction at radius rho
    double phase_gradient(const CylPoint& p) const;

    double g_max() const { return g_max_; }
    double lambda_bar() const { return lambda_bar_; }
    double waist() const { return w0_; }
    double k_phi() const { return k_phi_; }

    // Optional tabulated field (d, z, g) replacing the analytic profile;
    // bilinear interpolation on a rectangular grid.
    void load_table(const std::string& path);
    bool tabulated() const { return !table_.empty(); }

  private:
    double g_max_, lambda_bar_, w0_, k_phi_, d_p_;
    std::vector<double> table_d_, table_z_, table_;
    double table_value(double d, double z) const;
};

// Signed distance from the torus surface (positive outside). Used for crash
// detection and the surface physics; equals d at the equator plane.
double torus_surface_distance(const PhysicsConfig::Toroid& t, double rho, double z);

// Gradient of the surface distance in the (rho, z) half-plane (unit vector
// pointing away from the tube center circle).
void torus_surface_normal(const PhysicsConfig::Toroid& t, double rho, double z,
                          double& n_rho, double& n_z);

} // namespace tsim

#endif
