#ifndef TOROIDSIM_CQED_HPP
#define TOROIDSIM_CQED_HPP

#include "toroidsim/config.hpp"

#include <array>
#include <complex>
#include <vector>

namespace tsim {

using cplx = std::complex<double>;

// Conventions (fixed here, used everywhere):
//   * detunings: Delta_pa = w_p - w_a0, Delta_ca = w_c - w_a0,
//     Delta_pc = Delta_pa - Delta_ca; the surface shift moves the atom line,
//     so the operative atomic detuning is Delta_pa - delta_a.
//   * the atom couples to the traveling modes a, b with (g/sqrt(2)) e^{-i theta}
//     and (g/sqrt(2)) e^{+i theta}. With that normalization g is the coupling
//     entering the vacuum-Rabi splitting: Im(l+ - l-) = sqrt(Delta_ca^2 + 4 g^2)
//     in the strong-coupling limit, and 2g exactly when h = kappa = gamma = 0.
//   * rates are amplitude decay rates (kappa = kappa_i + kappa_ex is the
//     field HWHM; gamma has free-space value gamma0 = 2pi * 2.6 MHz).
//   * input-output closure for unit input flux amplitude s_in:
//     t = -1 + sqrt(2 kappa_ex) <a> / s_in (forward), r = sqrt(2 kappa_ex) <b> / s_in
//     so the empty cavity at h = 0, Delta_pc = 0, kappa_ex = kappa_i gives t = 0
//     (critical coupling).
struct CavityAtomParams {
    double g = 0;         // rad/s, standing-wave (Rabi) coupling at the atom
    double theta = 0;     // rad, traveling-wave phase at the atom azimuth
    double delta_pa = 0;  // rad/s
    double delta_ca = 0;  // rad/s
    double delta_a = 0;   // rad/s, surface shift (<= 0)
    double kappa_i = 0;   // rad/s
    double kappa_ex = 0;  // rad/s
    double h = 0;         // rad/s
    double gamma = 0;     // rad/s, boundary-modified atomic amplitude decay
    double drive = 0;     // s_in, sqrt(photon flux): |s_in|^2 = P_in/(hbar w_p)

    double kappa() const { return kappa_i + kappa_ex; }
    double delta_pc() const { return delta_pa - delta_ca; }
    static CavityAtomParams from_config(const PhysicsConfig& cfg, double power,
                                        double delta_pa);
};

struct SteadyState {
    cplx a{};     // <a>, sqrt(photons)
    cplx b{};     // <b>
    cplx sigma{}; // <sigma->
    double transmission = 0; // T = |t|^2
    double reflection = 0;   // R = |r|^2
    double photons = 0;      // |a|^2 + |b|^2
    double force_d = 0;      // N, radial (toward +d) dipole force; filled by dipole_force
    double force_z = 0;
    double force_phi = 0;
};

// Weak-drive steady state of the two-mode + atom amplitude equations.
// Deterministic; throws only if the 3x3 system is numerically singular.
SteadyState steady_state(const CavityAtomParams& p);

// Residual of the linear system at the returned amplitudes (for tests).
double steady_state_residual(const CavityAtomParams& p, const SteadyState& s);

// Eigenvalues of the single-excitation evolution matrix over {a, b, atom},
// relative to the bare atom line: Im = frequency, Re = -decay. Returned
// sorted by imaginary part (ascending).
std::array<cplx, 3> eigenvalues(const CavityAtomParams& p);

// Force on the atom from the coherent intracavity field, evaluated on the
// steady state: F = -<grad H_int>. grad_g is the coupling gradient (rad/s/m)
// in (d, z); k_eff (1/m) is the azimuthal phase gradient. The azimuthal
// (phase-gradient) term is the radiation-pressure piece and is switchable.
void dipole_force(const CavityAtomParams& p, SteadyState& s, double grad_g_d,
                  double grad_g_z, double k_eff, bool radiation_pressure);

// Effective radial dipole potential from integrating -F_d inward from far
// away at fixed z = 0, plus the surface potential for plotting alongside.
struct PotentialCurve {
    std::vector<double> d;   // m
    std::vector<double> u_d; // J
    std::vector<double> u_s; // J (ground state)
};

class SurfaceModel;
class ModeField;

PotentialCurve effective_potential_curve(const PhysicsConfig& cfg, const ModeField& mode,
                                         const SurfaceModel& surface, double power,
                                         double delta_pa, double d_max, int n_points,
                                         bool include_level_shift = true);

// Input flux amplitude for a given probe power (sqrt(photons/s)).
double input_amplitude(const PhysicsConfig& cfg, double power);

} // namespace tsim

#endif
