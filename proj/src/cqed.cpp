#include "toroidsim/cqed.hpp"
#include "toroidsim/geometry.hpp"
#include "toroidsim/surface.hpp"
#include "toroidsim/units.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsim {

namespace {

using Mat3 = Eigen::Matrix3cd;
using Vec3c = Eigen::Vector3cd;
constexpr cplx I{0.0, 1.0};

// Probe-frame coefficient matrix for d/dt (a, b, s) = M (a, b, s) + (eps, 0, 0)
Mat3 system_matrix(const CavityAtomParams& p) {
    double gt = p.g / std::sqrt(2.0);
    cplx ga = gt * std::exp(-I * p.theta);
    cplx gb = gt * std::exp(I * p.theta);
    cplx mode_diag = I * p.delta_pc() - p.kappa();
    cplx atom_diag = I * (p.delta_pa - p.delta_a) - p.gamma;
    Mat3 m;
    m << mode_diag, -I * p.h, -I * ga,
         -I * p.h, mode_diag, -I * gb,
         -I * std::conj(ga), -I * std::conj(gb), atom_diag;
    return m;
}

} // namespace

double input_amplitude(const PhysicsConfig& cfg, double power) {
    return std::sqrt(power / (hbar * cfg.probe_omega()));
}

CavityAtomParams CavityAtomParams::from_config(const PhysicsConfig& cfg, double power,
                                               double delta_pa) {
    CavityAtomParams p;
    p.delta_pa = delta_pa;
    p.delta_ca = cfg.cavity.delta_ca;
    p.kappa_i = cfg.cavity.kappa_i;
    p.kappa_ex = cfg.cavity.kappa_ex;
    p.h = cfg.cavity.h;
    p.gamma = cfg.atom.gamma0;
    p.drive = input_amplitude(cfg, power);
    return p;
}

namespace {

// 3x3 complex Gaussian elimination with partial pivoting; this sits in the
// per-step hot loop of the trajectory engine.
void solve3(cplx m[3][3], cplx b[3]) {
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        double best = std::norm(m[idx[col]][col]);
        for (int r = col + 1; r < 3; ++r) {
            double v = std::norm(m[idx[r]][col]);
            if (v > best) { best = v; piv = r; }
        }
        if (best < 1e-300) throw std::runtime_error("cqed: singular steady-state system");
        std::swap(idx[col], idx[piv]);
        cplx inv = 1.0 / m[idx[col]][col];
        for (int r = col + 1; r < 3; ++r) {
            cplx f = m[idx[r]][col] * inv;
            if (f == cplx{}) continue;
            for (int c = col + 1; c < 3; ++c) m[idx[r]][c] -= f * m[idx[col]][c];
            b[idx[r]] -= f * b[idx[col]];
        }
    }
    cplx x[3];
    for (int row = 2; row >= 0; --row) {
        cplx acc = b[idx[row]];
        for (int c = row + 1; c < 3; ++c) acc -= m[idx[row]][c] * x[c];
        x[row] = acc / m[idx[row]][row];
    }
    b[0] = x[0];
    b[1] = x[1];
    b[2] = x[2];
}

} // namespace

SteadyState steady_state(const CavityAtomParams& p) {
    double gt = p.g / std::sqrt(2.0);
    cplx ga = gt * std::exp(-I * p.theta);
    cplx gb = gt * std::exp(I * p.theta);
    cplx mode_diag = I * p.delta_pc() - p.kappa();
    cplx atom_diag = I * (p.delta_pa - p.delta_a) - p.gamma;
    double eps = std::sqrt(2.0 * p.kappa_ex) * p.drive;
    cplx m[3][3] = {{mode_diag, -I * p.h, -I * ga},
                    {-I * p.h, mode_diag, -I * gb},
                    {-I * std::conj(ga), -I * std::conj(gb), atom_diag}};
    cplx v[3] = {-eps, 0.0, 0.0};
    solve3(m, v);

    SteadyState s;
    s.a = v[0];
    s.b = v[1];
    s.sigma = v[2];
    s.photons = std::norm(s.a) + std::norm(s.b);
    if (p.drive > 0) {
        cplx t = -1.0 + std::sqrt(2.0 * p.kappa_ex) * s.a / p.drive;
        cplx r = std::sqrt(2.0 * p.kappa_ex) * s.b / p.drive;
        s.transmission = std::norm(t);
        s.reflection = std::norm(r);
    } else {
        // no input: T, R are defined against the input and default to the
        // pass-through values
        s.transmission = 1.0;
        s.reflection = 0.0;
    }
    return s;
}

double steady_state_residual(const CavityAtomParams& p, const SteadyState& s) {
    Mat3 m = system_matrix(p);
    double eps = std::sqrt(2.0 * p.kappa_ex) * p.drive;
    Vec3c v(s.a, s.b, s.sigma);
    Vec3c rhs(-eps, 0.0, 0.0);
    double denom = std::max(rhs.norm(), (m * v).norm());
    if (denom == 0) return 0;
    return (m * v - rhs).norm() / denom;
}

std::array<cplx, 3> eigenvalues(const CavityAtomParams& p) {
    // Atom-frame evolution matrix: Im(lambda) = frequency relative to the
    // bare atom, Re(lambda) = -decay.
    double gt = p.g / std::sqrt(2.0);
    cplx c1 = std::exp(I * p.theta);
    cplx c2 = std::exp(-I * p.theta);
    Mat3 k;
    k << -p.kappa() + I * p.delta_ca, I * p.h, I * gt * c1,
         I * p.h, -p.kappa() + I * p.delta_ca, I * gt * c2,
         I * gt * std::conj(c1), I * gt * std::conj(c2), -p.gamma + I * p.delta_a;
    Eigen::ComplexEigenSolver<Mat3> solver(k, false);
    std::array<cplx, 3> out{solver.eigenvalues()(0), solver.eigenvalues()(1),
                            solver.eigenvalues()(2)};
    std::sort(out.begin(), out.end(),
              [](const cplx& x, const cplx& y) { return x.imag() < y.imag(); });
    return out;
}

void dipole_force(const CavityAtomParams& p, SteadyState& s, double grad_g_d,
                  double grad_g_z, double k_eff, bool radiation_pressure) {
    // F = -<grad H_int> with H_int = hbar (g/sqrt2)(e^{-i th} a+ s- + e^{+i th} b+ s- + h.c.)
    cplx ea = std::exp(-I * p.theta);
    cplx eb = std::exp(I * p.theta);
    double coh = std::real((ea * std::conj(s.a) + eb * std::conj(s.b)) * s.sigma);
    double amp = -std::sqrt(2.0) * hbar * coh;
    s.force_d = amp * grad_g_d;
    s.force_z = amp * grad_g_z;
    if (radiation_pressure) {
        double ph = std::real(I * (eb * std::conj(s.b) - ea * std::conj(s.a)) * s.sigma);
        s.force_phi = -std::sqrt(2.0) * hbar * p.g * k_eff * ph;
    } else {
        s.force_phi = 0;
    }
}

PotentialCurve effective_potential_curve(const PhysicsConfig& cfg, const ModeField& mode,
                                         const SurfaceModel& surface, double power,
                                         double delta_pa, double d_max, int n_points,
                                         bool include_level_shift) {
    // U_d(d) = -int_{d_max}^{d} F_d(d') dd' at z = 0 (trapezoid on the output
    // grid, refined 4x internally), so dU_d/dd = -F_d by construction.
    PotentialCurve curve;
    curve.d.resize(n_points);
    curve.u_d.resize(n_points);
    curve.u_s.resize(n_points);
    double d_lo = std::max(surface.d_min(), 1e-9);
    int refine = 4;
    int n_fine = (n_points - 1) * refine + 1;
    double dd = (d_max - d_lo) / (n_fine - 1);

    CavityAtomParams p = CavityAtomParams::from_config(cfg, power, delta_pa);
    auto force_at = [&](double d) {
        CylPoint pt = CylPoint::make(cfg.rim_radius() + d, 0.0, 0.0);
        p.g = mode.coupling(pt);
        p.gamma = surface.fast_gamma_parallel(d);
        p.delta_a = include_level_shift ? surface.level_shift(d) : 0.0;
        SteadyState s = steady_state(p);
        ModeGradient grad = mode.coupling_gradient(pt);
        dipole_force(p, s, grad.d_rho, grad.d_z, 0.0, false);
        return s.force_d;
    };

    // integrate inward from d_max
    std::vector<double> u_fine(n_fine, 0.0);
    double f_prev = force_at(d_max);
    for (int i = n_fine - 2; i >= 0; --i) {
        double d = d_lo + i * dd;
        double f = force_at(d);
        u_fine[i] = u_fine[i + 1] + 0.5 * (f + f_prev) * dd;
        f_prev = f;
    }
    for (int i = 0; i < n_points; ++i) {
        double d = d_lo + (d_max - d_lo) * i / (n_points - 1);
        curve.d[i] = d;
        curve.u_d[i] = u_fine[i * refine];
        curve.u_s[i] = surface.cp_potential(d, AtomicState::Ground);
    }
    return curve;
}

} // namespace tsim
