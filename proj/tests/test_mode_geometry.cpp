#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toroidsim/config.hpp"
#include "toroidsim/geometry.hpp"
#include "toroidsim/rng.hpp"
#include "toroidsim/units.hpp"

#include <cmath>
#include <fstream>

using namespace tsim;

namespace {
PhysicsConfig cfg = default_config();
ModeField field() { return ModeField::from_config(cfg); }
CylPoint at_d(double d, double z, double phi = 0) {
    return CylPoint::make(cfg.rim_radius() + d, z, phi);
}
} // namespace

TEST_CASE("coupling at reference points") {
    ModeField f = field();
    CHECK(f.coupling(at_d(0, 0)) == doctest::Approx(cfg.mode.g_max));
    CHECK(f.coupling(at_d(cfg.mode.lambda_bar, 0)) ==
          doctest::Approx(cfg.mode.g_max / std::exp(1.0)));
    CHECK(f.coupling(at_d(0, cfg.mode.waist)) ==
          doctest::Approx(cfg.mode.g_max / std::exp(1.0)));
    CHECK_THROWS(f.coupling(at_d(-1e-9, 0)));
    // decays to zero far away, monotone in d and |z|
    CHECK(f.coupling(at_d(20 * cfg.mode.lambda_bar, 0)) < 1e-8 * cfg.mode.g_max);
    double prev = f.coupling(at_d(0, 0));
    for (double d = 20e-9; d < 400e-9; d += 20e-9) {
        double g = f.coupling(at_d(d, 0));
        CHECK(g < prev);
        CHECK(g >= 0);
        prev = g;
    }
}

TEST_CASE("analytic gradient matches central differences") {
    ModeField f = field();
    CHECK(f.coupling_gradient(at_d(0, 0)).d_rho ==
          doctest::Approx(-cfg.mode.g_max / cfg.mode.lambda_bar).epsilon(1e-9));
    CHECK(f.coupling_gradient(at_d(100e-9, 0)).d_z == doctest::Approx(0.0));

    RngStream rng(77);
    const double h = 1e-11;
    for (int i = 0; i < 200; ++i) {
        double d = 5e-9 + 500e-9 * rng.uniform();
        double z = -1e-6 + 2e-6 * rng.uniform();
        ModeGradient grad = f.coupling_gradient(at_d(d, z));
        double fd_d = (f.coupling_dz(d + h, z) - f.coupling_dz(d - h, z)) / (2 * h);
        double fd_z = (f.coupling_dz(d, z + h) - f.coupling_dz(d, z - h)) / (2 * h);
        CHECK(grad.d_rho == doctest::Approx(fd_d).epsilon(1e-6));
        if (std::abs(fd_z) > 1e-12)
            CHECK(grad.d_z == doctest::Approx(fd_z).epsilon(1e-6));
        // gradient vanishes where the coupling vanishes
        if (f.coupling_dz(d, z) < 1e-12)
            CHECK(std::abs(grad.d_rho) < 1e-9);
    }
}

TEST_CASE("traveling phase") {
    ModeField f = field();
    CHECK(f.traveling_phase(at_d(100e-9, 0, 0.0)) == doctest::Approx(0.0));
    // single-valued: phase at phi = 2pi is an integer multiple of 2pi
    double full_turn = cfg.mode.k_phi * cfg.rim_radius() * two_pi;
    CHECK(std::remainder(full_turn, two_pi) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(full_turn / two_pi == doctest::Approx(cfg.mode.mode_number));
}

TEST_CASE("tabulated field interpolates the grid") {
    ModeField f = field();
    // write a small analytic table and check bilinear agreement at grid points
    std::string path = "mode_table_test.txt";
    {
        std::ofstream out(path);
        out.precision(12);
        out << "# d_nm z_nm g_mhz\n";
        for (double d = 0; d <= 400; d += 20)
            for (double z = -800; z <= 800; z += 80)
                out << d << " " << z << " "
                    << to_human(f.coupling_dz(d * 1e-9, z * 1e-9), "mhz_rate") << "\n";
    }
    ModeField tab = field();
    tab.load_table(path);
    CHECK(tab.tabulated());
    CHECK(tab.coupling_dz(100e-9, 0) ==
          doctest::Approx(f.coupling_dz(100e-9, 0)).epsilon(1e-8));
    // midpoints agree to the bilinear error scale
    CHECK(tab.coupling_dz(110e-9, 40e-9) ==
          doctest::Approx(f.coupling_dz(110e-9, 40e-9)).epsilon(0.02));
}

TEST_CASE("torus surface distance") {
    // equator: s == d
    CHECK(torus_surface_distance(cfg.toroid, cfg.rim_radius() + 100e-9, 0) ==
          doctest::Approx(100e-9));
    // top of the tube
    double rc = cfg.tube_center_radius();
    CHECK(torus_surface_distance(cfg.toroid, rc, cfg.tube_radius() + 50e-9) ==
          doctest::Approx(50e-9));
    // inside is negative
    CHECK(torus_surface_distance(cfg.toroid, rc + cfg.tube_radius() / 2, 0) < 0);
    double n_rho, n_z;
    torus_surface_normal(cfg.toroid, rc, cfg.tube_radius() + 50e-9, n_rho, n_z);
    CHECK(n_rho == doctest::Approx(0.0));
    CHECK(n_z == doctest::Approx(1.0));
}
