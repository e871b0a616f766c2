#include "toroidsim/geometry.hpp"
#include "toroidsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsim {

CylPoint CylPoint::make(double rho, double z, double phi) {
    double p = std::fmod(phi, two_pi);
    if (p < 0) p += two_pi;
    return CylPoint{rho, z, p};
}

ModeField::ModeField(double g_max, double lambda_bar, double w0, double k_phi,
                     double principal_diameter)
    : g_max_(g_max), lambda_bar_(lambda_bar), w0_(w0), k_phi_(k_phi), d_p_(principal_diameter) {
    if (lambda_bar_ <= 0 || w0_ <= 0) throw std::invalid_argument("mode field scale lengths must be positive");
}

ModeField ModeField::from_config(const PhysicsConfig& cfg) {
    return ModeField(cfg.mode.g_max, cfg.mode.lambda_bar, cfg.mode.waist, cfg.mode.k_phi,
                     cfg.toroid.principal_diameter);
}

double ModeField::coupling_dz(double d, double z) const {
    if (d < 0) throw std::domain_error("coupling evaluated inside dielectric (d < 0)");
    if (tabulated()) return table_value(d, z);
    double u = z / w0_;
    return g_max_ * std::exp(-d / lambda_bar_) * std::exp(-u * u);
}

double ModeField::coupling(const CylPoint& p) const { return coupling_dz(p.d(d_p_), p.z); }

ModeGradient ModeField::coupling_gradient(const CylPoint& p) const {
    double d = p.d(d_p_);
    if (d < 0) throw std::domain_error("coupling gradient evaluated inside dielectric (d < 0)");
    ModeGradient grad;
    if (tabulated()) {
        // central differences on the table grid scale
        double hd = std::max(1e-10, 1e-4 * lambda_bar_);
        double hz = std::max(1e-10, 1e-4 * w0_);
        double dm = std::max(0.0, d - hd);
        grad.d_rho = (table_value(d + hd, p.z) - table_value(dm, p.z)) / (d + hd - dm);
        grad.d_z = (table_value(d, p.z + hz) - table_value(d, p.z - hz)) / (2 * hz);
        return grad;
    }
    double g = coupling_dz(d, p.z);
    grad.d_rho = -g / lambda_bar_;
    grad.d_z = -2.0 * p.z / (w0_ * w0_) * g;
    return grad;
}

double ModeField::traveling_phase(const CylPoint& p) const {
    return k_phi_ * (d_p_ / 2.0) * p.phi;
}

double ModeField::phase_gradient(const CylPoint& p) const {
    return k_phi_ * (d_p_ / 2.0) / p.rho;
}

void ModeField::load_table(const std::string& path) {
    // plain text: '#' comments; rows "d_nm z_nm g_mhz" on a rectangular grid
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mode table: " + path);
    std::vector<double> ds, zs, gs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double d, z, g;
        if (!(ss >> d >> z >> g)) throw std::runtime_error("bad mode table row: " + line);
        ds.push_back(d * 1e-9);
        zs.push_back(z * 1e-9);
        gs.push_back(mhz(g));
    }
    if (gs.empty()) throw std::runtime_error("empty mode table: " + path);
    std::vector<double> ud = ds, uz = zs;
    std::sort(ud.begin(), ud.end());
    ud.erase(std::unique(ud.begin(), ud.end()), ud.end());
    std::sort(uz.begin(), uz.end());
    uz.erase(std::unique(uz.begin(), uz.end()), uz.end());
    if (ud.size() * uz.size() != gs.size())
        throw std::runtime_error("mode table is not a rectangular grid: " + path);
    table_d_ = ud;
    table_z_ = uz;
    table_.assign(gs.size(), 0.0);
    for (size_t i = 0; i < gs.size(); ++i) {
        size_t id = std::lower_bound(ud.begin(), ud.end(), ds[i]) - ud.begin();
        size_t iz = std::lower_bound(uz.begin(), uz.end(), zs[i]) - uz.begin();
        table_[id * uz.size() + iz] = gs[i];
    }
}

double ModeField::table_value(double d, double z) const {
    auto clamp_index = [](const std::vector<double>& ax, double x, double& frac) {
        if (x <= ax.front()) { frac = 0; return size_t(0); }
        if (x >= ax.back()) { frac = 1; return ax.size() - 2; }
        size_t i = std::upper_bound(ax.begin(), ax.end(), x) - ax.begin() - 1;
        frac = (x - ax[i]) / (ax[i + 1] - ax[i]);
        return i;
    };
    double fd, fz;
    size_t id = clamp_index(table_d_, d, fd);
    size_t iz = clamp_index(table_z_, z, fz);
    size_t nz = table_z_.size();
    double v00 = table_[id * nz + iz], v01 = table_[id * nz + iz + 1];
    double v10 = table_[(id + 1) * nz + iz], v11 = table_[(id + 1) * nz + iz + 1];
    return (1 - fd) * ((1 - fz) * v00 + fz * v01) + fd * ((1 - fz) * v10 + fz * v11);
}

double torus_surface_distance(const PhysicsConfig::Toroid& t, double rho, double z) {
    double rc = (t.principal_diameter - t.minor_diameter) / 2.0;
    double dr = rho - rc;
    return std::sqrt(dr * dr + z * z) - t.minor_diameter / 2.0;
}

void torus_surface_normal(const PhysicsConfig::Toroid& t, double rho, double z,
                          double& n_rho, double& n_z) {
    double rc = (t.principal_diameter - t.minor_diameter) / 2.0;
    double dr = rho - rc;
    double r = std::sqrt(dr * dr + z * z);
    if (r < 1e-15) { n_rho = 1; n_z = 0; return; }
    n_rho = dr / r;
    n_z = z / r;
}

} // namespace tsim
