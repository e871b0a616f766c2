#include "toroidsim/surface.hpp"
#include "toroidsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsim {

namespace {

// Composite Simpson over [a, b] with n (even) intervals.
template <typename F>
double simpson(F f, double a, double b, int n) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

std::vector<std::pair<double, double>> read_two_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open table: " + path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double x, y;
        if (!(ss >> x >> y)) throw std::runtime_error("bad table row: " + line);
        rows.emplace_back(x, y);
    }
    if (rows.size() < 2) throw std::runtime_error("table needs at least two rows: " + path);
    std::sort(rows.begin(), rows.end());
    return rows;
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    size_t i = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin() - 1;
    double f = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1 - f) * ys[i] + f * ys[i + 1];
}

} // namespace

// Half-space emission integrals, reduced to real form. With l the normalized
// vertical wavevector in vacuum (u^2 + l^2 = 1) and l2 = sqrt(n^2 - 1 + l^2):
//   par:  1 + (3/4) [ Re I_p + I_e ],  I_p = int_0^1 dl (r_s - l^2 r_p) e^{i phi l}
//   perp: 1 + (3/2) [ Re I_p + I_e ],  I_p = int_0^1 dl (1 - l^2) r_p e^{i phi l}
// with phi = 2 k0 d; the evanescent pieces run over lambda = sqrt(u^2-1) up to
// sqrt(n^2-1) (the u > n region is purely imaginary for a lossless medium and
// drops out of the real part). Checks: perfect mirror gives gamma_par(0) = 0,
// gamma_perp(0) = 2 gamma0.
double halfspace_decay_ratio(double k0_d, double n, DipoleOrientation o) {
    double phi = 2.0 * k0_d;
    double n2 = n * n;
    auto rs = [&](double l) {
        double l2 = std::sqrt(n2 - 1.0 + l * l);
        return (l - l2) / (l + l2);
    };
    auto rp = [&](double l) {
        double l2 = std::sqrt(n2 - 1.0 + l * l);
        return (n2 * l - l2) / (n2 * l + l2);
    };
    int n_prop = std::max(128, 16 * static_cast<int>(std::ceil(phi / pi)) + 16);
    int n_evan = 512;
    double lam_max = std::sqrt(n2 - 1.0);

    if (o == DipoleOrientation::Perpendicular) {
        double prop_re = simpson([&](double l) { return (1 - l * l) * rp(l) * std::cos(phi * l); },
                                 0.0, 1.0, n_prop);
        double evan = simpson(
            [&](double lam) {
                double l2 = std::sqrt(std::max(0.0, n2 - 1.0 - lam * lam));
                double im_rp = 2.0 * n2 * lam * l2 / (n2 * n2 * lam * lam + l2 * l2);
                return (1 + lam * lam) * im_rp * std::exp(-phi * lam);
            },
            0.0, lam_max, n_evan);
        return 1.0 + 1.5 * (prop_re + evan);
    }
    double prop_re = simpson(
        [&](double l) { return (rs(l) - l * l * rp(l)) * std::cos(phi * l); }, 0.0, 1.0, n_prop);
    double evan = simpson(
        [&](double lam) {
            double l2 = std::sqrt(std::max(0.0, n2 - 1.0 - lam * lam));
            double im_rs = 2.0 * lam * l2 / (lam * lam + l2 * l2);
            double im_rp = 2.0 * n2 * lam * l2 / (n2 * n2 * lam * lam + l2 * l2);
            return (im_rs + lam * lam * im_rp) * std::exp(-phi * lam);
        },
        0.0, lam_max, n_evan);
    return 1.0 + 0.75 * (prop_re + evan);
}

SurfaceModel::SurfaceModel(const PhysicsConfig::Surface& s, double gamma0, double wavelength)
    : c3_ground_(s.c3_ground), c3_excited_(s.c3_excited), lambda_ret_(s.lambda_ret),
      d_min_(s.d_min), gamma0_(gamma0), wavelength_(wavelength),
      k0_(two_pi / wavelength), n_(s.refractive_index) {
    if (s.decay_model == "tabulated") {
        if (s.gamma_table_file.empty())
            throw std::runtime_error("surface: tabulated decay model needs gamma_table_file");
        for (auto& [d_nm, ratio] : read_two_column(s.gamma_table_file)) {
            gamma_table_d_.push_back(d_nm * 1e-9);
            gamma_table_v_.push_back(ratio);
        }
        tabulated_decay_ = true;
    }
    if (!s.potential_table_file.empty()) {
        for (auto& [d_nm, u] : read_two_column(s.potential_table_file)) {
            pot_table_d_.push_back(d_nm * 1e-9);
            pot_table_v_.push_back(u); // U_s,ground in units of hbar*gamma0
        }
        tabulated_potential_ = true;
    }
    build_cache();
}

SurfaceModel SurfaceModel::from_config(const PhysicsConfig& cfg) {
    return SurfaceModel(cfg.surface, cfg.atom.gamma0, cfg.atom.wavelength);
}

void SurfaceModel::check_d(double d) const {
    if (d < d_min_) throw std::domain_error("surface: d below the d_min cutoff");
}

double SurfaceModel::cp_potential(double d, AtomicState state) const {
    check_d(d);
    if (tabulated_potential_) {
        double ug = interp(pot_table_d_, pot_table_v_, d) * hbar * gamma0_;
        return state == AtomicState::Ground ? ug : ug * (c3_excited_ / c3_ground_);
    }
    double c3 = this->c3(state);
    return -c3 / (d * d * d * (1.0 + d / lambda_ret_));
}

double SurfaceModel::cp_force(double d, AtomicState state) const {
    check_d(d);
    if (tabulated_potential_) {
        double h = std::max(1e-11, 1e-4 * d);
        return -(cp_potential(d + h, state) - cp_potential(std::max(d_min_, d - h), state)) /
               (d + h - std::max(d_min_, d - h));
    }
    double c3 = this->c3(state);
    double q = 1.0 + d / lambda_ret_;
    // -dU/dd for U = -C3 / (d^3 q)
    return -c3 * (3.0 / (d * d * d * d * q) + 1.0 / (d * d * d * lambda_ret_ * q * q));
}

double SurfaceModel::level_shift(double d) const {
    check_d(d);
    return (cp_potential(d, AtomicState::Excited) - cp_potential(d, AtomicState::Ground)) / hbar;
}

double SurfaceModel::modified_decay(double d, DipoleOrientation o) const {
    if (d < 0) throw std::domain_error("surface: modified_decay needs d >= 0");
    return gamma0_ * decay_ratio_quadrature(d, o);
}

double SurfaceModel::decay_ratio_quadrature(double d, DipoleOrientation o) const {
    if (tabulated_decay_ && o == DipoleOrientation::Parallel)
        return interp(gamma_table_d_, gamma_table_v_, d);
    return halfspace_decay_ratio(k0_ * d, n_, o);
}

void SurfaceModel::build_cache() {
    // log-spaced grid to 20 wavelengths; beyond that gamma ~ gamma0
    const int n_pts = 1024;
    double d_lo = d_min_ / 2.0, d_hi = 20.0 * wavelength_;
    cache_d_.resize(n_pts);
    cache_par_.resize(n_pts);
    double log_lo = std::log(d_lo), log_hi = std::log(d_hi);
    for (int i = 0; i < n_pts; ++i) {
        double d = std::exp(log_lo + (log_hi - log_lo) * i / (n_pts - 1));
        cache_d_[i] = d;
        cache_par_[i] = decay_ratio_quadrature(d, DipoleOrientation::Parallel);
    }
}

double SurfaceModel::fast_gamma_parallel(double d) const {
    if (d >= cache_d_.back()) return gamma0_;
    if (d <= cache_d_.front()) return gamma0_ * cache_par_.front();
    return gamma0_ * interp(cache_d_, cache_par_, d);
}

} // namespace tsim
