#include "toroidsim/trajectory.hpp"
#include "toroidsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tsim {

namespace {
constexpr double infinity = std::numeric_limits<double>::infinity();
}

FortField FortField::from_config(const PhysicsConfig& cfg) {
    FortField f;
    f.enabled = cfg.fort.enabled;
    double scale = k_boltzmann * 1e-3 / 1e-6; // kB*mK per uW -> J per W
    f.u_red = cfg.fort.potential_per_uw_red_mk * scale * cfg.fort.power_red;
    f.u_blue = cfg.fort.potential_per_uw_blue_mk * scale * cfg.fort.power_blue;
    auto decay = [](double lambda, double n_eff) {
        return lambda / (two_pi * std::sqrt(n_eff * n_eff - 1.0));
    };
    f.lambda_red = decay(cfg.fort.lambda_red, cfg.fort.n_eff_red);
    f.lambda_blue = decay(cfg.fort.lambda_blue, cfg.fort.n_eff_blue);
    f.waist = cfg.mode.waist;
    f.radiation_pressure_coeff = cfg.fort.radiation_pressure ? 1.0 : 0.0;
    return f;
}

void fort_potential(const FortField& f, double d, double z, double& u, double& du_dd,
                    double& du_dz) {
    double dc = std::max(d, 0.0);
    double radial = f.u_blue * std::exp(-2.0 * dc / f.lambda_blue) -
                    f.u_red * std::exp(-2.0 * dc / f.lambda_red);
    double dradial = -2.0 * f.u_blue / f.lambda_blue * std::exp(-2.0 * dc / f.lambda_blue) +
                     2.0 * f.u_red / f.lambda_red * std::exp(-2.0 * dc / f.lambda_red);
    double zu = z / f.waist;
    double vert = std::exp(-2.0 * zu * zu);
    u = radial * vert;
    du_dd = dradial * vert;
    du_dz = radial * vert * (-4.0 * z / (f.waist * f.waist));
}

double AtomKinematics::rho() const { return std::hypot(pos.x, pos.y); }
double AtomKinematics::phi() const {
    double p = std::atan2(pos.y, pos.x);
    return p < 0 ? p + two_pi : p;
}
CylPoint AtomKinematics::cyl() const { return CylPoint::make(rho(), pos.z, phi()); }

ForceModel::ForceModel(const PhysicsConfig& cfg, const ModeField& mode,
                       const SurfaceModel& surface, ForceVariant variant)
    : cfg_(&cfg), mode_(&mode), surface_(&surface), fort_(FortField::from_config(cfg)),
      variant_(variant) {}

const ForceModel::EmptyResponse& ForceModel::empty_response(const DriveSettings& drive) const {
    for (auto& e : cache_) {
        if (e.power == drive.power && e.delta_pa == drive.delta_pa) return e;
    }
    cache_[1] = cache_[0];
    EmptyResponse& slot = cache_[0];
    slot.power = drive.power;
    slot.delta_pa = drive.delta_pa;
    CavityAtomParams p;
    p.delta_pa = drive.delta_pa;
    p.delta_ca = cfg_->cavity.delta_ca;
    p.kappa_i = cfg_->cavity.kappa_i;
    p.kappa_ex = cfg_->cavity.kappa_ex;
    p.h = cfg_->cavity.h;
    p.gamma = cfg_->atom.gamma0;
    p.drive = input_amplitude(*cfg_, drive.power);
    slot.amplitude = p.drive;
    SteadyState ss = steady_state(p);
    slot.transmission = ss.transmission;
    slot.reflection = ss.reflection;
    return slot;
}

Vec3 ForceModel::acceleration(const AtomKinematics& k, const DriveSettings& drive, bool fort_on,
                              Observables* obs) const {
    double rho = k.rho();
    double z = k.pos.z;
    double s = torus_surface_distance(cfg_->toroid, rho, z);
    double d_mode = rho - cfg_->rim_radius();
    double m = cfg_->atom.mass;

    double f_rho = 0, f_z = 0, f_phi = 0;
    Observables local;
    local.s_dist = s;
    local.d_mode = d_mode;

    bool far = s > cfg_->numerics.far_distance;
    local.far_field = far;

    if (!far) {
        double s_eval = std::max(s, surface_->d_min()); // stages may probe past the boundary
        // over the rim (d_mode < 0, outside the dielectric) the separable
        // model is out of its domain; the radial decay there follows the true
        // surface distance instead of the equator coordinate
        bool over_rim = d_mode < 0;
        double d_eval = over_rim ? std::max(s, 0.0) : d_mode;

        local.g = mode_->coupling_dz(std::max(d_eval, 0.0), z);
        local.gamma_par = surface_->fast_gamma_parallel(s_eval);
        bool with_surface = variant_ == ForceVariant::Full;
        local.delta_a = with_surface ? surface_->level_shift(s_eval) : 0.0;

        // below ~kHz coupling the atom no longer registers on the cavity
        // (effects scale as (g/kappa)^2); skip the quasi-static solve
        if (local.g > 1e-4 * cfg_->atom.gamma0) {
            const EmptyResponse& er = empty_response(drive);
            CavityAtomParams p;
            p.g = local.g;
            p.delta_pa = drive.delta_pa;
            p.delta_ca = cfg_->cavity.delta_ca;
            p.delta_a = local.delta_a;
            p.kappa_i = cfg_->cavity.kappa_i;
            p.kappa_ex = cfg_->cavity.kappa_ex;
            p.h = cfg_->cavity.h;
            p.gamma = local.gamma_par;
            p.drive = er.amplitude;
            CylPoint pt = CylPoint::make(rho, z, k.phi());
            p.theta = mode_->traveling_phase(pt);
            local.theta = p.theta;

            SteadyState ss = steady_state(p);
            local.transmission = ss.transmission;
            local.reflection = ss.reflection;

            if (variant_ != ForceVariant::NoForces) {
                double g_rad = -local.g / mode_->lambda_bar();
                double gz = -2.0 * z / (mode_->waist() * mode_->waist()) * local.g;
                double grad_d, grad_z;
                if (!over_rim) {
                    grad_d = g_rad;
                    grad_z = gz;
                } else {
                    double n_rho, n_z;
                    torus_surface_normal(cfg_->toroid, rho, z, n_rho, n_z);
                    grad_d = g_rad * n_rho;
                    grad_z = g_rad * n_z + gz;
                }
                dipole_force(p, ss, grad_d, grad_z, mode_->phase_gradient(pt),
                             fort_.radiation_pressure_coeff > 0);
                f_rho += ss.force_d;
                f_z += ss.force_z;
                f_phi += ss.force_phi;
            }
        } else {
            const EmptyResponse& er = empty_response(drive);
            local.transmission = er.transmission;
            local.reflection = er.reflection;
        }
        if (with_surface) {
            double fcp = surface_->cp_force(s_eval, AtomicState::Ground); // < 0, along +s
            double n_rho, n_z;
            torus_surface_normal(cfg_->toroid, rho, z, n_rho, n_z);
            f_rho += fcp * n_rho;
            f_z += fcp * n_z;
        }
        if (fort_.enabled && fort_on) {
            double u, du_dd, du_dz;
            fort_potential(fort_, d_mode, z, u, du_dd, du_dz);
            f_rho += -du_dd * (d_mode >= 0 ? 1.0 : 0.0);
            f_z += -du_dz;
        }
    } else {
        // far field: quasi-static response is the empty-cavity one
        const EmptyResponse& er = empty_response(drive);
        local.transmission = er.transmission;
        local.reflection = er.reflection;
        local.gamma_par = cfg_->atom.gamma0;
    }

    if (obs) *obs = local;

    // cylindrical force components to Cartesian
    double inv_rho = rho > 1e-15 ? 1.0 / rho : 0.0;
    double c = k.pos.x * inv_rho, sphi = k.pos.y * inv_rho;
    Vec3 a;
    a.x = (f_rho * c - f_phi * sphi) / m;
    a.y = (f_rho * sphi + f_phi * c) / m;
    a.z = f_z / m - g_earth;
    return a;
}

double ForceModel::potential_energy(const AtomKinematics& k, bool fort_on) const {
    double rho = k.rho();
    double s = torus_surface_distance(cfg_->toroid, rho, k.pos.z);
    double u = cfg_->atom.mass * g_earth * k.pos.z;
    if (variant_ == ForceVariant::Full && s < cfg_->numerics.far_distance)
        u += surface_->cp_potential(std::max(s, surface_->d_min()), AtomicState::Ground);
    if (fort_.enabled && fort_on) {
        double ut, dd, dz;
        fort_potential(fort_, rho - cfg_->rim_radius(), k.pos.z, ut, dd, dz);
        u += ut;
    }
    return u;
}

AtomKinematics sample_initial(const PhysicsConfig& cfg, RngStream& rng, bool vertical_only) {
    AtomKinematics k;
    double sigma_v = std::sqrt(k_boltzmann * cfg.cloud.temperature / cfg.atom.mass);
    double rim = cfg.rim_radius();
    double r_lo = rim - cfg.cloud.transverse_extent;
    double r_hi = rim + cfg.cloud.transverse_extent;
    // uniform areal density over the annulus
    double u = rng.uniform();
    double rho = std::sqrt(r_lo * r_lo + u * (r_hi * r_hi - r_lo * r_lo));
    double phi = rng.uniform() * two_pi;
    k.pos.x = rho * std::cos(phi);
    k.pos.y = rho * std::sin(phi);
    k.pos.z = 4.0 * cfg.mode.waist;
    k.vel.z = -(cfg.cloud.arrival_speed + sigma_v * rng.normal(0.0, 1.0));
    if (vertical_only) {
        k.vel.x = 0;
        k.vel.y = 0;
    } else {
        k.vel.x = sigma_v * rng.normal(0.0, 1.0);
        k.vel.y = sigma_v * rng.normal(0.0, 1.0);
    }
    k.t = 0;
    k.phi_acc = phi;
    return k;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double C2 = 1.0 / 5, C3_ = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

struct State6 {
    double v[6];
    static State6 from(const AtomKinematics& k) {
        return {{k.pos.x, k.pos.y, k.pos.z, k.vel.x, k.vel.y, k.vel.z}};
    }
    void to(AtomKinematics& k) const {
        k.pos = {v[0], v[1], v[2]};
        k.vel = {v[3], v[4], v[5]};
    }
};

} // namespace

TrajectoryRecord TrajectoryEngine::run(AtomKinematics start, const DriveFn& drive,
                                       double horizon, const StepHook& hook,
                                       bool record_paths, double sample_interval,
                                       double initial_bound) {
    const PhysicsConfig& cfg = model_->config();
    TrajectoryRecord rec;
    rec.photons.resolution = to_ps(cfg.detection.resolution);

    AtomKinematics k = start;
    k.phi_acc = std::atan2(k.pos.y, k.pos.x);

    auto deriv = [&](const State6& s, double t, const DriveSettings& dr, bool fort_on,
                     Observables* obs) {
        AtomKinematics kk;
        kk.pos = {s.v[0], s.v[1], s.v[2]};
        kk.vel = {s.v[3], s.v[4], s.v[5]};
        kk.t = t;
        Vec3 a = model_->acceleration(kk, dr, fort_on, obs);
        State6 d{{s.v[3], s.v[4], s.v[5], a.x, a.y, a.z}};
        return d;
    };

    double rho_max = 3.0 * cfg.toroid.principal_diameter;
    double z_max = 10.0 * cfg.mode.waist;
    double d_min = cfg.surface.d_min;
    double lam_cap_zone = 3.0 * cfg.mode.lambda_bar;

    Observables obs0;
    auto [dr0, fort0] = drive(k.t);
    State6 y = State6::from(k);
    State6 k1 = deriv(y, k.t, dr0, fort0, &obs0);

    double h = cfg.numerics.max_step * 0.1;
    double hook_bound = initial_bound;
    double next_sample = 0;
    bool done = false;

    auto surface_dist = [&](const State6& s) {
        return torus_surface_distance(cfg.toroid, std::hypot(s.v[0], s.v[1]), s.v[2]);
    };

    auto push_sample = [&](const AtomKinematics& kk, const Observables& ob) {
        PathSample ps;
        ps.t = kk.t;
        ps.rho = kk.rho();
        ps.z = kk.pos.z;
        ps.phi = kk.phi();
        ps.vx = kk.vel.x;
        ps.vy = kk.vel.y;
        ps.vz = kk.vel.z;
        ps.g = ob.g;
        ps.delta_a = ob.delta_a;
        ps.gamma_par = ob.gamma_par;
        ps.transmission = ob.transmission;
        ps.reflection = ob.reflection;
        rec.path.push_back(ps);
    };
    if (record_paths) push_sample(k, obs0);

    while (!done) {
        auto [dr, fort_on] = drive(k.t);

        double cap = obs0.far_field ? cfg.numerics.far_step : cfg.numerics.max_step;
        if (!obs0.far_field && obs0.s_dist < lam_cap_zone) {
            double speed = std::hypot(std::hypot(k.vel.x, k.vel.y), k.vel.z);
            if (speed > 1e-12)
                cap = std::min(cap, cfg.mode.lambda_bar / (10.0 * speed));
        }
        h = std::min(h, cap);
        if (k.t >= horizon - 1e-15) {
            rec.fate = Fate::TrappedAtHorizon;
            rec.end_time = k.t;
            break;
        }
        double bound = std::min(hook_bound, horizon);
        double rem = bound - k.t;
        // snap to hard boundaries; sub-fs leftovers are let through
        if (rem > 1e-15 && h > rem) h = rem;

        // one embedded step
        auto attempt = [&](double hs, State6& out, State6& k7, Observables* obs_end,
                           double* err_norm) {
            State6 k2, k3, k4, k5, k6, tmp;
            auto axpy = [&](const State6& base, std::initializer_list<std::pair<double, const State6*>> terms) {
                State6 r = base;
                for (auto& [c, ks] : terms)
                    for (int i = 0; i < 6; ++i) r.v[i] += hs * c * ks->v[i];
                return r;
            };
            tmp = axpy(y, {{A21, &k1}});
            k2 = deriv(tmp, k.t + C2 * hs, dr, fort_on, nullptr);
            tmp = axpy(y, {{A31, &k1}, {A32, &k2}});
            k3 = deriv(tmp, k.t + C3_ * hs, dr, fort_on, nullptr);
            tmp = axpy(y, {{A41, &k1}, {A42, &k2}, {A43, &k3}});
            k4 = deriv(tmp, k.t + C4 * hs, dr, fort_on, nullptr);
            tmp = axpy(y, {{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}});
            k5 = deriv(tmp, k.t + C5 * hs, dr, fort_on, nullptr);
            tmp = axpy(y, {{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}});
            k6 = deriv(tmp, k.t + hs, dr, fort_on, nullptr);
            out = axpy(y, {{B1, &k1}, {B3, &k3}, {B4, &k4}, {B5, &k5}, {B6, &k6}});
            k7 = deriv(out, k.t + hs, dr, fort_on, obs_end);
            // joint scales: the position scale is the coordinate magnitude
            // (rho ~ 12 um), the velocity scale the current speed
            double pos_mag = 1e-9, vel_mag = 1e-3;
            for (int i = 0; i < 3; ++i) {
                pos_mag = std::max(pos_mag, std::abs(y.v[i]));
                vel_mag = std::max(vel_mag, std::abs(y.v[i + 3]));
            }
            double err = 0;
            for (int i = 0; i < 6; ++i) {
                double e = hs * (E1 * k1.v[i] + E3 * k3.v[i] + E4 * k4.v[i] + E5 * k5.v[i] +
                                 E6 * k6.v[i] + E7 * k7.v[i]);
                double scale = cfg.numerics.rel_tol * (i < 3 ? pos_mag : vel_mag);
                double r = e / scale;
                err += r * r;
            }
            *err_norm = std::sqrt(err / 6.0);
        };

        State6 y_new, k7;
        Observables obs1;
        double err_norm = 0;
        int rejects = 0;
        while (true) {
            attempt(h, y_new, k7, &obs1, &err_norm);
            bool finite = true;
            for (double v : y_new.v) finite = finite && std::isfinite(v);
            if (!finite) {
                std::ostringstream ss;
                ss << "trajectory: non-finite state at t=" << k.t << " h=" << h;
                throw std::runtime_error(ss.str());
            }
            if (err_norm <= 1.0 || h <= 1e-15) break;
            h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
            if (++rejects > 60) {
                // step-size underflow near the potential singularity
                if (surface_dist(y) < 4.0 * d_min) break;
                throw std::runtime_error("trajectory: integrator stalled away from surface");
            }
        }

        double s_new = surface_dist(y_new);
        if (s_new <= d_min || (rejects > 60 && surface_dist(y) < 4.0 * d_min)) {
            // locate the crossing by bisection on the step size
            double lo = 0, hi = h;
            State6 y_hit = y_new;
            Observables dump;
            double dump_err;
            for (int it = 0; it < 48; ++it) {
                if (hi - lo < 1e-16 * std::max(1.0, h)) break;
                double mid = 0.5 * (lo + hi);
                if (mid <= 0) break;
                State6 ym, km;
                attempt(mid, ym, km, &dump, &dump_err);
                double sm = surface_dist(ym);
                if (sm <= d_min) {
                    hi = mid;
                    y_hit = ym;
                    if (d_min - sm < 1e-12) break; // within a thousandth of a nm
                } else {
                    lo = mid;
                }
            }
            AtomKinematics k_end = k;
            y_hit.to(k_end);
            k_end.t = k.t + hi;
            double dphi = std::remainder(std::atan2(k_end.pos.y, k_end.pos.x) -
                                             std::atan2(k.pos.y, k.pos.x),
                                         two_pi);
            k_end.phi_acc = k.phi_acc + dphi;
            Observables obs_end;
            deriv(y_hit, k_end.t, dr, fort_on, &obs_end);
            StepInfo info{k, k_end, obs0, obs_end};
            hook_bound = hook ? hook(info) : infinity;
            if (record_paths) push_sample(k_end, obs_end);
            k = k_end;
            rec.fate = Fate::Crashed;
            rec.end_time = k.t;
            done = true;
            break;
        }

        AtomKinematics k_new = k;
        y_new.to(k_new);
        k_new.t = k.t + h;
        double dphi = std::remainder(
            std::atan2(k_new.pos.y, k_new.pos.x) - std::atan2(k.pos.y, k.pos.x), two_pi);
        k_new.phi_acc = k.phi_acc + dphi;

        StepInfo info{k, k_new, obs0, obs1};
        hook_bound = hook ? hook(info) : infinity;

        if (record_paths && k_new.t >= next_sample) {
            push_sample(k_new, obs1);
            next_sample = k_new.t + sample_interval;
        }

        k = k_new;
        y = y_new;
        k1 = k7; // FSAL
        obs0 = obs1;

        if (k.rho() > rho_max || std::abs(k.pos.z) > z_max) {
            rec.fate = Fate::Exited;
            rec.end_time = k.t;
            break;
        }
        if (k.t >= horizon - 1e-15) {
            rec.fate = Fate::TrappedAtHorizon;
            rec.end_time = k.t;
            break;
        }

        if (err_norm > 1e-30) h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
        else h *= 5.0;
    }

    rec.final_state = k;
    return rec;
}

TrajectoryRecord integrate(const ForceModel& model, AtomKinematics start,
                           const DriveSchedule& schedule, bool fort_after_switch,
                           double horizon, bool record_paths, double sample_interval) {
    TrajectoryEngine engine(model);
    auto drive = [&](double t) {
        bool fort_on = fort_after_switch && schedule.switch_time && t >= *schedule.switch_time;
        return std::make_pair(schedule.at(t), fort_on);
    };
    // keep steps from crossing the switch instant
    auto hook = [&](const StepInfo& info) {
        if (schedule.switch_time && info.after.t < *schedule.switch_time)
            return *schedule.switch_time;
        return infinity;
    };
    double first_bound =
        schedule.switch_time && start.t < *schedule.switch_time ? *schedule.switch_time : infinity;
    TrajectoryRecord rec =
        engine.run(start, drive, horizon, hook, record_paths, sample_interval, first_bound);
    if (schedule.switch_time) rec.trigger_time = *schedule.switch_time;
    return rec;
}

} // namespace tsim
