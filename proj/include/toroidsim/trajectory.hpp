#ifndef TOROIDSIM_TRAJECTORY_HPP
#define TOROIDSIM_TRAJECTORY_HPP

#include "toroidsim/cqed.hpp"
#include "toroidsim/detection.hpp"
#include "toroidsim/geometry.hpp"
#include "toroidsim/rng.hpp"
#include "toroidsim/surface.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace tsim {

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

enum class Fate { Crashed, Exited, TrappedAtHorizon };
enum class ForceVariant { Full, NoSurface, NoForces };

// Two-color evanescent trap: repulsive blue wall (shorter decay length) over
// an attractive red tail, sharing the fundamental vertical profile.
//   U_t(d, z) = (U_b e^{-2d/lam_b} - U_r e^{-2d/lam_r}) exp(-2 (z/w0)^2)
struct FortField {
    bool enabled = false;
    double u_red = 0;       // J, peak at the surface
    double u_blue = 0;      // J
    double lambda_red = 1;  // m, field decay length
    double lambda_blue = 1; // m
    double waist = 1;       // m
    double radiation_pressure_coeff = 0; // 1 = azimuthal phase-gradient force on

    static FortField from_config(const PhysicsConfig& cfg);
};

// U_t and gradient at mode coordinates (d >= 0 clamped, z)
void fort_potential(const FortField& f, double d, double z, double& u, double& du_dd,
                    double& du_dz);

struct AtomKinematics {
    Vec3 pos;            // m, Cartesian; toroid axis = z
    Vec3 vel;            // m/s
    double t = 0;        // s
    double phi_acc = 0;  // unwrapped azimuth, maintained by the engine

    double rho() const;
    double phi() const;
    CylPoint cyl() const;
};

// Quasi-static observables along the path.
struct Observables {
    double g = 0;        // rad/s
    double theta = 0;    // rad
    double delta_a = 0;  // rad/s
    double gamma_par = 0;// rad/s
    double transmission = 1;
    double reflection = 0;
    double d_mode = 0;   // m, rho - D_p/2
    double s_dist = 0;   // m, true torus surface distance
    bool far_field = true;
};

// Gravity + Casimir-Polder + quasi-static dipole force (+ FORT). The cQED
// steady state is re-solved at every evaluation point (kappa^-1 << motional
// timescales).
class ForceModel {
  public:
    ForceModel(const PhysicsConfig& cfg, const ModeField& mode, const SurfaceModel& surface,
               ForceVariant variant);

    Vec3 acceleration(const AtomKinematics& k, const DriveSettings& drive, bool fort_on,
                      Observables* obs) const;

    // conservative potential energy (CP ground + FORT + gravity); valid for
    // energy bookkeeping when the probe drive is off
    double potential_energy(const AtomKinematics& k, bool fort_on) const;

    const PhysicsConfig& config() const { return *cfg_; }
    const FortField& fort() const { return fort_; }
    ForceVariant variant() const { return variant_; }

  private:
    const PhysicsConfig* cfg_;
    const ModeField* mode_;
    const SurfaceModel* surface_;
    FortField fort_;
    ForceVariant variant_;
    // empty-cavity response memo per drive setting; a ForceModel instance is
    // used by one trajectory at a time, so this needs no locking
    struct EmptyResponse {
        double power = -1, delta_pa = 0;
        double transmission = 0, reflection = 0, amplitude = 0;
    };
    mutable EmptyResponse cache_[2];
    const EmptyResponse& empty_response(const DriveSettings& drive) const;
};

struct PathSample {
    double t, rho, z, phi;
    double vx, vy, vz;
    double g, delta_a, gamma_par, transmission, reflection;
};

struct TrajectoryRecord {
    Fate fate = Fate::Exited;
    double end_time = 0;
    std::optional<double> trigger_time;
    PhotonRecord photons;
    // first-500ns post-trigger averages
    double window_d = 0, window_g = 0, window_delta_a = 0;
    bool has_window = false;
    // orbit diagnostics, post-trigger
    double phi_drift = 0;     // rad
    double mean_phi_rate = 0; // rad/s
    std::vector<PathSample> path;
    AtomKinematics final_state;
    std::uint64_t index = 0;
};

// Initial state above the toroid: downward speed ~ N(v_bar, sqrt(kT/m)),
// thermal transverse velocity (zero when vertical_only), transverse position
// uniform over the annulus rim +- transverse_extent at z0 = 4 w0.
AtomKinematics sample_initial(const PhysicsConfig& cfg, RngStream& rng,
                              bool vertical_only = false);

struct StepInfo {
    const AtomKinematics& before;
    const AtomKinematics& after;
    const Observables& obs_before;
    const Observables& obs_after;
};

// Adaptive embedded Runge-Kutta 5(4) with event detection. Fate semantics:
// crash when the torus surface distance reaches d_min (crossing time located
// by step bisection), exit when leaving the bounding cylinder (rho > 3 D_p or
// |z| > 10 w0), trapped-at-horizon otherwise.
class TrajectoryEngine {
  public:
    // (probe settings, fort active) as a function of time
    using DriveFn = std::function<std::pair<DriveSettings, bool>(double)>;
    // called after each accepted step; returns a hard end-time bound for the
    // next step (use infinity when unconstrained)
    using StepHook = std::function<double(const StepInfo&)>;

    explicit TrajectoryEngine(const ForceModel& model) : model_(&model) {}

    TrajectoryRecord run(AtomKinematics start, const DriveFn& drive, double horizon,
                         const StepHook& hook, bool record_paths, double sample_interval,
                         double initial_bound = std::numeric_limits<double>::infinity());

  private:
    const ForceModel* model_;
};

// Spec-level integrate: fixed drive schedule, optional FORT activation at the
// schedule's switch time, no detection feedback.
TrajectoryRecord integrate(const ForceModel& model, AtomKinematics start,
                           const DriveSchedule& schedule, bool fort_after_switch,
                           double horizon, bool record_paths = false,
                           double sample_interval = 200e-9);

} // namespace tsim

#endif
