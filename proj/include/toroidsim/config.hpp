#ifndef TOROIDSIM_CONFIG_HPP
#define TOROIDSIM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsim {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// All physical and numerical parameters in SI (rates are angular, rad/s).
// Immutable after load; safe to share across workers.
struct PhysicsConfig {
    struct Toroid {
        double principal_diameter; // m, outer-equator diameter D_p
        double minor_diameter;     // m, tube diameter D_m
    } toroid;

    struct Mode {
        double g_max;       // rad/s, coupling at the surface (vacuum-Rabi half-splitting convention)
        double lambda_bar;  // m, radial 1/e decay length of g
        double waist;       // m, vertical Gaussian waist w0
        double n_eff;       // effective index; fixes the azimuthal mode number
        double k_phi;       // 1/m, derived: 2*m_az/D_p with integer m_az
        int mode_number;    // m_az
        std::string polarization; // "TE" | "TM"
    } mode;

    struct Cavity {
        double kappa_i;  // rad/s
        double kappa_ex; // rad/s
        double h;        // rad/s, intermode scattering
        double delta_ca; // rad/s, cavity-atom detuning
        double kappa() const { return kappa_i + kappa_ex; }
    } cavity;

    struct Atom {
        double gamma0;     // rad/s, free-space amplitude (half-linewidth) decay
        double mass;       // kg
        double wavelength; // m
        double omega() const;
    } atom;

    struct Surface {
        double c3_ground;  // J m^3
        double c3_excited; // J m^3
        double lambda_ret; // m, retardation roll-off length
        double d_min;      // m, integration cutoff; reaching it is a crash
        std::string decay_model; // "analytic-halfspace" | "tabulated"
        double refractive_index;
        std::string gamma_table_file;     // used when decay_model == "tabulated"
        std::string potential_table_file; // optional tabulated U_s(d)
    } surface;

    struct Probe {
        double power_pre;   // W
        double power_post;  // W
        double delta_pa_pre_override; // rad/s; used only if has_pre_override
        bool has_pre_override;        // default: pre-trigger probe sits on the cavity
        double delta_pa_post;         // rad/s
        double switch_latency;        // s
    } probe;

    struct Detection {
        double efficiency;     // photon -> click, per output port, incl. path
        double background_cps; // per detector
        double window;         // s, trigger window dt_th
        int threshold;         // C_th
        double clock_period;   // s
        double resolution;     // s, timestamp quantum
        double record_window;  // s, post-trigger recording span
    } detection;

    struct Cloud {
        double temperature;      // K
        double release_height;   // m (documentation of the apparatus; arrival stats below)
        double arrival_speed;    // m/s, mean downward speed at the mode
        double transverse_extent; // m, radial sampling half-band around the rim
    } cloud;

    struct Fort {
        bool enabled;
        double lambda_red;  // m
        double lambda_blue; // m
        double n_eff_red;   // sets the red evanescent decay length
        double n_eff_blue;
        double power_red;   // W
        double power_blue;  // W
        // surface peak potential per injected microwatt, in kB*mK units
        // (mode-overlap calibration; stored in human units verbatim)
        double potential_per_uw_red_mk;
        double potential_per_uw_blue_mk;
        bool radiation_pressure; // azimuthal phase-gradient force switch
    } fort;

    struct Numerics {
        double rel_tol;        // integrator relative tolerance
        double max_step;       // s
        double far_step;       // s, step cap outside the interaction shell
        double far_distance;   // m, surface distance beyond which forces/coupling are dropped
        int trajectories;      // N
        std::uint64_t seed;
        double window_start;   // s, spectra averaging window (post-trigger)
        double window_end;     // s
        double horizon;        // s, absolute per-trajectory time limit
        double bin_width;      // s, trace binning
        double sample_interval; // s, path sampling cadence
        bool record_paths;
    } numerics;

    // Convenience derived quantities
    double probe_omega() const { return atom.omega(); } // probe detunings are small vs omega_a
    double rim_radius() const { return toroid.principal_diameter / 2.0; }
    double tube_radius() const { return toroid.minor_diameter / 2.0; }
    // radius of the tube-center circle
    double tube_center_radius() const { return rim_radius() - tube_radius(); }

    void validate() const; // throws ConfigError with a key path on violations
};

// Parse + validate a JSON config document; absent keys take the default
// apparatus values. Unknown keys and malformed values are errors.
PhysicsConfig load_config(const std::string& json_text);
PhysicsConfig load_config_file(const std::string& path);
PhysicsConfig default_config();

// Apply "dotted.path=value" overrides to a JSON document before parsing.
std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides);

// Canonical round-trippable serialization (human units, full precision).
std::string serialize_config(const PhysicsConfig& cfg);

// FNV-1a over the canonical serialization; stamped into output headers.
std::uint64_t config_hash(const PhysicsConfig& cfg);

} // namespace tsim

#endif
