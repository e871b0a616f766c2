#include "toroidsim/transit.hpp"
#include "toroidsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tsim {

namespace {
constexpr double infinity = std::numeric_limits<double>::infinity();
}

TrajectoryRecord run_transit(const SimulationContext& ctx, const TransitOptions& opt,
                             std::uint64_t master_seed, std::uint64_t index) {
    const PhysicsConfig& cfg = *ctx.cfg;
    RngStream rng(substream_seed(master_seed, index));

    ForceModel model(cfg, *ctx.mode, *ctx.surface, opt.variant);
    TrajectoryEngine engine(model);
    AtomKinematics start = sample_initial(cfg, rng, opt.vertical_only);

    DriveSchedule sched = apply_switch(std::nullopt, cfg);
    DetectionParams det = DetectionParams::from_config(cfg);
    TriggerScan scan(TriggerConfig::from_config(cfg));

    PhotonRecord photons;
    photons.resolution = det.resolution;

    bool triggered = false;
    double trigger_time = 0;
    double switch_time = infinity;
    double record_end = infinity;
    double phi_at_trigger = 0;

    const double window_span = 500e-9; // class histograms average over this span
    double wsum_d = 0, wsum_g = 0, wsum_da = 0, wtime = 0;

    auto drive = [&](double t) {
        DriveSettings s = (triggered && t >= switch_time) ? sched.post : sched.pre;
        bool fort_on = opt.fort_on_trigger && triggered && t >= switch_time;
        return std::make_pair(s, fort_on);
    };

    auto hook = [&](const StepInfo& info) -> double {
        double t0 = info.before.t, t1 = info.after.t;
        double span = t1 - t0;
        if (span <= 0) return infinity;

        // --- photodetection over this step ---
        if (t0 < record_end) {
            double seg_end = std::min(t1, record_end);
            std::size_t first_new = photons.events.size();
            auto interp = [&](double f0, double f1, double t) {
                return f0 + (f1 - f0) * (t - t0) / span;
            };
            auto gen = [&](double a, double b) {
                if (b <= a) return;
                double power_a = drive(a).first.power;
                double t_a = interp(info.obs_before.transmission, info.obs_after.transmission, a);
                double t_b = interp(info.obs_before.transmission, info.obs_after.transmission, b);
                double r_a = interp(info.obs_before.reflection, info.obs_after.reflection, a);
                double r_b = interp(info.obs_before.reflection, info.obs_after.reflection, b);
                generate_segment(a, b, t_a * power_a, t_b * power_a, r_a * power_a,
                                 r_b * power_a, det, rng, photons);
            };
            // split at the switch instant when it lands inside (far-field steps)
            if (triggered && switch_time > t0 && switch_time < seg_end) {
                gen(t0, switch_time);
                gen(switch_time, seg_end);
            } else {
                gen(t0, seg_end);
            }
            // feed fresh forward photoelectrons to the trigger scan in order
            std::sort(photons.events.begin() + first_new, photons.events.end(),
                      [](const PhotonEvent& x, const PhotonEvent& y) { return x.time < y.time; });
            for (std::size_t i = first_new; i < photons.events.size(); ++i) {
                const PhotonEvent& e = photons.events[i];
                if (!forward_channel(e.channel)) continue;
                auto fired = scan.feed(e.time);
                if (fired && !triggered) {
                    triggered = true;
                    trigger_time = to_seconds(*fired);
                    switch_time = trigger_time + cfg.probe.switch_latency;
                    record_end = trigger_time + cfg.detection.record_window;
                    phi_at_trigger = info.after.phi_acc;
                }
            }
        }

        // --- post-trigger window averages ---
        if (triggered) {
            double w0 = std::max(t0, trigger_time);
            double w1 = std::min(t1, trigger_time + window_span);
            if (w1 > w0) {
                double w = w1 - w0;
                wsum_d += 0.5 * (info.obs_before.d_mode + info.obs_after.d_mode) * w;
                wsum_g += 0.5 * (info.obs_before.g + info.obs_after.g) * w;
                wsum_da += 0.5 * (info.obs_before.delta_a + info.obs_after.delta_a) * w;
                wtime += w;
            }
        }

        // --- next-step bound ---
        if (triggered && t1 < switch_time) return switch_time;
        if (!triggered && !info.obs_after.far_field) {
            // keep the (future) switch instant out of the running step
            return t1 + std::max(cfg.probe.switch_latency, 1e-9);
        }
        return infinity;
    };

    TrajectoryRecord rec = engine.run(start, drive, cfg.numerics.horizon, hook,
                                      opt.record_paths, cfg.numerics.sample_interval);
    photons.sort_events();
    if (triggered) {
        photons.label_epochs(trigger_time);
        rec.trigger_time = trigger_time;
        // the first-500ns averages are defined for atoms that live through
        // the averaging span
        if (wtime >= window_span * (1.0 - 1e-6)) {
            rec.has_window = true;
            rec.window_d = wsum_d / wtime;
            rec.window_g = wsum_g / wtime;
            rec.window_delta_a = wsum_da / wtime;
        }
        rec.phi_drift = rec.final_state.phi_acc - phi_at_trigger;
        double dt = rec.end_time - trigger_time;
        rec.mean_phi_rate = dt > 0 ? rec.phi_drift / dt : 0.0;
    }
    rec.photons = std::move(photons);
    rec.index = index;
    return rec;
}

std::vector<TrajectoryRecord> run_ensemble(const SimulationContext& ctx,
                                           const TransitOptions& opt, int n,
                                           std::uint64_t seed) {
    std::vector<TrajectoryRecord> records(n);
    std::string error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (int i = 0; i < n; ++i) {
        try {
            records[i] = run_transit(ctx, opt, seed, static_cast<std::uint64_t>(i));
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
            error = e.what();
        }
    }
    if (!error.empty()) throw std::runtime_error("run_ensemble: " + error);
    return records;
}

std::vector<TrajectoryRecord> run_ensemble_serial(const SimulationContext& ctx,
                                                  const TransitOptions& opt, int n,
                                                  std::uint64_t seed) {
    std::vector<TrajectoryRecord> records(n);
    for (int i = 0; i < n; ++i)
        records[i] = run_transit(ctx, opt, seed, static_cast<std::uint64_t>(i));
    return records;
}

} // namespace tsim
