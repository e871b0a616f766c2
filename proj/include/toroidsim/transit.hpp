#ifndef TOROIDSIM_TRANSIT_HPP
#define TOROIDSIM_TRANSIT_HPP

#include "toroidsim/trajectory.hpp"

#include <cstdint>
#include <vector>

namespace tsim {

// Closed-loop single-atom run: trajectory integration and photodetection
// co-advance; the trigger switches the probe (and optionally the trap), which
// feeds back on the forces.
struct TransitOptions {
    ForceVariant variant = ForceVariant::Full;
    bool vertical_only = false;   // straight vertical falls (p_fall model)
    bool fort_on_trigger = false; // arm the two-color trap on the trigger
    bool record_paths = false;
};

struct SimulationContext {
    const PhysicsConfig* cfg;
    const ModeField* mode;
    const SurfaceModel* surface;

    static SimulationContext make(const PhysicsConfig& cfg, const ModeField& mode,
                                  const SurfaceModel& surface) {
        return SimulationContext{&cfg, &mode, &surface};
    }
};

// One trajectory, bit-identical for a given (seed, index) regardless of the
// caller's threading.
TrajectoryRecord run_transit(const SimulationContext& ctx, const TransitOptions& opt,
                             std::uint64_t master_seed, std::uint64_t index);

// OpenMP-parallel ensemble kernel and the serial reference implementation it
// must match record-for-record.
std::vector<TrajectoryRecord> run_ensemble(const SimulationContext& ctx,
                                           const TransitOptions& opt, int n,
                                           std::uint64_t seed);
std::vector<TrajectoryRecord> run_ensemble_serial(const SimulationContext& ctx,
                                                  const TransitOptions& opt, int n,
                                                  std::uint64_t seed);

} // namespace tsim

#endif
