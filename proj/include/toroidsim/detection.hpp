#ifndef TOROIDSIM_DETECTION_HPP
#define TOROIDSIM_DETECTION_HPP

#include "toroidsim/config.hpp"
#include "toroidsim/rng.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

namespace tsim {

// Detector channels: D1/D2 split the transmitted port, D1r/D2r the reflected.
enum class Channel : std::uint8_t { D1 = 0, D2 = 1, D1r = 2, D2r = 3 };
inline bool forward_channel(Channel c) { return c == Channel::D1 || c == Channel::D2; }

enum class Epoch : std::uint8_t { Pre = 0, Post = 1 };

// Times are integer picoseconds so that both the 2 ns timestamp quantum and
// the 25 ns trigger clock are exact.
using TimePs = std::int64_t;
inline TimePs to_ps(double seconds) { return static_cast<TimePs>(std::llround(seconds * 1e12)); }
inline double to_seconds(TimePs ps) { return static_cast<double>(ps) * 1e-12; }

struct PhotonEvent {
    TimePs time = 0; // quantized to the timestamp resolution
    Channel channel = Channel::D1;
    Epoch epoch = Epoch::Pre;
};

struct PhotonRecord {
    std::vector<PhotonEvent> events; // sorted by time
    TimePs resolution = 2000;        // ps

    std::size_t count(Channel c) const;
    // events on channel c with t0 <= t < t1 (seconds)
    std::size_t count_in(Channel c, double t0, double t1) const;
    void sort_events();
    // label epochs given a trigger instant: t >= trigger -> Post
    void label_epochs(double trigger_time);
};

struct TriggerConfig {
    TimePs window = 750000;      // ps
    int threshold = 5;
    TimePs clock_period = 25000; // ps
    static TriggerConfig from_config(const PhysicsConfig& cfg);
};

// Online sliding-window threshold scan over forward photoelectrons.
//
// The earliest clock tick whose trailing window (tick - window, tick] holds
// >= C_th events is always the first tick at or after some event: between an
// event and that tick the window only gains ground on the past, so scanning
// one candidate tick per event is exact.
class TriggerScan {
  public:
    explicit TriggerScan(const TriggerConfig& cfg) : cfg_(cfg) {}

    // feed forward events in nondecreasing time order; returns the trigger
    // tick once the threshold is first met
    std::optional<TimePs> feed(TimePs event_time);
    bool fired() const { return fired_; }
    std::optional<TimePs> trigger_time() const {
        return fired_ ? std::optional<TimePs>(trigger_) : std::nullopt;
    }

  private:
    TriggerConfig cfg_;
    std::deque<TimePs> window_;
    bool fired_ = false;
    TimePs trigger_ = 0;
};

// Piecewise flux schedule in watts; segments interpolate linearly between
// breakpoints (use equal endpoint values for piecewise-constant schedules).
struct FluxSchedule {
    std::vector<double> t;     // s, ascending
    std::vector<double> power; // W
    double at(double time) const;
};

struct DetectionParams {
    double efficiency;     // per output port
    double background_cps; // per detector
    double photon_energy;  // J
    TimePs resolution;     // ps
    static DetectionParams from_config(const PhysicsConfig& cfg);
};

// Stochastic photodetection over [t0, t1] with linear power interpolation:
// thinning against the segment maximum for each port (rate eta P/(hbar w))
// plus constant background per detector. Events are appended quantized.
void generate_segment(double t0, double t1, double p_fwd0, double p_fwd1, double p_ref0,
                      double p_ref1, const DetectionParams& par, RngStream& rng,
                      PhotonRecord& out);

// Whole-schedule generation (the spec-level operation).
PhotonRecord generate_counts(const FluxSchedule& transmitted, const FluxSchedule& reflected,
                             const DetectionParams& par, RngStream& rng);

// Earliest trigger tick for a finished record (seconds), if any.
std::optional<double> run_trigger(const PhotonRecord& record, const TriggerConfig& cfg);

// Probe drive settings per epoch; the optical switch completes at
// trigger + latency and is modeled as instantaneous at that point.
struct DriveSettings {
    double power = 0;    // W
    double delta_pa = 0; // rad/s
};

struct DriveSchedule {
    DriveSettings pre, post;
    std::optional<double> switch_time; // s
    const DriveSettings& at(double t) const {
        return (switch_time && t >= *switch_time) ? post : pre;
    }
};

// Build the drive schedule for a trigger instant (or none). Pre-trigger the
// probe sits on the cavity (delta_pa = delta_ca) unless overridden.
DriveSchedule apply_switch(std::optional<double> trigger_time, const PhysicsConfig& cfg);

} // namespace tsim

#endif
