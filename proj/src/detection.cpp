#include "toroidsim/detection.hpp"
#include "toroidsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsim {

std::size_t PhotonRecord::count(Channel c) const {
    std::size_t n = 0;
    for (const auto& e : events) n += (e.channel == c);
    return n;
}

std::size_t PhotonRecord::count_in(Channel c, double t0, double t1) const {
    TimePs a = to_ps(t0), b = to_ps(t1);
    std::size_t n = 0;
    for (const auto& e : events) n += (e.channel == c && e.time >= a && e.time < b);
    return n;
}

void PhotonRecord::sort_events() {
    std::stable_sort(events.begin(), events.end(), [](const PhotonEvent& x, const PhotonEvent& y) {
        if (x.time != y.time) return x.time < y.time;
        return x.channel < y.channel;
    });
}

void PhotonRecord::label_epochs(double trigger_time) {
    TimePs tp = to_ps(trigger_time);
    for (auto& e : events) e.epoch = e.time >= tp ? Epoch::Post : Epoch::Pre;
}

TriggerConfig TriggerConfig::from_config(const PhysicsConfig& cfg) {
    TriggerConfig t;
    t.window = to_ps(cfg.detection.window);
    t.threshold = cfg.detection.threshold;
    t.clock_period = to_ps(cfg.detection.clock_period);
    return t;
}

std::optional<TimePs> TriggerScan::feed(TimePs event_time) {
    if (fired_) return trigger_;
    window_.push_back(event_time);
    // first clock tick at or after this event
    TimePs tick = ((event_time + cfg_.clock_period - 1) / cfg_.clock_period) * cfg_.clock_period;
    while (!window_.empty() && window_.front() <= tick - cfg_.window) window_.pop_front();
    if (static_cast<int>(window_.size()) >= cfg_.threshold) {
        fired_ = true;
        trigger_ = tick;
        return trigger_;
    }
    return std::nullopt;
}

double FluxSchedule::at(double time) const {
    if (t.empty()) return 0;
    if (time <= t.front()) return power.front();
    if (time >= t.back()) return power.back();
    size_t i = std::upper_bound(t.begin(), t.end(), time) - t.begin() - 1;
    double f = (time - t[i]) / (t[i + 1] - t[i]);
    return (1 - f) * power[i] + f * power[i + 1];
}

DetectionParams DetectionParams::from_config(const PhysicsConfig& cfg) {
    DetectionParams p;
    p.efficiency = cfg.detection.efficiency;
    p.background_cps = cfg.detection.background_cps;
    p.photon_energy = hbar * cfg.probe_omega();
    p.resolution = to_ps(cfg.detection.resolution);
    return p;
}

namespace {

TimePs quantize(double t_seconds, TimePs resolution) {
    TimePs ps = to_ps(t_seconds);
    return ((ps + resolution / 2) / resolution) * resolution;
}

// Inhomogeneous Poisson on [t0, t1] with linearly interpolated rate, by
// thinning against the endpoint maximum.
template <typename Emit>
void thin_segment(double t0, double t1, double r0, double r1, RngStream& rng, Emit emit) {
    double rmax = std::max(r0, r1);
    if (rmax <= 0 || t1 <= t0) return;
    double span = t1 - t0;
    double t = t0;
    while (true) {
        t += rng.exponential(rmax);
        if (t >= t1) break;
        double r = r0 + (r1 - r0) * (t - t0) / span;
        if (rng.uniform() * rmax <= r) emit(t);
    }
}

} // namespace

void generate_segment(double t0, double t1, double p_fwd0, double p_fwd1, double p_ref0,
                      double p_ref1, const DetectionParams& par, RngStream& rng,
                      PhotonRecord& out) {
    double scale = par.efficiency / par.photon_energy;
    // forward port, 50/50 split between D1 and D2
    thin_segment(t0, t1, p_fwd0 * scale, p_fwd1 * scale, rng, [&](double t) {
        Channel c = rng.uniform() < 0.5 ? Channel::D1 : Channel::D2;
        out.events.push_back({quantize(t, par.resolution), c, Epoch::Pre});
    });
    thin_segment(t0, t1, p_ref0 * scale, p_ref1 * scale, rng, [&](double t) {
        Channel c = rng.uniform() < 0.5 ? Channel::D1r : Channel::D2r;
        out.events.push_back({quantize(t, par.resolution), c, Epoch::Pre});
    });
    for (int det = 0; det < 4; ++det) {
        thin_segment(t0, t1, par.background_cps, par.background_cps, rng, [&](double t) {
            out.events.push_back({quantize(t, par.resolution), static_cast<Channel>(det),
                                  Epoch::Pre});
        });
    }
}

PhotonRecord generate_counts(const FluxSchedule& transmitted, const FluxSchedule& reflected,
                             const DetectionParams& par, RngStream& rng) {
    if (transmitted.t.size() != transmitted.power.size() ||
        reflected.t.size() != reflected.power.size())
        throw std::invalid_argument("generate_counts: ragged schedule");
    PhotonRecord rec;
    rec.resolution = par.resolution;
    // merge breakpoints of both schedules
    std::vector<double> ts = transmitted.t;
    ts.insert(ts.end(), reflected.t.begin(), reflected.t.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (ts.size() < 2) return rec;
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        generate_segment(ts[i], ts[i + 1], transmitted.at(ts[i]), transmitted.at(ts[i + 1]),
                         reflected.at(ts[i]), reflected.at(ts[i + 1]), par, rng, rec);
    }
    rec.sort_events();
    return rec;
}

std::optional<double> run_trigger(const PhotonRecord& record, const TriggerConfig& cfg) {
    TriggerScan scan(cfg);
    // record must be sorted; forward channels only
    for (const auto& e : record.events) {
        if (!forward_channel(e.channel)) continue;
        if (auto t = scan.feed(e.time)) return to_seconds(*t);
    }
    return std::nullopt;
}

DriveSchedule apply_switch(std::optional<double> trigger_time, const PhysicsConfig& cfg) {
    DriveSchedule s;
    s.pre.power = cfg.probe.power_pre;
    s.pre.delta_pa =
        cfg.probe.has_pre_override ? cfg.probe.delta_pa_pre_override : cfg.cavity.delta_ca;
    s.post.power = cfg.probe.power_post;
    s.post.delta_pa = cfg.probe.delta_pa_post;
    if (trigger_time) s.switch_time = *trigger_time + cfg.probe.switch_latency;
    return s;
}

} // namespace tsim
