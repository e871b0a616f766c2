#include "toroidsim/ensemble.hpp"
#include "toroidsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsim {

namespace {

double post_flux_norm(const PhysicsConfig& cfg) {
    // expected click rate per forward port at full transmission, post switch
    return cfg.detection.efficiency * cfg.probe.power_post / (hbar * cfg.probe_omega());
}

} // namespace

TraceResult average_trace(const std::vector<TrajectoryRecord>& records,
                          const PhysicsConfig& cfg, double bin_width) {
    TraceResult out;
    double span = cfg.detection.record_window;
    int n_bins = std::max(1, static_cast<int>(std::floor(span / bin_width)));
    std::vector<double> counts(n_bins, 0.0);
    for (const auto& rec : records) {
        if (!rec.trigger_time) continue;
        ++out.n_triggered;
        double trig = *rec.trigger_time;
        for (const auto& e : rec.photons.events) {
            if (!forward_channel(e.channel)) continue;
            // photoelectrons at the trigger tick itself belong to the
            // trigger decision, not the recorded aftermath
            double t = to_seconds(e.time) - trig;
            if (t <= 0 || t >= span) continue;
            int b = static_cast<int>(t / bin_width);
            if (b >= 0 && b < n_bins) counts[b] += 1.0;
        }
    }
    if (out.n_triggered == 0) throw std::runtime_error("average_trace: no triggered records");

    // per-bin normalization tracks the probe power across the switch
    double scale = cfg.detection.efficiency / (hbar * cfg.probe_omega());
    double latency = cfg.probe.switch_latency;
    out.t.resize(n_bins);
    out.transmission.resize(n_bins);
    out.sigma.resize(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        double b0 = b * bin_width, b1 = (b + 1) * bin_width;
        double pre_span = std::clamp(latency - b0, 0.0, bin_width);
        double energy = cfg.probe.power_pre * pre_span +
                        cfg.probe.power_post * (bin_width - pre_span);
        double norm = scale * energy * out.n_triggered;
        out.t[b] = (b + 0.5) * bin_width;
        out.transmission[b] = norm > 0 ? counts[b] / norm : 0.0;
        out.sigma[b] = norm > 0 ? std::sqrt(std::max(counts[b], 1.0)) / norm : 1.0;
    }
    // background from the record tail
    int tail_from = static_cast<int>(0.85 * n_bins);
    double bsum = 0;
    int bcnt = 0;
    for (int b = tail_from; b < n_bins; ++b) {
        bsum += out.transmission[b];
        ++bcnt;
    }
    out.background = bcnt ? bsum / bcnt : 0.0;
    out.t_b.resize(n_bins);
    for (int b = 0; b < n_bins; ++b) out.t_b[b] = out.transmission[b] - out.background;
    return out;
}

ExpGaussFit fit_trace(const TraceResult& trace, double t_min) {
    // components stay anchored at the trigger; only the transient bins drop
    std::vector<double> t, y, s;
    for (size_t i = 0; i < trace.t.size(); ++i) {
        if (trace.t[i] < t_min) continue;
        t.push_back(trace.t[i]);
        y.push_back(trace.t_b[i]);
        s.push_back(trace.sigma.empty() ? 1.0 : trace.sigma[i]);
    }
    return fit_exp_gauss(t, y, s);
}

double Histogram::mass() const {
    double m = 0;
    for (double d : density) m += d * bin_width;
    return m;
}

double Histogram::mode() const {
    if (density.empty()) return 0;
    // argmax of a 5-bin moving average; raw argmax is seed noise for the
    // broad distributions this gets used on
    int n = static_cast<int>(density.size());
    int best = 0;
    double best_v = -1;
    for (int i = 0; i < n; ++i) {
        double acc = 0;
        int cnt = 0;
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            acc += density[j];
            ++cnt;
        }
        acc /= cnt;
        if (acc > best_v) {
            best_v = acc;
            best = i;
        }
    }
    return centers[best];
}

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins) {
    Histogram h;
    h.bin_width = (hi - lo) / bins;
    h.centers.resize(bins);
    h.density.assign(bins, 0.0);
    for (int i = 0; i < bins; ++i) h.centers[i] = lo + (i + 0.5) * h.bin_width;
    for (double v : values) {
        if (v < lo || v >= hi) continue;
        int b = static_cast<int>((v - lo) / h.bin_width);
        if (b >= 0 && b < bins) {
            h.density[b] += 1.0;
            ++h.count;
        }
    }
    if (h.count > 0)
        for (double& d : h.density) d /= h.count * h.bin_width;
    return h;
}

ClassHistograms histograms(const std::vector<TrajectoryRecord>& records,
                           const PhysicsConfig& cfg) {
    std::vector<double> d1, d2, g1, g2, s1, s2;
    for (const auto& rec : records) {
        if (!rec.trigger_time || !rec.has_window) continue;
        if (rec.fate == Fate::Crashed) {
            d1.push_back(rec.window_d);
            g1.push_back(rec.window_g);
            s1.push_back(rec.window_delta_a);
        } else if (rec.fate == Fate::Exited) {
            d2.push_back(rec.window_d);
            g2.push_back(rec.window_g);
            s2.push_back(rec.window_delta_a);
        }
    }
    ClassHistograms out;
    out.n_i = static_cast<int>(d1.size());
    out.n_ii = static_cast<int>(d2.size());
    double d_hi = 6e-7;
    double g_hi = cfg.mode.g_max;
    double s_lo = -mhz(30.0);
    out.d_i = make_histogram(d1, 0, d_hi, 30);
    out.d_ii = make_histogram(d2, 0, d_hi, 30);
    out.g_i = make_histogram(g1, 0, g_hi, 50);
    out.g_ii = make_histogram(g2, 0, g_hi, 50);
    out.shift_i = make_histogram(s1, s_lo, 0, 50);
    out.shift_ii = make_histogram(s2, s_lo, 0, 50);
    return out;
}

Histogram coupling_histogram(const std::vector<TrajectoryRecord>& records,
                             const PhysicsConfig& cfg, int bins) {
    std::vector<double> g;
    for (const auto& rec : records)
        if (rec.trigger_time && rec.has_window) g.push_back(rec.window_g);
    return make_histogram(g, 0, cfg.mode.g_max, bins);
}

std::vector<PgBin> histogram_to_pg(const Histogram& h) {
    std::vector<PgBin> pg;
    for (size_t i = 0; i < h.centers.size(); ++i) {
        double w = h.density[i] * h.bin_width;
        if (w > 0) pg.push_back({h.centers[i], w});
    }
    return pg;
}

void empty_cavity_response(const PhysicsConfig& cfg, double delta_pa, double& t_out,
                           double& r_out) {
    CavityAtomParams p = CavityAtomParams::from_config(cfg, cfg.probe.power_post, delta_pa);
    p.g = 0;
    SteadyState s = steady_state(p);
    t_out = s.transmission;
    r_out = s.reflection;
}

SpectraPoint spectra_point(const std::vector<TrajectoryRecord>& records,
                           const PhysicsConfig& cfg, double delta_pa) {
    SpectraPoint pt;
    pt.delta_pa = delta_pa;
    double w0 = cfg.numerics.window_start, w1 = cfg.numerics.window_end;
    for (const auto& rec : records) {
        if (!rec.trigger_time) continue;
        ++pt.n_triggered;
        double trig = *rec.trigger_time;
        pt.counts_fwd += rec.photons.count_in(Channel::D1, trig + w0, trig + w1) +
                         rec.photons.count_in(Channel::D2, trig + w0, trig + w1);
        pt.counts_ref += rec.photons.count_in(Channel::D1r, trig + w0, trig + w1) +
                         rec.photons.count_in(Channel::D2r, trig + w0, trig + w1);
    }
    if (pt.n_triggered == 0) throw std::runtime_error("spectra_point: no triggered records");
    double win = w1 - w0;
    double denom = post_flux_norm(cfg) * win * pt.n_triggered;
    double bg = 2.0 * cfg.detection.background_cps * win * pt.n_triggered;
    pt.t_atom = denom > 0 ? (pt.counts_fwd - bg) / denom : 0.0;
    pt.r_atom = denom > 0 ? (pt.counts_ref - bg) / denom : 0.0;
    empty_cavity_response(cfg, delta_pa, pt.t_empty, pt.r_empty);
    return pt;
}

PeakSplit peak_splitting(const std::vector<double>& delta_pa, const std::vector<double>& value,
                         int sg_half_width) {
    PeakSplit out;
    std::vector<Peak> peaks = find_peaks(delta_pa, value, sg_half_width);
    if (peaks.size() < 2) return out;
    // two most prominent
    double a = peaks[0].x, b = peaks[1].x;
    out.low = std::min(a, b);
    out.high = std::max(a, b);
    out.splitting = out.high - out.low;
    out.ok = true;
    return out;
}

std::vector<double> pg_averaged_spectrum(const std::vector<PgBin>& pg,
                                         const PhysicsConfig& cfg,
                                         const std::vector<double>& delta_pa_list,
                                         double power, int n_theta) {
    std::vector<double> out(delta_pa_list.size(), 0.0);
    double mass = 0;
    for (const auto& bin : pg) mass += bin.weight;
    if (mass <= 0) throw std::runtime_error("pg_averaged_spectrum: empty distribution");
    for (size_t i = 0; i < delta_pa_list.size(); ++i) {
        CavityAtomParams p = CavityAtomParams::from_config(cfg, power, delta_pa_list[i]);
        double acc = 0;
        for (const auto& bin : pg) {
            double t_avg = 0;
            for (int k = 0; k < n_theta; ++k) {
                p.g = bin.g;
                p.theta = pi * k / n_theta;
                t_avg += steady_state(p).transmission;
            }
            acc += bin.weight * t_avg / n_theta;
        }
        out[i] = acc / mass;
    }
    return out;
}

CorrelationResult correlations(const std::vector<TrajectoryRecord>& records,
                               const PhysicsConfig& cfg, double bin_width, double tau_max) {
    CorrelationResult out;
    TimePs res = to_ps(cfg.detection.resolution);
    TimePs bin_ps = to_ps(bin_width);
    if (bin_ps % res != 0)
        throw std::invalid_argument("correlations: bin width must be a multiple of the resolution");
    double span = cfg.detection.record_window;
    int n_tau = 2 * static_cast<int>(std::floor(tau_max / bin_width)) + 1;
    int mid = n_tau / 2;
    out.tau.resize(n_tau);
    for (int i = 0; i < n_tau; ++i) out.tau[i] = (i - mid) * bin_width;

    std::vector<double> sum(n_tau, 0.0), sumsq(n_tau, 0.0);
    // ensemble-mean count profiles at full resolution for the bar estimator
    int n_prof = static_cast<int>(std::llround(span / cfg.detection.resolution));
    std::vector<double> m1(n_prof, 0.0), m2(n_prof, 0.0);

    int n_rec = 0;
    std::vector<double> t1, t2;
    std::vector<double> per(n_tau, 0.0);
    for (const auto& rec : records) {
        if (!rec.trigger_time) continue;
        ++n_rec;
        double trig = *rec.trigger_time;
        t1.clear();
        t2.clear();
        for (const auto& e : rec.photons.events) {
            double t = to_seconds(e.time) - trig;
            if (t <= 0 || t >= span) continue;
            if (e.channel == Channel::D1) {
                t1.push_back(t);
                int k = static_cast<int>(t / cfg.detection.resolution);
                if (k >= 0 && k < n_prof) m1[k] += 1.0;
            } else if (e.channel == Channel::D2) {
                t2.push_back(t);
                int k = static_cast<int>(t / cfg.detection.resolution);
                if (k >= 0 && k < n_prof) m2[k] += 1.0;
            }
        }
        std::fill(per.begin(), per.end(), 0.0);
        for (double a : t1)
            for (double b : t2) {
                double tau = b - a;
                if (tau < -tau_max - 0.5 * bin_width || tau > tau_max + 0.5 * bin_width) continue;
                int k = mid + static_cast<int>(std::floor(tau / bin_width + 0.5));
                if (k >= 0 && k < n_tau) per[k] += 1.0;
            }
        for (int k = 0; k < n_tau; ++k) {
            sum[k] += per[k];
            sumsq[k] += per[k] * per[k];
        }
    }
    if (n_rec == 0) throw std::runtime_error("correlations: no triggered records");
    out.n_records = n_rec;
    for (double& v : m1) v /= n_rec;
    for (double& v : m2) v /= n_rec;

    out.c12.resize(n_tau);
    out.c12_se.resize(n_tau);
    out.c12_bar.assign(n_tau, 0.0);
    for (int k = 0; k < n_tau; ++k) {
        double mean = sum[k] / n_rec;
        out.c12[k] = mean;
        double var = std::max(0.0, sumsq[k] / n_rec - mean * mean);
        out.c12_se[k] = std::sqrt(var / n_rec);
    }
    // product-of-averages over the same tau bins
    int per_bin = static_cast<int>(bin_ps / res);
    for (int k = 0; k < n_tau; ++k) {
        double acc = 0;
        for (int sub = 0; sub < per_bin; ++sub) {
            long off = static_cast<long>(std::llround((out.tau[k] - 0.5 * bin_width) /
                                                      cfg.detection.resolution)) +
                       sub;
            for (int i = 0; i < n_prof; ++i) {
                long j = i + off;
                if (j >= 0 && j < n_prof) acc += m1[i] * m2[j];
            }
        }
        out.c12_bar[k] = acc;
    }
    return out;
}

FortStats fort_statistics(const std::vector<TrajectoryRecord>& records,
                          const PhysicsConfig& cfg, double capture_threshold) {
    FortStats st;
    st.capture_threshold = capture_threshold;
    std::vector<double> residences;
    double rate_sum = 0, drift_sum = 0;
    for (const auto& rec : records) {
        if (!rec.trigger_time) continue;
        ++st.n_triggered;
        double residence = rec.end_time - *rec.trigger_time;
        residences.push_back(residence);
        bool captured = rec.fate == Fate::TrappedAtHorizon || residence > capture_threshold;
        if (captured) {
            ++st.n_captured;
            rate_sum += rec.mean_phi_rate;
            drift_sum += std::abs(rec.phi_drift);
        }
    }
    if (st.n_triggered > 0)
        st.capture_fraction = static_cast<double>(st.n_captured) / st.n_triggered;
    if (st.n_captured > 0) {
        st.mean_phi_rate = rate_sum / st.n_captured;
        st.mean_abs_phi_drift = drift_sum / st.n_captured;
    }
    double max_res = cfg.numerics.horizon;
    st.residence = make_histogram(residences, 0, max_res, 40);
    return st;
}

} // namespace tsim
