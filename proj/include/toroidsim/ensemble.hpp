#ifndef TOROIDSIM_ENSEMBLE_HPP
#define TOROIDSIM_ENSEMBLE_HPP

#include "toroidsim/fit.hpp"
#include "toroidsim/quantum.hpp"
#include "toroidsim/trajectory.hpp"

#include <vector>

namespace tsim {

// Post-trigger averaged transmission trace. Counts come from the forward
// detectors, normalized to the post-switch probe so that full transmission
// reads T = 1; the background level B is estimated from the record tail.
struct TraceResult {
    std::vector<double> t;            // s, bin centers from the trigger
    std::vector<double> transmission; // T(t)
    std::vector<double> t_b;          // background-subtracted T - B
    std::vector<double> sigma;        // Poisson counting error per bin
    double background = 0;
    int n_triggered = 0;
};

TraceResult average_trace(const std::vector<TrajectoryRecord>& records,
                          const PhysicsConfig& cfg, double bin_width);

// Exponential + Gaussian decomposition of the background-subtracted trace,
// skipping the probe-switch transient at the start.
ExpGaussFit fit_trace(const TraceResult& trace, double t_min = 0.0);

struct Histogram {
    std::vector<double> centers;
    std::vector<double> density; // sums to 1/bin_width
    double bin_width = 0;
    int count = 0;

    double mass() const;
    double mode() const; // center of the densest bin
};

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins);

// Class-resolved distributions over the first 500 ns after the trigger.
// Class I = crashed trajectories, class II = pass-throughs.
struct ClassHistograms {
    Histogram d_i, d_ii;
    Histogram g_i, g_ii;
    Histogram shift_i, shift_ii;
    int n_i = 0, n_ii = 0;
};

ClassHistograms histograms(const std::vector<TrajectoryRecord>& records,
                           const PhysicsConfig& cfg);

// trigger-window-averaged coupling distribution (all triggered classes)
Histogram coupling_histogram(const std::vector<TrajectoryRecord>& records,
                             const PhysicsConfig& cfg, int bins);
std::vector<PgBin> histogram_to_pg(const Histogram& h);

// One spectra point: windowed post-trigger counts normalized to the
// far-detuned level, with the deterministic empty-cavity reference.
struct SpectraPoint {
    double delta_pa = 0;
    double t_atom = 0, r_atom = 0;
    double t_empty = 0, r_empty = 0;
    int n_triggered = 0;
    long counts_fwd = 0, counts_ref = 0;
};

SpectraPoint spectra_point(const std::vector<TrajectoryRecord>& records,
                           const PhysicsConfig& cfg, double delta_pa);

// empty-cavity response at a probe detuning (g = 0 steady state)
void empty_cavity_response(const PhysicsConfig& cfg, double delta_pa, double& t_out,
                           double& r_out);

// Peak splitting between the two most prominent spectrum maxima.
struct PeakSplit {
    bool ok = false;
    double splitting = 0; // rad/s
    double low = 0, high = 0;
};
PeakSplit peak_splitting(const std::vector<double>& delta_pa, const std::vector<double>& value,
                         int sg_half_width = 2);

// Fixed-g spectra averaged over a coupling distribution (the "falling atoms,
// no forces" model): theta-averaged steady-state response per bin.
std::vector<double> pg_averaged_spectrum(const std::vector<PgBin>& pg,
                                         const PhysicsConfig& cfg,
                                         const std::vector<double>& delta_pa_list,
                                         double power, int n_theta = 8);

// Cross-correlation estimators over the post-trigger record window:
// c12 is the ensemble mean of per-record D1 x D2 pair differences, c12_bar
// the same sum built from the ensemble-averaged count profiles.
struct CorrelationResult {
    std::vector<double> tau;     // s, bin centers
    std::vector<double> c12;     // per trigger, per bin
    std::vector<double> c12_bar;
    std::vector<double> c12_se;  // standard error of c12
    int n_records = 0;
};

CorrelationResult correlations(const std::vector<TrajectoryRecord>& records,
                               const PhysicsConfig& cfg, double bin_width, double tau_max);

struct FortStats {
    int n_triggered = 0;
    int n_captured = 0;
    double capture_fraction = 0;
    double capture_threshold = 0;   // s of post-trigger residence
    double mean_phi_rate = 0;       // rad/s among captured
    double mean_abs_phi_drift = 0;  // rad among captured
    Histogram residence;            // s
};

FortStats fort_statistics(const std::vector<TrajectoryRecord>& records,
                          const PhysicsConfig& cfg, double capture_threshold = 50e-6);

} // namespace tsim

#endif
