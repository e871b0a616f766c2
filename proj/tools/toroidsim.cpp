// Batch entry points: one subcommand per headline result family, each wiring
// a config + seed to an ensemble run and a set of tabular output files.

#include "toroidsim/config.hpp"
#include "toroidsim/ensemble.hpp"
#include "toroidsim/io.hpp"
#include "toroidsim/quantum.hpp"
#include "toroidsim/transit.hpp"
#include "toroidsim/units.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace tsim;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "config file (JSON)");
    cmd->add_option("--set", args.overrides, "override a config key: dotted.path=value");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "RNG seed (overrides numerics.seed)")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--workers", args.workers, "worker threads (0 = library default)");
}

PhysicsConfig load(const CommonArgs& args,
                   const std::vector<std::string>& presets = {}) {
    std::string text = "{}";
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw ConfigError("config: cannot open " + args.config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    std::vector<std::string> all = presets;
    all.insert(all.end(), args.overrides.begin(), args.overrides.end());
    PhysicsConfig cfg = load_config(apply_overrides(text, all));
    if (args.seed_set) {
        cfg = load_config(apply_overrides(serialize_config(cfg),
                                          {"numerics.seed=" + std::to_string(args.seed)}));
    }
#ifdef _OPENMP
    if (args.workers > 0) omp_set_num_threads(args.workers);
#endif
    fs::create_directories(args.out_dir);
    return cfg;
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_trace_and_fit(const std::string& dir, const std::string& tag,
                         const std::vector<TrajectoryRecord>& records,
                         const PhysicsConfig& cfg) {
    TraceResult trace = average_trace(records, cfg, cfg.numerics.bin_width);
    {
        TableWriter w(join(dir, "trace" + tag + ".tsv"));
        write_provenance(w, cfg, cfg.numerics.seed, cfg.numerics.trajectories);
        w.meta("triggered", static_cast<std::uint64_t>(trace.n_triggered));
        w.meta("background_T", trace.background);
        w.columns({"t_us", "T", "T_B"});
        for (size_t i = 0; i < trace.t.size(); ++i)
            w.row({trace.t[i] * 1e6, trace.transmission[i], trace.t_b[i]});
    }
    ExpGaussFit fit = fit_exp_gauss(trace.t, trace.t_b);
    {
        TableWriter w(join(dir, "fit" + tag + ".tsv"));
        write_provenance(w, cfg, cfg.numerics.seed, cfg.numerics.trajectories);
        w.meta("model", "A*exp(-t/tau_exp) + C*exp(-(t/tau_gauss)^2) + offset");
        w.columns({"amp_exp", "tau_exp_us", "amp_gauss", "tau_gauss_us", "offset",
                   "ci_tau_exp_us", "ci_tau_gauss_us", "sse"});
        w.row({fit.amp_exp, fit.tau_exp * 1e6, fit.amp_gauss, fit.tau_gauss * 1e6, fit.offset,
               fit.ci_tau_exp * 1e6, fit.ci_tau_gauss * 1e6, fit.sse});
    }
    std::cout << "triggered " << trace.n_triggered << "  tau_exp " << fit.tau_exp * 1e6
              << " us  tau_gauss " << fit.tau_gauss * 1e6 << " us\n";
}

void write_class_histograms(const std::string& dir, const std::vector<TrajectoryRecord>& records,
                            const PhysicsConfig& cfg) {
    ClassHistograms h = histograms(records, cfg);
    auto seed = cfg.numerics.seed;
    int n = cfg.numerics.trajectories;
    write_histogram(join(dir, "hist_d_classI.tsv"), h.d_i, cfg, seed, n, "d", "nm", 1e9);
    write_histogram(join(dir, "hist_d_classII.tsv"), h.d_ii, cfg, seed, n, "d", "nm", 1e9);
    write_histogram(join(dir, "hist_g_classI.tsv"), h.g_i, cfg, seed, n, "g", "mhz",
                    1.0 / (two_pi * 1e6));
    write_histogram(join(dir, "hist_g_classII.tsv"), h.g_ii, cfg, seed, n, "g", "mhz",
                    1.0 / (two_pi * 1e6));
    write_histogram(join(dir, "hist_shift_classI.tsv"), h.shift_i, cfg, seed, n, "delta_a",
                    "mhz", 1.0 / (two_pi * 1e6));
    write_histogram(join(dir, "hist_shift_classII.tsv"), h.shift_ii, cfg, seed, n, "delta_a",
                    "mhz", 1.0 / (two_pi * 1e6));
    Histogram g_all = coupling_histogram(records, cfg, 50);
    write_histogram(join(dir, "hist_g_all.tsv"), g_all, cfg, seed, n, "g", "mhz",
                    1.0 / (two_pi * 1e6));
}

int cmd_transits(const CommonArgs& args, double delta_mhz, bool has_delta, int dump,
                 const std::string& variant_name) {
    std::vector<std::string> presets;
    if (has_delta) {
        presets.push_back("cavity.delta_ca_mhz=" + std::to_string(delta_mhz));
        presets.push_back("probe.delta_pa_post_mhz=" + std::to_string(delta_mhz));
    }
    PhysicsConfig cfg = load(args, presets);
    if (cfg.numerics.trajectories < 1) throw ConfigError("numerics.trajectories must be >= 1");

    TransitOptions opt;
    if (variant_name == "no-surface") opt.variant = ForceVariant::NoSurface;
    else if (variant_name == "no-forces") opt.variant = ForceVariant::NoForces;
    else if (variant_name != "full") throw ConfigError("unknown variant: " + variant_name);
    opt.record_paths = dump > 0;

    ModeField mode = ModeField::from_config(cfg);
    SurfaceModel surface = SurfaceModel::from_config(cfg);
    auto ctx = SimulationContext::make(cfg, mode, surface);
    auto records = run_ensemble(ctx, opt, cfg.numerics.trajectories, cfg.numerics.seed);

    write_trace_and_fit(args.out_dir, "", records, cfg);
    write_class_histograms(args.out_dir, records, cfg);
    write_photon_records(join(args.out_dir, "photons.tsv"), records, cfg, cfg.numerics.seed);

    int dumped = 0;
    for (const auto& rec : records) {
        if (dumped >= dump) break;
        if (!rec.trigger_time) continue;
        write_trajectory_dump(join(args.out_dir, "traj_" + std::to_string(rec.index) + ".tsv"),
                              rec, cfg, cfg.numerics.seed);
        ++dumped;
    }
    return 0;
}

std::vector<double> detuning_grid(double lo_mhz, double hi_mhz, double step_mhz) {
    std::vector<double> out;
    for (double x = lo_mhz; x <= hi_mhz + 1e-9; x += step_mhz) out.push_back(mhz(x));
    return out;
}

int cmd_spectra(const CommonArgs& args, double delta_ca_mhz, double lo, double hi, double step,
                const std::string& variant_name) {
    std::vector<std::string> presets = {"cavity.delta_ca_mhz=" + std::to_string(delta_ca_mhz)};
    PhysicsConfig base = load(args, presets);
    std::vector<double> detunings = detuning_grid(lo, hi, step);
    if (detunings.empty()) throw ConfigError("spectra: empty detuning list");

    ModeField mode = ModeField::from_config(base);
    SurfaceModel surface = SurfaceModel::from_config(base);

    std::string fname = "spectra_" + variant_name + ".tsv";
    TableWriter w(join(args.out_dir, fname));
    write_provenance(w, base, base.numerics.seed, base.numerics.trajectories);
    w.meta("delta_ca_mhz", delta_ca_mhz);
    w.meta("variant", variant_name);
    w.meta("smoothing_half_width_points", 2.0);

    std::vector<double> t_curve;
    if (variant_name == "p-fall") {
        TransitOptions opt;
        opt.variant = ForceVariant::NoForces;
        opt.vertical_only = true;
        auto ctx = SimulationContext::make(base, mode, surface);
        auto records = run_ensemble(ctx, opt, base.numerics.trajectories, base.numerics.seed);
        Histogram pfall = coupling_histogram(records, base, 50);
        write_histogram(join(args.out_dir, "p_fall_g.tsv"), pfall, base, base.numerics.seed,
                        base.numerics.trajectories, "g", "mhz", 1.0 / (two_pi * 1e6));
        t_curve = pg_averaged_spectrum(histogram_to_pg(pfall), base, detunings,
                                       base.probe.power_post);
        w.columns({"delta_pa_mhz", "T_model", "T_NA", "R_NA"});
        for (size_t i = 0; i < detunings.size(); ++i) {
            double t_na, r_na;
            empty_cavity_response(base, detunings[i], t_na, r_na);
            w.row({to_human(detunings[i], "mhz_rate"), t_curve[i], t_na, r_na});
        }
    } else {
        TransitOptions opt;
        if (variant_name == "no-surface") opt.variant = ForceVariant::NoSurface;
        else if (variant_name == "no-forces") opt.variant = ForceVariant::NoForces;
        else if (variant_name != "full") throw ConfigError("unknown variant: " + variant_name);

        w.columns({"delta_pa_mhz", "T_A", "R_A", "T_NA", "R_NA", "dT", "dR", "n_triggered",
                   "counts_fwd", "counts_ref"});
        t_curve.resize(detunings.size());
        for (size_t i = 0; i < detunings.size(); ++i) {
            std::string post = "probe.delta_pa_post_mhz=" +
                               std::to_string(to_human(detunings[i], "mhz_rate"));
            PhysicsConfig cfg = load_config(apply_overrides(serialize_config(base), {post}));
            auto ctx = SimulationContext::make(cfg, mode, surface);
            std::uint64_t point_seed = substream_seed(base.numerics.seed, 1000 + i);
            auto records = run_ensemble(ctx, opt, cfg.numerics.trajectories, point_seed);
            SpectraPoint pt = spectra_point(records, cfg, detunings[i]);
            t_curve[i] = pt.t_atom;
            w.row({to_human(pt.delta_pa, "mhz_rate"), pt.t_atom, pt.r_atom, pt.t_empty,
                   pt.r_empty, pt.t_atom - pt.t_empty, pt.r_atom - pt.r_empty,
                   double(pt.n_triggered), double(pt.counts_fwd), double(pt.counts_ref)});
            std::cout << "delta_pa " << to_human(pt.delta_pa, "mhz_rate") << " MHz done ("
                      << pt.n_triggered << " triggers)\n";
        }
    }

    std::vector<double> xs;
    for (double d : detunings) xs.push_back(to_human(d, "mhz_rate"));
    PeakSplit split = peak_splitting(xs, t_curve, 2);
    TableWriter pw(join(args.out_dir, "peaks_" + variant_name + ".tsv"));
    write_provenance(pw, base, base.numerics.seed, base.numerics.trajectories);
    pw.columns({"peak_low_mhz", "peak_high_mhz", "splitting_mhz", "g_bar_mhz"});
    if (split.ok) {
        double s2 = split.splitting * split.splitting - delta_ca_mhz * delta_ca_mhz;
        double gbar = s2 > 0 ? 0.5 * std::sqrt(s2) : 0.0;
        pw.row({split.low, split.high, split.splitting, gbar});
        std::cout << "splitting " << split.splitting << " MHz, inferred g_bar " << gbar
                  << " MHz\n";
    }
    return 0;
}

int cmd_correlations(const CommonArgs& args, double bin_ns, double tau_max_us) {
    PhysicsConfig cfg = load(args);
    ModeField mode = ModeField::from_config(cfg);
    SurfaceModel surface = SurfaceModel::from_config(cfg);
    auto ctx = SimulationContext::make(cfg, mode, surface);
    auto records = run_ensemble(ctx, TransitOptions{}, cfg.numerics.trajectories,
                                cfg.numerics.seed);
    CorrelationResult corr =
        correlations(records, cfg, bin_ns * 1e-9, tau_max_us * 1e-6);
    TableWriter w(join(args.out_dir, "correlations.tsv"));
    write_provenance(w, cfg, cfg.numerics.seed, cfg.numerics.trajectories);
    w.meta("records", static_cast<std::uint64_t>(corr.n_records));
    w.columns({"tau_ns", "C12", "C12_bar", "C12_se"});
    for (size_t i = 0; i < corr.tau.size(); ++i)
        w.row({corr.tau[i] * 1e9, corr.c12[i], corr.c12_bar[i], corr.c12_se[i]});
    return 0;
}

int cmd_g2model(const CommonArgs& args, const std::string& pg_file, double tau_max_ns,
                double tau_step_ns) {
    PhysicsConfig cfg = load(args);
    std::vector<PgBin> pg;
    if (!pg_file.empty()) {
        pg = read_pg_histogram(pg_file);
    } else {
        ModeField mode = ModeField::from_config(cfg);
        SurfaceModel surface = SurfaceModel::from_config(cfg);
        auto ctx = SimulationContext::make(cfg, mode, surface);
        auto records = run_ensemble(ctx, TransitOptions{}, cfg.numerics.trajectories,
                                    cfg.numerics.seed);
        Histogram h = coupling_histogram(records, cfg, 40);
        write_histogram(join(args.out_dir, "p_g.tsv"), h, cfg, cfg.numerics.seed,
                        cfg.numerics.trajectories, "g", "mhz", 1.0 / (two_pi * 1e6));
        pg = histogram_to_pg(h);
    }
    std::vector<double> taus;
    for (double t = -tau_max_ns; t <= tau_max_ns + 1e-9; t += tau_step_ns)
        taus.push_back(t * 1e-9);
    CavityAtomParams base = CavityAtomParams::from_config(cfg, cfg.probe.power_post,
                                                          cfg.probe.delta_pa_post);
    CorrelationCurve curve = ensemble_g2(pg, base, taus);

    double peak = 0, center = 0;
    for (size_t i = 0; i < taus.size(); ++i) {
        peak = std::max(peak, curve.g2[i]);
        if (std::abs(taus[i]) < 0.5 * tau_step_ns * 1e-9) center = curve.g2[i];
    }
    TableWriter w(join(args.out_dir, "g2_model.tsv"));
    write_provenance(w, cfg, cfg.numerics.seed, cfg.numerics.trajectories);
    w.meta("min_to_peak", peak > 0 ? center / peak : 0.0);
    w.columns({"tau_ns", "g2"});
    for (size_t i = 0; i < taus.size(); ++i) w.row({taus[i] * 1e9, curve.g2[i]});
    std::cout << "g2(0)/peak = " << (peak > 0 ? center / peak : 0.0) << "\n";
    return 0;
}

int cmd_fort(const CommonArgs& args, double horizon_us, double threshold_us) {
    std::vector<std::string> presets = {
        "fort.enabled=true",
        "numerics.horizon_us=" + std::to_string(horizon_us),
        "cavity.delta_ca_mhz=40",
        "probe.delta_pa_post_mhz=40",
    };
    PhysicsConfig cfg = load(args, presets);
    ModeField mode = ModeField::from_config(cfg);
    SurfaceModel surface = SurfaceModel::from_config(cfg);
    auto ctx = SimulationContext::make(cfg, mode, surface);
    TransitOptions opt;
    opt.fort_on_trigger = true;
    auto records = run_ensemble(ctx, opt, cfg.numerics.trajectories, cfg.numerics.seed);
    FortStats st = fort_statistics(records, cfg, threshold_us * 1e-6);
    TableWriter w(join(args.out_dir, "fort_stats.tsv"));
    write_provenance(w, cfg, cfg.numerics.seed, cfg.numerics.trajectories);
    w.columns({"n_triggered", "n_captured", "capture_fraction", "mean_phi_rate_rad_s",
               "mean_abs_phi_drift_rad"});
    w.row({double(st.n_triggered), double(st.n_captured), st.capture_fraction,
           st.mean_phi_rate, st.mean_abs_phi_drift});
    write_histogram(join(args.out_dir, "fort_residence.tsv"), st.residence, cfg,
                    cfg.numerics.seed, cfg.numerics.trajectories, "residence", "us", 1e6);
    std::cout << "capture fraction " << st.capture_fraction << " (" << st.n_captured << "/"
              << st.n_triggered << ")\n";
    return 0;
}

int cmd_eigen(const CommonArgs& args, double g_mhz, double lo, double hi, double step) {
    PhysicsConfig cfg = load(args);
    TableWriter w(join(args.out_dir, "eigenvalues.tsv"));
    write_provenance(w, cfg, cfg.numerics.seed, 0);
    w.meta("g_mhz", g_mhz);
    w.meta("h_mhz", to_human(cfg.cavity.h, "mhz_rate"));
    w.columns({"delta_ca_mhz", "freq_minus_mhz", "freq_0_mhz", "freq_plus_mhz",
               "decay_minus_mhz", "decay_0_mhz", "decay_plus_mhz"});
    for (double x = lo; x <= hi + 1e-9; x += step) {
        CavityAtomParams p = CavityAtomParams::from_config(cfg, cfg.probe.power_post, 0.0);
        p.g = mhz(g_mhz);
        p.delta_ca = mhz(x);
        auto ev = eigenvalues(p);
        w.row({x, to_human(ev[0].imag(), "mhz_rate"), to_human(ev[1].imag(), "mhz_rate"),
               to_human(ev[2].imag(), "mhz_rate"), -to_human(ev[0].real(), "mhz_rate"),
               -to_human(ev[1].real(), "mhz_rate"), -to_human(ev[2].real(), "mhz_rate")});
    }
    return 0;
}

int cmd_potentials(const CommonArgs& args, double d_max_nm, int points, double detuning_mhz) {
    PhysicsConfig cfg = load(args);
    ModeField mode = ModeField::from_config(cfg);
    SurfaceModel surface = SurfaceModel::from_config(cfg);
    double power = cfg.probe.power_pre;

    auto dump_curve = [&](const std::string& name, const PotentialCurve& c, bool dipole) {
        TableWriter w(join(args.out_dir, name));
        write_provenance(w, cfg, cfg.numerics.seed, 0);
        w.meta("unit", "hbar*gamma0");
        w.columns({"d_nm", dipole ? "U_d" : "U_s"});
        double scale = 1.0 / (hbar * cfg.atom.gamma0);
        for (size_t i = 0; i < c.d.size(); ++i)
            w.row({c.d[i] * 1e9, (dipole ? c.u_d[i] : c.u_s[i]) * scale});
    };

    {
        PhysicsConfig res = cfg;
        PotentialCurve curve = effective_potential_curve(res, mode, surface, power, 0.0,
                                                         d_max_nm * 1e-9, points);
        dump_curve("ud_resonant.tsv", curve, true);
        dump_curve("us_ground.tsv", curve, false);
    }
    for (double sign : {-1.0, 1.0}) {
        PhysicsConfig det = load_config(apply_overrides(
            serialize_config(cfg),
            {"cavity.delta_ca_mhz=" + std::to_string(sign * detuning_mhz)}));
        PotentialCurve curve = effective_potential_curve(det, mode, surface, power,
                                                         mhz(sign * detuning_mhz),
                                                         d_max_nm * 1e-9, points);
        dump_curve(sign < 0 ? "ud_red.tsv" : "ud_blue.tsv", curve, true);
    }
    {
        TableWriter w(join(args.out_dir, "decay_rates.tsv"));
        write_provenance(w, cfg, cfg.numerics.seed, 0);
        w.columns({"d_nm", "gamma_par_over_gamma0", "gamma_perp_over_gamma0"});
        for (int i = 0; i < points; ++i) {
            double d = (i + 1) * d_max_nm * 1e-9 / points;
            w.row({d * 1e9,
                   surface.modified_decay(d, DipoleOrientation::Parallel) / cfg.atom.gamma0,
                   surface.modified_decay(d, DipoleOrientation::Perpendicular) /
                       cfg.atom.gamma0});
        }
    }
    {
        TableWriter w(join(args.out_dir, "coupling.tsv"));
        write_provenance(w, cfg, cfg.numerics.seed, 0);
        w.columns({"d_nm", "g_mhz"});
        for (int i = 0; i < points; ++i) {
            double d = i * d_max_nm * 1e-9 / points;
            w.row({d * 1e9, to_human(mode.coupling_dz(d, 0.0), "mhz_rate")});
        }
    }
    {
        FortField f = FortField::from_config(cfg);
        f.enabled = true;
        TableWriter w(join(args.out_dir, "fort_potential.tsv"));
        write_provenance(w, cfg, cfg.numerics.seed, 0);
        w.meta("unit", "kB*mK");
        w.columns({"d_nm", "U_t_mk"});
        for (int i = 0; i < points; ++i) {
            double d = i * d_max_nm * 1e-9 / points;
            double u, dd, dz;
            fort_potential(f, d, 0.0, u, dd, dz);
            w.row({d * 1e9, u / (k_boltzmann * 1e-3)});
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo simulator of single cold atoms in the evanescent field of a "
                 "microtoroidal resonator"};
    app.require_subcommand(1);

    CommonArgs a_tr, a_sp, a_co, a_g2, a_fo, a_ei, a_po, a_all;

    auto* tr = app.add_subcommand("transits", "triggered transit ensemble: trace, fits, histograms");
    add_common(tr, a_tr);
    double tr_delta = 0;
    bool tr_has_delta = false;
    int tr_dump = 0;
    std::string tr_variant = "full";
    tr->add_option("--delta-mhz", tr_delta, "set Delta_ca = Delta_pa(post) (MHz)")
        ->each([&](const std::string&) { tr_has_delta = true; });
    tr->add_option("--dump-trajectories", tr_dump, "dump the first K triggered paths");
    tr->add_option("--variant", tr_variant, "full | no-surface | no-forces");

    auto* sp = app.add_subcommand("spectra", "probe spectra over a detuning sweep");
    add_common(sp, a_sp);
    double sp_dca = 60, sp_lo = -80, sp_hi = 120, sp_step = 5;
    std::string sp_variant = "full";
    sp->add_option("--delta-ca-mhz", sp_dca, "cavity-atom detuning (MHz)");
    sp->add_option("--from-mhz", sp_lo, "sweep start (MHz)");
    sp->add_option("--to-mhz", sp_hi, "sweep end (MHz)");
    sp->add_option("--step-mhz", sp_step, "sweep step (MHz)");
    sp->add_option("--variant", sp_variant, "full | no-surface | no-forces | p-fall");

    auto* co = app.add_subcommand("correlations", "C12 and C12_bar photocount estimators");
    add_common(co, a_co);
    double co_bin = 50, co_tau = 1.0;
    co->add_option("--bin-ns", co_bin, "tau bin width (ns, multiple of the resolution)");
    co->add_option("--tau-max-us", co_tau, "correlation range (us)");

    auto* g2 = app.add_subcommand("g2model", "quantum-regression correlation averaged over p(g)");
    add_common(g2, a_g2);
    std::string g2_pg;
    double g2_tau = 100, g2_step = 2;
    g2->add_option("--pg-file", g2_pg, "p(g) histogram (g_mhz density_per_mhz); simulated if absent");
    g2->add_option("--tau-max-ns", g2_tau, "tau range (ns)");
    g2->add_option("--tau-step-ns", g2_step, "tau step (ns)");

    auto* fo = app.add_subcommand("fort", "triggered two-color trap capture statistics");
    add_common(fo, a_fo);
    double fo_horizon = 200, fo_thresh = 50;
    fo->add_option("--horizon-us", fo_horizon, "per-trajectory time horizon (us)");
    fo->add_option("--threshold-us", fo_thresh, "capture residence threshold (us)");

    auto* ei = app.add_subcommand("eigen", "dressed-state eigenvalues over a detuning sweep");
    add_common(ei, a_ei);
    double ei_g = 40, ei_lo = -150, ei_hi = 150, ei_step = 2;
    ei->add_option("--g-mhz", ei_g, "coupling (MHz)");
    ei->add_option("--from-mhz", ei_lo, "sweep start (MHz)");
    ei->add_option("--to-mhz", ei_hi, "sweep end (MHz)");
    ei->add_option("--step-mhz", ei_step, "sweep step (MHz)");

    auto* po = app.add_subcommand("potentials", "surface/dipole/trap potential curves");
    add_common(po, a_po);
    double po_dmax = 600, po_det = 40;
    int po_points = 200;
    po->add_option("--d-max-nm", po_dmax, "radial range (nm)");
    po->add_option("--points", po_points, "points per curve");
    po->add_option("--detuning-mhz", po_det, "red/blue |detuning| (MHz)");

    auto* all = app.add_subcommand("reproduce-all", "chain every headline result");
    add_common(all, a_all);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    try {
        if (tr->parsed()) return cmd_transits(a_tr, tr_delta, tr_has_delta, tr_dump, tr_variant);
        if (sp->parsed()) return cmd_spectra(a_sp, sp_dca, sp_lo, sp_hi, sp_step, sp_variant);
        if (co->parsed()) return cmd_correlations(a_co, co_bin, co_tau);
        if (g2->parsed()) return cmd_g2model(a_g2, g2_pg, g2_tau, g2_step);
        if (fo->parsed()) return cmd_fort(a_fo, fo_horizon, fo_thresh);
        if (ei->parsed()) return cmd_eigen(a_ei, ei_g, ei_lo, ei_hi, ei_step);
        if (po->parsed()) return cmd_potentials(a_po, po_dmax, po_points, po_det);
        if (all->parsed()) {
            CommonArgs base = a_all;
            base.out_dir = a_all.out_dir + "/potentials";
            cmd_potentials(base, 600, 200, 40);
            base.out_dir = a_all.out_dir + "/eigen";
            cmd_eigen(base, 40, -150, 150, 2);
            base.out_dir = a_all.out_dir + "/transits_resonant";
            cmd_transits(base, 0, false, 3, "full");
            base.out_dir = a_all.out_dir + "/transits_red";
            cmd_transits(base, -40, true, 3, "full");
            base.out_dir = a_all.out_dir + "/transits_blue";
            cmd_transits(base, 40, true, 3, "full");
            base.out_dir = a_all.out_dir + "/spectra";
            cmd_spectra(base, 60, -80, 120, 5, "full");
            base.out_dir = a_all.out_dir + "/correlations";
            cmd_correlations(base, 50, 1.0);
            base.out_dir = a_all.out_dir + "/g2";
            cmd_g2model(base, "", 100, 2);
            base.out_dir = a_all.out_dir + "/fort";
            cmd_fort(base, 200, 50);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
