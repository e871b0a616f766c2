#include "toroidsim/config.hpp"
#include "toroidsim/units.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace tsim {

namespace {

// Default apparatus, human units. Every key the loader accepts appears here;
// anything else in a user document is rejected with its path.
json default_document() {
    return json{
        {"toroid", {{"principal_diameter_um", 24.0}, {"minor_diameter_um", 3.0}}},
        {"mode",
         {{"g_max_mhz", 100.0},
          {"lambda_bar_nm", 136.0},
          {"waist_nm", 590.0},
          {"n_eff", 1.41},
          {"polarization", "TE"}}},
        {"cavity",
         {{"kappa_i_mhz", 8.0},
          {"kappa_ex_mhz", 13.0},
          {"h_mhz", 10.0},
          {"delta_ca_mhz", 0.0}}},
        {"atom",
         {{"gamma0_mhz", 2.6},
          {"mass_kg", cesium_mass},
          {"wavelength_nm", 852.347}}},
        {"surface",
         {{"c3_ground_j_m3", 7.0e-49},
          {"c3_excited_j_m3", 6.5e-48},
          {"retardation_nm", 135.6545},
          {"d_min_nm", 1.0},
          {"decay_model", "analytic-halfspace"},
          {"refractive_index", 1.45},
          {"gamma_table_file", ""},
          {"potential_table_file", ""}}},
        {"probe",
         {{"power_pre_pw", 4.0},
          {"power_post_pw", 2.0},
          {"delta_pa_pre_mhz", nullptr},
          {"delta_pa_post_mhz", 0.0},
          {"switch_latency_ns", 100.0}}},
        {"detection",
         {{"efficiency", 0.45},
          {"background_cps", 500.0},
          {"window_ns", 750.0},
          {"threshold", 5},
          {"clock_ns", 25.0},
          {"resolution_ns", 2.0},
          {"record_us", 8.0}}},
        {"cloud",
         {{"temperature_uk", 10.0},
          {"release_height_um", 800.0},
          {"arrival_speed_m_s", 0.17},
          {"transverse_extent_nm", 450.0}}},
        {"fort",
         {{"enabled", false},
          {"lambda_red_nm", 898.0},
          {"lambda_blue_nm", 848.0},
          {"n_eff_red", 1.2},
          {"n_eff_blue", 1.414},
          {"power_red_uw", 50.0},
          {"power_blue_uw", 50.0},
          {"potential_per_uw_red_mk", 0.323306},
          {"potential_per_uw_blue_mk", 0.464479},
          {"radiation_pressure", true}}},
        {"numerics",
         {{"rel_tol", 1e-8},
          {"max_step_ns", 250.0},
          {"far_step_ns", 1000.0},
          {"far_distance_um", 1.0},
          {"trajectories", 10000},
          {"seed", 12345},
          {"window_start_ns", 200.0},
          {"window_end_ns", 700.0},
          {"horizon_us", 80.0},
          {"bin_ns", 100.0},
          {"sample_interval_ns", 200.0},
          {"record_paths", false}}}};
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

bool same_kind(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) return true;
    return a.type() == b.type() || a.is_null() || b.is_null();
}

// Merge user values onto the defaults, rejecting unknown keys and type
// mismatches so typos surface instead of silently using defaults.
void merge_strict(json& base, const json& user, const std::string& path) {
    if (!user.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string p = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) fail(p, "unknown key");
        json& slot = base[it.key()];
        if (slot.is_object() && !slot.is_null()) {
            merge_strict(slot, it.value(), p);
        } else {
            if (!same_kind(slot, it.value())) fail(p, "wrong value type");
            slot = it.value();
        }
    }
}

double num(const json& j, const char* group, const char* key, const std::string& tag = "") {
    const json& v = j.at(group).at(key);
    if (!v.is_number()) fail(std::string(group) + "." + key, "expected a number");
    double x = v.get<double>();
    return tag.empty() ? x : to_si(x, tag);
}

std::string str(const json& j, const char* group, const char* key) {
    const json& v = j.at(group).at(key);
    if (!v.is_string()) fail(std::string(group) + "." + key, "expected a string");
    return v.get<std::string>();
}

bool flag(const json& j, const char* group, const char* key) {
    const json& v = j.at(group).at(key);
    if (!v.is_boolean()) fail(std::string(group) + "." + key, "expected a bool");
    return v.get<bool>();
}

PhysicsConfig from_document(const json& doc) {
    PhysicsConfig c{};

    c.toroid.principal_diameter = num(doc, "toroid", "principal_diameter_um", "um");
    c.toroid.minor_diameter = num(doc, "toroid", "minor_diameter_um", "um");

    c.mode.g_max = num(doc, "mode", "g_max_mhz", "mhz_rate");
    c.mode.lambda_bar = num(doc, "mode", "lambda_bar_nm", "nm");
    c.mode.waist = num(doc, "mode", "waist_nm", "nm");
    c.mode.n_eff = num(doc, "mode", "n_eff");
    c.mode.polarization = str(doc, "mode", "polarization");

    c.cavity.kappa_i = num(doc, "cavity", "kappa_i_mhz", "mhz_rate");
    c.cavity.kappa_ex = num(doc, "cavity", "kappa_ex_mhz", "mhz_rate");
    c.cavity.h = num(doc, "cavity", "h_mhz", "mhz_rate");
    c.cavity.delta_ca = num(doc, "cavity", "delta_ca_mhz", "mhz_rate");

    c.atom.gamma0 = num(doc, "atom", "gamma0_mhz", "mhz_rate");
    c.atom.mass = num(doc, "atom", "mass_kg");
    c.atom.wavelength = num(doc, "atom", "wavelength_nm", "nm");

    c.surface.c3_ground = num(doc, "surface", "c3_ground_j_m3");
    c.surface.c3_excited = num(doc, "surface", "c3_excited_j_m3");
    c.surface.lambda_ret = num(doc, "surface", "retardation_nm", "nm");
    c.surface.d_min = num(doc, "surface", "d_min_nm", "nm");
    c.surface.decay_model = str(doc, "surface", "decay_model");
    c.surface.refractive_index = num(doc, "surface", "refractive_index");
    c.surface.gamma_table_file = str(doc, "surface", "gamma_table_file");
    c.surface.potential_table_file = str(doc, "surface", "potential_table_file");

    c.probe.power_pre = num(doc, "probe", "power_pre_pw", "pw");
    c.probe.power_post = num(doc, "probe", "power_post_pw", "pw");
    const json& pre = doc.at("probe").at("delta_pa_pre_mhz");
    if (pre.is_null()) {
        c.probe.has_pre_override = false;
        c.probe.delta_pa_pre_override = 0.0;
    } else if (pre.is_number()) {
        c.probe.has_pre_override = true;
        c.probe.delta_pa_pre_override = to_si(pre.get<double>(), "mhz_rate");
    } else {
        fail("probe.delta_pa_pre_mhz", "expected a number or null");
    }
    c.probe.delta_pa_post = num(doc, "probe", "delta_pa_post_mhz", "mhz_rate");
    c.probe.switch_latency = num(doc, "probe", "switch_latency_ns", "ns");

    c.detection.efficiency = num(doc, "detection", "efficiency");
    c.detection.background_cps = num(doc, "detection", "background_cps");
    c.detection.window = num(doc, "detection", "window_ns", "ns");
    {
        const json& v = doc.at("detection").at("threshold");
        if (!v.is_number_integer()) fail("detection.threshold", "expected an integer");
        c.detection.threshold = v.get<int>();
    }
    c.detection.clock_period = num(doc, "detection", "clock_ns", "ns");
    c.detection.resolution = num(doc, "detection", "resolution_ns", "ns");
    c.detection.record_window = num(doc, "detection", "record_us", "us");

    c.cloud.temperature = num(doc, "cloud", "temperature_uk", "uk");
    c.cloud.release_height = num(doc, "cloud", "release_height_um", "um");
    c.cloud.arrival_speed = num(doc, "cloud", "arrival_speed_m_s");
    c.cloud.transverse_extent = num(doc, "cloud", "transverse_extent_nm", "nm");

    c.fort.enabled = flag(doc, "fort", "enabled");
    c.fort.lambda_red = num(doc, "fort", "lambda_red_nm", "nm");
    c.fort.lambda_blue = num(doc, "fort", "lambda_blue_nm", "nm");
    c.fort.n_eff_red = num(doc, "fort", "n_eff_red");
    c.fort.n_eff_blue = num(doc, "fort", "n_eff_blue");
    c.fort.power_red = num(doc, "fort", "power_red_uw", "uw");
    c.fort.power_blue = num(doc, "fort", "power_blue_uw", "uw");
    c.fort.potential_per_uw_red_mk = num(doc, "fort", "potential_per_uw_red_mk");
    c.fort.potential_per_uw_blue_mk = num(doc, "fort", "potential_per_uw_blue_mk");
    c.fort.radiation_pressure = flag(doc, "fort", "radiation_pressure");

    c.numerics.rel_tol = num(doc, "numerics", "rel_tol");
    c.numerics.max_step = num(doc, "numerics", "max_step_ns", "ns");
    c.numerics.far_step = num(doc, "numerics", "far_step_ns", "ns");
    c.numerics.far_distance = num(doc, "numerics", "far_distance_um", "um");
    {
        const json& v = doc.at("numerics").at("trajectories");
        if (!v.is_number_integer()) fail("numerics.trajectories", "expected an integer");
        c.numerics.trajectories = v.get<int>();
    }
    {
        const json& v = doc.at("numerics").at("seed");
        if (!v.is_number_integer()) fail("numerics.seed", "expected an integer");
        c.numerics.seed = v.get<std::uint64_t>();
    }
    c.numerics.window_start = num(doc, "numerics", "window_start_ns", "ns");
    c.numerics.window_end = num(doc, "numerics", "window_end_ns", "ns");
    c.numerics.horizon = num(doc, "numerics", "horizon_us", "us");
    c.numerics.bin_width = num(doc, "numerics", "bin_ns", "ns");
    c.numerics.sample_interval = num(doc, "numerics", "sample_interval_ns", "ns");
    c.numerics.record_paths = flag(doc, "numerics", "record_paths");

    // Azimuthal mode number must be an integer for a single-valued phase.
    double m_exact = c.mode.n_eff * (two_pi / c.atom.wavelength) * c.rim_radius();
    c.mode.mode_number = static_cast<int>(std::llround(m_exact));
    c.mode.k_phi = 2.0 * c.mode.mode_number / c.toroid.principal_diameter;

    c.validate();
    return c;
}

void check(bool ok, const std::string& path, const std::string& what) {
    if (!ok) fail(path, what);
}

} // namespace

double PhysicsConfig::Atom::omega() const { return two_pi * speed_of_light / wavelength; }

void PhysicsConfig::validate() const {
    check(toroid.principal_diameter > 0, "toroid.principal_diameter_um", "must be positive");
    check(toroid.minor_diameter > 0 && toroid.minor_diameter < toroid.principal_diameter,
          "toroid.minor_diameter_um", "must be positive and smaller than the principal diameter");

    check(mode.g_max >= 0, "mode.g_max_mhz", "rate must be >= 0");
    check(mode.lambda_bar > 0, "mode.lambda_bar_nm", "must be positive");
    check(mode.waist > 0, "mode.waist_nm", "must be positive");
    check(mode.n_eff > 1.0, "mode.n_eff", "guided mode requires n_eff > 1");
    check(mode.polarization == "TE" || mode.polarization == "TM", "mode.polarization",
          "must be TE or TM");

    check(cavity.kappa_i >= 0, "cavity.kappa_i_mhz", "rate must be >= 0");
    check(cavity.kappa_ex >= 0, "cavity.kappa_ex_mhz", "rate must be >= 0");
    check(cavity.h >= 0, "cavity.h_mhz", "rate must be >= 0");

    check(atom.gamma0 >= 0, "atom.gamma0_mhz", "rate must be >= 0");
    check(atom.mass > 0, "atom.mass_kg", "must be positive");
    check(atom.wavelength > 0, "atom.wavelength_nm", "must be positive");

    check(surface.c3_ground > 0, "surface.c3_ground_j_m3", "must be positive");
    check(surface.c3_excited >= surface.c3_ground, "surface.c3_excited_j_m3",
          "excited-state coefficient must be >= ground");
    check(surface.lambda_ret > 0, "surface.retardation_nm", "must be positive");
    check(surface.d_min > 0, "surface.d_min_nm", "must be positive");
    check(surface.decay_model == "analytic-halfspace" || surface.decay_model == "tabulated",
          "surface.decay_model", "must be analytic-halfspace or tabulated");
    check(surface.refractive_index > 1.0, "surface.refractive_index", "must exceed 1");

    check(probe.power_pre >= 0, "probe.power_pre_pw", "must be >= 0");
    check(probe.power_post >= 0, "probe.power_post_pw", "must be >= 0");
    check(probe.switch_latency >= 0, "probe.switch_latency_ns", "must be >= 0");

    check(detection.efficiency >= 0.0 && detection.efficiency <= 1.0, "detection.efficiency",
          "efficiency out of range [0, 1]");
    check(detection.background_cps >= 0, "detection.background_cps", "must be >= 0");
    check(detection.threshold >= 1, "detection.threshold", "C_th must be >= 1");
    check(detection.window > 0, "detection.window_ns", "must be positive");
    check(detection.clock_period > 0, "detection.clock_ns", "must be positive");
    check(detection.resolution > 0, "detection.resolution_ns", "must be positive");
    check(detection.record_window > 0, "detection.record_us", "must be positive");
    double ticks = detection.window / detection.clock_period;
    check(std::abs(ticks - std::round(ticks)) < 1e-9 * ticks, "detection.window_ns",
          "must be an integer multiple of the clock period");

    check(cloud.temperature >= 0, "cloud.temperature_uk", "must be >= 0");
    check(cloud.arrival_speed >= 0, "cloud.arrival_speed_m_s", "must be >= 0");
    check(cloud.transverse_extent > 0, "cloud.transverse_extent_nm", "must be positive");

    check(fort.lambda_red > fort.lambda_blue, "fort.lambda_red_nm",
          "red FORT wavelength must exceed blue");
    check(fort.n_eff_red > 1.0, "fort.n_eff_red", "guided mode requires n_eff > 1");
    check(fort.n_eff_blue > 1.0, "fort.n_eff_blue", "guided mode requires n_eff > 1");
    check(fort.power_red >= 0, "fort.power_red_uw", "must be >= 0");
    check(fort.power_blue >= 0, "fort.power_blue_uw", "must be >= 0");
    // blue must decay faster than red for wall + well structure
    double lam_b = fort.lambda_blue / (two_pi * std::sqrt(fort.n_eff_blue * fort.n_eff_blue - 1));
    double lam_r = fort.lambda_red / (two_pi * std::sqrt(fort.n_eff_red * fort.n_eff_red - 1));
    check(lam_b < lam_r, "fort.n_eff_blue", "blue evanescent decay length must be below red");

    check(numerics.rel_tol > 0 && numerics.rel_tol < 1e-2, "numerics.rel_tol",
          "must be in (0, 1e-2)");
    check(numerics.max_step > 0, "numerics.max_step_ns", "must be positive");
    check(numerics.far_step >= numerics.max_step, "numerics.far_step_ns",
          "must be >= max_step_ns");
    check(numerics.far_distance > 0, "numerics.far_distance_um", "must be positive");
    check(numerics.trajectories >= 1, "numerics.trajectories", "must be >= 1");
    check(numerics.window_start >= 0 && numerics.window_start < numerics.window_end,
          "numerics.window_start_ns", "averaging window must be ordered");
    check(numerics.horizon > 0, "numerics.horizon_us", "must be positive");
    check(numerics.bin_width > 0, "numerics.bin_ns", "must be positive");
    check(numerics.sample_interval > 0, "numerics.sample_interval_ns", "must be positive");
}

PhysicsConfig load_config(const std::string& json_text) {
    json user;
    try {
        user = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed document: ") + e.what());
    }
    json doc = default_document();
    merge_strict(doc, user, "");
    return from_document(doc);
}

PhysicsConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

PhysicsConfig default_config() { return from_document(default_document()); }

std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides) {
    json user;
    try {
        user = json_text.empty() ? json::object() : json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed document: ") + e.what());
    }
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override must look like dotted.path=value: " + ov);
        std::string path = ov.substr(0, eq);
        std::string value = ov.substr(eq + 1);
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::parse_error&) {
            parsed = value; // bare strings (e.g. decay_model=tabulated)
        }
        json* node = &user;
        size_t start = 0;
        while (true) {
            size_t dot = path.find('.', start);
            std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
            if (key.empty()) throw ConfigError("override has an empty path segment: " + ov);
            if (dot == std::string::npos) {
                (*node)[key] = parsed;
                break;
            }
            node = &(*node)[key];
            start = dot + 1;
        }
    }
    return user.dump();
}

std::string serialize_config(const PhysicsConfig& c) {
    json doc = default_document();
    doc["toroid"]["principal_diameter_um"] = to_human(c.toroid.principal_diameter, "um");
    doc["toroid"]["minor_diameter_um"] = to_human(c.toroid.minor_diameter, "um");
    doc["mode"]["g_max_mhz"] = to_human(c.mode.g_max, "mhz_rate");
    doc["mode"]["lambda_bar_nm"] = to_human(c.mode.lambda_bar, "nm");
    doc["mode"]["waist_nm"] = to_human(c.mode.waist, "nm");
    doc["mode"]["n_eff"] = c.mode.n_eff;
    doc["mode"]["polarization"] = c.mode.polarization;
    doc["cavity"]["kappa_i_mhz"] = to_human(c.cavity.kappa_i, "mhz_rate");
    doc["cavity"]["kappa_ex_mhz"] = to_human(c.cavity.kappa_ex, "mhz_rate");
    doc["cavity"]["h_mhz"] = to_human(c.cavity.h, "mhz_rate");
    doc["cavity"]["delta_ca_mhz"] = to_human(c.cavity.delta_ca, "mhz_rate");
    doc["atom"]["gamma0_mhz"] = to_human(c.atom.gamma0, "mhz_rate");
    doc["atom"]["mass_kg"] = c.atom.mass;
    doc["atom"]["wavelength_nm"] = to_human(c.atom.wavelength, "nm");
    doc["surface"]["c3_ground_j_m3"] = c.surface.c3_ground;
    doc["surface"]["c3_excited_j_m3"] = c.surface.c3_excited;
    doc["surface"]["retardation_nm"] = to_human(c.surface.lambda_ret, "nm");
    doc["surface"]["d_min_nm"] = to_human(c.surface.d_min, "nm");
    doc["surface"]["decay_model"] = c.surface.decay_model;
    doc["surface"]["refractive_index"] = c.surface.refractive_index;
    doc["surface"]["gamma_table_file"] = c.surface.gamma_table_file;
    doc["surface"]["potential_table_file"] = c.surface.potential_table_file;
    doc["probe"]["power_pre_pw"] = to_human(c.probe.power_pre, "pw");
    doc["probe"]["power_post_pw"] = to_human(c.probe.power_post, "pw");
    if (c.probe.has_pre_override)
        doc["probe"]["delta_pa_pre_mhz"] = to_human(c.probe.delta_pa_pre_override, "mhz_rate");
    else
        doc["probe"]["delta_pa_pre_mhz"] = nullptr;
    doc["probe"]["delta_pa_post_mhz"] = to_human(c.probe.delta_pa_post, "mhz_rate");
    doc["probe"]["switch_latency_ns"] = to_human(c.probe.switch_latency, "ns");
    doc["detection"]["efficiency"] = c.detection.efficiency;
    doc["detection"]["background_cps"] = c.detection.background_cps;
    doc["detection"]["window_ns"] = to_human(c.detection.window, "ns");
    doc["detection"]["threshold"] = c.detection.threshold;
    doc["detection"]["clock_ns"] = to_human(c.detection.clock_period, "ns");
    doc["detection"]["resolution_ns"] = to_human(c.detection.resolution, "ns");
    doc["detection"]["record_us"] = to_human(c.detection.record_window, "us");
    doc["cloud"]["temperature_uk"] = to_human(c.cloud.temperature, "uk");
    doc["cloud"]["release_height_um"] = to_human(c.cloud.release_height, "um");
    doc["cloud"]["arrival_speed_m_s"] = c.cloud.arrival_speed;
    doc["cloud"]["transverse_extent_nm"] = to_human(c.cloud.transverse_extent, "nm");
    doc["fort"]["enabled"] = c.fort.enabled;
    doc["fort"]["lambda_red_nm"] = to_human(c.fort.lambda_red, "nm");
    doc["fort"]["lambda_blue_nm"] = to_human(c.fort.lambda_blue, "nm");
    doc["fort"]["n_eff_red"] = c.fort.n_eff_red;
    doc["fort"]["n_eff_blue"] = c.fort.n_eff_blue;
    doc["fort"]["power_red_uw"] = to_human(c.fort.power_red, "uw");
    doc["fort"]["power_blue_uw"] = to_human(c.fort.power_blue, "uw");
    doc["fort"]["potential_per_uw_red_mk"] = c.fort.potential_per_uw_red_mk;
    doc["fort"]["potential_per_uw_blue_mk"] = c.fort.potential_per_uw_blue_mk;
    doc["fort"]["radiation_pressure"] = c.fort.radiation_pressure;
    doc["numerics"]["rel_tol"] = c.numerics.rel_tol;
    doc["numerics"]["max_step_ns"] = to_human(c.numerics.max_step, "ns");
    doc["numerics"]["far_step_ns"] = to_human(c.numerics.far_step, "ns");
    doc["numerics"]["far_distance_um"] = to_human(c.numerics.far_distance, "um");
    doc["numerics"]["trajectories"] = c.numerics.trajectories;
    doc["numerics"]["seed"] = c.numerics.seed;
    doc["numerics"]["window_start_ns"] = to_human(c.numerics.window_start, "ns");
    doc["numerics"]["window_end_ns"] = to_human(c.numerics.window_end, "ns");
    doc["numerics"]["horizon_us"] = to_human(c.numerics.horizon, "us");
    doc["numerics"]["bin_ns"] = to_human(c.numerics.bin_width, "ns");
    doc["numerics"]["sample_interval_ns"] = to_human(c.numerics.sample_interval, "ns");
    doc["numerics"]["record_paths"] = c.numerics.record_paths;
    return doc.dump(2);
}

std::uint64_t config_hash(const PhysicsConfig& cfg) {
    std::string s = serialize_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace tsim
