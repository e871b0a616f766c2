#include "toroidsim/io.hpp"
#include "toroidsim/config.hpp"
#include "toroidsim/units.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace tsim {

TableWriter::TableWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    out_ << std::setprecision(12);
}

void TableWriter::meta(const std::string& key, const std::string& value) {
    out_ << "# " << key << ": " << value << "\n";
}

void TableWriter::meta(const std::string& key, double value) {
    out_ << "# " << key << ": " << std::setprecision(12) << value << "\n";
}

void TableWriter::meta(const std::string& key, std::uint64_t value) {
    out_ << "# " << key << ": " << value << "\n";
}

void TableWriter::columns(const std::vector<std::string>& names) {
    out_ << "# columns:";
    for (const auto& n : names) out_ << " " << n;
    out_ << "\n";
}

void TableWriter::row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) out_ << (i ? " " : "") << values[i];
    out_ << "\n";
}

void TableWriter::raw_row(const std::string& line) { out_ << line << "\n"; }

void write_provenance(TableWriter& w, const PhysicsConfig& cfg, std::uint64_t seed, int n) {
    std::ostringstream hex;
    hex << std::hex << config_hash(cfg);
    w.meta("config_hash", hex.str());
    w.meta("seed", seed);
    w.meta("trajectories", static_cast<std::uint64_t>(n));
}

void write_histogram(const std::string& path, const Histogram& h, const PhysicsConfig& cfg,
                     std::uint64_t seed, int n, const std::string& x_name,
                     const std::string& x_unit, double x_scale) {
    TableWriter w(path);
    write_provenance(w, cfg, seed, n);
    w.meta("entries", static_cast<std::uint64_t>(h.count));
    w.meta("bin_width_" + x_unit, h.bin_width * x_scale);
    w.columns({x_name + "_" + x_unit, "density_per_" + x_unit});
    for (size_t i = 0; i < h.centers.size(); ++i)
        w.row({h.centers[i] * x_scale, h.density[i] / x_scale});
}

std::vector<PgBin> read_pg_histogram(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open p(g) histogram: " + path);
    std::vector<PgBin> pg;
    std::string line;
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double g_mhz, dens_per_mhz;
        if (!(ss >> g_mhz >> dens_per_mhz)) throw std::runtime_error("bad p(g) row: " + line);
        rows.emplace_back(g_mhz, dens_per_mhz);
    }
    if (rows.size() < 2) throw std::runtime_error("p(g) histogram needs at least two rows");
    double bin_mhz = rows[1].first - rows[0].first;
    for (auto& [g_mhz, dens] : rows) {
        double w = dens * bin_mhz;
        if (w > 0) pg.push_back({mhz(g_mhz), w});
    }
    return pg;
}

std::string channel_name(Channel c) {
    switch (c) {
        case Channel::D1: return "D1";
        case Channel::D2: return "D2";
        case Channel::D1r: return "D1r";
        case Channel::D2r: return "D2r";
    }
    return "?";
}

void write_photon_records(const std::string& path, const std::vector<TrajectoryRecord>& records,
                          const PhysicsConfig& cfg, std::uint64_t seed) {
    TableWriter w(path);
    write_provenance(w, cfg, seed, static_cast<int>(records.size()));
    w.meta("resolution_ns", cfg.detection.resolution * 1e9);
    w.columns({"record", "channel", "timestamp_ns", "epoch"});
    for (const auto& rec : records) {
        for (const auto& e : rec.photons.events) {
            std::ostringstream ss;
            ss << rec.index << " " << channel_name(e.channel) << " " << e.time / 1000 << " "
               << (e.epoch == Epoch::Post ? "post" : "pre");
            w.raw_row(ss.str());
        }
    }
}

void write_trajectory_dump(const std::string& path, const TrajectoryRecord& rec,
                           const PhysicsConfig& cfg, std::uint64_t seed) {
    TableWriter w(path);
    write_provenance(w, cfg, seed, 1);
    w.meta("fate", rec.fate == Fate::Crashed ? "crashed"
                   : rec.fate == Fate::Exited ? "exited"
                                              : "trapped-at-horizon");
    if (rec.trigger_time) w.meta("trigger_us", *rec.trigger_time * 1e6);
    w.columns({"t_us", "rho_um", "z_um", "phi_rad", "vx_m_s", "vy_m_s", "vz_m_s", "g_mhz",
               "delta_a_mhz", "gamma_par_mhz", "T", "R"});
    for (const auto& s : rec.path) {
        w.row({s.t * 1e6, s.rho * 1e6, s.z * 1e6, s.phi, s.vx, s.vy, s.vz,
               to_human(s.g, "mhz_rate"), to_human(s.delta_a, "mhz_rate"),
               to_human(s.gamma_par, "mhz_rate"), s.transmission, s.reflection});
    }
}

} // namespace tsim
