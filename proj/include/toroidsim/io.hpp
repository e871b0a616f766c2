#ifndef TOROIDSIM_IO_HPP
#define TOROIDSIM_IO_HPP

#include "toroidsim/ensemble.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace tsim {

// Tabular text with '#'-prefixed metadata, one header row, whitespace columns.
class TableWriter {
  public:
    explicit TableWriter(const std::string& path);
    void meta(const std::string& key, const std::string& value);
    void meta(const std::string& key, double value);
    void meta(const std::string& key, std::uint64_t value);
    void columns(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    void raw_row(const std::string& line);

  private:
    std::ofstream out_;
};

// standard run provenance header
void write_provenance(TableWriter& w, const PhysicsConfig& cfg, std::uint64_t seed, int n);

void write_histogram(const std::string& path, const Histogram& h, const PhysicsConfig& cfg,
                     std::uint64_t seed, int n, const std::string& x_name,
                     const std::string& x_unit, double x_scale);

// p(g) histograms round-trip with quantum-dynamics' ensemble average:
// columns are g in MHz (rate/2pi) and probability density per MHz.
std::vector<PgBin> read_pg_histogram(const std::string& path);

// per-event rows: channel timestamp_ns epoch
void write_photon_records(const std::string& path, const std::vector<TrajectoryRecord>& records,
                          const PhysicsConfig& cfg, std::uint64_t seed);

void write_trajectory_dump(const std::string& path, const TrajectoryRecord& rec,
                           const PhysicsConfig& cfg, std::uint64_t seed);

std::string channel_name(Channel c);

} // namespace tsim

#endif
