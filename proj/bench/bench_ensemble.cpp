// Compares the OpenMP ensemble kernel against the serial reference and checks
// that both produce identical records.

#include "toroidsim/config.hpp"
#include "toroidsim/transit.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdlib>
#include <iostream>

using namespace tsim;
using clock_type = std::chrono::steady_clock;

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 400;
    PhysicsConfig cfg = default_config();
    ModeField mode = ModeField::from_config(cfg);
    SurfaceModel surface = SurfaceModel::from_config(cfg);
    auto ctx = SimulationContext::make(cfg, mode, surface);
    TransitOptions opt;

    auto t0 = clock_type::now();
    auto serial = run_ensemble_serial(ctx, opt, n, cfg.numerics.seed);
    auto t1 = clock_type::now();
    auto parallel = run_ensemble(ctx, opt, n, cfg.numerics.seed);
    auto t2 = clock_type::now();

    double dt_serial = std::chrono::duration<double>(t1 - t0).count();
    double dt_parallel = std::chrono::duration<double>(t2 - t1).count();

    bool identical = serial.size() == parallel.size();
    int triggered = 0;
    for (size_t i = 0; identical && i < serial.size(); ++i) {
        identical = serial[i].fate == parallel[i].fate &&
                    serial[i].end_time == parallel[i].end_time &&
                    serial[i].trigger_time == parallel[i].trigger_time &&
                    serial[i].photons.events.size() == parallel[i].photons.events.size();
        if (serial[i].trigger_time) ++triggered;
    }

#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    std::cout << "trajectories:        " << n << "  (" << triggered << " triggered)\n";
    std::cout << "serial reference:    " << dt_serial << " s\n";
    std::cout << "openmp (" << threads << " threads):  " << dt_parallel << " s\n";
    std::cout << "speedup:             " << dt_serial / dt_parallel << "\n";
    std::cout << "records identical:   " << (identical ? "yes" : "NO") << "\n";
    return identical ? 0 : 1;
}
