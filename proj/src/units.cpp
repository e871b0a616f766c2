#include "toroidsim/units.hpp"

#include <stdexcept>

namespace tsim {

namespace {

// scale such that si = human * scale
double unit_scale(const std::string& tag) {
    if (tag == "mhz_rate") return two_pi * 1e6; // MHz of rate/2pi -> rad/s
    if (tag == "khz_rate") return two_pi * 1e3;
    if (tag == "nm") return 1e-9;
    if (tag == "um") return 1e-6;
    if (tag == "mm") return 1e-3;
    if (tag == "m") return 1.0;
    if (tag == "ns") return 1e-9;
    if (tag == "us") return 1e-6;
    if (tag == "ms") return 1e-3;
    if (tag == "s") return 1.0;
    if (tag == "uk") return 1e-6;  // microkelvin -> K
    if (tag == "mk") return 1e-3;
    if (tag == "pw") return 1e-12; // picowatt -> W
    if (tag == "uw") return 1e-6;
    if (tag == "m_s") return 1.0;
    if (tag == "mk_energy") return k_boltzmann * 1e-3; // kB * mK -> J
    throw std::invalid_argument("unknown unit tag: " + tag);
}

} // namespace

double to_si(double value, const std::string& unit_tag) {
    return value * unit_scale(unit_tag);
}

double to_human(double value, const std::string& unit_tag) {
    return value / unit_scale(unit_tag);
}

} // namespace tsim
