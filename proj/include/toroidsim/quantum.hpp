#ifndef TOROIDSIM_QUANTUM_HPP
#define TOROIDSIM_QUANTUM_HPP

#include "toroidsim/cqed.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tsim {

// Product basis for a two-level atom and the two traveling modes, truncated
// at total excitation 2: one 0-excitation, three 1-excitation and five
// 2-excitation states (|e,e> does not exist), dimension 9. The missing
// doubly-excited atom state is what makes the transmitted field antibunch.
class TruncatedSpace {
  public:
    TruncatedSpace();

    int dim() const { return dim_; }
    int excitation(int index) const { return exc_[index]; }

    const Eigen::MatrixXcd& mode_a() const { return a_; }
    const Eigen::MatrixXcd& mode_b() const { return b_; }
    const Eigen::MatrixXcd& sigma_minus() const { return sm_; }

  private:
    int dim_;
    std::vector<int> exc_;
    Eigen::MatrixXcd a_, b_, sm_;
};

struct CorrelationCurve {
    std::vector<double> tau;    // s, symmetric grid
    std::vector<double> g2;     // normalized second-order correlation
    double scale = 1.0;         // multiplicative scale vs an external target
};

// Hamiltonian (rad/s) and Liouvillian superoperator (column-major vec) of the
// driven dissipative system in the probe frame.
Eigen::MatrixXcd hamiltonian(const CavityAtomParams& p, const TruncatedSpace& space);
Eigen::MatrixXcd liouvillian(const CavityAtomParams& p, const TruncatedSpace& space);

// Stationary density operator: trace 1, Hermitian, PSD to 1e-9, Lindblad
// residual below 1e-10. Throws if the null space is not one-dimensional.
Eigen::MatrixXcd liouvillian_steady_state(const CavityAtomParams& p,
                                          const TruncatedSpace& space);

// Forward output-field operator sqrt(2 kappa_ex) a - s_in (drive interference
// included); its flux expectation reproduces T * |s_in|^2.
Eigen::MatrixXcd output_operator(const CavityAtomParams& p, const TruncatedSpace& space);

// Normalized two-time correlation of the transmitted field on a symmetric
// tau grid via the quantum regression theorem.
CorrelationCurve g2_transmitted(const CavityAtomParams& p, const TruncatedSpace& space,
                                const std::vector<double>& tau_grid);

// Unnormalized coincidence-rate curve and steady flux for one coupling value,
// used by the p(g) ensemble average.
struct CoincidenceCurve {
    std::vector<double> tau;
    std::vector<double> rate; // photons^2/s^2
    double flux = 0;          // photons/s
};
CoincidenceCurve coincidence_curve(const CavityAtomParams& p, const TruncatedSpace& space,
                                   const std::vector<double>& tau_grid);

enum class PgWeighting { FluxWeighted, Uniform };

struct PgBin {
    double g;      // rad/s
    double weight; // probability mass
};

// Ensemble-averaged correlation over a p(g) histogram; per-g curves are
// averaged over the traveling phase. If target_at_tau > 0 the returned scale
// maps the curve onto that value at |tau| = tau_match.
CorrelationCurve ensemble_g2(const std::vector<PgBin>& p_of_g, CavityAtomParams base,
                             const std::vector<double>& tau_grid,
                             PgWeighting weighting = PgWeighting::FluxWeighted,
                             int n_theta = 8, double target_at_tau = 0,
                             double tau_match = 40e-9);

} // namespace tsim

#endif
