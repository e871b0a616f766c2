#ifndef TOROIDSIM_FIT_HPP
#define TOROIDSIM_FIT_HPP

#include <vector>

namespace tsim {

// Nonlinear least squares for the transit-trace model
//   f(t) = A exp(-t/tau_exp) + C exp(-(t/tau_gauss)^2) + offset
// Multi-start Levenberg-Marquardt over a deterministic grid of time-constant
// seeds; confidence intervals are 68% from the covariance at the optimum.
struct ExpGaussFit {
    double amp_exp = 0, tau_exp = 0;
    double amp_gauss = 0, tau_gauss = 0;
    double offset = 0;
    double ci_amp_exp = 0, ci_tau_exp = 0;
    double ci_amp_gauss = 0, ci_tau_gauss = 0;
    double ci_offset = 0;
    double sse = 0;
    bool converged = false;
    int iterations = 0;

    double eval(double t) const;
};

// Throws std::runtime_error when no start converges. sigma, when given,
// weights the residuals (Poisson counting errors for photocount traces).
ExpGaussFit fit_exp_gauss(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& sigma = {});

// Local maxima of a noisy curve after quadratic Savitzky-Golay smoothing of
// fixed half width (points); parabolic sub-grid refinement.
struct Peak {
    double x = 0;
    double height = 0;
};
std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y,
                             int sg_half_width);

} // namespace tsim

#endif
