#include "toroidsim/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsim {

double ExpGaussFit::eval(double t) const {
    double u = t / tau_gauss;
    return amp_exp * std::exp(-t / tau_exp) + amp_gauss * std::exp(-u * u) + offset;
}

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

struct LmResult {
    Vec5 theta;
    double sse = 0;
    bool converged = false;
    int iterations = 0;
    Mat5 jtj;
};

double model_sse(const std::vector<double>& t, const std::vector<double>& y,
                 const std::vector<double>& w, const Vec5& p) {
    double sse = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        double ue = std::exp(-t[i] / p(1));
        double ug = std::exp(-(t[i] / p(3)) * (t[i] / p(3)));
        double r = (y[i] - (p(0) * ue + p(2) * ug + p(4))) * w[i];
        sse += r * r;
    }
    return sse;
}

LmResult levenberg_marquardt(const std::vector<double>& t, const std::vector<double>& y,
                             const std::vector<double>& w, Vec5 p) {
    const int n = static_cast<int>(t.size());
    double lambda = 1e-3;
    LmResult res;
    res.theta = p;
    res.sse = model_sse(t, y, w, p);

    for (int it = 0; it < 200; ++it) {
        Mat5 jtj = Mat5::Zero();
        Vec5 jtr = Vec5::Zero();
        for (int i = 0; i < n; ++i) {
            double ue = std::exp(-t[i] / p(1));
            double vg = t[i] / p(3);
            double ug = std::exp(-vg * vg);
            double f = p(0) * ue + p(2) * ug + p(4);
            double r = (y[i] - f) * w[i];
            Vec5 j;
            j(0) = ue * w[i];
            j(1) = p(0) * ue * t[i] / (p(1) * p(1)) * w[i];
            j(2) = ug * w[i];
            j(3) = p(2) * ug * 2.0 * t[i] * t[i] / (p(3) * p(3) * p(3)) * w[i];
            j(4) = w[i];
            jtj += j * j.transpose();
            jtr += j * r;
        }
        res.jtj = jtj;

        bool improved = false;
        for (int tries = 0; tries < 12; ++tries) {
            Mat5 a = jtj;
            for (int k = 0; k < 5; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
            Vec5 step = a.ldlt().solve(jtr);
            Vec5 cand = p + step;
            // both components are populations and the exponential is the
            // fast one; the ordering keeps the decomposition identified
            if (cand(0) >= 0 && cand(2) >= 0 && cand(1) > 0 && cand(3) > 0 &&
                cand(1) <= cand(3)) {
                double sse = model_sse(t, y, w, cand);
                if (sse < res.sse) {
                    double rel = (res.sse - sse) / std::max(res.sse, 1e-300);
                    p = cand;
                    res.theta = p;
                    res.sse = sse;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    improved = true;
                    res.iterations = it + 1;
                    if (rel < 1e-12) {
                        res.converged = true;
                        return res;
                    }
                    break;
                }
            }
            lambda *= 8.0;
        }
        if (!improved) {
            res.converged = true; // stationary within step tolerance
            return res;
        }
    }
    res.converged = true;
    return res;
}

} // namespace

ExpGaussFit fit_exp_gauss(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& sigma) {
    if (t.size() != y.size() || t.size() < 20)
        throw std::runtime_error("fit_exp_gauss: need at least 20 samples");
    if (!sigma.empty() && sigma.size() != t.size())
        throw std::runtime_error("fit_exp_gauss: sigma length mismatch");
    std::vector<double> w(t.size(), 1.0);
    if (!sigma.empty())
        for (size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / std::max(sigma[i], 1e-300);
    const int n = static_cast<int>(t.size());
    double span = t.back() - t.front();
    if (span <= 0) throw std::runtime_error("fit_exp_gauss: time axis must ascend");

    double y_max = *std::max_element(y.begin(), y.end());
    double y_min = *std::min_element(y.begin(), y.end());
    double tail = 0;
    int n_tail = std::max(1, n / 10);
    for (int i = n - n_tail; i < n; ++i) tail += y[i];
    tail /= n_tail;
    double amp0 = std::max(y_max - tail, 1e-3 * std::max(std::abs(y_max), 1e-300));

    // The exp/gauss decomposition has a shallow SSE valley on smooth traces;
    // among starts within 2% of the best SSE the fast-exponential branch is
    // the canonical one.
    std::vector<LmResult> runs;
    for (double f1 : {0.03, 0.08, 0.2, 0.5}) {
        for (double f2 : {0.15, 0.4, 0.9}) {
            if (f1 >= f2) continue;
            Vec5 p;
            p << 0.5 * amp0, f1 * span, 0.5 * amp0, f2 * span, tail;
            runs.push_back(levenberg_marquardt(t, y, w, p));
        }
    }
    double best_sse = 1e300;
    for (const auto& r : runs)
        if (r.converged) best_sse = std::min(best_sse, r.sse);
    if (best_sse == 1e300) throw std::runtime_error("fit_exp_gauss: no start converged");
    LmResult best;
    bool have = false;
    for (const auto& r : runs) {
        if (!r.converged || r.sse > best_sse * 1.02) continue;
        if (!have || r.theta(1) < best.theta(1)) {
            best = r;
            have = true;
        }
    }

    ExpGaussFit out;
    out.amp_exp = best.theta(0);
    out.tau_exp = best.theta(1);
    out.amp_gauss = best.theta(2);
    out.tau_gauss = best.theta(3);
    out.offset = best.theta(4);
    out.sse = best.sse;
    out.converged = best.converged;
    out.iterations = best.iterations;

    double dof = std::max(1, n - 5);
    double s2 = best.sse / dof;
    Mat5 cov = best.jtj.ldlt().solve(Mat5::Identity()) * s2;
    auto ci = [&](int k) { return std::sqrt(std::max(0.0, cov(k, k))); };
    out.ci_amp_exp = ci(0);
    out.ci_tau_exp = ci(1);
    out.ci_amp_gauss = ci(2);
    out.ci_tau_gauss = ci(3);
    out.ci_offset = ci(4);
    return out;
}

std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y,
                             int sg_half_width) {
    const int n = static_cast<int>(x.size());
    std::vector<Peak> peaks;
    if (n < 5) return peaks;
    int w = std::max(1, sg_half_width);

    // quadratic least-squares smoothing on a uniform-ish grid
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - w), hi = std::min(n - 1, i + w);
        double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, b0 = 0, b1 = 0, b2 = 0;
        for (int k = lo; k <= hi; ++k) {
            double u = static_cast<double>(k - i);
            double u2 = u * u;
            s0 += 1; s1 += u; s2 += u2; s3 += u2 * u; s4 += u2 * u2;
            b0 += y[k]; b1 += y[k] * u; b2 += y[k] * u2;
        }
        Eigen::Matrix3d m;
        m << s0, s1, s2, s1, s2, s3, s2, s3, s4;
        Eigen::Vector3d b(b0, b1, b2);
        Eigen::Vector3d c = m.ldlt().solve(b);
        s[i] = c(0);
    }

    for (int i = 1; i + 1 < n; ++i) {
        if (s[i] > s[i - 1] && s[i] >= s[i + 1]) {
            // parabolic refinement
            double denom = s[i - 1] - 2 * s[i] + s[i + 1];
            double frac = std::abs(denom) > 1e-300 ? 0.5 * (s[i - 1] - s[i + 1]) / denom : 0.0;
            frac = std::clamp(frac, -0.5, 0.5);
            double dx = i + 1 < n ? x[i + 1] - x[i] : x[i] - x[i - 1];
            peaks.push_back({x[i] + frac * dx, s[i]});
        }
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return a.height > b.height; });
    return peaks;
}

} // namespace tsim
