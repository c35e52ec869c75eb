#pragma once

// Oracle medium-to-long-run target: sinc interpolation of quarterly growth to months,
// truncated ideal low-pass filtering, aliasing (folding) of monthly spectra, and the
// Butterworth spectral factorization.

#include "coin/panel_io.hpp"
#include "coin/types.hpp"

#include <functional>
#include <vector>

namespace coin {

// Monthly interpolant of samples placed at months 3*tau + 2, tau = 0..Q-1. Output has
// 3Q + extra_months entries. support > 0 truncates the kernel to that many quarters on each
// side; kernel weights are renormalized to sum to one at every month. Months after the last
// sample hold its value.
Eigen::VectorXd wks_interpolate(const Eigen::VectorXd& samples, int support = 0, int extra_months = 0);

// Ideal low-pass weights sin(cutoff j)/(pi j), j = -half_width..half_width (index j + half_width).
Eigen::VectorXd ideal_lowpass_weights(double cutoff, int half_width);

// Ideal weights shifted by a common constant so that they sum to one.
Eigen::VectorXd bk_weights(double cutoff, int half_width);

// Frequency response sum_j w_j e^{-i theta j} of a symmetric filter (real).
double filter_gain(const Eigen::VectorXd& symmetric_weights, double theta);

// Filters the demeaned series and adds the mean back. The first and last half_width entries
// are missing.
Eigen::VectorXd bk_lowpass(const Eigen::VectorXd& x, double cutoff = kPi / 6, int half_width = 36);

enum class TargetOrdering { InterpolateThenFilter, FilterThenInterpolate };

struct TargetOptions {
    TargetOrdering ordering = TargetOrdering::InterpolateThenFilter;
    double cutoff = kPi / 6;           // monthly
    int half_width = 36;               // months
    double quarterly_cutoff = kPi / 2;
    int quarterly_half_width = 12;     // quarters
    int support = 0;                   // sinc truncation in quarters, 0 = all samples
};

struct TargetSeries {
    std::vector<YearMonth> dates;  // monthly calendar from the first month of the first quarter
    Eigen::VectorXd qoq_target;    // missing outside the valid range
    Eigen::VectorXd yoy_target;
    Index first_valid = -1;        // months where both targets are defined
    Index last_valid = -1;

    Index size() const { return qoq_target.size(); }
};

// Low-pass component of a quarterly growth series on the monthly calendar (months 3*tau+2
// carry the samples). Missing samples at the start are skipped.
Eigen::VectorXd lowpass_target(const Eigen::VectorXd& quarterly, const TargetOptions& options = {});

TargetSeries build_target(const QuarterlyTarget& gdp, const TargetOptions& options = {});

// Squared gain of the aggregation filter: sin^4(3x/2)/sin^4(x/2) (quarterly) or
// sin^2(3x/2) sin^2(6x)/sin^4(x/2) (annual), with the limits 81 and 1296 at x = 0.
double aggregation_squared_gain(double x, Horizon h);

// Spectral density of the every-third-month sample of the aggregated monthly process with
// spectral density sigma: f(theta) = (1/3) sum_{j=0..2} gain(theta_j) sigma(theta_j),
// theta_j = (theta + 2 pi j)/3.
Eigen::VectorXd fold_spectrum(const std::function<double(double)>& sigma, Horizon h,
                              const Eigen::VectorXd& thetas);

struct ButterworthSpec {
    int s = 1;
    double varsigma = 1.0;
    double theta_c = kPi / 2;
    Eigen::VectorXd phi_coeffs;  // phi(L) = sum_k phi_coeffs(k) L^k, roots outside the unit circle

    // |1 + e^{-i theta}|^{2s} / |phi(e^{-i theta})|^2
    double gain(double theta) const;
    // |phi(e^{-i theta})|^2
    double phi_squared_modulus(double theta) const;
};

ButterworthSpec spectral_factorize(int s, double theta_c);

}  // namespace coin
