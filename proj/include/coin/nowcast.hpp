#pragma once

// Temporal aggregation of the smooth factors, band-spectrum regression of quarterly and
// annual GDP growth on the aggregated factors, and the monthly nowcast paths.

#include "coin/types.hpp"

#include <optional>
#include <vector>

namespace coin {

struct AggregationFilter {
    Eigen::VectorXd coefficients;  // impulse response, lag 0 first

    Index span() const { return coefficients.size() - 1; }
    double sum() const { return coefficients.sum(); }
    double sum_squares() const { return coefficients.squaredNorm(); }
};

// Quarterly: (1+L+L^2)^2. Annual: (1+L+L^2)(1+L+...+L^11).
AggregationFilter aggregation_filter(Horizon h);

// Applies the filter along each row of an r x T matrix. Columns before the filter has full
// support are missing.
Eigen::MatrixXd aggregate_factors(const Eigen::MatrixXd& f, const AggregationFilter& filter);
Eigen::MatrixXd aggregate_factors(const Eigen::MatrixXd& f, Horizon h);

// Selects the given columns (e.g. quarter-end months).
Eigen::MatrixXd systematic_sample(const Eigen::MatrixXd& series, const std::vector<Index>& columns);

// MA(1) coefficient of the lag-3 sample of (1,2,3,2,1)-filtered white noise:
// the invertible root of b/(1+b^2) = 4/19.
double quarterly_ma_coefficient();

// Fourier frequencies 2 pi j / length, j = 1..length-1, inside (0, cutoff) or (2pi - cutoff, 2pi).
std::vector<Index> band_indices(Index length, double cutoff);

Eigen::VectorXd quarterly_ma_weights(const Eigen::VectorXd& omegas, double b);

// Error-spectrum weights on the given frequencies. Quarterly: 1 + b^2 + 2b cos(omega).
// Annual: the folded spectrum of annually aggregated white noise, scaled to mean 1.
Eigen::VectorXd ma_weights(Horizon h, const Eigen::VectorXd& omegas);

struct BandRegressionOptions {
    std::optional<double> cutoff;            // default pi/6 quarterly, pi/2 annual
    std::optional<Eigen::VectorXd> weights;  // overrides ma_weights (one per band frequency)
};

struct BandRegressionFit {
    double mu = 0.0;
    Eigen::VectorXd theta;
    double sigma2 = 0.0;
    Eigen::VectorXd band;     // omega_j used
    Eigen::VectorXd weights;  // S(omega_j)
    Horizon horizon = Horizon::Quarterly;
    double imag_residue = 0.0;
};

// g: T_q observations; F: r x T_q sampled aggregated factors (no missing values).
BandRegressionFit band_spectrum_fit(const Eigen::VectorXd& g, const Eigen::MatrixXd& F, Horizon h,
                                    const BandRegressionOptions& options = {});

struct NowcastSeries {
    Eigen::VectorXd monthly;
    Eigen::VectorXd qoq;
    Eigen::VectorXd yoy;
};

// f_phi: r_phi x T monthly smooth factors. Months without full filter support are missing.
NowcastSeries build_nowcasts(const BandRegressionFit& fit_q, const BandRegressionFit& fit_a,
                             const Eigen::MatrixXd& f_phi);

}  // namespace coin
