#pragma once

// End-to-end estimation on one sample: spectrum, ranks, factor basis, band regressions and
// monthly nowcasts.

#include "coin/factor_space.hpp"
#include "coin/nowcast.hpp"
#include "coin/panel_io.hpp"
#include "coin/spectral.hpp"

#include <optional>
#include <vector>

namespace coin {

struct ModelOptions {
    int M_T = 20;
    int m = 75;
    double theta_c = kPi / 6;
    double band_q = kPi / 6;
    double band_a = kPi / 2;
    RankConfig ranks;
};

// GDP observations paired with the panel month at which each is observed.
struct GdpSamples {
    Eigen::VectorXd values;
    std::vector<Index> months;

    Index size() const { return values.size(); }
};

struct GdpData {
    GdpSamples quarterly;
    GdpSamples annual;
};

// Keeps observations whose month lies in [first_month, T) and whose value is finite; months
// are rebased by subtracting first_month.
GdpData gdp_samples(const QuarterlyTarget& gdp, Index first_month, Index T);

enum class FactorKind { Smooth, Principal };

struct ModelFit {
    RankSelection ranks;
    ComponentCovariances<double> covariances;
    SmoothFactorBasis<double> basis;
    FactorSeries<double> factors;
    BandRegressionFit fit_q;
    BandRegressionFit fit_a;
    NowcastSeries nowcast;
};

// Pipeline downstream of a spectral estimate. gamma0_x is the metric of the generalized
// eigenproblem.
ModelFit fit_from_spectrum(const SpectrumEstimate<double>& spectrum, const Eigen::MatrixXd& gamma0_x,
                           const Eigen::MatrixXd& x, const GdpData& gdp, const RankSelection& ranks,
                           const ModelOptions& options, FactorKind kind = FactorKind::Smooth);

// Ranks are selected by the configured criteria unless `fixed` is given. Selected ranks are
// clamped to at least one.
ModelFit run_uscoin(const Eigen::MatrixXd& x, const GdpData& gdp, const ModelOptions& options,
                    FactorKind kind = FactorKind::Smooth, const std::optional<RankSelection>& fixed = std::nullopt);

RankSelection choose_ranks(const Eigen::MatrixXd& x, const SpectrumEstimate<double>& spectrum,
                           const ModelOptions& options);

}  // namespace coin
