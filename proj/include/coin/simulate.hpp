#pragma once

// Synthetic panels from a dynamic factor model whose common shocks are split into low-pass
// and high-pass parts by the Butterworth decomposition, with known population moments.

#include "coin/panel_io.hpp"

#include <cstdint>
#include <optional>

namespace coin {

struct DgpSpec {
    Index n = 50;
    Index T = 500;
    int q = 2;               // common shocks
    int r = 2;               // static factors
    int r_phi = 1;           // smooth factors
    double ar = 0.5;         // D(L) = (1 - ar L) I_r
    Eigen::MatrixXd K;       // r x q, empty means K(i, i mod q) = 1
    int s = 6;
    double theta_c = kPi / 6;
    double rho_xi = 0.3;     // idiosyncratic AR(1) coefficient
    double rho_x = 0.3;      // spatial correlation rho_x^{|i-j|}, at most 0.5
    double idio_variance = 1.0;
    // Split: the first r_phi factors load only low-pass shocks and the rest only high-pass
    // shocks. Otherwise every factor carries both parts.
    bool split = true;
    std::uint64_t seed = 1;
    int burn_in = 500;
    YearMonth start{1960, 1};
    std::optional<Eigen::MatrixXd> loadings;  // n x r, drawn N(0,1) from the seed when absent

    // Throws ConfigError when the settings are inconsistent or D(L) is unstable.
    void validate() const;
    Eigen::MatrixXd shock_loadings() const;
};

struct DgpTruth {
    Eigen::MatrixXd loadings;  // n x r
    Eigen::MatrixXd f_low;     // r x T, low-pass part of the factors
    Eigen::MatrixXd f_high;    // r x T
    Eigen::MatrixXd chi;       // n x T
    Eigen::MatrixXd phi;
    Eigen::MatrixXd psi;
    Eigen::MatrixXd xi;
    Eigen::MatrixXd x_raw;     // chi + xi

    // Rows of f_low that carry the smooth factors (the first r_phi when split, all otherwise).
    Eigen::MatrixXd smooth_factors(const DgpSpec& spec) const;
};

struct SimulatedPanel {
    Panel panel;  // standardized x_raw
    DgpTruth truth;
};

SimulatedPanel simulate_panel(const DgpSpec& spec);

struct PopulationMoments {
    Eigen::MatrixXd gamma0_x;
    Eigen::MatrixXd gamma0_chi;
    Eigen::MatrixXd gamma0_phi;
    Eigen::MatrixXd gamma0_psi;
    Eigen::MatrixXd gamma0_xi;
    Eigen::MatrixXd factor_cov_low;   // r x r
    Eigen::MatrixXd factor_cov_high;
};

// Lag-zero covariances of the raw (unstandardized) components, by quadrature over a
// uniform frequency grid of `grid` points.
PopulationMoments population_moments(const DgpSpec& spec, const Eigen::MatrixXd& loadings, int grid = 8192);

struct SimulatedGdp {
    QuarterlyTarget target;      // aligned with the panel calendar
    Eigen::VectorXd levels;      // quarterly GDP levels
    std::vector<YearMonth> quarter_dates;
    Eigen::VectorXd dy;          // monthly growth
    Eigen::VectorXd m2lr_monthly;  // mu + theta' f_phi
    Eigen::VectorXd m2lr_qoq;      // 9 mu + theta' F
    Eigen::VectorXd m2lr_yoy;      // 36 mu + theta' F*
};

// dy_t = mu + theta' f_phi_t + eps_t. Quarterly levels are exp of the within-quarter sum of
// log levels, so log growth equals the aggregated monthly growth exactly.
SimulatedGdp simulate_gdp(const DgpTruth& truth, const DgpSpec& spec, const Eigen::VectorXd& theta, double mu,
                          double noise_sd, std::uint64_t seed);

}  // namespace coin
