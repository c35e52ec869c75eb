#pragma once

// Complex-Wishart resampling of the spectral density and re-estimation of the nowcasts per
// draw, conditional on the ranks.

#include "coin/model.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace coin {

enum class DofRule { TOverM, TOverMLogM };

struct WishartConfig {
    int B = 500;
    DofRule dof_rule = DofRule::TOverM;
    std::uint64_t seed = 20220101;
    std::optional<double> dof_override;  // replaces the rule when set
    bool projection_noise = false;       // add Gaussian projection error to each draw
};

// T/M_T or T/(M_T log M_T), rounded to the nearest integer and at least one.
double wishart_dof(const WishartConfig& config, Index T, int M_T);

// [[Re, Im], [-Im, Re]]
Eigen::MatrixXd real_embed(const Eigen::MatrixXcd& hermitian);

// Re = mean of the diagonal blocks, Im = skew part of the upper-right block.
Eigen::MatrixXcd reconstruct_complex(const Eigen::MatrixXd& draw);

// One draw from W(nu, scale/nu). Uses the Bartlett decomposition when nu exceeds the
// dimension minus one, otherwise the sum of round(nu) Gaussian outer products.
Eigen::MatrixXd wishart_draw(const Eigen::MatrixXd& scale, double nu, std::mt19937_64& rng);

// Per-frequency Wishart draw of a spectral estimate; conjugate symmetry is imposed and the
// zero-frequency draw is real.
SpectrumEstimate<double> draw_spectrum(const SpectrumEstimate<double>& spectrum, double nu, std::mt19937_64& rng);

// Type-7 sample quantile of the finite entries; NaN when there are none.
double sample_quantile(std::vector<double> values, double p);

// 9 x T deciles (10%..90%) of the columns of a B x T draw matrix.
Eigen::MatrixXd decile_bands(const Eigen::MatrixXd& draws);

struct BootstrapEnsemble {
    Eigen::MatrixXd qoq_draws;   // B x T
    Eigen::MatrixXd yoy_draws;   // B x T
    Eigen::MatrixXd qoq_deciles; // 9 x T
    Eigen::MatrixXd yoy_deciles; // 9 x T
    double nu = 0.0;

    Index B() const { return qoq_draws.rows(); }
    Index T() const { return qoq_draws.cols(); }
};

BootstrapEnsemble bootstrap_nowcasts(const SpectrumEstimate<double>& spectrum, const Eigen::MatrixXd& x,
                                     const GdpData& gdp, const RankSelection& ranks, const ModelOptions& options,
                                     const WishartConfig& config);

}  // namespace coin
