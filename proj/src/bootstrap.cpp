#include "coin/bootstrap.hpp"

#include <algorithm>
#include <cmath>

namespace coin {

double wishart_dof(const WishartConfig& config, Index T, int M_T)
{
    if (config.dof_override) {
        if (!(*config.dof_override > 0.0)) throw ConfigError("bootstrap", "degrees of freedom must be positive");
        return *config.dof_override;
    }
    if (M_T < 1) throw ConfigError("bootstrap", "window size M_T must be positive");
    double nu = static_cast<double>(T) / M_T;
    if (config.dof_rule == DofRule::TOverMLogM) {
        if (M_T < 2) throw ConfigError("bootstrap", "T/(M_T log M_T) needs M_T >= 2");
        nu /= std::log(static_cast<double>(M_T));
    }
    return std::max(1.0, std::round(nu));
}

Eigen::MatrixXd real_embed(const Eigen::MatrixXcd& a)
{
    const Index n = a.rows();
    Eigen::MatrixXd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = a.real();
    out.bottomRightCorner(n, n) = a.real();
    out.topRightCorner(n, n) = a.imag();
    out.bottomLeftCorner(n, n) = -a.imag();
    return out;
}

Eigen::MatrixXcd reconstruct_complex(const Eigen::MatrixXd& w)
{
    const Index n = w.rows() / 2;
    if (w.cols() != w.rows() || 2 * n != w.rows()) throw ConfigError("bootstrap", "embedded draw must be 2n x 2n");
    Eigen::MatrixXd re = (w.topLeftCorner(n, n) + w.bottomRightCorner(n, n)) / 2.0;
    Eigen::MatrixXd im = (w.topRightCorner(n, n) - w.bottomLeftCorner(n, n)) / 2.0;
    re = ((re + re.transpose()) / 2.0).eval();
    im = ((im - im.transpose()) / 2.0).eval();
    Eigen::MatrixXcd out(n, n);
    out.real() = re;
    out.imag() = im;
    return out;
}

Eigen::MatrixXd wishart_draw(const Eigen::MatrixXd& scale, double nu, std::mt19937_64& rng)
{
    const Index d = scale.rows();
    if (!(nu > 0.0)) throw ConfigError("bootstrap", "degrees of freedom must be positive");
    Eigen::MatrixXd s = (scale + scale.transpose()) / (2.0 * nu);
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) {
        s.diagonal().array() += 1e-8 * std::max(s.trace() / static_cast<double>(d), 1e-300);
        llt.compute(s);
        if (llt.info() != Eigen::Success) throw NumericalError("bootstrap", "Cholesky of the Wishart scale failed");
    }
    const Eigen::MatrixXd L = llt.matrixL();
    std::normal_distribution<double> normal(0.0, 1.0);

    if (nu > static_cast<double>(d - 1)) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
        for (Index i = 0; i < d; ++i) {
            std::chi_squared_distribution<double> chi2(nu - static_cast<double>(i));
            A(i, i) = std::sqrt(chi2(rng));
            for (Index j = 0; j < i; ++j) A(i, j) = normal(rng);
        }
        const Eigen::MatrixXd LA = L * A.triangularView<Eigen::Lower>();
        Eigen::MatrixXd w = LA * LA.transpose();
        return (w + w.transpose()) / 2.0;
    }

    const Index k = std::max<Index>(1, static_cast<Index>(std::llround(nu)));
    Eigen::MatrixXd z(d, k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < d; ++i) z(i, j) = normal(rng);
    const Eigen::MatrixXd lz = L * z;
    Eigen::MatrixXd w = lz * lz.transpose();
    return (w + w.transpose()) / 2.0;
}

SpectrumEstimate<double> draw_spectrum(const SpectrumEstimate<double>& spectrum, double nu, std::mt19937_64& rng)
{
    SpectrumEstimate<double> out = spectrum;
    const int m = spectrum.m;
    for (int h = 0; h <= m; ++h) {
        Eigen::MatrixXcd s = reconstruct_complex(wishart_draw(real_embed(spectrum.at(h)), nu, rng));
        if (h == 0) s.imag().setZero();
        out.matrices[static_cast<std::size_t>(m - h)] = s.conjugate();
        out.matrices[static_cast<std::size_t>(m + h)] = std::move(s);
    }
    return out;
}

double sample_quantile(std::vector<double> values, double p)
{
    std::erase_if(values, [](double v) { return !std::isfinite(v); });
    if (values.empty()) return kMissing;
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Eigen::MatrixXd decile_bands(const Eigen::MatrixXd& draws)
{
    Eigen::MatrixXd out(9, draws.cols());
    std::vector<double> column(static_cast<std::size_t>(draws.rows()));
    for (Index t = 0; t < draws.cols(); ++t) {
        for (Index b = 0; b < draws.rows(); ++b) column[static_cast<std::size_t>(b)] = draws(b, t);
        for (int k = 1; k <= 9; ++k) out(k - 1, t) = sample_quantile(column, k / 10.0);
    }
    return out;
}

namespace {

std::mt19937_64 draw_stream(std::uint64_t seed, int b, int attempt)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(attempt)};
    return std::mt19937_64(seq);
}

void add_projection_noise(Eigen::VectorXd& path, double variance, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(std::max(variance, 0.0)));
    for (Index t = 0; t < path.size(); ++t)
        if (std::isfinite(path(t))) path(t) += normal(rng);
}

}  // namespace

BootstrapEnsemble bootstrap_nowcasts(const SpectrumEstimate<double>& spectrum, const Eigen::MatrixXd& x,
                                     const GdpData& gdp, const RankSelection& ranks, const ModelOptions& options,
                                     const WishartConfig& config)
{
    if (config.B < 1) throw ConfigError("bootstrap", "number of draws B must be at least 1");
    BootstrapEnsemble out;
    out.nu = wishart_dof(config, x.cols(), spectrum.M_T);
    const Index T = x.cols();
    out.qoq_draws.resize(config.B, T);
    out.yoy_draws.resize(config.B, T);

    const double q_sq = aggregation_filter(Horizon::Quarterly).sum_squares();
    const double a_sq = aggregation_filter(Horizon::Annual).sum_squares();
    for (int b = 0; b < config.B; ++b) {
        for (int attempt = 0;; ++attempt) {
            auto rng = draw_stream(config.seed, b, attempt);
            try {
                const auto drawn = draw_spectrum(spectrum, out.nu, rng);
                const Eigen::MatrixXd metric = integrate_spectrum(drawn);
                ModelFit fit = fit_from_spectrum(drawn, metric, x, gdp, ranks, options);
                if (config.projection_noise) {
                    add_projection_noise(fit.nowcast.qoq, q_sq * fit.fit_q.sigma2, rng);
                    add_projection_noise(fit.nowcast.yoy, a_sq * fit.fit_a.sigma2, rng);
                }
                out.qoq_draws.row(b) = fit.nowcast.qoq.transpose();
                out.yoy_draws.row(b) = fit.nowcast.yoy.transpose();
                break;
            } catch (const Error& e) {
                if (attempt >= 1)
                    throw NumericalError("bootstrap", "draw " + std::to_string(b) + " failed twice: " + e.what());
            }
        }
    }
    out.qoq_deciles = decile_bands(out.qoq_draws);
    out.yoy_deciles = decile_bands(out.yoy_draws);
    return out;
}

}  // namespace coin
