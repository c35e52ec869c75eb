#include "coin/model.hpp"

#include <algorithm>

namespace coin {

GdpData gdp_samples(const QuarterlyTarget& gdp, Index first_month, Index T)
{
    GdpData out;
    std::vector<double> gq, ga;
    for (Index i = 0; i < gdp.size(); ++i) {
        const Index month = gdp.quarter_end_months[static_cast<std::size_t>(i)];
        if (month < 0) continue;
        const Index local = month - first_month;
        if (local < 0 || local >= T) continue;
        if (!is_missing(gdp.g(i))) {
            gq.push_back(gdp.g(i));
            out.quarterly.months.push_back(local);
        }
        if (!is_missing(gdp.a(i))) {
            ga.push_back(gdp.a(i));
            out.annual.months.push_back(local);
        }
    }
    out.quarterly.values = Eigen::Map<Eigen::VectorXd>(gq.data(), static_cast<Index>(gq.size()));
    out.annual.values = Eigen::Map<Eigen::VectorXd>(ga.data(), static_cast<Index>(ga.size()));
    return out;
}

namespace {

BandRegressionFit fit_horizon(const Eigen::MatrixXd& f, const GdpSamples& samples, Horizon h, double cutoff)
{
    const AggregationFilter filter = aggregation_filter(h);
    const Eigen::MatrixXd aggregated = aggregate_factors(f, filter);
    std::vector<Index> months;
    std::vector<double> values;
    for (Index i = 0; i < samples.size(); ++i) {
        const Index month = samples.months[static_cast<std::size_t>(i)];
        if (month < filter.span() || month >= f.cols()) continue;
        months.push_back(month);
        values.push_back(samples.values(i));
    }
    if (months.empty()) throw DataError("nowcast", "no " + std::string(to_string(h)) + " GDP observation inside the window");
    const Eigen::VectorXd g = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
    BandRegressionOptions opt;
    opt.cutoff = cutoff;
    return band_spectrum_fit(g, systematic_sample(aggregated, months), h, opt);
}

}  // namespace

ModelFit fit_from_spectrum(const SpectrumEstimate<double>& spectrum, const Eigen::MatrixXd& gamma0_x,
                           const Eigen::MatrixXd& x, const GdpData& gdp, const RankSelection& ranks,
                           const ModelOptions& options, FactorKind kind)
{
    ModelFit out;
    out.ranks = ranks;
    const auto eig = hermitian_eig(spectrum);
    out.covariances.gamma0_x = gamma0_x;
    out.covariances.gamma0_chi = common_covariance(eig, ranks.q);
    std::tie(out.covariances.gamma0_phi, out.covariances.m_c) = lowpass_covariance(eig, ranks.q, options.theta_c);
    out.covariances.q = ranks.q;
    out.covariances.theta_c = options.theta_c;

    out.basis = build_basis(out.covariances, ranks.r, ranks.r_phi);
    out.factors = smooth_factors(x, out.basis);
    const Eigen::MatrixXd& f = kind == FactorKind::Smooth ? out.factors.f_phi : out.factors.f_pca;

    out.fit_q = fit_horizon(f, gdp.quarterly, Horizon::Quarterly, options.band_q);
    out.fit_a = fit_horizon(f, gdp.annual, Horizon::Annual, options.band_a);
    out.nowcast = build_nowcasts(out.fit_q, out.fit_a, f);
    return out;
}

RankSelection choose_ranks(const Eigen::MatrixXd& x, const SpectrumEstimate<double>& spectrum,
                           const ModelOptions& options)
{
    RankConfig cfg = options.ranks;
    cfg.theta_c = options.theta_c;
    const int n = static_cast<int>(x.rows());
    cfg.k_max = std::min<int>(cfg.k_max, static_cast<int>(std::min<Index>(x.rows(), x.cols())) - 1);
    cfg.q_max = std::min(cfg.q_max, n - 1);
    RankSelection sel = select_ranks(x, spectrum, cfg);
    sel.r = std::clamp(sel.r, 1, n);
    sel.q = std::clamp(sel.q, 1, n);
    sel.r_phi = std::clamp(sel.r_phi, 1, sel.r);
    return sel;
}

ModelFit run_uscoin(const Eigen::MatrixXd& x, const GdpData& gdp, const ModelOptions& options, FactorKind kind,
                    const std::optional<RankSelection>& fixed)
{
    const auto covs = cross_covariances(x, options.M_T);
    const auto spectrum = bartlett_spectrum(covs, options.m);
    const RankSelection ranks = fixed ? *fixed : choose_ranks(x, spectrum, options);
    return fit_from_spectrum(spectrum, covs.gammas[0], x, gdp, ranks, options, kind);
}

}  // namespace coin
