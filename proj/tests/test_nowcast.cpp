#include <doctest.h>

#include "coin/model.hpp"
#include "coin/nowcast.hpp"
#include "coin/simulate.hpp"

#include <algorithm>
#include <random>

using namespace coin;

namespace {

Eigen::MatrixXd gaussian(Index rows, Index cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(rows, cols);
    for (Index t = 0; t < cols; ++t)
        for (Index i = 0; i < rows; ++i) m(i, t) = normal(rng);
    return m;
}

// Demeaned time-domain OLS of g on the rows of F.
Eigen::VectorXd ols(const Eigen::VectorXd& g, const Eigen::MatrixXd& F)
{
    const Eigen::MatrixXd X = (F.colwise() - F.rowwise().mean()).transpose();
    const Eigen::VectorXd y = g.array() - g.mean();
    return X.colPivHouseholderQr().solve(y);
}

}  // namespace

TEST_CASE("aggregation filters")
{
    const AggregationFilter q = aggregation_filter(Horizon::Quarterly);
    const AggregationFilter a = aggregation_filter(Horizon::Annual);
    CHECK(q.span() == 4);
    CHECK(q.sum() == 9.0);
    CHECK(q.sum_squares() == 19.0);
    CHECK(a.span() == 13);
    CHECK(a.sum() == 36.0);

    const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(1, 30, 0.7);
    const Eigen::MatrixXd fq = aggregate_factors(c, Horizon::Quarterly);
    const Eigen::MatrixXd fa = aggregate_factors(c, Horizon::Annual);
    CHECK(is_missing(fq(0, 3)));
    CHECK(fq(0, 4) == doctest::Approx(9 * 0.7));
    CHECK(fq(0, 29) == doctest::Approx(9 * 0.7));
    CHECK(is_missing(fa(0, 12)));
    CHECK(fa(0, 13) == doctest::Approx(36 * 0.7));

    Eigen::MatrixXd impulse = Eigen::MatrixXd::Zero(1, 20);
    impulse(0, 6) = 1.0;
    const Eigen::MatrixXd resp = aggregate_factors(impulse, Horizon::Quarterly);
    const double expected[] = {1, 2, 3, 2, 1};
    for (int k = 0; k < 5; ++k) CHECK(resp(0, 6 + k) == expected[k]);
    CHECK(resp(0, 11) == 0.0);

    CHECK_THROWS_AS(aggregate_factors(Eigen::MatrixXd::Zero(1, 4), Horizon::Quarterly), DataError);
}

TEST_CASE("aggregated white noise has variance 19")
{
    const Eigen::MatrixXd e = gaussian(1, 400000, 17);
    const Eigen::MatrixXd f = aggregate_factors(e, Horizon::Quarterly).rightCols(400000 - 4);
    const double var = (f.array() - f.mean()).square().mean();
    CHECK(std::abs(var / 19.0 - 1.0) < 0.02);
}

TEST_CASE("systematic sampling picks columns")
{
    Eigen::MatrixXd m(2, 6);
    m << 0, 1, 2, 3, 4, 5, 10, 11, 12, 13, 14, 15;
    const Eigen::MatrixXd s = systematic_sample(m, {2, 5});
    CHECK(s(0, 0) == 2.0);
    CHECK(s(1, 1) == 15.0);
}

TEST_CASE("MA(1) coefficient and error-spectrum weights")
{
    const double b = quarterly_ma_coefficient();
    CHECK(b / (1 + b * b) == doctest::Approx(4.0 / 19.0).epsilon(1e-14));
    CHECK(b == doctest::Approx(0.2208).epsilon(1e-4));
    CHECK(std::abs(b) < 1.0);

    Eigen::VectorXd om(3);
    om << 0.0, kPi / 2, kPi;
    const Eigen::VectorXd w = quarterly_ma_weights(om, b);
    CHECK(w(2) == doctest::Approx((1 - b) * (1 - b)).epsilon(1e-14));
    CHECK(w(2) == doctest::Approx(0.607).epsilon(1e-3));
    CHECK((quarterly_ma_weights(om, 0.0).array() - 1.0).abs().maxCoeff() == 0.0);

    Eigen::VectorXd grid(8);
    for (Index j = 0; j < 8; ++j) grid(j) = 2.0 * kPi * static_cast<double>(j + 1) / 9.0;
    const Eigen::VectorXd wa = ma_weights(Horizon::Annual, grid);
    CHECK((wa.array() > 0.0).all());
    CHECK(wa.mean() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("band indices")
{
    const auto idx = band_indices(24, kPi / 6);
    // omega_j = 2 pi j / 24 < pi/6 for j = 1; above 2 pi - pi/6 for j = 23
    CHECK(idx == std::vector<Index>{1, 23});
    CHECK(band_indices(10, kPi).size() == 9);
    for (Index T : {120, 132, 133, 144}) {
        const auto b = band_indices(T, kPi / 6);
        for (Index j : b) CHECK(std::find(b.begin(), b.end(), T - j) != b.end());
    }
}

TEST_CASE("noiseless band regression recovers the loadings")
{
    const Index Tq = 80;
    Eigen::MatrixXd F(2, Tq);
    for (Index t = 0; t < Tq; ++t) {
        const double tt = static_cast<double>(t);
        F(0, t) = std::cos(2 * kPi * 2 * tt / Tq) + 0.5 * std::sin(2 * kPi * 5 * tt / Tq);
        F(1, t) = std::sin(2 * kPi * 3 * tt / Tq) - 0.2 * std::cos(2 * kPi * 1 * tt / Tq);
    }
    const double mu = 0.004;
    const Eigen::Vector2d theta(0.3, -1.2);
    const Eigen::VectorXd g = (F.transpose() * theta).array() + 9 * mu;
    const BandRegressionFit fit = band_spectrum_fit(g, F, Horizon::Quarterly);
    CHECK(fit.mu == doctest::Approx(mu).epsilon(1e-10));
    CHECK((fit.theta - theta).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(fit.sigma2 < 1e-20);
}

TEST_CASE("unit weights over the full band equal OLS and weights are scale free")
{
    const Index Tq = 50;
    const Eigen::MatrixXd F = gaussian(3, Tq, 4);
    const Eigen::VectorXd g = gaussian(1, Tq, 5).row(0).transpose();
    BandRegressionOptions opt;
    opt.cutoff = kPi;
    opt.weights = Eigen::VectorXd::Ones(Tq - 1);
    const BandRegressionFit fit = band_spectrum_fit(g, F, Horizon::Quarterly, opt);
    CHECK((fit.theta - ols(g, F)).cwiseAbs().maxCoeff() < 1e-8);

    const BandRegressionFit weighted = band_spectrum_fit(g, F, Horizon::Quarterly);
    BandRegressionOptions scaled;
    scaled.weights = 7.5 * weighted.weights;
    const BandRegressionFit rescaled = band_spectrum_fit(g, F, Horizon::Quarterly, scaled);
    CHECK((rescaled.theta - weighted.theta).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(band_spectrum_fit(g, gaussian(3, Tq - 1, 1), Horizon::Quarterly), DataError);
    CHECK_THROWS_AS(band_spectrum_fit(g.head(10), F.leftCols(10), Horizon::Quarterly), NumericalError);
}

TEST_CASE("nowcast assembly")
{
    BandRegressionFit fq, fa;
    fq.mu = fa.mu = 0.002;
    fq.theta = fa.theta = Eigen::VectorXd::Zero(1);
    const Eigen::MatrixXd f = gaussian(1, 40, 3);
    const NowcastSeries flat = build_nowcasts(fq, fa, f);
    CHECK((flat.monthly.array() - 0.002).abs().maxCoeff() < 1e-15);
    CHECK(std::abs(flat.qoq(39) - 9 * 0.002) < 1e-15);
    CHECK(std::abs(flat.yoy(39) - 36 * 0.002) < 1e-15);
    CHECK(is_missing(flat.qoq(3)));

    fq.theta = fa.theta = Eigen::VectorXd::Constant(1, 0.5);
    const NowcastSeries one = build_nowcasts(fq, fa, Eigen::MatrixXd::Ones(1, 40));
    for (Index t = 4; t < 40; ++t) CHECK(one.qoq(t) == doctest::Approx(9 * 0.002 + 0.5 * 9));
}

TEST_CASE("nowcast tracks the simulated medium-to-long-run component")
{
    DgpSpec spec;
    spec.n = 100;
    spec.T = 2000;
    spec.seed = 5;
    const SimulatedPanel sp = simulate_panel(spec);
    const SimulatedGdp gdp = simulate_gdp(sp.truth, spec, Eigen::VectorXd::Constant(1, 0.003), 0.002, 0.003, 9);
    ModelOptions opt;
    opt.ranks.q = spec.q;
    opt.ranks.r = spec.r;
    opt.ranks.r_phi = spec.r_phi;
    const ModelFit fit = run_uscoin(sp.panel.x, gdp_samples(gdp.target, 0, spec.T), opt);
    const Index first = 4;
    const Eigen::VectorXd a = fit.nowcast.qoq.segment(first, spec.T - first);
    const Eigen::VectorXd b = gdp.m2lr_qoq.segment(first, spec.T - first);
    const Eigen::VectorXd da = a.array() - a.mean(), db = b.array() - b.mean();
    CHECK(da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm()) > 0.9);
}
