#include "coin/simulate.hpp"

#include "coin/nowcast.hpp"
#include "coin/target.hpp"

#include <cmath>
#include <random>

namespace coin {

void DgpSpec::validate() const
{
    if (n < 1 || T < 1) throw ConfigError("simulate", "n and T must be positive");
    if (q < 1 || r < 1) throw ConfigError("simulate", "q and r must be positive");
    if (r_phi < 0 || r_phi > r) throw ConfigError("simulate", "r_phi must lie in [0, r]");
    if (!(std::abs(ar) < 1.0)) throw ConfigError("simulate", "factor VAR D(L) is not stable (|ar| >= 1)");
    if (!(std::abs(rho_xi) < 1.0)) throw ConfigError("simulate", "idiosyncratic AR coefficient must be inside (-1, 1)");
    if (rho_x < 0.0 || rho_x > 0.5) throw ConfigError("simulate", "spatial correlation rho_x must lie in [0, 0.5]");
    if (!(idio_variance >= 0.0)) throw ConfigError("simulate", "idiosyncratic variance must be non-negative");
    if (burn_in < 0) throw ConfigError("simulate", "burn-in must be non-negative");
    if (K.size() != 0 && (K.rows() != r || K.cols() != q)) throw ConfigError("simulate", "K must be r x q");
    if (loadings && (loadings->rows() != n || loadings->cols() != r))
        throw ConfigError("simulate", "loadings must be n x r");
}

Eigen::MatrixXd DgpSpec::shock_loadings() const
{
    if (K.size() != 0) return K;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(r, q);
    for (int i = 0; i < r; ++i) k(i, i % q) = 1.0;
    return k;
}

Eigen::MatrixXd DgpTruth::smooth_factors(const DgpSpec& spec) const
{
    return spec.split ? Eigen::MatrixXd(f_low.topRows(spec.r_phi)) : f_low;
}

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
}

double binomial(int n, int k)
{
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

// y = (numerator(L) / phi(L)) e, applied along each row.
Eigen::MatrixXd rational_filter(const Eigen::MatrixXd& e, const Eigen::VectorXd& numerator, const Eigen::VectorXd& phi)
{
    const Index T = e.cols();
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(e.rows(), T);
    for (Index t = 0; t < T; ++t) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(e.rows());
        for (Index k = 0; k < numerator.size() && k <= t; ++k) acc += numerator(k) * e.col(t - k);
        for (Index k = 1; k < phi.size() && k <= t; ++k) acc -= phi(k) * y.col(t - k);
        y.col(t) = acc / phi(0);
    }
    return y;
}

Eigen::MatrixXd toeplitz_decay(Index n, double rho)
{
    Eigen::MatrixXd m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    return m;
}

// Rows that carry the low (or high) part of the shocks.
Eigen::VectorXd part_mask(const DgpSpec& spec, bool low)
{
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(spec.r);
    if (!spec.split) return mask;
    for (int i = 0; i < spec.r; ++i) mask(i) = ((i < spec.r_phi) == low) ? 1.0 : 0.0;
    return mask;
}

Eigen::MatrixXd draw_loadings(const DgpSpec& spec)
{
    if (spec.loadings) return *spec.loadings;
    auto rng = make_rng(spec.seed, 0);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd L(spec.n, spec.r);
    for (Index j = 0; j < L.cols(); ++j)
        for (Index i = 0; i < L.rows(); ++i) L(i, j) = normal(rng);
    return L;
}

}  // namespace

SimulatedPanel simulate_panel(const DgpSpec& spec)
{
    spec.validate();
    const Index total = spec.T + spec.burn_in;
    const ButterworthSpec bw = spectral_factorize(spec.s, spec.theta_c);
    const Eigen::MatrixXd K = spec.shock_loadings();

    SimulatedPanel out;
    DgpTruth& truth = out.truth;
    truth.loadings = draw_loadings(spec);

    auto rng = make_rng(spec.seed, 1);
    std::normal_distribution<double> normal;
    auto gaussian = [&](Index rows, Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Index t = 0; t < cols; ++t)
            for (Index i = 0; i < rows; ++i) m(i, t) = normal(rng);
        return m;
    };
    const Eigen::MatrixXd eta = gaussian(spec.q, total);
    const Eigen::MatrixXd zeta = gaussian(spec.q, total);
    const Eigen::MatrixXd idio = gaussian(spec.n, total);

    Eigen::VectorXd low_num(spec.s + 1), high_num(spec.s + 1);
    for (int k = 0; k <= spec.s; ++k) {
        low_num(k) = binomial(spec.s, k);
        high_num(k) = std::sqrt(bw.varsigma) * binomial(spec.s, k) * ((k % 2 == 0) ? 1.0 : -1.0);
    }
    const Eigen::MatrixXd low = rational_filter(eta, low_num, bw.phi_coeffs);
    const Eigen::MatrixXd high = rational_filter(zeta, high_num, bw.phi_coeffs);

    Eigen::VectorXd ar_den(2);
    ar_den << 1.0, -spec.ar;
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    const Eigen::MatrixXd f_low = part_mask(spec, true).asDiagonal() * rational_filter(K * low, one, ar_den);
    const Eigen::MatrixXd f_high = part_mask(spec, false).asDiagonal() * rational_filter(K * high, one, ar_den);

    // xi_t = rho_xi xi_{t-1} + e_t, Var(e) = (1 - rho_xi^2) idio_variance R(rho_x)
    const Eigen::MatrixXd chol = toeplitz_decay(spec.n, spec.rho_x).llt().matrixL();
    const double innov = std::sqrt((1.0 - spec.rho_xi * spec.rho_xi) * spec.idio_variance);
    Eigen::MatrixXd xi(spec.n, total);
    Eigen::VectorXd prev = std::sqrt(spec.idio_variance) * (chol * idio.col(0));
    xi.col(0) = prev;
    for (Index t = 1; t < total; ++t) {
        prev = spec.rho_xi * prev + innov * (chol * idio.col(t));
        xi.col(t) = prev;
    }

    const Index b = spec.burn_in;
    truth.f_low = f_low.rightCols(spec.T);
    truth.f_high = f_high.rightCols(spec.T);
    truth.phi = truth.loadings * truth.f_low;
    truth.psi = truth.loadings * truth.f_high;
    truth.chi = truth.phi + truth.psi;
    truth.xi = xi.middleCols(b, spec.T);
    truth.x_raw = truth.chi + truth.xi;

    Panel& p = out.panel;
    p.means = truth.x_raw.rowwise().mean();
    p.x = truth.x_raw.colwise() - p.means;
    p.stds = (p.x.rowwise().squaredNorm() / static_cast<double>(spec.T)).cwiseSqrt();
    for (Index i = 0; i < spec.n; ++i) {
        if (!(p.stds(i) > 0.0)) throw DataError("simulate", "simulated series " + std::to_string(i) + " is constant");
        p.x.row(i) /= p.stds(i);
        p.series_ids.push_back("S" + std::to_string(i + 1));
    }
    for (Index t = 0; t < spec.T; ++t) p.dates.push_back(spec.start + static_cast<int>(t));
    return out;
}

PopulationMoments population_moments(const DgpSpec& spec, const Eigen::MatrixXd& loadings, int grid)
{
    spec.validate();
    const ButterworthSpec bw = spectral_factorize(spec.s, spec.theta_c);
    // (1/2pi) int w(theta)/|1 - ar e^{-i theta}|^2 over (-pi, pi], trapezoid on a periodic grid.
    double low = 0.0, high = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double theta = -kPi + 2.0 * kPi * k / grid;
        const double ar_gain = 1.0 / (1.0 + spec.ar * spec.ar - 2.0 * spec.ar * std::cos(theta));
        const double w = bw.gain(theta);
        low += w * ar_gain;
        high += (1.0 - w) * ar_gain;
    }
    low /= grid;
    high /= grid;

    const Eigen::MatrixXd K = spec.shock_loadings();
    const Eigen::MatrixXd kk = K * K.transpose();
    PopulationMoments m;
    const Eigen::VectorXd ml = part_mask(spec, true), mh = part_mask(spec, false);
    m.factor_cov_low = low * (ml.asDiagonal() * kk * ml.asDiagonal());
    m.factor_cov_high = high * (mh.asDiagonal() * kk * mh.asDiagonal());
    m.gamma0_phi = loadings * m.factor_cov_low * loadings.transpose();
    m.gamma0_psi = loadings * m.factor_cov_high * loadings.transpose();
    m.gamma0_chi = m.gamma0_phi + m.gamma0_psi;
    m.gamma0_xi = spec.idio_variance * toeplitz_decay(spec.n, spec.rho_x);
    m.gamma0_x = m.gamma0_chi + m.gamma0_xi;
    return m;
}

SimulatedGdp simulate_gdp(const DgpTruth& truth, const DgpSpec& spec, const Eigen::VectorXd& theta, double mu,
                          double noise_sd, std::uint64_t seed)
{
    const Eigen::MatrixXd f = truth.smooth_factors(spec);
    if (theta.size() != f.rows()) throw ConfigError("simulate", "GDP loading must have one entry per smooth factor");
    const Index T = f.cols();

    SimulatedGdp out;
    out.m2lr_monthly = (f.transpose() * theta).array() + mu;
    auto rng = make_rng(seed, 2);
    std::normal_distribution<double> normal(0.0, 1.0);
    out.dy = out.m2lr_monthly;
    for (Index t = 0; t < T; ++t) out.dy(t) += noise_sd * normal(rng);

    const AggregationFilter fq = aggregation_filter(Horizon::Quarterly);
    const AggregationFilter fa = aggregation_filter(Horizon::Annual);
    out.m2lr_qoq = (aggregate_factors(f, fq).transpose() * theta).array() + fq.sum() * mu;
    out.m2lr_yoy = (aggregate_factors(f, fa).transpose() * theta).array() + fa.sum() * mu;

    Eigen::VectorXd y(T);
    double acc = 0.0;
    for (Index t = 0; t < T; ++t) y(t) = (acc += out.dy(t));

    std::vector<YearMonth> panel_dates;
    for (Index t = 0; t < T; ++t) panel_dates.push_back(spec.start + static_cast<int>(t));
    Index offset = 0;
    while (offset < T && panel_dates[static_cast<std::size_t>(offset)].month % 3 != 1) ++offset;
    const Index Q = (T - offset) / 3;
    out.levels.resize(Q);
    for (Index tau = 0; tau < Q; ++tau) {
        const Index m0 = offset + 3 * tau;
        out.levels(tau) = std::exp(y(m0) + y(m0 + 1) + y(m0 + 2));
        out.quarter_dates.push_back(panel_dates[static_cast<std::size_t>(m0 + 2)]);
    }
    out.target = build_quarterly_target(out.levels, out.quarter_dates, panel_dates);
    return out;
}

}  // namespace coin
