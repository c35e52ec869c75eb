#include <doctest.h>

#include "coin/simulate.hpp"
#include "coin/target.hpp"

#include <cmath>

using namespace coin;

namespace {

double corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    const Eigen::VectorXd da = a.array() - a.mean(), db = b.array() - b.mean();
    return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

// Share of the periodogram mass of a row at Fourier frequencies below `cut`.
double low_share(const Eigen::VectorXd& y, double cut)
{
    const Index T = y.size();
    const Eigen::VectorXd d = y.array() - y.mean();
    double low = 0.0, total = 0.0;
    for (Index j = 1; j <= T / 2; ++j) {
        const double w = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(T);
        double re = 0.0, im = 0.0;
        for (Index t = 0; t < T; ++t) {
            re += d(t) * std::cos(w * static_cast<double>(t));
            im -= d(t) * std::sin(w * static_cast<double>(t));
        }
        const double p = re * re + im * im;
        total += p;
        if (w < cut) low += p;
    }
    return low / total;
}

}  // namespace

TEST_CASE("DGP settings validation")
{
    DgpSpec s;
    s.ar = 1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = DgpSpec{};
    s.r_phi = 3;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = DgpSpec{};
    s.rho_x = 0.6;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = DgpSpec{};
    s.K = Eigen::MatrixXd::Ones(3, 3);
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK_NOTHROW(DgpSpec{}.validate());
}

TEST_CASE("no idiosyncratic noise and one white factor give a rank-one panel")
{
    DgpSpec s;
    s.n = 12;
    s.T = 400;
    s.q = s.r = s.r_phi = 1;
    s.ar = 0.0;
    s.idio_variance = 0.0;
    const SimulatedPanel sp = simulate_panel(s);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sp.truth.x_raw);
    CHECK(svd.singularValues()(1) / svd.singularValues()(0) < 1e-12);
    CHECK(sp.truth.xi.cwiseAbs().maxCoeff() == 0.0);
    CHECK(sp.truth.psi.cwiseAbs().maxCoeff() == 0.0);
    for (Index i = 1; i < s.n; ++i)
        CHECK(std::abs(corr(sp.truth.x_raw.row(0).transpose(), sp.truth.x_raw.row(i).transpose())) ==
              doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("low-pass factors concentrate below the cutoff")
{
    DgpSpec s;
    s.n = 5;
    s.T = 2400;
    s.ar = 0.0;
    s.seed = 7;
    const SimulatedPanel sp = simulate_panel(s);
    CHECK(low_share(sp.truth.f_low.row(0).transpose(), kPi / 6) >= 0.9);
    CHECK(low_share(sp.truth.f_high.row(1).transpose(), kPi / 6) < 0.1);
}

TEST_CASE("panel layout and seeds")
{
    DgpSpec s;
    s.n = 30;
    s.T = 3000;
    const SimulatedPanel a = simulate_panel(s);
    CHECK(a.panel.n() == 30);
    CHECK(a.panel.T() == 3000);
    CHECK(a.panel.dates.front() == YearMonth{1960, 1});
    CHECK(a.panel.x.rowwise().mean().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(((a.panel.x.rowwise().squaredNorm() / 3000.0).array() - 1.0).abs().maxCoeff() < 1e-12);

    const SimulatedPanel again = simulate_panel(s);
    CHECK(a.panel.x.cwiseEqual(again.panel.x).all());

    DgpSpec other = s;
    other.seed = 2;
    other.loadings = a.truth.loadings;
    const SimulatedPanel b = simulate_panel(other);
    CHECK((a.truth.x_raw - b.truth.x_raw).cwiseAbs().maxCoeff() > 0.1);
    const Eigen::MatrixXd ca = a.truth.x_raw * a.truth.x_raw.transpose() / 3000.0;
    const Eigen::MatrixXd cb = b.truth.x_raw * b.truth.x_raw.transpose() / 3000.0;
    CHECK((ca - cb).norm() / ca.norm() < 0.2);
}

TEST_CASE("sample covariances match the population moments")
{
    DgpSpec s;
    s.n = 8;
    s.T = 60000;
    s.seed = 11;
    const SimulatedPanel sp = simulate_panel(s);
    const PopulationMoments pm = population_moments(s, sp.truth.loadings);
    const auto rel = [](const Eigen::MatrixXd& sample, const Eigen::MatrixXd& pop) {
        return (sample - pop).norm() / pop.norm();
    };
    const double T = static_cast<double>(s.T);
    CHECK(rel(sp.truth.phi * sp.truth.phi.transpose() / T, pm.gamma0_phi) < 0.1);
    CHECK(rel(sp.truth.psi * sp.truth.psi.transpose() / T, pm.gamma0_psi) < 0.1);
    CHECK(rel(sp.truth.xi * sp.truth.xi.transpose() / T, pm.gamma0_xi) < 0.05);
    CHECK(rel(sp.truth.x_raw * sp.truth.x_raw.transpose() / T, pm.gamma0_x) < 0.1);
}

TEST_CASE("smooth and high-frequency components are uncorrelated")
{
    DgpSpec s;
    s.n = 10;
    s.T = 5000;
    s.seed = 6;
    const SimulatedPanel sp = simulate_panel(s);
    const double T = static_cast<double>(s.T);
    const Eigen::MatrixXd cross = sp.truth.phi * sp.truth.psi.transpose() / T;
    const Eigen::VectorXd sd_phi = (sp.truth.phi.rowwise().squaredNorm() / T).cwiseSqrt();
    const Eigen::VectorXd sd_psi = (sp.truth.psi.rowwise().squaredNorm() / T).cwiseSqrt();
    const Eigen::MatrixXd c = sd_phi.cwiseInverse().asDiagonal() * cross * sd_psi.cwiseInverse().asDiagonal();
    CHECK(c.cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("common eigenvalues grow with n and the rest stay bounded")
{
    std::vector<double> top, next;
    for (Index n : {25, 100, 400}) {
        DgpSpec s;
        s.n = n;
        s.seed = 3;
        Eigen::MatrixXd L(n, s.r);
        for (Index i = 0; i < n; ++i) L.row(i) << std::cos(0.37 * static_cast<double>(i)), std::sin(0.37 * static_cast<double>(i)) + 0.5;
        const PopulationMoments pm = population_moments(s, L);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pm.gamma0_x, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = es.eigenvalues().reverse();
        top.push_back(ev(s.r - 1));
        next.push_back(ev(s.r));
    }
    CHECK(top[1] / top[0] > 3.0);
    CHECK(top[2] / top[1] > 3.0);
    CHECK(next[2] < 4.0);
}

TEST_CASE("GDP growth aggregates exactly")
{
    DgpSpec s;
    s.n = 10;
    s.T = 240;
    const SimulatedPanel sp = simulate_panel(s);
    const SimulatedGdp noiseless = simulate_gdp(sp.truth, s, Eigen::VectorXd::Constant(1, 0.004), 0.002, 0.0, 1);
    CHECK((noiseless.dy - noiseless.m2lr_monthly).cwiseAbs().maxCoeff() == 0.0);
    for (Index tau = 1; tau < noiseless.target.size(); ++tau) {
        const Index m = noiseless.target.quarter_end_months[static_cast<std::size_t>(tau)];
        CHECK(noiseless.target.g(tau) == doctest::Approx(noiseless.m2lr_qoq(m)).epsilon(1e-9));
        if (tau >= 4) CHECK(noiseless.target.a(tau) == doctest::Approx(noiseless.m2lr_yoy(m)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(simulate_gdp(sp.truth, s, Eigen::VectorXd::Ones(2), 0.0, 0.0, 1), ConfigError);
}

TEST_CASE("GDP without a smooth signal is pure noise")
{
    DgpSpec s;
    s.n = 10;
    s.T = 6000;
    const SimulatedPanel sp = simulate_panel(s);
    const SimulatedGdp g = simulate_gdp(sp.truth, s, Eigen::VectorXd::Zero(1), 0.002, 0.01, 4);
    CHECK((g.m2lr_monthly.array() - 0.002).abs().maxCoeff() < 1e-15);
    const Eigen::VectorXd e = g.dy.array() - 0.002;
    CHECK(std::sqrt(e.squaredNorm() / 6000.0) == doctest::Approx(0.01).epsilon(0.05));
    CHECK(std::abs(corr(e.head(5999), e.tail(5999))) < 0.05);
}
