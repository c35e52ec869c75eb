#include "coin/nowcast.hpp"

#include "coin/target.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>

namespace coin {

AggregationFilter aggregation_filter(Horizon h)
{
    const Eigen::VectorXd three = Eigen::VectorXd::Ones(3);
    const Eigen::VectorXd other = h == Horizon::Quarterly ? three : Eigen::VectorXd::Ones(12);
    AggregationFilter f;
    f.coefficients = Eigen::VectorXd::Zero(three.size() + other.size() - 1);
    for (Index i = 0; i < three.size(); ++i)
        for (Index j = 0; j < other.size(); ++j) f.coefficients(i + j) += three(i) * other(j);
    return f;
}

Eigen::MatrixXd aggregate_factors(const Eigen::MatrixXd& f, const AggregationFilter& filter)
{
    const Index T = f.cols(), span = filter.span();
    if (T <= span)
        throw DataError("nowcast", "factor series of length " + std::to_string(T) + " is shorter than the filter span");
    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(f.rows(), T, kMissing);
    for (Index t = span; t < T; ++t) {
        out.col(t).setZero();
        for (Index k = 0; k <= span; ++k) out.col(t) += filter.coefficients(k) * f.col(t - k);
    }
    return out;
}

Eigen::MatrixXd aggregate_factors(const Eigen::MatrixXd& f, Horizon h)
{
    return aggregate_factors(f, aggregation_filter(h));
}

Eigen::MatrixXd systematic_sample(const Eigen::MatrixXd& series, const std::vector<Index>& columns)
{
    Eigen::MatrixXd out(series.rows(), static_cast<Index>(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
        const Index c = columns[i];
        if (c < 0 || c >= series.cols())
            throw DataError("nowcast", "sampling position " + std::to_string(c) + " outside the monthly calendar");
        out.col(static_cast<Index>(i)) = series.col(c);
    }
    return out;
}

double quarterly_ma_coefficient()
{
    return (19.0 - std::sqrt(297.0)) / 8.0;
}

std::vector<Index> band_indices(Index length, double cutoff)
{
    std::vector<Index> idx;
    for (Index j = 1; j < length; ++j) {
        const Index k = std::min(j, length - j);  // j and length - j are decided together
        const double w = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(length);
        if (cutoff >= kPi || w < cutoff) idx.push_back(j);
    }
    return idx;
}

Eigen::VectorXd quarterly_ma_weights(const Eigen::VectorXd& omegas, double b)
{
    return (1.0 + b * b + 2.0 * b * omegas.array().cos()).matrix();
}

Eigen::VectorXd ma_weights(Horizon h, const Eigen::VectorXd& omegas)
{
    if (h == Horizon::Quarterly) return quarterly_ma_weights(omegas, quarterly_ma_coefficient());
    if (omegas.size() == 0) return omegas;
    Eigen::VectorXd w = fold_spectrum([](double) { return 1.0 / (2.0 * kPi); }, Horizon::Annual, omegas);
    w /= w.mean();
    const double floor = 1e-10 * w.maxCoeff();
    return w.cwiseMax(floor);
}

BandRegressionFit band_spectrum_fit(const Eigen::VectorXd& g, const Eigen::MatrixXd& F, Horizon h,
                                    const BandRegressionOptions& options)
{
    using cd = std::complex<double>;
    const Index T = g.size(), r = F.rows();
    if (F.cols() != T) throw DataError("nowcast", "target and factor samples have different lengths");
    if (!g.allFinite() || !F.allFinite()) throw DataError("nowcast", "band regression inputs must be finite");

    BandRegressionFit fit;
    fit.horizon = h;
    const double cutoff = options.cutoff.value_or(h == Horizon::Quarterly ? kPi / 6 : kPi / 2);
    const std::vector<Index> band = band_indices(T, cutoff);
    const Index nb = static_cast<Index>(band.size());
    if (nb < r + 1)
        throw NumericalError("nowcast", "band holds " + std::to_string(nb) + " Fourier frequencies, fewer than r_phi+1");

    fit.band.resize(nb);
    for (Index i = 0; i < nb; ++i) fit.band(i) = 2.0 * kPi * static_cast<double>(band[i]) / static_cast<double>(T);
    if (options.weights) {
        if (options.weights->size() != nb) throw ConfigError("nowcast", "weight count does not match the band");
        fit.weights = *options.weights;
    } else {
        fit.weights = ma_weights(h, fit.band);
    }
    if ((fit.weights.array() <= 0.0).any()) throw ConfigError("nowcast", "band weights must be positive");

    const AggregationFilter filter = aggregation_filter(h);
    fit.mu = g.mean() / filter.sum();
    const Eigen::VectorXd gd = g.array() - g.mean();
    const Eigen::MatrixXd Fd = F.colwise() - F.rowwise().mean();

    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(r, r);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(r);
    for (Index i = 0; i < nb; ++i) {
        Eigen::VectorXcd e(T);
        for (Index t = 0; t < T; ++t) e(t) = std::polar(1.0, -fit.band(i) * static_cast<double>(t));
        const cd jg = (gd.cast<cd>().array() * e.array()).sum();  // sum_t g_t e^{-i w t}
        const Eigen::VectorXcd jf = Fd.cast<cd>() * e;
        gram += jf * jf.adjoint() / fit.weights(i);
        rhs += jf * std::conj(jg) / fit.weights(i);
    }
    gram = ((gram + gram.adjoint()) / 2.0).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    if (!(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * top)
        throw NumericalError("nowcast", "frequency-domain Gram matrix is rank deficient");

    const Eigen::VectorXcd theta = gram.ldlt().solve(rhs);
    fit.theta = theta.real();
    fit.imag_residue = theta.imag().cwiseAbs().maxCoeff() / std::max(1.0, fit.theta.cwiseAbs().maxCoeff());
    if (fit.imag_residue > 1e-8) throw NumericalError("nowcast", "band regression coefficients are not real (imaginary residue " + std::to_string(fit.imag_residue) + ")");

    const Eigen::VectorXd resid = gd - Fd.transpose() * fit.theta;
    fit.sigma2 = resid.squaredNorm() / static_cast<double>(T) / filter.sum_squares();
    return fit;
}

NowcastSeries build_nowcasts(const BandRegressionFit& fit_q, const BandRegressionFit& fit_a, const Eigen::MatrixXd& f_phi)
{
    if (fit_q.theta.size() != f_phi.rows() || fit_a.theta.size() != f_phi.rows())
        throw DataError("nowcast", "fitted loadings do not match the number of smooth factors");
    const AggregationFilter fq = aggregation_filter(Horizon::Quarterly);
    const AggregationFilter fa = aggregation_filter(Horizon::Annual);

    NowcastSeries out;
    out.monthly = (f_phi.transpose() * fit_q.theta).array() + fit_q.mu;
    out.qoq = (aggregate_factors(f_phi, fq).transpose() * fit_q.theta).array() + fq.sum() * fit_q.mu;
    out.yoy = (aggregate_factors(f_phi, fa).transpose() * fit_a.theta).array() + fa.sum() * fit_a.mu;
    return out;
}

}  // namespace coin
