#include "coin/target.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>

namespace coin {

namespace {

double sinc_kernel(int d)
{
    if (d == 0) return 1.0;
    const double x = kPi * d / 3.0;
    return std::sin(x) / x;
}

// Leading missing entries are skipped; any later gap is an error.
Index first_observed(const Eigen::VectorXd& v, const char* what)
{
    Index start = 0;
    while (start < v.size() && is_missing(v(start))) ++start;
    for (Index i = start; i < v.size(); ++i)
        if (is_missing(v(i))) throw DataError("target", std::string(what) + " has an interior missing value");
    return start;
}

Eigen::VectorXd missing_vector(Index n)
{
    return Eigen::VectorXd::Constant(n, kMissing);
}

}  // namespace

Eigen::VectorXd wks_interpolate(const Eigen::VectorXd& samples, int support, int extra_months)
{
    const Index Q = samples.size();
    if (Q == 0) throw DataError("target", "cannot interpolate an empty series");
    if (!samples.allFinite()) throw DataError("target", "interpolation samples must be finite");
    if (support < 0 || extra_months < 0) throw ConfigError("target", "negative interpolation support");

    const Index months = 3 * Q + extra_months;
    Eigen::VectorXd out = Eigen::VectorXd::Constant(months, samples(Q - 1));
    for (Index t = 0; t <= 3 * (Q - 1) + 2; ++t) {
        Index lo = 0, hi = Q - 1;
        if (support > 0) {
            const Index centre = std::clamp<Index>((t - 2 + 1) / 3, 0, Q - 1);
            lo = std::max<Index>(0, centre - support);
            hi = std::min<Index>(Q - 1, centre + support);
        }
        double num = 0.0, den = 0.0;
        for (Index tau = lo; tau <= hi; ++tau) {
            const double k = sinc_kernel(static_cast<int>(t - (3 * tau + 2)));
            num += k * samples(tau);
            den += k;
        }
        if (std::abs(den) < 1e-8)
            throw NumericalError("target", "interpolation kernel sums to zero at month " + std::to_string(t));
        out(t) = num / den;
    }
    return out;
}

Eigen::VectorXd ideal_lowpass_weights(double cutoff, int half_width)
{
    if (half_width < 0) throw ConfigError("target", "negative filter half-width");
    Eigen::VectorXd w(2 * half_width + 1);
    w(half_width) = cutoff / kPi;
    for (int j = 1; j <= half_width; ++j) {
        const double v = std::sin(cutoff * j) / (kPi * j);
        w(half_width + j) = v;
        w(half_width - j) = v;
    }
    return w;
}

Eigen::VectorXd bk_weights(double cutoff, int half_width)
{
    Eigen::VectorXd w = ideal_lowpass_weights(cutoff, half_width);
    w.array() += (1.0 - w.sum()) / static_cast<double>(w.size());
    return w;
}

double filter_gain(const Eigen::VectorXd& w, double theta)
{
    const Index K = (w.size() - 1) / 2;
    double g = w(K);
    for (Index j = 1; j <= K; ++j) g += (w(K + j) + w(K - j)) * std::cos(theta * static_cast<double>(j));
    return g;
}

Eigen::VectorXd bk_lowpass(const Eigen::VectorXd& x, double cutoff, int half_width)
{
    const Index N = x.size();
    if (N < 2 * half_width + 1)
        throw DataError("target", "series of length " + std::to_string(N) + " is shorter than the filter support " +
                                      std::to_string(2 * half_width + 1));
    if (!x.allFinite()) throw DataError("target", "low-pass filter input must be finite");
    const Eigen::VectorXd w = bk_weights(cutoff, half_width);
    const double mean = x.mean();
    const Eigen::VectorXd y = x.array() - mean;
    Eigen::VectorXd out = missing_vector(N);
    for (Index t = half_width; t < N - half_width; ++t)
        out(t) = mean + w.dot(y.segment(t - half_width, 2 * half_width + 1));
    return out;
}

Eigen::VectorXd lowpass_target(const Eigen::VectorXd& quarterly, const TargetOptions& opt)
{
    const Index Q = quarterly.size();
    const Index start = first_observed(quarterly, "quarterly growth");
    const Eigen::VectorXd v = quarterly.tail(Q - start);
    Eigen::VectorXd out = missing_vector(3 * Q);

    if (opt.ordering == TargetOrdering::InterpolateThenFilter) {
        const Eigen::VectorXd monthly = wks_interpolate(v, opt.support);
        if (monthly.size() < 2 * opt.half_width + 1)
            throw DataError("target", "insufficient history for the target filter support");
        out.segment(3 * start, monthly.size()) = bk_lowpass(monthly, opt.cutoff, opt.half_width);
    } else {
        if (v.size() < 2 * opt.quarterly_half_width + 1)
            throw DataError("target", "insufficient history for the target filter support");
        const Eigen::VectorXd filtered = bk_lowpass(v, opt.quarterly_cutoff, opt.quarterly_half_width);
        const Index K = opt.quarterly_half_width;
        const Eigen::VectorXd inner = filtered.segment(K, v.size() - 2 * K);
        const Eigen::VectorXd monthly = wks_interpolate(inner, opt.support);
        out.segment(3 * (start + K), monthly.size()) = monthly;
    }
    return out;
}

TargetSeries build_target(const QuarterlyTarget& gdp, const TargetOptions& options)
{
    if (gdp.size() == 0) throw DataError("target", "no quarterly observations");
    TargetSeries t;
    t.qoq_target = lowpass_target(gdp.g, options);
    t.yoy_target = lowpass_target(gdp.a, options);
    const YearMonth first = gdp.quarter_end.front() - 2;
    t.dates.reserve(static_cast<std::size_t>(t.qoq_target.size()));
    for (Index i = 0; i < t.qoq_target.size(); ++i) t.dates.push_back(first + static_cast<int>(i));
    for (Index i = 0; i < t.size(); ++i) {
        if (is_missing(t.qoq_target(i)) || is_missing(t.yoy_target(i))) continue;
        if (t.first_valid < 0) t.first_valid = i;
        t.last_valid = i;
    }
    return t;
}

double aggregation_squared_gain(double x, Horizon h)
{
    const double half = std::sin(x / 2.0);
    if (std::abs(half) < 1e-8) return h == Horizon::Quarterly ? 81.0 : 1296.0;
    const double r3 = std::sin(1.5 * x) / half;
    if (h == Horizon::Quarterly) return r3 * r3 * r3 * r3;
    const double r12 = std::sin(6.0 * x) / half;
    return r3 * r3 * r12 * r12;
}

Eigen::VectorXd fold_spectrum(const std::function<double(double)>& sigma, Horizon h, const Eigen::VectorXd& thetas)
{
    Eigen::VectorXd out(thetas.size());
    for (Index i = 0; i < thetas.size(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) {
            double x = (thetas(i) + 2.0 * kPi * j) / 3.0;
            x = std::remainder(x, 2.0 * kPi);  // into [-pi, pi]
            acc += aggregation_squared_gain(x, h) * sigma(x);
        }
        out(i) = acc / 3.0;
    }
    return out;
}

// ---- Butterworth factorization ----

namespace {

using cd = std::complex<double>;

cd eval_poly(const Eigen::VectorXd& c, cd z)
{
    cd acc = 0.0;
    for (Index k = c.size() - 1; k >= 0; --k) acc = acc * z + c(k);
    return acc;
}

double butterworth_target(int s, double varsigma, double theta)
{
    const double c = std::cos(theta);
    return std::pow(2.0 + 2.0 * c, s) + varsigma * std::pow(2.0 - 2.0 * c, s);
}

}  // namespace

double ButterworthSpec::phi_squared_modulus(double theta) const
{
    return std::norm(eval_poly(phi_coeffs, std::polar(1.0, -theta)));
}

double ButterworthSpec::gain(double theta) const
{
    return std::pow(2.0 + 2.0 * std::cos(theta), s) / phi_squared_modulus(theta);
}

ButterworthSpec spectral_factorize(int s, double theta_c)
{
    if (s < 1 || s > 10) throw ConfigError("target", "Butterworth order s must lie in 1..10");
    if (!(theta_c > 0.0) || !(theta_c < kPi)) throw ConfigError("target", "cutoff must lie in (0, pi)");

    ButterworthSpec spec;
    spec.s = s;
    spec.theta_c = theta_c;
    spec.varsigma = std::pow((1.0 + std::cos(theta_c)) / (1.0 - std::cos(theta_c)), s);

    // On the unit circle R = |1+z|^{2s} (1 + (-1)^s (lambda v)^{2s}) with v = (1-z)/(1+z) and
    // lambda = cot(theta_c/2). Its roots in v are closed form; Re v < 0 maps to |z| > 1 and
    // v = -1 to a root at infinity.
    const double lambda = 1.0 / std::tan(theta_c / 2.0);
    std::vector<cd> outside;
    for (int k = 0; k < 2 * s; ++k) {
        const cd v = std::polar(1.0 / lambda, kPi * (2.0 * k + s + 1.0) / (2.0 * s));
        if (v.real() >= 0.0) continue;
        if (std::abs(1.0 + v) < 1e-12) continue;
        outside.push_back((1.0 - v) / (1.0 + v));
    }

    // phi(z) = c prod (1 - z/rho)
    std::vector<cd> coeffs{1.0};
    for (const cd& rho : outside) {
        std::vector<cd> next(coeffs.size() + 1, 0.0);
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            next[k] += coeffs[k];
            next[k + 1] -= coeffs[k] / rho;
        }
        coeffs = std::move(next);
    }
    spec.phi_coeffs = Eigen::VectorXd::Zero(s + 1);
    double total = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        spec.phi_coeffs(static_cast<Index>(k)) = coeffs[k].real();
        total += coeffs[k].real();
    }
    spec.phi_coeffs *= std::pow(2.0, s) / total;

    for (int i = 0; i <= 400; ++i) {
        const double theta = kPi * i / 400.0;
        const double want = butterworth_target(s, spec.varsigma, theta);
        if (std::abs(spec.phi_squared_modulus(theta) - want) > 1e-9 * want)
            throw NumericalError("target", "spectral factorization failed to converge");
    }
    return spec;
}

}  // namespace coin
