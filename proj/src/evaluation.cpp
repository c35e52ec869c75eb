#include "coin/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace coin {

std::string_view to_string(Method m)
{
    switch (m) {
    case Method::USCOIN: return "USCOIN";
    case Method::BP: return "BP";
    case Method::CF: return "CF";
    case Method::SW: return "SW";
    }
    return "?";
}

Method parse_method(std::string_view name)
{
    std::string up(name);
    for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "USCOIN" || up == "US_COIN" || up == "COIN") return Method::USCOIN;
    if (up == "BP") return Method::BP;
    if (up == "CF") return Method::CF;
    if (up == "SW") return Method::SW;
    throw ConfigError("evaluation", "unknown method '" + std::string(name) + "'");
}

Eigen::MatrixXd zscore_rows(const Eigen::MatrixXd& x)
{
    const double T = static_cast<double>(x.cols());
    const Eigen::VectorXd mean = x.rowwise().mean();
    Eigen::MatrixXd out = x.colwise() - mean;
    const Eigen::VectorXd sd = (out.rowwise().squaredNorm() / T).cwiseSqrt();
    for (Index i = 0; i < x.rows(); ++i) {
        if (!(sd(i) > 0.0)) throw DataError("evaluation", "series " + std::to_string(i) + " is constant in the window");
        out.row(i) /= sd(i);
    }
    return out;
}

Eigen::VectorXd ar1_extend(const Eigen::VectorXd& g, int horizon, std::optional<double> slope)
{
    const Index Q = g.size();
    if (Q < 3) throw DataError("evaluation", "too few quarters for an AR(1) extension");
    double intercept, phi;
    if (slope) {
        phi = *slope;
        intercept = g.mean() * (1.0 - phi);
    } else {
        const Eigen::VectorXd y = g.tail(Q - 1), lag = g.head(Q - 1);
        const double my = y.mean(), ml = lag.mean();
        const double sxx = (lag.array() - ml).square().sum();
        phi = sxx > 0.0 ? ((lag.array() - ml) * (y.array() - my)).sum() / sxx : 0.0;
        intercept = my - phi * ml;
    }
    Eigen::VectorXd out(Q + horizon);
    out.head(Q) = g;
    for (Index k = Q; k < Q + horizon; ++k) out(k) = intercept + phi * out(k - 1);
    return out;
}

Eigen::VectorXd filtered_interpolant(const Eigen::VectorXd& quarterly, int extra_months, double cutoff, int half_width)
{
    return bk_lowpass(wks_interpolate(quarterly, 0, extra_months), cutoff, half_width);
}

namespace {

// Consecutive quarters observed inside [first, last] (panel months).
struct WindowQuarters {
    Eigen::VectorXd g;
    Eigen::VectorXd g_before;  // up to three growth rates preceding the window, for annual sums
    Index last_month = -1;
};

WindowQuarters window_quarters(const QuarterlyTarget& gdp, Index first, Index last)
{
    std::vector<double> g;
    Index first_q = -1;
    WindowQuarters out;
    for (Index i = 0; i < gdp.size(); ++i) {
        const Index month = gdp.quarter_end_months[static_cast<std::size_t>(i)];
        if (month < first || month > last || is_missing(gdp.g(i))) continue;
        if (first_q < 0) first_q = i;
        g.push_back(gdp.g(i));
        out.last_month = month;
    }
    out.g = Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Index>(g.size()));
    std::vector<double> before;
    for (Index i = std::max<Index>(0, first_q - 3); i < first_q; ++i)
        if (!is_missing(gdp.g(i))) before.push_back(gdp.g(i));
    out.g_before = Eigen::Map<Eigen::VectorXd>(before.data(), static_cast<Index>(before.size()));
    return out;
}

// Four-quarter sums of growth, aligned with `g`; entries without four terms are missing.
Eigen::VectorXd annual_from_quarterly(const Eigen::VectorXd& before, const Eigen::VectorXd& g)
{
    Eigen::VectorXd all(before.size() + g.size());
    all << before, g;
    Eigen::VectorXd out(g.size());
    for (Index k = 0; k < g.size(); ++k) {
        const Index j = k + before.size();
        out(k) = j >= 3 ? all.segment(j - 3, 4).sum() : kMissing;
    }
    return out;
}

struct PointPair {
    double now = kMissing;
    double previous = kMissing;
};

PointPair filter_extension(const Eigen::VectorXd& quarterly, Index last_month, Index s, double cutoff, int half_width,
                           int extension)
{
    // Local calendar: month 3*tau+2 of the extended series carries sample tau; the last
    // observed sample sits at panel month last_month.
    const Index Q = quarterly.size() - extension;
    const Index origin = last_month - (3 * (Q - 1) + 2);
    const int extra = static_cast<int>(std::max<Index>(0, s + half_width - (last_month + 3 * extension)));
    const Eigen::VectorXd path = filtered_interpolant(quarterly, extra, cutoff, half_width);
    PointPair p;
    const Index at = s - origin;
    if (at >= 0 && at < path.size()) p.now = path(at);
    if (at - 1 >= 0 && at - 1 < path.size()) p.previous = path(at - 1);
    return p;
}

}  // namespace

RollingPath rolling_run(const Panel& panel, const QuarterlyTarget& gdp, const RollingPlan& plan, Method method,
                        const RollingOptions& options)
{
    const Index W = plan.window_length;
    if (W < 24) throw ConfigError("evaluation", "rolling window must cover at least two years");
    if (panel.dates.empty()) throw DataError("evaluation", "empty panel");
    const Index s0 = plan.test_start - panel.dates.front();
    const Index s1 = plan.test_end - panel.dates.front();
    if (s0 - W + 1 < 0 || s1 >= panel.T() || s1 < s0)
        throw ConfigError("evaluation", "test range " + plan.test_start.str() + ".." + plan.test_end.str() +
                                            " is not covered by the panel with window " + std::to_string(W));

    RollingPath path;
    path.method = method;
    const Index count = s1 - s0 + 1;
    path.nowcast_q = path.previous_q = path.nowcast_a = path.previous_a = Eigen::VectorXd::Constant(count, kMissing);

    const bool factor_method = method == Method::USCOIN || method == Method::SW;
    std::optional<RankSelection> ranks = options.ranks;
    for (Index k = 0; k < count; ++k) {
        const Index s = s0 + k;
        const Index start = s - W + 1;
        path.dates.push_back(panel.dates[static_cast<std::size_t>(s)]);

        if (factor_method) {
            const Eigen::MatrixXd x = zscore_rows(panel.x.middleCols(start, W));
            const GdpData data = gdp_samples(gdp, start, W);
            if (!ranks) {
                const auto covs = cross_covariances(x, options.model.M_T);
                ranks = choose_ranks(x, bartlett_spectrum(covs, options.model.m), options.model);
            }
            const ModelFit fit = run_uscoin(x, data, options.model,
                                            method == Method::USCOIN ? FactorKind::Smooth : FactorKind::Principal, ranks);
            path.nowcast_q(k) = fit.nowcast.qoq(W - 1);
            path.previous_q(k) = fit.nowcast.qoq(W - 2);
            path.nowcast_a(k) = fit.nowcast.yoy(W - 1);
            path.previous_a(k) = fit.nowcast.yoy(W - 2);
            continue;
        }

        const WindowQuarters wq = window_quarters(gdp, start, s);
        const std::optional<double> slope =
            method == Method::BP ? std::optional<double>(0.0) : options.cf_coefficient;
        const int ext = options.extension_quarters;
        const Eigen::VectorXd g_ext = ar1_extend(wq.g, ext, slope);
        const Eigen::VectorXd a_all = annual_from_quarterly(wq.g_before, g_ext);
        Index a_first = 0;
        while (a_first < a_all.size() && is_missing(a_all(a_first))) ++a_first;

        const PointPair q = filter_extension(g_ext, wq.last_month, s, options.cutoff, options.half_width, ext);
        const PointPair a = filter_extension(a_all.tail(a_all.size() - a_first), wq.last_month, s, options.cutoff,
                                             options.half_width, ext);
        path.nowcast_q(k) = q.now;
        path.previous_q(k) = q.previous;
        path.nowcast_a(k) = a.now;
        path.previous_a(k) = a.previous;
    }
    if (ranks) path.ranks = *ranks;
    return path;
}

AccuracyStats msne_msre(const Eigen::VectorXd& nowcast, const Eigen::VectorXd& previous, const Eigen::VectorXd& target)
{
    const Index T = target.size();
    if (nowcast.size() != T || previous.size() != T)
        throw DataError("evaluation", "nowcast, revision and target paths are misaligned");
    std::vector<Index> idx;
    for (Index t = 0; t < T; ++t)
        if (std::isfinite(target(t)) && std::isfinite(nowcast(t))) idx.push_back(t);
    if (idx.empty()) throw DataError("evaluation", "nowcast and target do not overlap");

    double mean = 0.0;
    for (Index t : idx) mean += target(t);
    mean /= static_cast<double>(idx.size());
    double var = 0.0, err = 0.0, rev = 0.0;
    Index nrev = 0;
    for (Index t : idx) {
        var += (target(t) - mean) * (target(t) - mean);
        err += (nowcast(t) - target(t)) * (nowcast(t) - target(t));
        if (t > 0 && std::isfinite(previous(t)) && std::isfinite(nowcast(t - 1))) {
            rev += (previous(t) - nowcast(t - 1)) * (previous(t) - nowcast(t - 1));
            ++nrev;
        }
    }
    const double n = static_cast<double>(idx.size());
    var /= n;
    if (!(var > 0.0)) throw DataError("evaluation", "target has zero variance over the test range");
    AccuracyStats s;
    s.count = static_cast<Index>(idx.size());
    s.msne = err / n / var;
    s.msre = nrev > 0 ? rev / static_cast<double>(nrev) / var : 0.0;
    return s;
}

DieboldMariano diebold_mariano(const Eigen::VectorXd& loss1, const Eigen::VectorXd& loss2, int hac_lags)
{
    const Index T = loss1.size();
    if (loss2.size() != T) throw DataError("evaluation", "loss series have different lengths");
    if (T < 30) throw DataError("evaluation", "Diebold-Mariano needs at least 30 observations");
    DieboldMariano out;
    out.lags = hac_lags >= 0 ? hac_lags : static_cast<int>(std::ceil(std::cbrt(static_cast<double>(T))));
    const Eigen::VectorXd d = loss1 - loss2;
    const double mean = d.mean();
    const Eigen::VectorXd dc = d.array() - mean;
    const double n = static_cast<double>(T);
    double lrv = dc.squaredNorm() / n;
    for (int k = 1; k <= out.lags && k < T; ++k) {
        const double gk = dc.tail(T - k).dot(dc.head(T - k)) / n;
        lrv += 2.0 * (1.0 - k / (out.lags + 1.0)) * gk;
    }
    const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    if (!(lrv > 1e-24 * scale * scale)) {
        out.degenerate = true;
        return out;
    }
    out.stat = mean / std::sqrt(lrv / n);
    out.p_value = std::erfc(std::abs(out.stat) / std::sqrt(2.0));
    return out;
}

Eigen::VectorXd pit_values(const Eigen::MatrixXd& draws, const Eigen::VectorXd& target)
{
    if (draws.rows() == 0) throw DataError("evaluation", "empty ensemble");
    if (draws.cols() != target.size()) throw DataError("evaluation", "ensemble and target are misaligned");
    Eigen::VectorXd out = Eigen::VectorXd::Constant(target.size(), kMissing);
    for (Index t = 0; t < target.size(); ++t) {
        if (!std::isfinite(target(t))) continue;
        double below = 0.0, valid = 0.0;
        for (Index b = 0; b < draws.rows(); ++b) {
            const double v = draws(b, t);
            if (!std::isfinite(v)) continue;
            valid += 1.0;
            if (v < target(t)) below += 1.0;
            else if (v == target(t)) below += 0.5;
        }
        if (valid > 0.0) out(t) = below / valid;
    }
    return out;
}

PitCalibration pit_calibration(const Eigen::VectorXd& pits)
{
    std::vector<double> v;
    for (Index i = 0; i < pits.size(); ++i)
        if (std::isfinite(pits(i))) v.push_back(pits(i));
    if (v.empty()) throw DataError("evaluation", "no PIT values");
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());

    PitCalibration out;
    out.pits = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
    out.grid = Eigen::VectorXd::LinSpaced(100, 0.01, 1.0);
    out.cdf.resize(100);
    for (Index k = 0; k < 100; ++k) {
        const auto it = std::upper_bound(v.begin(), v.end(), out.grid(k));
        out.cdf(k) = static_cast<double>(it - v.begin()) / n;
    }
    out.band = 1.36 / std::sqrt(n);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double hi = static_cast<double>(i + 1) / n - v[i];
        const double lo = v[i] - static_cast<double>(i) / n;
        out.ks = std::max({out.ks, hi, lo});
    }
    return out;
}

EvalReport evaluate(const Panel& panel, const QuarterlyTarget& gdp, RollingPlan plan, const std::vector<Method>& methods,
                    const RollingOptions& options, std::vector<std::string>* warnings)
{
    if (methods.empty()) throw ConfigError("evaluation", "at least one method is required");
    TargetOptions topt;
    topt.cutoff = options.cutoff;
    topt.half_width = options.half_width;
    const TargetSeries target = build_target(gdp, topt);
    if (target.first_valid < 0) throw DataError("evaluation", "target has no valid months");

    auto warn = [&](const std::string& w) {
        if (warnings) warnings->push_back(w);
    };
    const YearMonth valid_first = target.dates[static_cast<std::size_t>(target.first_valid)];
    const YearMonth valid_last = target.dates[static_cast<std::size_t>(target.last_valid)];
    const YearMonth feasible_first = panel.dates.front() + (plan.window_length - 1);
    const YearMonth lo = std::max({plan.test_start, valid_first, feasible_first});
    const YearMonth hi = std::min({plan.test_end, valid_last, panel.dates.back()});
    if (lo != plan.test_start || hi != plan.test_end)
        warn("test range trimmed from " + plan.test_start.str() + ".." + plan.test_end.str() + " to " + lo.str() +
             ".." + hi.str());
    if (hi < lo) throw DataError("evaluation", "test range does not overlap the target's valid range");
    plan.test_start = lo;
    plan.test_end = hi;

    EvalReport report;
    const Index count = hi - lo + 1;
    report.target_q.resize(count);
    report.target_a.resize(count);
    for (Index k = 0; k < count; ++k) {
        const YearMonth d = lo + static_cast<int>(k);
        report.dates.push_back(d);
        const Index at = d - target.dates.front();
        report.target_q(k) = target.qoq_target(at);
        report.target_a(k) = target.yoy_target(at);
    }

    RollingOptions opt = options;
    for (Method m : methods) {
        RollingPath p = rolling_run(panel, gdp, plan, m, opt);
        if ((m == Method::USCOIN || m == Method::SW) && !opt.ranks) opt.ranks = p.ranks;
        report.rows.push_back({m, Horizon::Quarterly, msne_msre(p.nowcast_q, p.previous_q, report.target_q)});
        report.rows.push_back({m, Horizon::Annual, msne_msre(p.nowcast_a, p.previous_a, report.target_a)});
        report.paths.push_back(std::move(p));
    }

    for (Horizon h : {Horizon::Quarterly, Horizon::Annual}) {
        const Eigen::VectorXd& tgt = h == Horizon::Quarterly ? report.target_q : report.target_a;
        for (std::size_t i = 0; i < report.paths.size(); ++i)
            for (std::size_t j = i + 1; j < report.paths.size(); ++j) {
                const auto& a = h == Horizon::Quarterly ? report.paths[i].nowcast_q : report.paths[i].nowcast_a;
                const auto& b = h == Horizon::Quarterly ? report.paths[j].nowcast_q : report.paths[j].nowcast_a;
                std::vector<double> l1, l2;
                for (Index t = 0; t < tgt.size(); ++t) {
                    if (!std::isfinite(tgt(t)) || !std::isfinite(a(t)) || !std::isfinite(b(t))) continue;
                    l1.push_back((a(t) - tgt(t)) * (a(t) - tgt(t)));
                    l2.push_back((b(t) - tgt(t)) * (b(t) - tgt(t)));
                }
                if (l1.size() < 30) continue;
                const Eigen::VectorXd e1 = Eigen::Map<Eigen::VectorXd>(l1.data(), static_cast<Index>(l1.size()));
                const Eigen::VectorXd e2 = Eigen::Map<Eigen::VectorXd>(l2.data(), static_cast<Index>(l2.size()));
                report.dm.push_back({report.paths[i].method, report.paths[j].method, h, diebold_mariano(e1, e2)});
            }
    }
    return report;
}

}  // namespace coin
