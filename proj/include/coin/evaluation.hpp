#pragma once

// Pseudo-real-time rolling nowcasts for US COIN and its competitors, and accuracy and
// calibration statistics against the oracle target.

#include "coin/model.hpp"
#include "coin/target.hpp"

#include <optional>
#include <string>
#include <vector>

namespace coin {

enum class Method { USCOIN, BP, CF, SW };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct RollingPlan {
    int window_length = 241;
    YearMonth test_start{1980, 1};
    YearMonth test_end{2018, 12};
};

struct RollingOptions {
    ModelOptions model;
    std::optional<RankSelection> ranks;   // otherwise selected on the first window and held fixed
    std::optional<double> cf_coefficient; // fixes the AR(1) slope of CF (intercept keeps the window mean)
    int extension_quarters = 12;
    double cutoff = kPi / 6;
    int half_width = 36;
};

// Per window ending at month s: Ĉ_s(s) in `nowcast` and the same window's value at s-1 in
// `previous`.
struct RollingPath {
    Method method = Method::USCOIN;
    std::vector<YearMonth> dates;
    Eigen::VectorXd nowcast_q, previous_q;
    Eigen::VectorXd nowcast_a, previous_a;
    RankSelection ranks;
};

// Z-scores each row (divisor T).
Eigen::MatrixXd zscore_rows(const Eigen::MatrixXd& x);

// Quarterly growth extended by `horizon` chained AR(1) forecasts fitted by least squares with
// intercept; a fixed slope keeps the intercept at mean*(1-slope). Slope 0 extends by the mean.
Eigen::VectorXd ar1_extend(const Eigen::VectorXd& g, int horizon, std::optional<double> slope = std::nullopt);

// Low-pass filtered monthly interpolant of quarterly samples (month 3*tau+2 holds sample tau),
// carried extra_months past the last sample. Months without filter support are missing.
Eigen::VectorXd filtered_interpolant(const Eigen::VectorXd& quarterly, int extra_months, double cutoff,
                                     int half_width);

RollingPath rolling_run(const Panel& panel, const QuarterlyTarget& gdp, const RollingPlan& plan, Method method,
                        const RollingOptions& options);

struct AccuracyStats {
    double msne = 0.0;
    double msre = 0.0;
    Index count = 0;
};

// Relative to the target variance over the dates where the target is defined.
AccuracyStats msne_msre(const Eigen::VectorXd& nowcast, const Eigen::VectorXd& previous,
                        const Eigen::VectorXd& target);

struct DieboldMariano {
    double stat = 0.0;
    double p_value = 1.0;
    bool degenerate = false;
    int lags = 0;
};

// hac_lags < 0 selects ceil(T^{1/3}).
DieboldMariano diebold_mariano(const Eigen::VectorXd& loss1, const Eigen::VectorXd& loss2, int hac_lags = -1);

// Fraction of draws (rows) below the target, ties counted half. NaN where the target is missing.
Eigen::VectorXd pit_values(const Eigen::MatrixXd& draws, const Eigen::VectorXd& target);

struct PitCalibration {
    Eigen::VectorXd pits;    // finite PIT values used
    Eigen::VectorXd grid;    // 100 points in (0, 1]
    Eigen::VectorXd cdf;     // empirical CDF on the grid
    double band = 0.0;       // 1.36/sqrt(T)
    double ks = 0.0;         // sup |F(u) - u|
    bool inside() const { return ks <= band; }
};

PitCalibration pit_calibration(const Eigen::VectorXd& pits);

struct ReportRow {
    Method method;
    Horizon horizon;
    AccuracyStats stats;
};

struct DmEntry {
    Method first;
    Method second;
    Horizon horizon;
    DieboldMariano test;
};

struct EvalReport {
    std::vector<ReportRow> rows;
    std::vector<DmEntry> dm;
    std::vector<RollingPath> paths;
    Eigen::VectorXd target_q;  // aligned with the rolling dates
    Eigen::VectorXd target_a;
    std::vector<YearMonth> dates;
};

// Runs every method on the same plan and target. Test months outside the target's valid
// range are dropped.
EvalReport evaluate(const Panel& panel, const QuarterlyTarget& gdp, RollingPlan plan,
                    const std::vector<Method>& methods, const RollingOptions& options,
                    std::vector<std::string>* warnings = nullptr);

}  // namespace coin
