#pragma once

#include "coin/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coin {

// Monthly panel as read from disk, before transformation. Missing cells are NaN.
struct RawPanel {
    std::vector<std::string> series_ids;
    std::vector<int> tcodes;               // one per column, in 1..7
    Eigen::MatrixXd observations;          // T_raw x n_raw
    std::vector<YearMonth> dates;          // consecutive months

    Index n() const { return observations.cols(); }
    Index T() const { return observations.rows(); }

    // Throws DataError if the invariants do not hold.
    void validate() const;
};

// Standardized n x T panel; column t is x_t.
struct Panel {
    Eigen::MatrixXd x;
    std::vector<YearMonth> dates;
    Eigen::VectorXd means;
    Eigen::VectorXd stds;
    std::vector<std::string> series_ids;

    Index n() const { return x.rows(); }
    Index T() const { return x.cols(); }
};

struct DateRange {
    YearMonth first;
    YearMonth last;
};

// Series the empirical application leaves out of the FRED-MD panel (starred entries).
std::vector<std::string> default_excluded_series();

struct IngestConfig {
    std::optional<YearMonth> start;
    std::optional<YearMonth> end;
    std::vector<std::string> exclude = default_excluded_series();
};

// Stationarity transform by McCracken-Ng code:
//   1 x, 2 dx, 3 d2x, 4 log x, 5 dlog x, 6 d2log x, 7 d(x_t/x_{t-1} - 1).
Eigen::VectorXd apply_tcode(const Eigen::VectorXd& series, int tcode, std::string_view name = {});

RawPanel read_fred_md(std::istream& in, const IngestConfig& config = {});
RawPanel load_fred_md(const std::filesystem::path& path, const IngestConfig& config = {});

// Applies every column's tcode; the result carries tcode 1 everywhere.
RawPanel transform(const RawPanel& raw);

// Transforms, restricts to `window`, trims leading rows with missing values and z-scores
// each series (divisor T). Interior missing values and constant series are data errors.
Panel standardize(const RawPanel& raw, std::optional<DateRange> window = std::nullopt);

// Quarterly GDP levels indexed by quarter.
struct QuarterlySeries {
    std::vector<YearMonth> dates;  // as read: quarter start or quarter end month
    Eigen::VectorXd levels;
};

QuarterlySeries read_quarterly_csv(std::istream& in);
QuarterlySeries load_quarterly_csv(const std::filesystem::path& path);

struct QuarterlyTarget {
    Eigen::VectorXd g;                       // log growth on previous quarter, g(0) missing
    Eigen::VectorXd a;                       // log growth on same quarter a year ago, first 4 missing
    std::vector<YearMonth> quarter_end;      // third month of each quarter
    std::vector<Index> quarter_end_months;   // position in the panel calendar, -1 outside

    Index size() const { return g.size(); }
};

QuarterlyTarget build_quarterly_target(const Eigen::VectorXd& gdp_levels,
                                       const std::vector<YearMonth>& quarter_dates,
                                       const std::vector<YearMonth>& panel_dates);

inline QuarterlyTarget build_quarterly_target(const QuarterlySeries& gdp,
                                              const std::vector<YearMonth>& panel_dates)
{
    return build_quarterly_target(gdp.levels, gdp.dates, panel_dates);
}

}  // namespace coin
