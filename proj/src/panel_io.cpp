#include "coin/panel_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace coin {

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    for (auto& s : cells) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    }
    return cells;
}

double parse_cell(const std::string& cell, std::string_view what)
{
    if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == ".")
        return kMissing;
    double v = 0.0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || p != cell.data() + cell.size())
        throw DataError("panel_io", "malformed value '" + cell + "' in " + std::string(what));
    return v;
}

bool blank(const std::string& line)
{
    return line.find_first_not_of(" \t\r,") == std::string::npos;
}

std::string describe(std::string_view name, Index i)
{
    std::string s = name.empty() ? std::string("series") : "series " + std::string(name);
    return s + " at index " + std::to_string(i);
}

}  // namespace

std::vector<std::string> default_excluded_series()
{
    // New orders for consumer goods, nondefense capital goods, trade weighted dollar,
    // consumer sentiment and VIX.
    return {"ACOGNO", "ANDENOx", "TWEXAFEGSMTHx", "UMCSENTx", "VIXCLSx"};
}

void RawPanel::validate() const
{
    if (static_cast<Index>(series_ids.size()) != observations.cols())
        throw DataError("panel_io", "series id count does not match column count");
    if (static_cast<Index>(tcodes.size()) != observations.cols())
        throw DataError("panel_io", "tcode count does not match column count");
    if (static_cast<Index>(dates.size()) != observations.rows())
        throw DataError("panel_io", "date count does not match row count");
    for (int code : tcodes)
        if (code < 1 || code > 7)
            throw DataError("panel_io", "unknown tcode " + std::to_string(code));
    for (std::size_t t = 1; t < dates.size(); ++t)
        if (dates[t] - dates[t - 1] != 1)
            throw DataError("panel_io", "dates are not consecutive months at " + dates[t].str());
    for (Index j = 0; j < observations.cols(); ++j) {
        bool any = false;
        for (Index t = 0; t < observations.rows() && !any; ++t) any = !is_missing(observations(t, j));
        if (!any) throw DataError("panel_io", "series " + series_ids[j] + " has no observations");
    }
}

Eigen::VectorXd apply_tcode(const Eigen::VectorXd& series, int tcode, std::string_view name)
{
    const Index T = series.size();
    Eigen::VectorXd x = series;
    if (tcode < 1 || tcode > 7)
        throw DataError("panel_io", "unknown tcode " + std::to_string(tcode) + " for " + describe(name, 0));

    if (tcode >= 4 && tcode <= 6) {
        for (Index i = 0; i < T; ++i) {
            if (is_missing(x(i))) continue;
            if (x(i) <= 0.0)
                throw DataError("panel_io", "log transform of non-positive value for " + describe(name, i));
            x(i) = std::log(x(i));
        }
    }

    auto diff = [T](const Eigen::VectorXd& v) {
        Eigen::VectorXd d = Eigen::VectorXd::Constant(T, kMissing);
        for (Index i = 1; i < T; ++i) d(i) = v(i) - v(i - 1);  // NaN propagates
        return d;
    };

    switch (tcode) {
    case 1:
    case 4:
        return x;
    case 2:
    case 5:
        return diff(x);
    case 3:
    case 6:
        return diff(diff(x));
    case 7: {
        Eigen::VectorXd rate = Eigen::VectorXd::Constant(T, kMissing);
        for (Index i = 1; i < T; ++i) rate(i) = x(i) / x(i - 1) - 1.0;
        return diff(rate);
    }
    }
    return x;
}

RawPanel read_fred_md(std::istream& in, const IngestConfig& config)
{
    std::string line;
    bool got = false;
    while ((got = static_cast<bool>(std::getline(in, line))) && !line.empty() && line.front() == '#') {}
    if (!got) throw DataError("panel_io", "empty CSV");
    auto header = split_csv_line(line);
    if (header.size() < 2) throw DataError("panel_io", "CSV header has no series columns");

    if (!std::getline(in, line)) throw DataError("panel_io", "missing transform-code row");
    auto codes = split_csv_line(line);
    while (!codes.empty() && codes.back().empty() && codes.size() > header.size()) codes.pop_back();
    if (codes.size() != header.size())
        throw DataError("panel_io", "transform row has " + std::to_string(codes.size() - 1) +
                                        " codes for " + std::to_string(header.size() - 1) + " columns");

    std::vector<std::size_t> keep;
    RawPanel raw;
    for (std::size_t j = 1; j < header.size(); ++j) {
        double code = parse_cell(codes[j], "transform row");
        if (is_missing(code) || code != std::floor(code) || code < 1 || code > 7)
            throw DataError("panel_io", "unknown tcode '" + codes[j] + "' for series " + header[j]);
        if (std::find(config.exclude.begin(), config.exclude.end(), header[j]) != config.exclude.end())
            continue;
        keep.push_back(j);
        raw.series_ids.push_back(header[j]);
        raw.tcodes.push_back(static_cast<int>(code));
    }

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        auto cells = split_csv_line(line);
        if (cells.size() > header.size() || cells.size() < 2)
            throw DataError("panel_io", "line " + std::to_string(lineno) + " has " +
                                            std::to_string(cells.size()) + " cells, expected " +
                                            std::to_string(header.size()));
        cells.resize(header.size());
        YearMonth date = YearMonth::parse(cells[0]);
        if (config.start && date < *config.start) continue;
        if (config.end && date > *config.end) continue;
        raw.dates.push_back(date);
        std::vector<double> row;
        row.reserve(keep.size());
        for (auto j : keep) row.push_back(parse_cell(cells[j], "line " + std::to_string(lineno)));
        rows.push_back(std::move(row));
    }

    raw.observations.resize(static_cast<Index>(rows.size()), static_cast<Index>(keep.size()));
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t j = 0; j < keep.size(); ++j)
            raw.observations(static_cast<Index>(t), static_cast<Index>(j)) = rows[t][j];
    raw.validate();
    return raw;
}

RawPanel load_fred_md(const std::filesystem::path& path, const IngestConfig& config)
{
    std::ifstream in(path);
    if (!in) throw DataError("panel_io", "cannot open " + path.string());
    return read_fred_md(in, config);
}

RawPanel transform(const RawPanel& raw)
{
    RawPanel out = raw;
    for (Index j = 0; j < raw.n(); ++j) {
        out.observations.col(j) = apply_tcode(raw.observations.col(j), raw.tcodes[j], raw.series_ids[j]);
        out.tcodes[j] = 1;
    }
    return out;
}

Panel standardize(const RawPanel& raw, std::optional<DateRange> window)
{
    const bool identity = std::all_of(raw.tcodes.begin(), raw.tcodes.end(), [](int c) { return c == 1; });
    const RawPanel data = identity ? raw : transform(raw);

    Index first = 0;
    Index last = data.T() - 1;
    if (window) {
        if (data.T() == 0 || window->first > data.dates.back() || window->last < data.dates.front() ||
            window->last < window->first)
            throw DataError("panel_io", "window " + window->first.str() + ".." + window->last.str() +
                                            " does not overlap the data");
        first = std::max<Index>(0, window->first - data.dates.front());
        last = std::min<Index>(data.T() - 1, window->last - data.dates.front());
    }

    // Drop leading months where any series is still missing (transform start-up, late starters).
    auto row_complete = [&](Index t) {
        for (Index j = 0; j < data.n(); ++j)
            if (is_missing(data.observations(t, j))) return false;
        return true;
    };
    while (first <= last && !row_complete(first)) ++first;
    if (first > last) throw DataError("panel_io", "no complete month in the requested window");

    for (Index t = first; t <= last; ++t)
        for (Index j = 0; j < data.n(); ++j)
            if (is_missing(data.observations(t, j)))
                throw DataError("panel_io", "missing value for series " + data.series_ids[j] + " at " +
                                                data.dates[t].str());

    const Index T = last - first + 1;
    Panel panel;
    panel.series_ids = data.series_ids;
    panel.dates.assign(data.dates.begin() + first, data.dates.begin() + last + 1);
    panel.x = data.observations.middleRows(first, T).transpose();
    panel.means = panel.x.rowwise().mean();
    panel.x.colwise() -= panel.means;
    panel.stds = (panel.x.rowwise().squaredNorm() / static_cast<double>(T)).cwiseSqrt();
    for (Index i = 0; i < panel.n(); ++i) {
        if (!(panel.stds(i) > 1e-12 * std::max(1.0, std::abs(panel.means(i)))))
            throw DataError("panel_io", "series " + panel.series_ids[i] + " has zero variance in window");
        panel.x.row(i) /= panel.stds(i);
    }
    return panel;
}

QuarterlySeries read_quarterly_csv(std::istream& in)
{
    QuarterlySeries q;
    std::vector<double> levels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line) || line.front() == '#') continue;
        auto cells = split_csv_line(line);
        if (cells.size() < 2) throw DataError("panel_io", "GDP line " + std::to_string(lineno) + " needs 2 columns");
        YearMonth date;
        try {
            date = YearMonth::parse(cells[0]);
        } catch (const DataError&) {
            if (lineno == 1 || q.dates.empty()) continue;  // header
            throw;
        }
        double v = parse_cell(cells[1], "GDP line " + std::to_string(lineno));
        if (is_missing(v)) throw DataError("panel_io", "missing GDP value at " + date.str());
        q.dates.push_back(date);
        levels.push_back(v);
    }
    q.levels = Eigen::Map<Eigen::VectorXd>(levels.data(), static_cast<Index>(levels.size()));
    return q;
}

QuarterlySeries load_quarterly_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("panel_io", "cannot open " + path.string());
    return read_quarterly_csv(in);
}

QuarterlyTarget build_quarterly_target(const Eigen::VectorXd& gdp_levels,
                                       const std::vector<YearMonth>& quarter_dates,
                                       const std::vector<YearMonth>& panel_dates)
{
    const Index Q = gdp_levels.size();
    if (static_cast<Index>(quarter_dates.size()) != Q)
        throw DataError("panel_io", "GDP dates and levels differ in length");
    if (Q == 0) throw DataError("panel_io", "empty GDP series");

    QuarterlyTarget out;
    out.g = Eigen::VectorXd::Constant(Q, kMissing);
    out.a = Eigen::VectorXd::Constant(Q, kMissing);
    out.quarter_end.reserve(Q);
    out.quarter_end_months.assign(Q, -1);

    for (Index i = 0; i < Q; ++i) {
        const YearMonth d = quarter_dates[i];
        YearMonth end = d;
        if (d.month % 3 == 1) end = d + 2;
        else if (d.month % 3 != 0)
            throw DataError("panel_io", "calendar mismatch: " + d.str() + " is not a quarter start or end");
        if (i > 0 && end - out.quarter_end.back() != 3)
            throw DataError("panel_io", "calendar mismatch: quarters not consecutive at " + d.str());
        out.quarter_end.push_back(end);
        if (!(gdp_levels(i) > 0.0))
            throw DataError("panel_io", "GDP level must be positive at " + d.str());
    }

    const Eigen::VectorXd logs = gdp_levels.array().log();
    for (Index i = 1; i < Q; ++i) out.g(i) = logs(i) - logs(i - 1);
    for (Index i = 4; i < Q; ++i) out.a(i) = logs(i) - logs(i - 4);

    if (!panel_dates.empty()) {
        bool any = false;
        for (Index i = 0; i < Q; ++i) {
            const int pos = out.quarter_end[i] - panel_dates.front();
            if (pos >= 0 && pos < static_cast<int>(panel_dates.size())) {
                if (panel_dates[pos] != out.quarter_end[i])
                    throw DataError("panel_io", "calendar mismatch: panel dates are not consecutive");
                out.quarter_end_months[i] = pos;
                any = true;
            }
        }
        if (!any) throw DataError("panel_io", "calendar mismatch: no quarter ends inside the panel");
    }
    return out;
}

}  // namespace coin
