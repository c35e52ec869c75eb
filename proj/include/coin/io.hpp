#pragma once

// Output files: hashed header lines, CSV tables, the ensemble draw format and export of
// simulated data in the ingestion layouts.

#include "coin/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace coin {

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

// Missing values print as NA.
std::string format_number(double v, int precision = 10);

struct OutputHeader {
    std::string command;
    std::string config_hash;
    std::string data_hash;

    // "# coin <command> config_hash=<...> data_hash=<...>"
    std::string line() const;
};

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<std::string> cells);
    std::string render(const OutputHeader& header) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// Creates parent directories; writes in binary mode so output bytes do not depend on the platform.
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Draw file: 8-byte magic "COINDRAW", then little-endian uint32 version, B, T, horizon
// (0 = q-o-q, 1 = y-o-y), followed by T columns of B float64 values.
inline constexpr std::uint32_t kDrawFileVersion = 1;

struct DrawFile {
    std::uint32_t version = kDrawFileVersion;
    Horizon horizon = Horizon::Quarterly;
    Eigen::MatrixXd draws;  // B x T
};

std::string encode_draws(const Eigen::MatrixXd& draws, Horizon h);
DrawFile decode_draws(const std::string& bytes);

// FRED-MD layout: header row, "Transform:" row, then one row per month (M/1/YYYY).
std::string fred_md_csv(const std::vector<std::string>& ids, const std::vector<int>& tcodes,
                        const Eigen::MatrixXd& x, const std::vector<YearMonth>& dates);

// Two columns: date (YYYY-MM-01 of the quarter's first month), level.
std::string quarterly_csv(const std::vector<YearMonth>& quarter_end, const Eigen::VectorXd& levels);

}  // namespace coin
