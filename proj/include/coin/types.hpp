#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <compare>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coin {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexMatrix = Matrix<std::complex<Scalar>>;

using Index = Eigen::Index;

inline constexpr double kPi = std::numbers::pi;

// Missing observations are carried as quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

enum class Horizon { Quarterly, Annual };

std::string_view to_string(Horizon h);

// Error hierarchy. The CLI maps each kind to a distinct exit code.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what);
    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

struct YearMonth {
    int year = 1970;
    int month = 1;  // 1..12

    int index() const { return year * 12 + (month - 1); }
    static YearMonth from_index(int idx);

    YearMonth operator+(int months) const { return from_index(index() + months); }
    YearMonth operator-(int months) const { return from_index(index() - months); }
    int operator-(const YearMonth& other) const { return index() - other.index(); }

    auto operator<=>(const YearMonth& other) const { return index() <=> other.index(); }
    bool operator==(const YearMonth& other) const { return index() == other.index(); }

    // "YYYY-MM"
    std::string str() const;

    // Accepts "YYYY-MM", "YYYY-MM-DD", "M/D/YYYY" and "YYYY:M".
    static YearMonth parse(std::string_view text);
};

}  // namespace coin
