#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cpdptw {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Planar coordinate in kilometres.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance_km(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class Mode : std::uint8_t { UAV, ADR };

inline std::string_view to_string(Mode m) { return m == Mode::UAV ? "UAV" : "ADR"; }

inline Mode mode_from_string(std::string_view s) {
    if (s == "UAV" || s == "uav") return Mode::UAV;
    if (s == "ADR" || s == "adr") return Mode::ADR;
    throw std::invalid_argument("unknown vehicle mode '" + std::string(s) + "'");
}

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; the message names the offending field.
class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& what)
        : Error("parse error at '" + field + "': " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A precondition of an operation was violated by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// An iterative numeric routine did not converge.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

namespace detail {

// splitmix64 finaliser; used to derive independent, order-free random streams from a seed.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) { return mix64(a ^ mix64(b)); }

/// Uniform double in [0,1) from a 64-bit hash.
inline double unit_from_hash(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

}  // namespace detail

}  // namespace cpdptw
