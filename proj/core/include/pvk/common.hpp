#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pvk {

using cplx = std::complex<double>;
using Vec2 = std::array<double, 2>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Integer wave vector on Z^2.
struct Mode {
    int k1 = 0;
    int k2 = 0;

    constexpr auto operator<=>(const Mode&) const = default;
    constexpr Mode operator-() const { return {-k1, -k2}; }
    constexpr Mode operator+(Mode o) const { return {k1 + o.k1, k2 + o.k2}; }
    constexpr Mode operator-(Mode o) const { return {k1 - o.k1, k2 - o.k2}; }
    constexpr bool is_zero() const { return k1 == 0 && k2 == 0; }
    constexpr int sup_norm() const { return std::max(k1 < 0 ? -k1 : k1, k2 < 0 ? -k2 : k2); }
    double dot(const Vec2& x) const { return k1 * x[0] + k2 * x[1]; }
};

std::string to_string(Mode k);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// Mixes a 64-bit counter into a well-distributed seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int worker_threads();

}  // namespace pvk
