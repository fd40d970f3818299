// Shared aliases, error types and small numeric helpers.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace normdirac {

using Complex = std::complex<double>;

// One lattice value of a spinor field: four complex components.
using C4 = std::array<Complex, 4>;

inline constexpr const char* version_string = "0.1.0";

class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

class SingularPointError : public std::runtime_error {
public:
    explicit SingularPointError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline double sq(double x) { return x * x; }

inline double abs_sq(const C4& v) {
    double r = 0.0;
    for (const auto& c : v) r += std::norm(c);
    return r;
}

inline Complex dot(const C4& u, const C4& v) {
    Complex r = 0.0;
    for (int i = 0; i < 4; ++i) r += std::conj(u[i]) * v[i];
    return r;
}

inline C4 axpy(Complex a, const C4& x, const C4& y) {
    C4 r;
    for (int i = 0; i < 4; ++i) r[i] = a * x[i] + y[i];
    return r;
}

// Deterministic generator; every stochastic routine takes a seed derived
// from the run manifest so reports are reproducible bit for bit.
inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 step, good enough to decorrelate sub-streams
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace normdirac
