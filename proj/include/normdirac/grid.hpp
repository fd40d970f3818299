// Periodic-box discretization: cubic grid, wrapped frequencies, fingerprint.
#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <string>

#include "normdirac/core.hpp"

namespace normdirac {

inline constexpr double two_pi = 6.283185307179586476925286766559;

enum class Representation { position, frequency };

// Cubic periodic box [0,L)^3 sampled on n points per axis, with the fermion
// mass m carried along since every frequency weight depends on it.
// Mode k of axis index j is k = j for j < n/2 and k = j - n otherwise,
// with frequency xi = 2*pi*k/L.
struct GridSpec {
    int n_per_axis = 0;
    double box_length = 0.0;
    double mass = 0.0;

    GridSpec() = default;
    GridSpec(int n, double length, double m)
        : n_per_axis(n), box_length(length), mass(m) {
        if (n < 4 || n % 2 != 0)
            throw std::invalid_argument("GridSpec: n_per_axis must be even and >= 4");
        if (!(length > 0.0)) throw std::invalid_argument("GridSpec: box_length must be > 0");
        if (!(m > 0.0)) throw std::invalid_argument("GridSpec: mass must be > 0");
    }

    double spacing() const { return box_length / n_per_axis; }
    double cell_volume() const { const double h = spacing(); return h * h * h; }
    double volume() const { return box_length * box_length * box_length; }
    std::size_t point_count() const {
        const std::size_t n = static_cast<std::size_t>(n_per_axis);
        return n * n * n;
    }

    int mode_number(int axis_index) const {
        return axis_index < n_per_axis / 2 ? axis_index : axis_index - n_per_axis;
    }
    double frequency_component(int axis_index) const {
        return two_pi * mode_number(axis_index) / box_length;
    }

    bool operator==(const GridSpec& o) const {
        return n_per_axis == o.n_per_axis && box_length == o.box_length && mass == o.mass;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

    // FNV-1a over the exact parameter bits; keys the constants cache.
    std::string fingerprint() const {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&h](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                h ^= (v >> (8 * i)) & 0xffULL;
                h *= 1099511628211ULL;
            }
        };
        mix(static_cast<std::uint64_t>(n_per_axis));
        std::uint64_t bits;
        static_assert(sizeof(double) == sizeof(std::uint64_t));
        std::memcpy(&bits, &box_length, 8);
        mix(bits);
        std::memcpy(&bits, &mass, 8);
        mix(bits);
        std::ostringstream os;
        os << "g" << n_per_axis << "-" << std::hex << h;
        return os.str();
    }
};

}  // namespace normdirac
