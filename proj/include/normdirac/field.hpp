// Spinor fields on the periodic box: unitary position<->frequency
// transforms, L2 / Lp / H^{1/2} inner products and norms.
//
// Conventions. Position samples live at x = i*h, h = L/n. The frequency
// representation stores coefficients c_k of the orthonormal plane waves
// L^{-3/2} exp(i xi_k . x), xi_k = 2*pi*k/L, so the discrete L2 product
//   <u,v> = h^3 sum_x <u(x),v(x)> = sum_k <c_u(k),c_v(k)>
// holds exactly (Parseval) and discrete sums approximate integrals with
// cell volume h^3.
#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "normdirac/core.hpp"
#include "normdirac/detail/fft.hpp"
#include "normdirac/grid.hpp"

namespace normdirac {

class SpinorField {
public:
    SpinorField() = default;
    SpinorField(const GridSpec& grid, Representation rep)
        : grid_(grid), rep_(rep), values_(4 * grid.point_count(), Complex(0.0)) {}

    const GridSpec& grid() const { return grid_; }
    Representation representation() const { return rep_; }

    std::size_t site_count() const { return grid_.point_count(); }
    Complex* data() { return values_.data(); }
    const Complex* data() const { return values_.data(); }
    std::vector<Complex>& values() { return values_; }
    const std::vector<Complex>& values() const { return values_; }

    Complex& at(std::size_t site, int component) { return values_[4 * site + component]; }
    const Complex& at(std::size_t site, int component) const {
        return values_[4 * site + component];
    }
    C4 spinor(std::size_t site) const {
        return {values_[4 * site], values_[4 * site + 1], values_[4 * site + 2],
                values_[4 * site + 3]};
    }
    void set_spinor(std::size_t site, const C4& v) {
        for (int c = 0; c < 4; ++c) values_[4 * site + c] = v[c];
    }

    std::size_t site_index(int ix, int iy, int iz) const {
        const std::size_t n = static_cast<std::size_t>(grid_.n_per_axis);
        return (static_cast<std::size_t>(ix) * n + iy) * n + iz;
    }

    bool is_finite() const {
        for (const Complex& c : values_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        return true;
    }

    SpinorField& operator+=(const SpinorField& o) {
        require_compatible(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    SpinorField& operator-=(const SpinorField& o) {
        require_compatible(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    SpinorField& operator*=(Complex s) {
        for (Complex& v : values_) v *= s;
        return *this;
    }
    // this += s * x
    void add_scaled(Complex s, const SpinorField& x) {
        require_compatible(x);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * x.values_[i];
    }

    void require_compatible(const SpinorField& o) const {
        if (grid_ != o.grid_) throw std::invalid_argument("SpinorField: grid mismatch");
        if (rep_ != o.rep_)
            throw std::invalid_argument("SpinorField: representation mismatch");
    }

private:
    GridSpec grid_;
    Representation rep_ = Representation::position;
    std::vector<Complex> values_;
};

inline SpinorField operator+(SpinorField a, const SpinorField& b) { a += b; return a; }
inline SpinorField operator-(SpinorField a, const SpinorField& b) { a -= b; return a; }
inline SpinorField operator*(Complex s, SpinorField a) { a *= s; return a; }
inline SpinorField operator*(double s, SpinorField a) { a *= Complex(s); return a; }

inline SpinorField to_frequency(const SpinorField& u) {
    if (u.representation() == Representation::frequency)
        throw std::invalid_argument("to_frequency: field already in frequency representation");
    SpinorField out(u.grid(), Representation::frequency);
    out.values() = u.values();
    detail::transform3d(out.data(), u.grid().n_per_axis, /*forward=*/true);
    const double L = u.grid().box_length;
    const double scale = std::pow(L, 1.5) / static_cast<double>(u.site_count());
    out *= Complex(scale);
    return out;
}

inline SpinorField to_position(const SpinorField& u) {
    if (u.representation() == Representation::position)
        throw std::invalid_argument("to_position: field already in position representation");
    SpinorField out(u.grid(), Representation::position);
    out.values() = u.values();
    detail::transform3d(out.data(), u.grid().n_per_axis, /*forward=*/false);
    out *= Complex(std::pow(u.grid().box_length, -1.5));
    return out;
}

inline SpinorField in_representation(const SpinorField& u, Representation rep) {
    if (u.representation() == rep) return u;
    return rep == Representation::frequency ? to_frequency(u) : to_position(u);
}

inline Complex l2_inner(const SpinorField& u, const SpinorField& v) {
    if (u.grid() != v.grid()) throw std::invalid_argument("l2_inner: grid mismatch");
    if (u.representation() != v.representation()) {
        // unitary transform, value independent of representation
        return l2_inner(u, in_representation(v, u.representation()));
    }
    Complex acc = 0.0;
    const Complex* a = u.data();
    const Complex* b = v.data();
    const std::size_t total = 4 * u.site_count();
    for (std::size_t i = 0; i < total; ++i) acc += std::conj(a[i]) * b[i];
    if (u.representation() == Representation::position) acc *= u.grid().cell_volume();
    return acc;
}

inline double l2_norm_sq(const SpinorField& u) {
    double acc = 0.0;
    const Complex* a = u.data();
    const std::size_t total = 4 * u.site_count();
    for (std::size_t i = 0; i < total; ++i) acc += std::norm(a[i]);
    if (u.representation() == Representation::position) acc *= u.grid().cell_volume();
    return acc;
}

inline double l2_norm(const SpinorField& u) { return std::sqrt(l2_norm_sq(u)); }

namespace detail {

// Applies op(site, weight) over all modes of a frequency-representation
// field, where weight = sqrt(|xi|^2 + m^2) of the mode.
template <typename Op>
inline void for_each_mode_weight(const GridSpec& g, Op&& op) {
    const int n = g.n_per_axis;
    std::vector<double> xi_sq(n);
    for (int j = 0; j < n; ++j) xi_sq[j] = sq(g.frequency_component(j));
    const double m2 = sq(g.mass);
    std::size_t site = 0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
            const double partial = xi_sq[ix] + xi_sq[iy];
            for (int iz = 0; iz < n; ++iz, ++site)
                op(site, std::sqrt(partial + xi_sq[iz] + m2));
        }
}

}  // namespace detail

inline Complex h_half_inner(const SpinorField& u, const SpinorField& v) {
    if (u.grid() != v.grid()) throw std::invalid_argument("h_half_inner: grid mismatch");
    if (u.representation() != Representation::frequency)
        return h_half_inner(to_frequency(u), v);
    if (v.representation() != Representation::frequency)
        return h_half_inner(u, to_frequency(v));
    Complex acc = 0.0;
    detail::for_each_mode_weight(u.grid(), [&](std::size_t site, double w) {
        for (int c = 0; c < 4; ++c)
            acc += w * std::conj(u.at(site, c)) * v.at(site, c);
    });
    return acc;
}

inline double h_half_norm_sq(const SpinorField& u) {
    if (u.representation() != Representation::frequency)
        return h_half_norm_sq(to_frequency(u));
    double acc = 0.0;
    detail::for_each_mode_weight(u.grid(), [&](std::size_t site, double w) {
        for (int c = 0; c < 4; ++c) acc += w * std::norm(u.at(site, c));
    });
    return acc;
}

inline double h_half_norm(const SpinorField& u) { return std::sqrt(h_half_norm_sq(u)); }

inline double lp_norm(const SpinorField& u, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (u.representation() != Representation::position)
        throw std::invalid_argument("lp_norm: position representation required");
    const std::size_t sites = u.site_count();
    if (p == std::numeric_limits<double>::infinity()) {
        double best = 0.0;
        for (std::size_t s = 0; s < sites; ++s)
            best = std::max(best, abs_sq(u.spinor(s)));
        return std::sqrt(best);
    }
    double acc = 0.0;
    for (std::size_t s = 0; s < sites; ++s)
        acc += std::pow(abs_sq(u.spinor(s)), 0.5 * p);
    return std::pow(u.grid().cell_volume() * acc, 1.0 / p);
}

// Complex Gaussian entries; spectral_decay > 0 damps mode k by
// (1 + |xi|^2/m^2)^{-decay} which keeps the H^{1/2} norm moderate.
inline SpinorField make_random_field(const GridSpec& grid, Representation rep,
                                     std::mt19937_64& rng, double spectral_decay = 0.0) {
    SpinorField f(grid, Representation::frequency);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Complex& v : f.values()) v = Complex(gauss(rng), gauss(rng));
    if (spectral_decay > 0.0) {
        const double m2 = sq(grid.mass);
        detail::for_each_mode_weight(grid, [&](std::size_t site, double w) {
            const double damp = std::pow(w * w / m2, -spectral_decay);
            for (int c = 0; c < 4; ++c) f.at(site, c) *= damp;
        });
    }
    return rep == Representation::frequency ? f : to_position(f);
}

inline SpinorField normalized_l2(const SpinorField& u, double target = 1.0) {
    const double nrm = l2_norm(u);
    if (nrm == 0.0) throw std::invalid_argument("normalized_l2: zero field");
    SpinorField out = u;
    out *= Complex(std::sqrt(target) / nrm);
    return out;
}

}  // namespace normdirac
