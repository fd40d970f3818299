// Free Dirac operator H = -i alpha.grad + m beta as a per-mode 4x4
// Fourier multiplier, its spectral projectors, and fractional powers of
// (-Laplacian + m^2).
//
// Matrix conventions: standard Dirac representation with Hermitian Pauli
// matrices, beta = diag(1,1,-1,-1), alpha_k = [[0,sigma_k],[sigma_k,0]],
// gamma^k = beta*alpha_k. The mode symbol alpha.xi + m*beta has
// eigenvalues +-sqrt(|xi|^2+m^2), each twice, and the projectors have the
// closed form P(+-) = (I +- symbol/sqrt(|xi|^2+m^2))/2.
#pragma once

#include "normdirac/core.hpp"
#include "normdirac/field.hpp"
#include "normdirac/grid.hpp"

namespace normdirac {

// Dense 4x4 complex matrix; used for the algebra audit and by tests,
// not on the per-mode hot path.
struct Mat4 {
    std::array<Complex, 16> m{};

    Complex& operator()(int i, int j) { return m[4 * i + j]; }
    const Complex& operator()(int i, int j) const { return m[4 * i + j]; }

    static Mat4 identity() {
        Mat4 r;
        for (int i = 0; i < 4; ++i) r(i, i) = 1.0;
        return r;
    }
    Mat4 operator*(const Mat4& o) const {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                const Complex a = (*this)(i, k);
                if (a == Complex(0.0)) continue;
                for (int j = 0; j < 4; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }
    Mat4 operator+(const Mat4& o) const {
        Mat4 r;
        for (int i = 0; i < 16; ++i) r.m[i] = m[i] + o.m[i];
        return r;
    }
    Mat4 operator-(const Mat4& o) const {
        Mat4 r;
        for (int i = 0; i < 16; ++i) r.m[i] = m[i] - o.m[i];
        return r;
    }
    Mat4 scaled(Complex s) const {
        Mat4 r;
        for (int i = 0; i < 16; ++i) r.m[i] = s * m[i];
        return r;
    }
    Mat4 adjoint() const {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r(i, j) = std::conj((*this)(j, i));
        return r;
    }
    C4 apply(const C4& v) const {
        C4 r{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }
    double max_abs_diff(const Mat4& o) const {
        double d = 0.0;
        for (int i = 0; i < 16; ++i) d = std::max(d, std::abs(m[i] - o.m[i]));
        return d;
    }
};

struct DiracAlgebra {
    static Mat4 pauli(int k) {
        Mat4 s;  // embed the 2x2 matrix in the upper-left block
        if (k == 1) { s(0, 1) = 1.0; s(1, 0) = 1.0; }
        else if (k == 2) { s(0, 1) = Complex(0, -1); s(1, 0) = Complex(0, 1); }
        else if (k == 3) { s(0, 0) = 1.0; s(1, 1) = -1.0; }
        else throw std::invalid_argument("pauli: k in 1..3");
        return s;
    }
    static Mat4 beta() {
        Mat4 b;
        b(0, 0) = b(1, 1) = 1.0;
        b(2, 2) = b(3, 3) = -1.0;
        return b;
    }
    static Mat4 alpha(int k) {
        const Mat4 s = pauli(k);
        Mat4 a;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                a(i, j + 2) = s(i, j);
                a(i + 2, j) = s(i, j);
            }
        return a;
    }
    static Mat4 gamma(int k) { return beta() * alpha(k); }
    static Mat4 gamma123() { return gamma(1) * gamma(2) * gamma(3); }
};

namespace detail {

// symbol (alpha.xi + m*beta) applied to one spinor, closed form
inline C4 apply_mode_symbol(double x1, double x2, double x3, double m, const C4& c) {
    const Complex xm(x1, -x2);
    const Complex xp(x1, x2);
    return {x3 * c[2] + xm * c[3] + m * c[0],
            xp * c[2] - x3 * c[3] + m * c[1],
            x3 * c[0] + xm * c[1] - m * c[2],
            xp * c[0] - x3 * c[1] - m * c[3]};
}

// op(site, xi1, xi2, xi3, energy) over every mode of the grid,
// energy = sqrt(|xi|^2 + m^2)
template <typename Op>
inline void for_each_mode(const GridSpec& g, Op&& op) {
    const int n = g.n_per_axis;
    std::vector<double> xi(n);
    for (int j = 0; j < n; ++j) xi[j] = g.frequency_component(j);
    const double m2 = sq(g.mass);
    std::size_t site = 0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz, ++site) {
                const double e =
                    std::sqrt(sq(xi[ix]) + sq(xi[iy]) + sq(xi[iz]) + m2);
                op(site, xi[ix], xi[iy], xi[iz], e);
            }
}

template <typename ModeOp>
inline SpinorField map_modes(const SpinorField& u, ModeOp&& op) {
    const Representation rep_in = u.representation();
    SpinorField uf = in_representation(u, Representation::frequency);
    for_each_mode(u.grid(), [&](std::size_t site, double x1, double x2, double x3,
                                double e) {
        const C4 c = uf.spinor(site);
        uf.set_spinor(site, op(c, x1, x2, x3, e));
    });
    return rep_in == Representation::frequency ? uf : to_position(uf);
}

}  // namespace detail

// Per-mode data for one frequency; convenient for audits and unit tests.
struct ModeSymbol {
    std::array<double, 3> xi{};
    double mass = 0.0;

    double energy() const {
        return std::sqrt(sq(xi[0]) + sq(xi[1]) + sq(xi[2]) + sq(mass));
    }
    Mat4 h_matrix() const {
        Mat4 h = DiracAlgebra::beta().scaled(mass);
        for (int k = 0; k < 3; ++k)
            h = h + DiracAlgebra::alpha(k + 1).scaled(xi[k]);
        return h;
    }
    Mat4 projector(int sign) const {
        if (sign != 1 && sign != -1) throw std::invalid_argument("projector: sign +-1");
        const Mat4 scaled_h = h_matrix().scaled(Complex(sign / energy()));
        return (Mat4::identity() + scaled_h).scaled(0.5);
    }
};

inline SpinorField apply_dirac(const SpinorField& u) {
    const double m = u.grid().mass;
    return detail::map_modes(u, [m](const C4& c, double x1, double x2, double x3, double) {
        return detail::apply_mode_symbol(x1, x2, x3, m, c);
    });
}

inline SpinorField project(const SpinorField& u, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("project: sign must be +-1");
    const double m = u.grid().mass;
    const double s = sign;
    return detail::map_modes(u, [m, s](const C4& c, double x1, double x2, double x3,
                                       double e) {
        const C4 hc = detail::apply_mode_symbol(x1, x2, x3, m, c);
        C4 r;
        for (int i = 0; i < 4; ++i) r[i] = 0.5 * (c[i] + s / e * hc[i]);
        return r;
    });
}

// scalar multiplier (|xi|^2 + m^2)^exponent per mode
inline SpinorField apply_relativistic_weight(const SpinorField& u, double exponent) {
    return detail::map_modes(u, [exponent](const C4& c, double, double, double, double e) {
        const double w = std::pow(e, 2.0 * exponent);
        C4 r;
        for (int i = 0; i < 4; ++i) r[i] = w * c[i];
        return r;
    });
}

inline SpinorField apply_sqrt_quarter(const SpinorField& u) {
    return apply_relativistic_weight(u, 0.25);
}

// Re <u, H u>; equals h_half_norm(P+ u)^2 - h_half_norm(P- u)^2.
inline double dirac_quadratic_form(const SpinorField& u) {
    const SpinorField uf = in_representation(u, Representation::frequency);
    const double m = u.grid().mass;
    double acc = 0.0;
    detail::for_each_mode(u.grid(), [&](std::size_t site, double x1, double x2, double x3,
                                        double) {
        const C4 c = uf.spinor(site);
        const C4 hc = detail::apply_mode_symbol(x1, x2, x3, m, c);
        acc += std::real(dot(c, hc));
    });
    return acc;
}

}  // namespace normdirac
