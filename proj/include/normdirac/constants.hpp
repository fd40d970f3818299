// Discrete Sobolev embedding constants S_q = sup |u|_q / |u|_H on the
// grid, the coupling combinations built from them, and the admissibility
// test for the nonlinear coefficient gamma.
//
// S_q is estimated by projected gradient ascent of the Rayleigh-type
// quotient on the H^{1/2} unit sphere from several seeded random starts;
// the start-to-start spread is reported as the uncertainty.  Estimates are
// lower bounds of the discrete supremum, and every admissibility statement
// derived from them refers to the discrete problem on this grid.
#pragma once

#include <map>

#include "normdirac/core.hpp"
#include "normdirac/dirac.hpp"
#include "normdirac/field.hpp"
#include "normdirac/nonlinearity.hpp"

namespace normdirac {

struct AscentOptions {
    int iterations = 200;
    int starts = 8;
    std::uint64_t seed = 0x50b01eULL;  // mixed with q and start index
    double armijo_slope = 1e-4;
    int max_backtracks = 40;
};

struct SobolevEstimate {
    double value = 0.0;
    double spread = 0.0;  // max - min over starts
    SpinorField maximizer;
};

inline SobolevEstimate estimate_sobolev_constant(const GridSpec& grid, double q,
                                                 const AscentOptions& opt = {}) {
    if (!(q >= 2.0 && q <= 3.0))
        throw std::invalid_argument("estimate_sobolev_constant: q must lie in [2,3]");

    double best = 0.0, worst = std::numeric_limits<double>::infinity();
    SpinorField best_field;
    const std::uint64_t qbits = static_cast<std::uint64_t>(q * 1e6);

    for (int start = 0; start < opt.starts; ++start) {
        auto rng = make_rng(mix_seed(opt.seed ^ qbits, start));
        SpinorField u = make_random_field(grid, Representation::frequency, rng,
                                          /*spectral_decay=*/1.0);
        u *= Complex(1.0 / h_half_norm(u));
        SpinorField upos = to_position(u);
        double value = lp_norm(upos, q);
        double step = 1.0;

        for (int it = 0; it < opt.iterations; ++it) {
            // L2 gradient of |u|_q at upos: |u|^{q-2} u |u|_q^{1-q}
            SpinorField g(grid, Representation::position);
            const double scale = std::pow(value, 1.0 - q);
            for (std::size_t s = 0; s < upos.site_count(); ++s) {
                const C4 v = upos.spinor(s);
                const double w = scale * std::pow(abs_sq(v), 0.5 * q - 1.0);
                C4 r;
                for (int c = 0; c < 4; ++c) r[c] = w * v[c];
                g.set_spinor(s, r);
            }
            // H-Riesz representative, tangent to the H-sphere at u
            SpinorField d = apply_relativistic_weight(to_frequency(g), -0.5);
            d.add_scaled(-h_half_inner(u, d), u);
            const double slope = std::real(l2_inner(g, to_position(d)));
            if (slope <= 0.0) break;

            bool accepted = false;
            for (int bt = 0; bt < opt.max_backtracks; ++bt) {
                SpinorField cand = u;
                cand.add_scaled(Complex(step), d);
                cand *= Complex(1.0 / h_half_norm(cand));
                SpinorField cand_pos = to_position(cand);
                const double cand_value = lp_norm(cand_pos, q);
                if (cand_value >= value + opt.armijo_slope * step * slope) {
                    u = cand;
                    upos = cand_pos;
                    value = cand_value;
                    accepted = true;
                    step = std::min(step * 2.0, 64.0);
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
        }
        if (value > best) {
            best = value;
            best_field = upos;
        }
        worst = std::min(worst, value);
    }
    return {best, best - worst, best_field};
}

// Everything the admissibility inequalities need, keyed by the grid.
struct ConstantsTable {
    std::string grid_fingerprint;
    int n_per_axis = 0;
    double box_length = 0.0, mass = 0.0;
    double alpha = 0.0;
    double mu = 0.0;    // gradient growth constant of the nonlinearity
    double delta = 0.0;
    bool delta_converged = true;
    std::map<double, double> S;       // q -> estimated constant
    std::map<double, double> spread;  // q -> start-to-start spread

    double S_at(double q) const {
        auto it = S.lower_bound(q - 1e-9);
        if (it == S.end() || std::abs(it->first - q) > 1e-9)
            throw std::invalid_argument("ConstantsTable: missing exponent in table");
        return it->second;
    }

    // bracketed combinations of the two admissibility inequalities
    double a_combo_1(double lambda) const {
        return sq(S_at(2.0)) + mu * std::pow(lambda, 0.5 * (alpha - 2.0)) *
                                   std::pow(S_at(3.0), 3.0 * (alpha - 2.0)) *
                                   std::pow(S_at(2.0), 3.0 * alpha - 8.0);
    }
    double a_combo_2(double lambda) const {
        return sq(S_at(2.0)) + mu * std::pow(lambda, 0.5 * (alpha - 2.0)) *
                                   sq(S_at(4.0 / (4.0 - alpha)));
    }

    double c_alpha_lambda(double lambda) const { return 4.0 * a_combo_1(lambda); }

    // Largest coupling for which both inequalities still hold strictly at
    // lambda = 1 (their worst case on (0,1]); shaved by 1e-6 so that the
    // strict forms hold at gamma0 itself.
    double gamma0() const {
        const double g1 = (1.0 / 16.0) / a_combo_1(1.0);
        const double g2 = (1.0 / 4.0) / a_combo_2(1.0);
        return (1.0 - 1e-6) * std::min(g1, g2);
    }
};

inline ConstantsTable build_constants_table(const GridSpec& grid,
                                            const NonlinearitySpec& f,
                                            const AscentOptions& opt = {}) {
    ConstantsTable t;
    t.grid_fingerprint = grid.fingerprint();
    t.n_per_axis = grid.n_per_axis;
    t.box_length = grid.box_length;
    t.mass = grid.mass;
    t.alpha = f.alpha;
    const DerivedConstants dc = estimate_mu_delta(f);
    t.mu = dc.mu;
    t.delta = dc.delta;
    t.delta_converged = dc.delta_converged;

    std::vector<double> exponents = {2.0, 3.0, f.alpha, 4.0 / (4.0 - f.alpha),
                                     2.0 * f.nu,
                                     2.0 * f.xi_exponent / (f.xi_exponent - 1.0)};
    for (double q : exponents) {
        if (t.S.count(q)) continue;
        const SobolevEstimate est = estimate_sobolev_constant(grid, q, opt);
        t.S[q] = est.value;
        t.spread[q] = est.spread;
    }
    return t;
}

struct AdmissibilityReport {
    double gamma = 0.0;
    double margin1 = 0.0;  // 1/16 - gamma * a_combo_1(1)
    double margin2 = 0.0;  // 1/4  - gamma * a_combo_2(1)
    double gamma0 = 0.0;
    bool admissible = false;
    std::string grid_fingerprint;
};

inline AdmissibilityReport check_gamma_admissible(double gamma,
                                                  const ConstantsTable& table,
                                                  double mu, double alpha) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("check_gamma_admissible: gamma must be > 0");
    ConstantsTable t = table;  // evaluate at the caller's mu and alpha
    t.mu = mu;
    t.alpha = alpha;
    AdmissibilityReport rep;
    rep.gamma = gamma;
    rep.margin1 = 1.0 / 16.0 - gamma * t.a_combo_1(1.0);
    rep.margin2 = 1.0 / 4.0 - gamma * t.a_combo_2(1.0);
    rep.gamma0 = t.gamma0();
    rep.admissible = rep.margin1 >= 0.0 && rep.margin2 >= 0.0;
    rep.grid_fingerprint = table.grid_fingerprint;
    return rep;
}

}  // namespace normdirac
