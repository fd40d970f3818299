// Batch verification of the quantitative inequalities behind the
// variational scheme, at desk scale, producing a machine-readable
// scorecard.  Checks that degenerate to equalities in the linear limit
// (gamma = 0) are reported as inconclusive rather than passed.
#pragma once

#include <map>

#include "normdirac/minimizer.hpp"

namespace normdirac {

struct CheckResult {
    std::string name;
    std::map<std::string, double> inputs;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool conclusive = true;
    std::string note;
};

// lhs - rhs of the shifted convexity estimate
//   int F(psi) >= int F(sqrt(lambda) w) + Re int <grad F(a w), eta> -
//                 K |eta|^2 |w|_H^2
// for arbitrary density/gradient callables, so a rigged non-convex density
// can be run through the same評 path as the production one.
template <typename FEval, typename FGrad>
double shifted_convexity_margin(const Decomposition& d, double K, FEval&& fe,
                                FGrad&& fg) {
    const SpinorField psi_pos = to_position(d.psi());
    const SpinorField w_pos = to_position(d.w);
    const SpinorField eta_pos = to_position(d.eta);
    const double sqrt_lambda = std::sqrt(d.lambda);
    double int_psi = 0.0, int_scaled_w = 0.0, pairing = 0.0;
    for (std::size_t s = 0; s < psi_pos.site_count(); ++s) {
        const C4 wv = w_pos.spinor(s);
        int_psi += fe(psi_pos.spinor(s));
        C4 sw, aw;
        for (int c = 0; c < 4; ++c) {
            sw[c] = sqrt_lambda * wv[c];
            aw[c] = d.a * wv[c];
        }
        int_scaled_w += fe(sw);
        pairing += std::real(dot(fg(aw), eta_pos.spinor(s)));
    }
    const double vol = d.w.grid().cell_volume();
    int_psi *= vol;
    int_scaled_w *= vol;
    pairing *= vol;
    const double slack = K * l2_norm_sq(d.eta) * h_half_norm_sq(d.w);
    return int_psi - (int_scaled_w + pairing - slack);
}

// int F(psi) >= int F(sqrt(lambda) w) + <grad F(aw), eta> - K|eta|^2|w|_H^2
inline CheckResult check_shifted_convexity(const Decomposition& d,
                                           const NonlinearitySpec& f,
                                           const ConstantsTable& table) {
    CheckResult r;
    r.name = "shifted_convexity_bound";
    const double K = sq(table.S_at(2.0)) +
                     table.mu * std::pow(d.lambda, 0.5 * (table.alpha - 2.0)) *
                         sq(table.S_at(4.0 / (4.0 - table.alpha)));
    r.margin = shifted_convexity_margin(
        d, K, [&](const C4& v) { return eval_F(f, v); },
        [&](const C4& v) { return grad_F(f, v); });
    r.tolerance = 1e-12;
    r.inputs = {{"lambda", d.lambda}, {"eta_sq", l2_norm_sq(d.eta)}, {"K", K}};
    r.pass = r.margin >= -r.tolerance;
    return r;
}

// |eta*|_H^2 <= a^2 |w|_H^2 - 2 J(eta*)
inline CheckResult check_eta_energy_bound(const Decomposition& d, double J_value) {
    CheckResult r;
    r.name = "eta_energy_bound";
    r.lhs = h_half_norm_sq(d.eta);
    r.rhs = sq(d.a) * h_half_norm_sq(d.w) - 2.0 * J_value;
    r.tolerance = 1e-10;
    r.margin = r.rhs - r.lhs;
    r.pass = r.margin >= -r.tolerance;
    r.inputs = {{"J", J_value}, {"a", d.a}};
    return r;
}

// |<grad F(psi), w>| / a <= C_{alpha,lambda} |w|_H^2 where J(eta) >= 0
inline CheckResult check_pairing_growth(const Decomposition& d,
                                        const NonlinearitySpec& f,
                                        const ConstantsTable& table) {
    CheckResult r;
    r.name = "pairing_growth_bound";
    const SpinorField gf = to_frequency(grad_F_field(f, to_position(d.psi())));
    r.lhs = std::abs(std::real(l2_inner(gf, d.w))) / d.a;
    r.rhs = table.c_alpha_lambda(d.lambda) * h_half_norm_sq(d.w);
    r.margin = r.rhs - r.lhs;
    r.tolerance = 0.0;
    r.pass = r.margin >= 0.0;
    r.inputs = {{"lambda", d.lambda}, {"a", d.a}};
    return r;
}

// dJ(eta)[eta] < -|eta|_H^2 whenever J(eta) >= 0 and |eta|^2 >= lambda/2;
// the flow points back into the half-mass ball.
inline CheckResult check_boundary_push(const GridSpec& grid,
                                       const NonlinearitySpec& f, double gamma,
                                       double lambda, std::uint64_t seed) {
    CheckResult r;
    r.name = "boundary_inward_push";
    auto rng = make_rng(seed);
    // concentrated w so that J >= 0 is attainable beyond half mass
    SpinorField w = normalized_l2(
        project(make_random_field(grid, Representation::frequency, rng, 0.4), +1));
    SpinorField eta =
        project(make_random_field(grid, Representation::frequency, rng, 2.0), -1);
    eta *= Complex(std::sqrt(0.55 * lambda / l2_norm_sq(eta)));
    Decomposition d(lambda, w, eta);
    const double J = eval_J(d, gamma, f);
    if (J < 0.0) {
        r.pass = false;
        r.conclusive = false;
        r.note = "could not construct J >= 0 beyond half mass on this grid";
        return r;
    }
    r.lhs = std::real(l2_inner(grad_J(d, gamma, f), eta));
    r.rhs = -h_half_norm_sq(eta);
    r.margin = r.rhs - r.lhs;
    r.tolerance = 0.0;
    r.pass = r.margin > 0.0;
    r.inputs = {{"J", J}, {"eta_sq", l2_norm_sq(eta)}, {"w_h_sq", h_half_norm_sq(w)}};
    return r;
}

// d2J(eta)[xi,xi] <= -|xi|_H^2 at sampled admissible points with J >= 0
// and |eta|^2 < lambda/2
inline CheckResult check_inner_concavity(const GridSpec& grid,
                                         const NonlinearitySpec& f, double gamma,
                                         double lambda, int n_pairs, int n_dirs,
                                         std::uint64_t seed,
                                         double tolerance = 1e-8) {
    CheckResult r;
    r.name = "inner_concavity";
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = -std::numeric_limits<double>::infinity();
    int pairs_done = 0, guard = 0;
    while (pairs_done < n_pairs && guard < 20 * n_pairs) {
        ++guard;
        SpinorField w = normalized_l2(
            project(make_random_field(grid, Representation::frequency, rng, 1.2), +1));
        SpinorField eta =
            project(make_random_field(grid, Representation::frequency, rng, 1.8), -1);
        double target = (0.05 + 0.4 * uni(rng)) * lambda;
        eta *= Complex(std::sqrt(target / l2_norm_sq(eta)));
        Decomposition d(lambda, w, eta, /*validate=*/false);
        // shrink eta until J >= 0
        bool ok = eval_J(d, gamma, f) >= 0.0;
        for (int shrink = 0; !ok && shrink < 8; ++shrink) {
            eta *= Complex(0.6);
            d = Decomposition(lambda, w, eta, false);
            ok = eval_J(d, gamma, f) >= 0.0;
        }
        if (!ok) continue;
        bool counted = false;
        for (int k = 0; k < n_dirs; ++k) {
            SpinorField xi = project(
                make_random_field(grid, Representation::frequency, rng, 1.0), -1);
            try {
                const double q = hess_J_quadform(d, xi, gamma, f) + h_half_norm_sq(xi);
                worst = std::max(worst, q);
                counted = true;
            } catch (const SingularPointError&) {
                continue;
            }
        }
        if (counted) ++pairs_done;
    }
    r.lhs = worst;
    r.rhs = 0.0;
    r.tolerance = tolerance;
    r.margin = -worst;
    r.pass = pairs_done == n_pairs && worst <= tolerance;
    r.inputs = {{"pairs", double(pairs_done)}, {"dirs", double(n_dirs)},
                {"gamma", gamma}};
    return r;
}

// three-sided energy sandwich for E(w), including the positive grid
// constant lower bound lambda/(2 S_2^2) (1 - gamma(...))
inline CheckResult check_energy_bounds(const SpinorField& w, const SolveConfig& cfg,
                                       const ConstantsTable& table) {
    CheckResult r;
    r.name = "energy_sandwich";
    const double E = eval_E(w, cfg).first;
    const double whsq = h_half_norm_sq(w);
    const double s2 = table.S_at(2.0);
    const double combo =
        sq(s2) + 2.0 * (table.mu / table.alpha) *
                     std::pow(cfg.lambda, 0.5 * (table.alpha - 2.0)) *
                     sq(table.S_at(4.0 / (4.0 - table.alpha)));
    const double coeff = 1.0 - cfg.gamma * combo;
    const double lower_const = 0.5 * cfg.lambda / sq(s2) * coeff;
    const double lower = 0.5 * cfg.lambda * coeff * whsq;
    const double upper = 0.5 * cfg.lambda * whsq;
    r.lhs = E;
    r.rhs = upper;
    r.tolerance = 1e-10;
    r.margin = std::min({E - lower, upper - E, lower_const});
    r.pass = lower_const > 0.0 && E >= lower - r.tolerance && E <= upper + r.tolerance;
    r.inputs = {{"E", E}, {"lower", lower}, {"upper", upper},
                {"lower_const", lower_const}, {"gamma", cfg.gamma}};
    if (cfg.gamma == 0.0) r.note = "upper bound tight in the linear limit";
    return r;
}

// min over the seed family of E(phi_eps) < lambda m / 2, strict
inline CheckResult check_upper_bound_e(const SolveConfig& cfg,
                                       const std::vector<double>& epsilon_grid) {
    CheckResult r;
    r.name = "energy_deficit";
    const double linear_level = 0.5 * cfg.lambda * cfg.grid.mass;
    double best_deficit = -std::numeric_limits<double>::infinity();
    double best_eps = 0.0;
    std::vector<double> log_eps, log_def;
    for (double eps : epsilon_grid) {
        const SpinorField w = seed_w_epsilon(cfg.grid, eps);
        const double E = eval_E(w, cfg).first;
        const double deficit = linear_level - E;
        r.inputs["deficit_eps_" + std::to_string(eps)] = deficit;
        if (deficit > best_deficit) {
            best_deficit = deficit;
            best_eps = eps;
        }
        if (deficit > 0.0) {
            log_eps.push_back(std::log(eps));
            log_def.push_back(std::log(deficit));
        }
    }
    r.lhs = linear_level - best_deficit;  // min_e E(phi_eps)
    r.rhs = linear_level;
    r.margin = best_deficit;
    r.tolerance = 0.0;
    r.inputs["best_eps"] = best_eps;
    if (log_eps.size() >= 2) {
        // informational slope of the deficit over the positive branch; on a
        // fixed box the small-eps deficit saturates at the kinetic-free
        // level, so this is reported, not asserted
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = double(log_eps.size());
        for (std::size_t i = 0; i < log_eps.size(); ++i) {
            sx += log_eps[i];
            sy += log_def[i];
            sxx += log_eps[i] * log_eps[i];
            sxy += log_eps[i] * log_def[i];
        }
        r.inputs["deficit_fit_slope"] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    if (cfg.gamma == 0.0) {
        r.pass = false;
        r.conclusive = false;
        r.note = "inconclusive by design: equality at gamma = 0";
    } else {
        r.pass = best_deficit > 0.0;
    }
    return r;
}

// e(theta lambda) < theta e(lambda), estimated from seeded outer solves
inline CheckResult check_subadditivity(const SolveConfig& cfg,
                                       const ConstantsTable& table, double lambda,
                                       double theta,
                                       const std::vector<double>& seed_epsilons = {0.4,
                                                                                   0.8}) {
    if (!(theta > 1.0) || !(theta * lambda < 1.0))
        throw std::invalid_argument("check_subadditivity: need theta > 1, theta*lambda < 1");
    CheckResult r;
    r.name = "subadditivity";
    auto level = [&](double lam, double& spread) {
        double best = std::numeric_limits<double>::infinity();
        double worst = -best;
        for (double eps : seed_epsilons) {
            SolveConfig c = cfg;
            c.lambda = lam;
            c.seed.epsilon = eps;
            const SolveReport rep = minimize_outer(c, table);
            best = std::min(best, rep.E_value);
            worst = std::max(worst, rep.E_value);
        }
        spread = worst - best;
        return best;
    };
    double spread_a = 0.0, spread_b = 0.0;
    const double e_lambda = level(lambda, spread_a);
    const double e_theta = level(theta * lambda, spread_b);
    const double slack = 3.0 * std::max({spread_a, spread_b, 1e-12});
    r.lhs = e_theta;
    r.rhs = theta * e_lambda;
    r.tolerance = slack;
    r.margin = r.rhs - r.lhs - slack;
    r.inputs = {{"lambda", lambda}, {"theta", theta}, {"e_lambda", e_lambda},
                {"e_theta_lambda", e_theta}, {"solver_spread", std::max(spread_a, spread_b)}};
    if (cfg.gamma == 0.0) {
        r.pass = false;
        r.conclusive = false;
        r.note = "inconclusive by design: linear scaling is exact at gamma = 0";
    } else {
        r.pass = r.margin > 0.0;
    }
    return r;
}

// multiplier window and sandwich for a converged report
inline CheckResult check_multiplier(const SolveReport& rep) {
    CheckResult r;
    r.name = "multiplier_bounds";
    r.lhs = rep.omega;
    r.rhs = rep.omega_bounds.second;
    r.tolerance = 1e-8;
    const bool window = rep.omega > 0.0 && rep.omega < rep.constants.mass;
    const bool sandwich = rep.omega >= rep.omega_bounds.first - 1e-8 &&
                          rep.omega <= rep.omega_bounds.second + 1e-8;
    r.margin = std::min({rep.omega - rep.omega_bounds.first,
                         rep.omega_bounds.second - rep.omega,
                         rep.constants.mass - rep.omega, rep.omega});
    r.inputs = {{"omega", rep.omega}, {"lower", rep.omega_bounds.first},
                {"upper", rep.omega_bounds.second}, {"mass", rep.constants.mass}};
    if (rep.gamma == 0.0) {
        r.pass = false;
        r.conclusive = false;
        r.note = "inconclusive by design: omega = m exactly at gamma = 0";
    } else {
        r.pass = window && sandwich;
    }
    return r;
}

// |psi|_H^{alpha-2} >= (1 - omega/m) / (2 mu_eps S_alpha^alpha) with the
// proof's epsilon, and I(psi) >= (alpha/2 - 1) int F + omega lambda / 2 > 0
inline CheckResult check_lower_bounds(const SolveReport& rep,
                                      const NonlinearitySpec& f,
                                      const ConstantsTable& table) {
    CheckResult r;
    r.name = "critical_lower_bounds";
    const double m = rep.constants.mass;
    const double omega_gap = 1.0 - rep.omega / m;
    if (!(rep.omega > 0.0 && rep.omega < m)) {
        r.pass = false;
        r.note = "requires a solve with omega in (0, m)";
        r.conclusive = rep.gamma != 0.0;
        return r;
    }
    const double eps_star = omega_gap / (8.0 * sq(table.S_at(2.0)));
    const DerivedConstants dc = estimate_mu_delta(f, {eps_star}, 2048, 200);
    const double mu_eps = dc.mu_eps.at(eps_star);
    const double s_alpha = table.S_at(table.alpha);
    const double rhs1 = omega_gap / (2.0 * mu_eps * std::pow(s_alpha, table.alpha));
    const double lhs1 = std::pow(h_half_norm(rep.psi), table.alpha - 2.0);

    const double I_psi = eval_I(rep.psi, rep.gamma, f);
    const double int_F = integral_F(f, rep.psi);
    const double rhs2 =
        (0.5 * table.alpha - 1.0) * rep.gamma * int_F + 0.5 * rep.omega * rep.lambda;

    // identity I = I - dI[psi]/2 + omega |psi|^2 / 2 via criticality
    const SpinorField pf = rep.psi;
    double dI_psi = dirac_quadratic_form(pf);
    if (rep.gamma != 0.0)
        dI_psi -= rep.gamma * table.alpha * int_F;  // <grad F, psi> = alpha F
    const double identity_residual =
        std::abs(-0.5 * dI_psi + 0.5 * rep.omega * rep.lambda);

    r.lhs = lhs1;
    r.rhs = rhs1;
    r.margin = std::min(lhs1 - rhs1, I_psi - rhs2);
    r.tolerance = 1e-9;
    r.inputs = {{"I_psi", I_psi}, {"level_bound", rhs2}, {"eps_star", eps_star},
                {"mu_eps", mu_eps}, {"identity_residual", identity_residual}};
    r.pass = lhs1 >= rhs1 && I_psi >= rhs2 - 1e-12 && rhs2 > 0.0 &&
             identity_residual <= 1e-9 * std::max(1.0, std::abs(I_psi));
    if (rep.gamma == 0.0) {
        r.conclusive = false;
        r.note = "inconclusive by design: omega = m at gamma = 0";
        r.pass = false;
    }
    return r;
}

namespace detail {
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
}  // namespace detail

// Dilation asymptotics of the Gaussian seed family.  The box is scaled
// with the profile (L = box_scale / eps) so the discrete quantities track
// their whole-space laws: |phi_eps|_H^2 - m ~ eps^2 and
// |w_eps - phi_eps|_L2 ~ eps; on a fixed box both collapse once the
// profile width passes the box size.
struct SeedSweepResult {
    std::vector<double> epsilons;
    std::vector<double> h_excess;
    std::vector<double> l2_dist;
    double slope_h_excess = 0.0;
    double slope_l2_dist = 0.0;
};

inline SeedSweepResult run_seed_sweep(const std::vector<double>& epsilons,
                                      int n_per_axis, double box_scale, double mass) {
    SeedSweepResult out;
    for (double eps : epsilons) {
        const GridSpec grid(n_per_axis, box_scale / eps, mass);
        const SpinorField w_eps = gaussian_profile_w(grid, eps);
        const SpinorField phi_eps = seed_w_epsilon(grid, eps);
        out.epsilons.push_back(eps);
        out.h_excess.push_back(h_half_norm_sq(phi_eps) - mass);
        out.l2_dist.push_back(l2_norm(w_eps - in_representation(phi_eps,
                                                                Representation::position)));
    }
    out.slope_h_excess = detail::loglog_slope(out.epsilons, out.h_excess);
    out.slope_l2_dist = detail::loglog_slope(out.epsilons, out.l2_dist);
    return out;
}

struct ScorecardOptions {
    int concavity_pairs = 20;
    int concavity_dirs = 10;
    std::vector<double> deficit_epsilons = {0.4, 0.2, 0.1, 0.05, 0.02, 0.01};
    double subadditivity_lambda = 0.5;
    double subadditivity_theta = 1.5;
    std::uint64_t seed = 91;
    bool include_subadditivity = true;
};

struct Scorecard {
    std::vector<CheckResult> results;
    SolveReport solve;  // the converged solve the pointwise checks used
    bool all_conclusive_pass = true;
};

inline Scorecard run_scorecard(const SolveConfig& cfg, const ConstantsTable& table,
                               const ScorecardOptions& opt = {}) {
    Scorecard card;
    card.solve = minimize_outer(cfg, table);
    const SolveReport& rep = card.solve;
    const NonlinearitySpec& f = cfg.nonlinearity;

    Decomposition dec(rep.lambda, rep.w, rep.eta, /*validate=*/false);
    const double J_at_max = eval_J(dec, rep.gamma, f);

    card.results.push_back(check_eta_energy_bound(dec, J_at_max));
    card.results.push_back(check_pairing_growth(dec, f, table));
    card.results.push_back(check_boundary_push(cfg.grid, f, cfg.gamma, cfg.lambda,
                                               mix_seed(opt.seed, 1)));
    card.results.push_back(check_inner_concavity(cfg.grid, f, cfg.gamma, cfg.lambda,
                                                 opt.concavity_pairs,
                                                 opt.concavity_dirs,
                                                 mix_seed(opt.seed, 2)));
    card.results.push_back(check_energy_bounds(rep.w, cfg, table));
    card.results.push_back(check_shifted_convexity(dec, f, table));
    card.results.push_back(check_upper_bound_e(cfg, opt.deficit_epsilons));
    if (opt.include_subadditivity)
        card.results.push_back(check_subadditivity(cfg, table, opt.subadditivity_lambda,
                                                   opt.subadditivity_theta));
    card.results.push_back(check_multiplier(rep));
    card.results.push_back(check_lower_bounds(rep, f, table));

    for (const auto& c : card.results)
        if (c.conclusive && !c.pass) card.all_conclusive_pass = false;
    return card;
}

}  // namespace normdirac
