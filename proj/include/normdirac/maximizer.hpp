// Inner problem: for a fixed unit vector w in the positive subspace and a
// mass level lambda, maximize
//   J(eta) = I(a(eta) w + eta),   a(eta) = sqrt(lambda - |eta|_L2^2),
// over eta in the negative subspace.  J is strictly concave (curvature at
// most -|.|_H^2) on the region where it is nonnegative and |eta|^2 <
// lambda/2, which makes preconditioned gradient ascent from eta = 0 both
// globally convergent and certifiably unique.
#pragma once

#include <functional>
#include <optional>

#include "normdirac/constants.hpp"
#include "normdirac/core.hpp"
#include "normdirac/dirac.hpp"
#include "normdirac/field.hpp"
#include "normdirac/nonlinearity.hpp"

namespace normdirac {

inline SpinorField apply_B(const SpinorField& u) {
    return apply_relativistic_weight(u, 0.5);
}
inline SpinorField apply_B_inv(const SpinorField& u) {
    return apply_relativistic_weight(u, -0.5);
}

// norm of the L2-Riesz gradient measured in the H^{-1/2} dual metric
inline double h_dual_norm(const SpinorField& u) {
    return l2_norm(apply_relativistic_weight(u, -0.25));
}

// The triple (w, eta, lambda) with a = sqrt(lambda - |eta|^2) and
// psi = a w + eta; fields are held in the frequency representation.
struct Decomposition {
    double lambda = 1.0;
    SpinorField w;
    SpinorField eta;
    double a = 0.0;

    Decomposition(double lambda_, const SpinorField& w_, const SpinorField& eta_,
                  bool validate = true)
        : lambda(lambda_),
          w(in_representation(w_, Representation::frequency)),
          eta(in_representation(eta_, Representation::frequency)) {
        if (w.grid() != eta.grid())
            throw std::invalid_argument("Decomposition: grid mismatch");
        if (!(lambda > 0.0 && lambda <= 1.0))
            throw std::invalid_argument("Decomposition: lambda must lie in (0,1]");
        const double eta_sq = l2_norm_sq(eta);
        if (!(eta_sq < lambda))
            throw std::invalid_argument("Decomposition: |eta|^2 must be < lambda");
        if (validate) {
            if (std::abs(l2_norm_sq(w) - 1.0) > 1e-8)
                throw std::invalid_argument("Decomposition: w must have unit L2 norm");
            if (l2_norm(project(w, -1)) > 1e-8)
                throw std::invalid_argument("Decomposition: w must lie in the positive subspace");
            if (eta_sq > 0.0 && l2_norm(project(eta, +1)) > 1e-8 * std::sqrt(eta_sq))
                throw std::invalid_argument("Decomposition: eta must lie in the negative subspace");
        }
        a = std::sqrt(lambda - eta_sq);
    }

    SpinorField psi() const {
        SpinorField p = eta;
        p.add_scaled(Complex(a), w);
        return p;
    }
};

inline double eval_I(const SpinorField& psi, double gamma, const NonlinearitySpec& f) {
    const SpinorField pf = in_representation(psi, Representation::frequency);
    const double plus = h_half_norm_sq(project(pf, +1));
    const double minus = h_half_norm_sq(project(pf, -1));
    return 0.5 * plus - 0.5 * minus - gamma * integral_F(f, pf);
}

inline double eval_J(const Decomposition& d, double gamma, const NonlinearitySpec& f) {
    return 0.5 * sq(d.a) * h_half_norm_sq(d.w) - 0.5 * h_half_norm_sq(d.eta) -
           gamma * integral_F(f, d.psi());
}

// L2-Riesz representative of dJ(eta), an element of the negative subspace:
//   grad = -B eta - gamma P_- grad F(psi) - omega_tilde eta,
//   omega_tilde = |w|_H^2 - gamma Re<grad F(psi), w> / a.
// Equivalently P_-(H psi - gamma grad F(psi) - omega_tilde psi): inner
// stationarity is the negative-sector Euler-Lagrange equation.
inline SpinorField grad_J(const Decomposition& d, double gamma,
                          const NonlinearitySpec& f) {
    if (d.a < 1e-8) throw SolverError("grad_J: a(eta) below 1e-8");
    SpinorField g = apply_B(d.eta);
    g *= Complex(-1.0);
    double omega_tilde = h_half_norm_sq(d.w);
    if (gamma != 0.0 && !f.is_zero()) {
        const SpinorField gf = to_frequency(grad_F_field(f, to_position(d.psi())));
        const double c_w = std::real(l2_inner(gf, d.w));
        omega_tilde -= gamma * c_w / d.a;
        g.add_scaled(Complex(-gamma), project(gf, -1));
    }
    g.add_scaled(Complex(-omega_tilde), d.eta);
    return g;
}

// d^2 J(eta)[xi, xi] for xi in the negative subspace, including the
// second-derivative term of a(eta):
//   d2a[xi,xi] = -(|xi|^2 + (Re<eta,xi>)^2 / a^2) / a.
inline double hess_J_quadform(const Decomposition& d, const SpinorField& xi,
                              double gamma, const NonlinearitySpec& f) {
    if (d.a < 1e-8) throw SolverError("hess_J_quadform: a(eta) below 1e-8");
    const SpinorField xif = in_representation(xi, Representation::frequency);
    const double xi_sq = l2_norm_sq(xif);
    double value = -xi_sq * h_half_norm_sq(d.w) - h_half_norm_sq(xif);
    if (gamma == 0.0 || f.is_zero()) return value;

    const SpinorField psi_pos = to_position(d.psi());
    const SpinorField w_pos = to_position(d.w);
    const SpinorField xi_pos = to_position(xif);
    const double da_xi = -std::real(l2_inner(d.eta, xif)) / d.a;

    // h_xi = da[xi] w + xi, pointwise Hessian pairing of F
    double hess_term = 0.0;
    double c_w = 0.0;
    for (std::size_t s = 0; s < psi_pos.site_count(); ++s) {
        const C4 psi_v = psi_pos.spinor(s);
        C4 h;
        const C4 wv = w_pos.spinor(s);
        const C4 xv = xi_pos.spinor(s);
        for (int c = 0; c < 4; ++c) h[c] = da_xi * wv[c] + xv[c];
        hess_term += std::real(dot(hess_F_vec(f, psi_v, h), h));
        c_w += std::real(dot(grad_F(f, psi_v), wv));
    }
    const double vol = d.w.grid().cell_volume();
    hess_term *= vol;
    c_w *= vol;

    const double re_eta_xi = std::real(l2_inner(d.eta, xif));
    const double d2a = -(xi_sq + sq(re_eta_xi) / sq(d.a)) / d.a;
    value += -gamma * hess_term - gamma * d2a * c_w;
    return value;
}

struct InnerOptions {
    int max_iterations = 2000;
    double initial_step = 1.0;
    double step_shrink = 0.5;
    double armijo_slope = 1e-4;
    int max_backtracks = 60;
    double safe_fraction = 0.49;  // radial cap on |eta|^2 / lambda
    int boundary_event_cap = 50;
    int concavity_samples = 0;
    std::uint64_t rng_seed = 7777;
    std::optional<SpinorField> start_eta;
    // iter, J, dual gradient norm, |eta|^2
    std::function<void(int, double, double, double)> trace;
};

struct InnerSolveResult {
    SpinorField eta_star;  // frequency representation
    double J_value = 0.0;
    double grad_norm = 0.0;  // H^{-1/2} dual norm at eta_star
    int iterations = 0;
    double concavity_witness = 0.0;  // worst sampled d2J[xi,xi] + |xi|_H^2
    int projection_events = 0;
    double fitted_rate = 0.0;  // geometric decay of the gradient norm
};

inline InnerSolveResult maximize_inner(const SpinorField& w_in, double lambda,
                                       double gamma, double tol_inner,
                                       const NonlinearitySpec& f,
                                       const InnerOptions& opt = {}) {
    SpinorField w = in_representation(w_in, Representation::frequency);
    if (std::abs(l2_norm_sq(w) - 1.0) > 1e-8)
        throw std::invalid_argument("maximize_inner: w must have unit L2 norm");
    if (l2_norm(project(w, -1)) > 1e-8)
        throw std::invalid_argument("maximize_inner: w must lie in the positive subspace");
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("maximize_inner: lambda must lie in (0,1]");

    const GridSpec& grid = w.grid();
    const double w_h_sq = h_half_norm_sq(w);
    const bool linear = (gamma == 0.0) || f.is_zero();

    SpinorField eta = opt.start_eta ? in_representation(*opt.start_eta,
                                                        Representation::frequency)
                                    : SpinorField(grid, Representation::frequency);
    if (opt.start_eta) {
        if (l2_norm(project(eta, +1)) > 1e-8 * std::max(1.0, l2_norm(eta)))
            throw std::invalid_argument("maximize_inner: start eta not in the negative subspace");
        if (l2_norm_sq(eta) > opt.safe_fraction * lambda)
            throw std::invalid_argument("maximize_inner: start eta outside the safe region");
    }

    auto eval_at = [&](const SpinorField& e, double& a_out) {
        const double e_sq = l2_norm_sq(e);
        a_out = std::sqrt(lambda - e_sq);
        double value = 0.5 * (lambda - e_sq) * w_h_sq - 0.5 * h_half_norm_sq(e);
        if (!linear) {
            SpinorField psi = e;
            psi.add_scaled(Complex(a_out), w);
            value -= gamma * integral_F(f, psi);
        }
        return value;
    };

    double a = 0.0;
    double J = eval_at(eta, a);
    if (!(J > 0.0) && !linear)
        throw SolverError("maximize_inner: J(start) <= 0, coupling not admissible?");

    InnerSolveResult res;
    res.projection_events = 0;
    std::vector<double> grad_history;
    // The B-preconditioned Hessian of the quadratic part has eigenvalues
    // -(1 + |w|_H^2/E_k) in [-(1 + |w|_H^2/m), -1]; steps beyond
    // 2/(1+|w|_H^2/m) diverge on the stiffest modes, invisibly to the
    // line search once J-changes fall below machine resolution.
    const double stable_step = 0.95 / (1.0 + w_h_sq / grid.mass);
    double step = std::min(opt.initial_step, stable_step);

    auto gradient_at = [&](const SpinorField& e, double a_e) {
        SpinorField grad = apply_B(e);
        grad *= Complex(-1.0);
        double omega_tilde = w_h_sq;
        if (!linear) {
            SpinorField psi = e;
            psi.add_scaled(Complex(a_e), w);
            const SpinorField gf = to_frequency(grad_F_field(f, to_position(psi)));
            const double c_w = std::real(l2_inner(gf, w));
            omega_tilde -= gamma * c_w / a_e;
            grad.add_scaled(Complex(-gamma), project(gf, -1));
        }
        grad.add_scaled(Complex(-omega_tilde), e);
        return grad;
    };

    SpinorField grad = gradient_at(eta, a);
    double gnorm = h_dual_norm(grad);

    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        grad_history.push_back(gnorm);
        if (opt.trace) opt.trace(it, J, gnorm, l2_norm_sq(eta));
        if (gnorm <= tol_inner) break;

        // ascent along the H-preconditioned gradient; the Armijo slope is
        // exactly the squared dual norm
        SpinorField dir = apply_B_inv(grad);
        const double slope = sq(gnorm);
        bool accepted = false;
        for (int bt = 0; bt < opt.max_backtracks; ++bt) {
            SpinorField cand = eta;
            cand.add_scaled(Complex(step), dir);
            const double cand_sq = l2_norm_sq(cand);
            if (cand_sq > opt.safe_fraction * lambda) {
                cand *= Complex(std::sqrt(opt.safe_fraction * lambda / cand_sq));
                ++res.projection_events;
                if (res.projection_events > opt.boundary_event_cap)
                    throw SolverError(
                        "maximize_inner: repeated boundary projections; "
                        "coupling likely inadmissible");
            }
            double cand_a = 0.0;
            const double cand_J = eval_at(cand, cand_a);
            const double predicted = opt.armijo_slope * step * slope;
            const double measurable = 32.0 * 1e-16 * (1.0 + std::abs(J));
            if (predicted > measurable) {
                if (cand_J >= J + predicted) {
                    eta = cand;
                    a = cand_a;
                    J = cand_J;
                    grad = gradient_at(eta, a);
                    gnorm = h_dual_norm(grad);
                    accepted = true;
                }
            } else {
                // J-increase below machine resolution: accept on a strict
                // decrease of the dual gradient norm instead, which cannot
                // cycle (the slack acceptance can, through the Hoelder
                // spikes of D2F near the density zero sets)
                SpinorField cand_grad = gradient_at(cand, cand_a);
                const double cand_gnorm = h_dual_norm(cand_grad);
                if (cand_gnorm <= gnorm * (1.0 - 1e-3) || cand_gnorm <= tol_inner) {
                    eta = cand;
                    a = cand_a;
                    J = cand_J;
                    grad = std::move(cand_grad);
                    gnorm = cand_gnorm;
                    accepted = true;
                }
            }
            if (accepted) {
                step = std::min(std::min(step * 2.0, opt.initial_step), stable_step);
                break;
            }
            step *= opt.step_shrink;
        }
        if (!accepted)
            throw SolverError(
                "maximize_inner: no measurable progress above the attainable "
                "gradient floor");
    }
    if (it >= opt.max_iterations)
        throw SolverError("maximize_inner: iteration cap exceeded");

    res.eta_star = eta;
    res.J_value = J;
    res.grad_norm = gnorm;
    res.iterations = it;

    // geometric decay rate of the dual gradient norm over the final stretch
    if (grad_history.size() >= 3) {
        double log_sum = 0.0;
        int count = 0;
        const std::size_t first = grad_history.size() > 20 ? grad_history.size() - 20 : 1;
        for (std::size_t k = first; k < grad_history.size(); ++k) {
            if (grad_history[k - 1] > 0.0 && grad_history[k] > 0.0) {
                log_sum += std::log(grad_history[k] / grad_history[k - 1]);
                ++count;
            }
        }
        res.fitted_rate = count > 0 ? std::exp(log_sum / count) : 0.0;
    }

    if (opt.concavity_samples > 0) {
        Decomposition dec(lambda, w, eta, /*validate=*/false);
        auto rng = make_rng(opt.rng_seed);
        double worst = -std::numeric_limits<double>::infinity();
        int done = 0, guard = 0;
        while (done < opt.concavity_samples && guard < 8 * opt.concavity_samples) {
            ++guard;
            SpinorField xi = project(make_random_field(grid, Representation::frequency,
                                                       rng, 1.0),
                                     -1);
            try {
                const double q = hess_J_quadform(dec, xi, gamma, f) + h_half_norm_sq(xi);
                worst = std::max(worst, q);
                ++done;
            } catch (const SingularPointError&) {
                continue;
            }
        }
        res.concavity_witness = done > 0 ? worst : 0.0;
    }
    return res;
}

}  // namespace normdirac
