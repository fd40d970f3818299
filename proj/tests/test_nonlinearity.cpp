#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <normdirac/nonlinearity.hpp>

using namespace normdirac;

namespace {

C4 random_spinor(std::mt19937_64& rng, double radius) {
    std::normal_distribution<double> gauss;
    C4 v;
    double n2 = 0.0;
    for (auto& c : v) {
        c = Complex(gauss(rng), gauss(rng));
        n2 += std::norm(c);
    }
    for (auto& c : v) c *= radius / std::sqrt(n2);
    return v;
}

// central-difference directional derivative of eval_F
double fd_directional(const NonlinearitySpec& f, const C4& phi, const C4& h, double t) {
    C4 plus = phi, minus = phi;
    for (int i = 0; i < 4; ++i) {
        plus[i] += t * h[i];
        minus[i] -= t * h[i];
    }
    return (eval_F(f, plus) - eval_F(f, minus)) / (2 * t);
}

}  // namespace

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(NonlinearitySpec(1.0, 0.0, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(NonlinearitySpec(1.0, 0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(NonlinearitySpec(-1.0, 0.0, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(NonlinearitySpec(1.0, -0.5, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(NonlinearitySpec(1.0, 0.0, 2.5, 0.0, /*nu=*/1.6), std::invalid_argument);
    CHECK_THROWS_AS(NonlinearitySpec(1.0, 0.0, 2.5, 0.0, /*nu=*/1.2), std::invalid_argument);
    CHECK_NOTHROW(NonlinearitySpec(1.0, 0.0, 8.0 / 3.0));
    CHECK_NOTHROW(NonlinearitySpec(0.0, 0.0, 2.5));  // degenerate zero spec
}

TEST_CASE("densities are real and frozen point values hold") {
    // s and p for hand-picked spinors
    C4 e1{1.0, 0.0, 0.0, 0.0};
    CHECK(scalar_density(e1) == doctest::Approx(1.0));
    CHECK(pseudoscalar_density(e1) == doctest::Approx(0.0));

    const double r = 1.0 / std::sqrt(2.0);
    C4 balanced{r, 0.0, r, 0.0};  // s = 0 and p = 0 by direct evaluation
    CHECK(scalar_density(balanced) == doctest::Approx(0.0));
    CHECK(pseudoscalar_density(balanced) == doctest::Approx(0.0));

    C4 pseudo{r, 0.0, Complex(0.0, r), 0.0};  // eigenvector of g1g2g3: s=0, p=1
    CHECK(scalar_density(pseudo) == doctest::Approx(0.0));
    CHECK(pseudoscalar_density(pseudo) == doctest::Approx(1.0));

    NonlinearitySpec soler(1.0, 0.0, 2.5);
    CHECK(eval_F(soler, C4{}) == 0.0);
    CHECK(eval_F(soler, e1) == doctest::Approx(1.0));
    CHECK(eval_F(soler, balanced) == doctest::Approx(0.0));

    NonlinearitySpec both(0.5, 0.25, 2.5);
    CHECK(eval_F(both, balanced) == doctest::Approx(0.0));
    CHECK(eval_F(both, pseudo) == doctest::Approx(0.25));  // b-term only
}

TEST_CASE("gradient: frozen value, gauge invariance, finite differences") {
    NonlinearitySpec f(1.0, 0.0, 2.5);
    CHECK(abs_sq(grad_F(f, C4{})) == 0.0);

    C4 e1{1.0, 0.0, 0.0, 0.0};
    const C4 g = grad_F(f, e1);
    CHECK(std::abs(g[0] - Complex(2.5, 0.0)) < 1e-14);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(g[i]) < 1e-14);

    NonlinearitySpec fb(0.7, 0.4, 2.6);
    auto rng = make_rng(51);
    for (int t = 0; t < 40; ++t) {
        const double radius = std::pow(10.0, -1.0 + 2.0 * (t % 20) / 19.0);
        const C4 phi = random_spinor(rng, radius);
        // gauge invariance
        const C4 rot = axpy(std::polar(1.0, 0.77) - 1.0, phi, phi);
        CHECK(eval_F(fb, rot) == doctest::Approx(eval_F(fb, phi)).epsilon(1e-12));
        CHECK(std::sqrt(abs_sq(grad_F(fb, rot))) ==
              doctest::Approx(std::sqrt(abs_sq(grad_F(fb, phi)))).epsilon(1e-12));
        // homogeneity of degree alpha
        C4 phi2 = phi;
        for (auto& c : phi2) c *= 1.7;
        CHECK(eval_F(fb, phi2) ==
              doctest::Approx(std::pow(1.7, fb.alpha) * eval_F(fb, phi)).epsilon(1e-12));
        // dF[h] = Re<grad, h> against central differences
        const C4 h = random_spinor(rng, 1.0);
        const double fd = fd_directional(fb, phi, h, 1e-5 * radius);
        const double an = std::real(dot(grad_F(fb, phi), h));
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(1e-12, std::abs(an)) + 1e-12);
    }
}

TEST_CASE("Euler identity <grad F, phi> = alpha F holds exactly") {
    NonlinearitySpec f(0.3, 0.9, 2.5);
    auto rng = make_rng(7);
    for (int t = 0; t < 100; ++t) {
        const C4 phi = random_spinor(rng, std::pow(10.0, -2 + 4 * (t / 100.0)));
        const double lhs = std::real(dot(grad_F(f, phi), phi));
        const double rhs = f.alpha * eval_F(f, phi);
        CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("hessian action: finite differences, symmetry, singular guard") {
    NonlinearitySpec f(0.8, 0.3, 2.5);
    auto rng = make_rng(99);
    int accepted = 0;
    while (accepted < 30) {
        const C4 phi = random_spinor(rng, 1.0 + 3.0 * accepted / 30.0);
        if (std::abs(scalar_density(phi)) < 0.1 ||
            std::abs(pseudoscalar_density(phi)) < 0.1)
            continue;  // stay away from the D2F singular set
        ++accepted;
        const C4 v = random_spinor(rng, 1.0);
        const double t = 1e-6;
        C4 plus = phi, minus = phi;
        for (int i = 0; i < 4; ++i) {
            plus[i] += t * v[i];
            minus[i] -= t * v[i];
        }
        const C4 gp = grad_F(f, plus), gm = grad_F(f, minus);
        C4 fd;
        for (int i = 0; i < 4; ++i) fd[i] = (gp[i] - gm[i]) / (2 * t);
        const C4 hv = hess_F_vec(f, phi, v);
        double scale = std::max(1e-12, std::sqrt(abs_sq(hv)));
        double diff = 0.0;
        for (int i = 0; i < 4; ++i) diff = std::max(diff, std::abs(fd[i] - hv[i]));
        CHECK(diff <= 1e-6 * scale + 1e-10);

        // symmetric bilinear action
        const C4 u = random_spinor(rng, 1.0);
        const double a1 = std::real(dot(hess_F_vec(f, phi, u), v));
        const double a2 = std::real(dot(hess_F_vec(f, phi, v), u));
        CHECK(std::abs(a1 - a2) < 1e-10 * std::max(1.0, std::abs(a1)));
    }

    // singular point: s = 0 with a != 0 and no smoothing
    C4 balanced{1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0), 0.0};
    CHECK_THROWS_AS(hess_F_vec(f, balanced, C4{1.0, 0, 0, 0}), SingularPointError);

    // smoothing removes the singularity and gives hess = 0 at the origin
    NonlinearitySpec smooth(0.8, 0.3, 2.5, /*delta_reg=*/0.05);
    CHECK_NOTHROW(hess_F_vec(smooth, balanced, C4{1.0, 0, 0, 0}));
    CHECK(abs_sq(hess_F_vec(smooth, C4{}, C4{1.0, 0, 0, 0})) == 0.0);
}

TEST_CASE("the pure power family is not pointwise convex (known H4 gap)") {
    // phi in the negative-s cone, v in the positive-s cone, orthogonal:
    // the quadratic form is -a*alpha < 0.
    NonlinearitySpec f(1.0, 0.0, 2.5);
    C4 phi{0.0, 0.0, 1.0, 0.0};
    C4 v{1.0, 0.0, 0.0, 0.0};
    const double q = std::real(dot(hess_F_vec(f, phi, v), v));
    CHECK(q == doctest::Approx(-f.a * f.alpha));
}

TEST_CASE("field-level integral and gradient") {
    GridSpec g(4, 2.0, 1.0);
    NonlinearitySpec f(0.6, 0.2, 2.5);
    SpinorField u(g, Representation::position);
    const C4 val{Complex(0.4, 0.1), 0.0, Complex(0.0, 0.3), 0.0};
    for (std::size_t s = 0; s < u.site_count(); ++s) u.set_spinor(s, val);
    CHECK(integral_F(f, u) == doctest::Approx(g.volume() * eval_F(f, val)).epsilon(1e-13));
    SpinorField gf = grad_F_field(f, u);
    const C4 expect = grad_F(f, val);
    for (int c = 0; c < 4; ++c) CHECK(std::abs(gf.at(3, c) - expect[c]) < 1e-14);
    // zero spec short-circuits
    NonlinearitySpec zero(0.0, 0.0, 2.5);
    CHECK(integral_F(zero, u) == 0.0);
}

TEST_CASE("hypothesis validation for the working spec") {
    NonlinearitySpec f(0.01, 0.0, 2.5);
    HypothesisReport rep = validate_hypotheses(f, 2000, 77);

    const auto* h3 = rep.find("H3");
    REQUIRE(h3 != nullptr);
    CHECK(h3->pass);
    CHECK(std::abs(h3->worst_margin) < 1e-12);  // equality by homogeneity

    CHECK(rep.find("H1")->pass);
    // H2's sampled outcome near the null cone of s is honest but sharp:
    // the shell sup of |D2F| is unbounded for the unsmoothed power, so a
    // failing report must say so
    const auto* h2 = rep.find("H2");
    REQUIRE(h2 != nullptr);
    if (!h2->pass) CHECK(!h2->note.empty());
    CHECK(rep.find("H5")->pass);
    CHECK(std::abs(rep.find("H5")->worst_margin) < 1e-12);
    CHECK(rep.find("H6")->pass);
    CHECK(rep.find("H7")->pass);
    for (auto& [zeta, c_zeta] : rep.h7_constants) CHECK(c_zeta >= 0.0);

    // H4 fails honestly for the sign-indefinite power family
    CHECK_FALSE(rep.find("H4")->pass);
    CHECK(rep.find("H4")->worst_margin < 0.0);
    CHECK_FALSE(rep.all_pass);

    // a = 1 is too large for the unit-coefficient shell bound H2
    NonlinearitySpec big(1.0, 0.0, 2.5);
    HypothesisReport rep_big = validate_hypotheses(big, 1000, 78);
    CHECK_FALSE(rep_big.find("H2")->pass);
}

TEST_CASE("mu and delta estimates") {
    NonlinearitySpec zero(0.0, 0.0, 2.5);
    DerivedConstants z = estimate_mu_delta(zero, {1.0}, 256, 200);
    CHECK(z.mu == 0.0);
    CHECK(z.delta == 0.0);

    NonlinearitySpec f(0.01, 0.0, 2.5);
    DerivedConstants d = estimate_mu_delta(f, {1.0}, 2048, 500);
    // analytic value a*alpha for b = 0; scan resolution limits the match
    CHECK(d.mu == doctest::Approx(f.a * f.alpha).epsilon(1e-3));
    CHECK(d.mu <= f.a * f.alpha * (1 + 1e-12));
    CHECK(d.gamma_bar == f.a);
    CHECK(d.mu_eps.at(1.0) == d.mu);

    NonlinearitySpec f2(0.02, 0.0, 2.5);
    DerivedConstants d2 = estimate_mu_delta(f2, {1.0}, 2048, 500);
    CHECK(d2.mu <= 2 * d.mu * (1 + 1e-9));

    // the unsmoothed pair scan must flag non-convergence (gradient only
    // Hoelder across {s=0}), the smoothed one should stabilize
    CHECK_FALSE(d.delta_converged);
    NonlinearitySpec smooth(0.01, 0.0, 2.5, /*delta_reg=*/0.1);
    DerivedConstants ds = estimate_mu_delta(smooth, {1.0}, 512, 500);
    CHECK(ds.delta_converged);
    CHECK(ds.delta > 0.0);
}
