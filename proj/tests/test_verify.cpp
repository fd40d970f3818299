#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <normdirac/verify.hpp>

using namespace normdirac;

namespace {

GridSpec test_grid() { return GridSpec(8, 8.0, 1.0); }
NonlinearitySpec test_nonlin() { return NonlinearitySpec(0.01, 0.0, 2.5); }

const ConstantsTable& table() {
    static ConstantsTable t = [] {
        AscentOptions o;
        o.iterations = 150;
        o.starts = 4;
        return build_constants_table(test_grid(), test_nonlin(), o);
    }();
    return t;
}

SolveConfig nonlinear_config() {
    SolveConfig cfg;
    cfg.grid = test_grid();
    cfg.nonlinearity = test_nonlin();
    cfg.gamma = table().gamma0();
    cfg.lambda = 1.0;
    cfg.seed.epsilon = 0.5;
    return cfg;
}

}  // namespace

TEST_CASE("energy sandwich check") {
    SolveConfig cfg = nonlinear_config();
    SpinorField w = seed_w_epsilon(cfg.grid, 0.6);

    CheckResult r = check_energy_bounds(w, cfg, table());
    CHECK(r.pass);
    CHECK(r.margin > 0.0);

    // gamma = 0: upper bound tight, margin ~ 0 on that side
    SolveConfig lin = cfg;
    lin.gamma = 0.0;
    CheckResult r0 = check_energy_bounds(w, lin, table());
    CHECK(r0.pass);
    CHECK(std::abs(r0.lhs - r0.rhs) < 1e-12);
}

TEST_CASE("shifted convexity bound and its negative control") {
    GridSpec g = test_grid();
    NonlinearitySpec f = test_nonlin();
    auto rng = make_rng(31);
    for (int t = 0; t < 5; ++t) {
        SpinorField w = normalized_l2(
            project(make_random_field(g, Representation::frequency, rng, 1.5), +1));
        SpinorField eta =
            project(make_random_field(g, Representation::frequency, rng, 2.0), -1);
        eta *= Complex(std::sqrt(0.2 / l2_norm_sq(eta)));
        Decomposition d(1.0, w, eta);
        CheckResult r = check_shifted_convexity(d, f, table());
        CHECK(r.pass);

        if (t == 0) {
            // eta = 0 reduces to an identity with zero margin
            Decomposition d0(1.0, w, SpinorField(g, Representation::frequency));
            CheckResult r0 = check_shifted_convexity(d0, f, table());
            CHECK(std::abs(r0.margin) < 1e-12);
        }
    }

    // a concave density must defeat the harness.  F = -c (Re phi_1)^2 is
    // purely quadratic, so the radial scaling gap cancels and the margin
    // reduces to -c * int (Re eta_1)^2 < 0 once w avoids the first
    // component and eta populates it.
    SpinorField w(g, Representation::frequency);
    w.at(0, 1) = 1.0;  // zero-mode e2 spinor, in the positive subspace
    SpinorField eta_seed(g, Representation::frequency);
    eta_seed.at(eta_seed.site_index(1, 0, 0), 0) = 1.0;
    eta_seed.at(eta_seed.site_index(0, 2, 1), 0) = Complex(0.5, 0.5);
    SpinorField eta = project(eta_seed, -1);
    eta *= Complex(std::sqrt(0.3 / l2_norm_sq(eta)));
    Decomposition d(1.0, w, eta);
    const double c = 50.0;
    const double margin = shifted_convexity_margin(
        d, /*K=*/0.0,
        [&](const C4& v) { return -c * sq(std::real(v[0])); },
        [&](const C4& v) {
            return C4{Complex(-2.0 * c * std::real(v[0]), 0.0), 0.0, 0.0, 0.0};
        });
    CHECK(margin < 0.0);
}

TEST_CASE("boundary push and inner concavity") {
    SolveConfig cfg = nonlinear_config();
    CheckResult push = check_boundary_push(cfg.grid, cfg.nonlinearity, cfg.gamma,
                                           cfg.lambda, 12345);
    CHECK(push.conclusive);
    CHECK(push.pass);

    CheckResult conc = check_inner_concavity(cfg.grid, cfg.nonlinearity,
                                             0.5 * table().gamma0(), cfg.lambda,
                                             10, 6, 99);
    CHECK(conc.pass);
    CHECK(conc.lhs <= 1e-8);  // worst d2J + |xi|_H^2
}

TEST_CASE("energy deficit over the seed family") {
    SolveConfig cfg = nonlinear_config();
    CheckResult r = check_upper_bound_e(cfg, {0.4, 0.2, 0.1, 0.05});
    CHECK(r.conclusive);
    CHECK(r.pass);
    CHECK(r.margin > 0.0);
    CHECK(r.inputs.count("best_eps") == 1);

    SolveConfig lin = cfg;
    lin.gamma = 0.0;
    CheckResult r0 = check_upper_bound_e(lin, {0.4, 0.2});
    CHECK_FALSE(r0.conclusive);
}

TEST_CASE("subadditivity from seeded solves") {
    SolveConfig cfg = nonlinear_config();
    CheckResult r = check_subadditivity(cfg, table(), 0.5, 1.5);
    CHECK(r.conclusive);
    CHECK(r.pass);
    CHECK(r.margin > 0.0);
    CHECK(r.inputs.at("solver_spread") < 1e-8);

    CHECK_THROWS_AS(check_subadditivity(cfg, table(), 0.8, 1.5),
                    std::invalid_argument);

    SolveConfig lin = cfg;
    lin.gamma = 0.0;
    CheckResult r0 = check_subadditivity(lin, table(), 0.5, 1.5);
    CHECK_FALSE(r0.conclusive);
}

TEST_CASE("multiplier and critical lower bounds on a converged solve") {
    SolveConfig cfg = nonlinear_config();
    SolveReport rep = minimize_outer(cfg, table());

    CheckResult mult = check_multiplier(rep);
    CHECK(mult.conclusive);
    CHECK(mult.pass);

    CheckResult low = check_lower_bounds(rep, cfg.nonlinearity, table());
    CHECK(low.conclusive);
    CHECK(low.pass);
    CHECK(low.inputs.at("identity_residual") <= 1e-9);
    CHECK(low.inputs.at("I_psi") > 0.0);
}

TEST_CASE("checks are reproducible bit for bit under a fixed seed") {
    SolveConfig cfg = nonlinear_config();
    CheckResult a = check_inner_concavity(cfg.grid, cfg.nonlinearity, cfg.gamma,
                                          cfg.lambda, 4, 3, 4242);
    CheckResult b = check_inner_concavity(cfg.grid, cfg.nonlinearity, cfg.gamma,
                                          cfg.lambda, 4, 3, 4242);
    CHECK(a.lhs == b.lhs);
    CHECK(a.margin == b.margin);
    CheckResult c = check_boundary_push(cfg.grid, cfg.nonlinearity, cfg.gamma,
                                        cfg.lambda, 777);
    CheckResult d = check_boundary_push(cfg.grid, cfg.nonlinearity, cfg.gamma,
                                        cfg.lambda, 777);
    CHECK(c.lhs == d.lhs);
    CHECK(c.margin == d.margin);
}

TEST_CASE("full scorecard runs and passes at the working coupling") {
    SolveConfig cfg = nonlinear_config();
    ScorecardOptions opt;
    opt.concavity_pairs = 8;
    opt.concavity_dirs = 5;
    Scorecard card = run_scorecard(cfg, table(), opt);
    CHECK(card.all_conclusive_pass);
    CHECK(card.results.size() == 10);
    for (const auto& c : card.results) {
        INFO(c.name);
        CHECK(c.conclusive);
        CHECK(c.pass);
    }
    CHECK(card.solve.success);
}
