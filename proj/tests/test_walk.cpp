#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

using namespace qwalk;

namespace {

// Independent route: the full one-step matrix over site (x) spin space, built
// from scatter form. in(x) sends P+ in(x) to out(x+1_a) and P- in(x) to
// out(x-1_a); stages multiply on the left in axis_order, coin rightmost.
Matrix dense_step_matrix(const StepOperator& op) {
    const int n = op.params.n;
    const int d = op.set.dim;
    const int dims = op.params.dims;
    const std::int64_t sites = (dims == 3) ? static_cast<std::int64_t>(n) * n * n : n;
    const std::int64_t total = sites * d;
    Matrix u = Matrix::Zero(total, total);
    for (std::int64_t s = 0; s < sites; ++s) u.block(s * d, s * d, d, d) = op.coin;
    for (int idx = dims - 1; idx >= 0; --idx) {
        const int axis = (dims == 1) ? 0 : static_cast<int>(op.axis_order[static_cast<std::size_t>(idx)]);
        Matrix stage = Matrix::Zero(total, total);
        for (std::int64_t s = 0; s < sites; ++s) {
            int c[3] = {static_cast<int>(s % n), static_cast<int>((s / n) % n),
                        static_cast<int>(s / (static_cast<std::int64_t>(n) * n))};
            int cp[3] = {c[0], c[1], c[2]};
            cp[axis] = (c[axis] + 1) % n;
            int cm[3] = {c[0], c[1], c[2]};
            cm[axis] = (c[axis] + n - 1) % n;
            const std::int64_t sp = (static_cast<std::int64_t>(cp[2]) * n + cp[1]) * n + cp[0];
            const std::int64_t sm = (static_cast<std::int64_t>(cm[2]) * n + cm[1]) * n + cm[0];
            stage.block((dims == 1 ? cp[0] : sp) * d, s * d, d, d) +=
                op.pairs[static_cast<std::size_t>(axis)].plus;
            stage.block((dims == 1 ? cm[0] : sm) * d, s * d, d, d) +=
                op.pairs[static_cast<std::size_t>(axis)].minus;
        }
        u = stage * u;
    }
    return u;
}

Vector state_as_vector(const LatticeState& s) {
    Vector v(static_cast<Eigen::Index>(s.amps.size()));
    for (std::size_t i = 0; i < s.amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = s.amps[i];
    return v;
}

}  // namespace

TEST_CASE("step operator construction and validation", "[walk]") {
    const WalkParams p1 = make_walk_params(1, 16, 1.0, 0.4);
    const StepOperator line = make_step_operator(p1, make_line_set());
    CHECK(testutil::mat_dist(line.coin, testutil::phase_exp_eig(-0.4, pauli(2))) < 1e-14);
    CHECK(line.pairs.size() == 1);
    CHECK(testutil::mat_dist(line.pairs[0].plus + line.pairs[0].minus, identity(2)) < 1e-15);

    // theta = 0 needs no q at all
    const WalkParams p3m0 = make_walk_params(3, 8, 1.0, 0.0);
    const StepOperator weyl = make_step_operator(p3m0, make_weyl_set());
    CHECK(testutil::mat_dist(weyl.coin, identity(2)) == 0.0);

    // a coin generator that does not anticommute with the delta is still a
    // legal unitary step
    const WalkParams ph = make_walk_params(1, 16, 1.0, std::numbers::pi / 2.0);
    CHECK_NOTHROW(make_step_operator(ph, make_hadamard_set()));

    SECTION("guards") {
        const WalkParams p3 = make_walk_params(3, 8, 1.0, 0.3);
        REQUIRE_THROWS_AS(make_step_operator(p3, make_weyl_set()), std::invalid_argument);
        REQUIRE_THROWS_AS(make_step_operator(p1, make_dirac_set()), std::invalid_argument);
        REQUIRE_THROWS_AS(make_step_operator(p3, make_line_set()), std::invalid_argument);
        REQUIRE_THROWS_AS(make_step_operator(p3, make_dirac_set(), {Axis::X, Axis::X, Axis::Z}),
                          std::invalid_argument);
        CoinSet scaled = make_dirac_set();
        scaled.deltas[0] *= 2.0;
        REQUIRE_THROWS_AS(make_step_operator(p3, scaled), std::invalid_argument);
        CoinSet dup = make_dirac_set();
        dup.deltas[1] = dup.deltas[0];
        REQUIRE_THROWS_AS(make_step_operator(p3, dup), std::invalid_argument);
    }
}

TEST_CASE("two-step amplitudes match the hand computation", "[walk]") {
    // Coin angle pi/2 with the sigma_z-shift set: the coin is -i H, so two
    // steps from site 8, spin up, give amplitudes -1/2 at (10, up),
    // -1/2 and -1/2 at (8, up/down), +1/2 at (6, down).
    const WalkParams p = make_walk_params(1, 16, 1.0, std::numbers::pi / 2.0);
    const StepOperator op = make_step_operator(p, make_hadamard_set());
    Vector up(2);
    up << 1.0, 0.0;
    LatticeState s = delta_state(1, 16, {8, 0, 0}, up);
    evolve(op, s, 2);

    CHECK(std::abs(s.at(10, 0) - Complex(-0.5, 0.0)) < 1e-14);
    CHECK(std::abs(s.at(8, 0) - Complex(-0.5, 0.0)) < 1e-14);
    CHECK(std::abs(s.at(8, 1) - Complex(-0.5, 0.0)) < 1e-14);
    CHECK(std::abs(s.at(6, 1) - Complex(0.5, 0.0)) < 1e-14);

    double elsewhere = 0.0;
    for (int x = 0; x < 16; ++x)
        for (int c = 0; c < 2; ++c) {
            if ((x == 10 && c == 0) || (x == 8) || (x == 6 && c == 1)) continue;
            elsewhere = std::max(elsewhere, std::abs(s.at(x, c)));
        }
    CHECK(elsewhere < 1e-15);

    const double pr_right = std::norm(s.at(10, 0)) + std::norm(s.at(10, 1));
    const double pr_mid = std::norm(s.at(8, 0)) + std::norm(s.at(8, 1));
    const double pr_left = std::norm(s.at(6, 0)) + std::norm(s.at(6, 1));
    CHECK(std::abs(pr_right - 0.25) < 1e-15);
    CHECK(std::abs(pr_mid - 0.5) < 1e-15);
    CHECK(std::abs(pr_left - 0.25) < 1e-15);
}

TEST_CASE("position step agrees with the dense one-step matrix", "[walk]") {
    Rng rng(60);
    SECTION("1-D") {
        const WalkParams p = make_walk_params(1, 8, 1.0, 0.3);
        const StepOperator op = make_step_operator(p, make_line_set());
        const Matrix u = dense_step_matrix(op);
        CHECK(unitarity_residual(u) < 1e-13);
        LatticeState s = random_lattice_state(1, 8, 2, rng);
        const Vector expect = u * state_as_vector(s);
        step_position(op, s);
        CHECK((state_as_vector(s) - expect).cwiseAbs().maxCoeff() < 1e-13);
    }
    SECTION("3-D") {
        const WalkParams p = make_walk_params(3, 4, 1.0, 0.25);
        const StepOperator op = make_step_operator(p, make_dirac_set());
        const Matrix u = dense_step_matrix(op);
        CHECK(unitarity_residual(u) < 1e-13);
        LatticeState s = random_lattice_state(3, 4, 4, rng);
        const Vector expect = u * state_as_vector(s);
        step_position(op, s);
        CHECK((state_as_vector(s) - expect).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("free walk transports shift eigenstates rigidly", "[walk]") {
    // With theta = 0 and the sigma_z delta, spin up rides right one site per
    // step with no arithmetic on the amplitude at all.
    const WalkParams p = make_walk_params(1, 32, 1.0, 0.0);
    CoinSet set = make_hadamard_set();
    const StepOperator op = make_step_operator(p, set);
    Vector up(2);
    up << 1.0, 0.0;
    LatticeState s = delta_state(1, 32, {4, 0, 0}, up);
    evolve(op, s, 5);
    CHECK(s.at(9, 0) == Complex(1.0, 0.0));
    Vector down(2);
    down << 0.0, 1.0;
    LatticeState t = delta_state(1, 32, {4, 0, 0}, down);
    evolve(op, t, 5);
    CHECK(t.at(31, 1) == Complex(1.0, 0.0));
    REQUIRE_THROWS_AS(evolve(op, t, -1), std::invalid_argument);
    LatticeState frozen = t;
    evolve(op, frozen, 0);
    CHECK(l2_distance(frozen, t) == 0.0);
}

TEST_CASE("norm is preserved over long evolutions", "[walk]") {
    Rng rng(61);
    SECTION("position, 3-D") {
        const WalkParams p = make_walk_params(3, 8, 1.0, 0.3);
        const StepOperator op = make_step_operator(p, make_dirac_set());
        LatticeState s = random_lattice_state(3, 8, 4, rng);
        evolve(op, s, 100);
        CHECK(std::abs(l2_norm(s) - 1.0) < 1e-10);
    }
    SECTION("momentum, 1-D") {
        const WalkParams p = make_walk_params(1, 64, 1.0, 0.4);
        const StepOperator op = make_step_operator(p, make_line_set());
        LatticeState s = random_lattice_state(1, 64, 2, rng, Rep::Momentum);
        evolve(op, s, 200);
        CHECK(std::abs(l2_norm(s) - 1.0) < 1e-10);
    }
}

TEST_CASE("momentum block matches an eigendecomposition route", "[walk]") {
    Rng rng(62);
    SECTION("1-D line set") {
        const WalkParams p = make_walk_params(1, 32, 0.5, 0.8);
        const StepOperator op = make_step_operator(p, make_line_set());
        for (double k : {0.0, 0.7, -2.1, std::numbers::pi / p.dx}) {
            const Matrix u = momentum_block(op, {k, 0.0, 0.0});
            const Matrix ref = testutil::phase_exp_eig(k * p.dx, op.set.deltas[0]) *
                               testutil::phase_exp_eig(-p.theta, *op.set.q);
            CHECK(testutil::mat_dist(u, ref) < 1e-14);
            CHECK(unitarity_residual(u) < 1e-14);
        }
    }
    SECTION("3-D dirac set, explicit factor order") {
        const WalkParams p = make_walk_params(3, 8, 1.0, 0.35);
        const StepOperator op =
            make_step_operator(p, make_dirac_set(), {Axis::Y, Axis::Z, Axis::X});
        const std::array<double, 3> k{0.4, -1.1, 2.0};
        const Matrix u = momentum_block(op, k);
        const auto& dl = op.set.deltas;
        const Matrix ref = testutil::phase_exp_eig(k[1] * p.dx, dl[1]) *
                           testutil::phase_exp_eig(k[2] * p.dx, dl[2]) *
                           testutil::phase_exp_eig(k[0] * p.dx, dl[0]) *
                           testutil::phase_exp_eig(-p.theta, *op.set.q);
        CHECK(testutil::mat_dist(u, ref) < 1e-13);
        CHECK(unitarity_residual(u) < 1e-13);
        REQUIRE_THROWS_AS(momentum_block(op, {3.5, 0.0, 0.0}), std::invalid_argument);
    }
}

TEST_CASE("position and momentum evolutions agree", "[walk]") {
    Rng rng(63);
    struct Case {
        int dims, n, steps;
        double mass;
        CoinSet set;
    };
    const Case cases[] = {{1, 32, 20, 0.4, make_line_set()},
                          {3, 8, 8, 0.3, make_dirac_set()},
                          {3, 8, 8, 0.0, make_weyl_set()}};
    for (const Case& c : cases) {
        const WalkParams p = make_walk_params(c.dims, c.n, 1.0, c.mass);
        const StepOperator op = make_step_operator(p, c.set);
        LatticeState pos = random_lattice_state(c.dims, c.n, c.set.dim, rng);
        LatticeState mom = to_momentum(pos);
        evolve(op, pos, c.steps);
        evolve(op, mom, c.steps);
        CHECK(l2_distance(pos, to_position(mom)) < 1e-10);
    }
}

TEST_CASE("plane waves pick up exactly the fiber block", "[walk]") {
    const WalkParams p = make_walk_params(1, 32, 1.0, 0.6);
    const StepOperator op = make_step_operator(p, make_line_set());
    Vector sp(2);
    sp << 0.8, Complex(0.0, -0.6);
    const int ms = 5;
    LatticeState s = to_momentum(plane_wave(1, 32, {ms, 0, 0}, sp));
    step_momentum(op, s);
    const int bin = bin_of_signed(ms, 32);
    const double k = k_for_bin(bin, 32, p.dx);
    const Vector expect = momentum_block(op, {k, 0.0, 0.0}) * sp;
    CHECK(std::abs(s.at(bin, 0) - expect(0)) < 1e-13);
    CHECK(std::abs(s.at(bin, 1) - expect(1)) < 1e-13);
    for (int b = 0; b < 32; ++b) {
        if (b == bin) continue;
        CHECK(std::abs(s.at(b, 0)) < 1e-14);  // transform roundoff only
        CHECK(std::abs(s.at(b, 1)) < 1e-14);
    }

    // a fiber that starts exactly zero stays exactly zero
    LatticeState exact = make_lattice_state(1, 32, 2, Rep::Momentum);
    exact.at(bin, 0) = sp(0);
    exact.at(bin, 1) = sp(1);
    step_momentum(op, exact);
    double leak = 0.0;
    for (int b = 0; b < 32; ++b) {
        if (b == bin) continue;
        leak = std::max({leak, std::abs(exact.at(b, 0)), std::abs(exact.at(b, 1))});
    }
    CHECK(leak == 0.0);
    CHECK(std::abs(exact.at(bin, 0) - expect(0)) < 1e-15);
    CHECK(std::abs(exact.at(bin, 1) - expect(1)) < 1e-15);
}

TEST_CASE("axis application order matters only at second order in k", "[walk]") {
    const WalkParams p = make_walk_params(3, 8, 1.0, 0.3);
    const StepOperator xyz = make_step_operator(p, make_dirac_set(), {Axis::X, Axis::Y, Axis::Z});
    const StepOperator zyx = make_step_operator(p, make_dirac_set(), {Axis::Z, Axis::Y, Axis::X});

    CHECK(testutil::mat_dist(momentum_block(xyz, {0, 0, 0}), momentum_block(zyx, {0, 0, 0})) ==
          0.0);

    auto diff_at = [&](double kappa) {
        return testutil::mat_dist(momentum_block(xyz, {kappa, kappa, kappa}),
                                  momentum_block(zyx, {kappa, kappa, kappa}));
    };
    const double d1 = diff_at(0.02);
    const double d2 = diff_at(0.01);
    CHECK(d1 > 1e-6);              // the orders genuinely differ
    CHECK(d1 / d2 == Catch::Approx(4.0).margin(0.2));  // and shrink quadratically

    // the two orders are different unitaries on a generic state
    Rng rng(64);
    LatticeState a = random_lattice_state(3, 8, 4, rng);
    LatticeState b = a;
    step_position(xyz, a);
    step_position(zyx, b);
    CHECK(l2_distance(a, b) > 1e-3);
    CHECK(std::abs(l2_norm(a) - 1.0) < 1e-13);
    CHECK(std::abs(l2_norm(b) - 1.0) < 1e-13);
}

TEST_CASE("reflection plus the coin generator commutes with the step", "[walk]") {
    SECTION("1-D") {
        const WalkParams p = make_walk_params(1, 16, 1.0, 0.5);
        const StepOperator op = make_step_operator(p, make_line_set());
        const CertReport r = check_parity_invariance(op, 10);
        CHECK(r.pass);
        CHECK(r.residual_max < 1e-12);
        CHECK(r.details.size() == 10);
    }
    SECTION("3-D") {
        const WalkParams p = make_walk_params(3, 4, 1.0, 0.3);
        const StepOperator op = make_step_operator(p, make_dirac_set());
        const CertReport r = check_parity_invariance(op, 5);
        CHECK(r.pass);
        CHECK(r.residual_max < 1e-12);
    }
    SECTION("fails when q does not swap the projectors") {
        const WalkParams p = make_walk_params(1, 16, 1.0, 0.5);
        const StepOperator op = make_step_operator(p, make_hadamard_set());
        const CertReport r = check_parity_invariance(op, 5);
        CHECK_FALSE(r.pass);
        CHECK(r.residual_max > 0.1);
    }
    SECTION("needs a coin generator") {
        const WalkParams p = make_walk_params(3, 4, 1.0, 0.0);
        const StepOperator op = make_step_operator(p, make_weyl_set());
        REQUIRE_THROWS_AS(check_parity_invariance(op), std::invalid_argument);
    }
}
