#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "test_util.hpp"

using namespace qwalk;
using testutil::naive_to_momentum;

TEST_CASE("walk parameters derive the time step and coin angle", "[lattice]") {
    const WalkParams p = make_walk_params(1, 64, 0.5, 0.25);
    CHECK(p.dt == 0.5);
    CHECK(p.theta == 0.125);
    CHECK(make_walk_params(3, 16, 1.0, 0.0).theta == 0.0);
    REQUIRE_THROWS_AS(make_walk_params(2, 16, 1.0, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_walk_params(1, 48, 1.0, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_walk_params(1, 0, 1.0, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_walk_params(1, 16, -1.0, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_walk_params(1, 16, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("momentum transform matches the direct sum", "[lattice]") {
    Rng rng(42);
    SECTION("1-D") {
        const LatticeState s = random_lattice_state(1, 32, 2, rng);
        const LatticeState fast = to_momentum(s);
        const LatticeState slow = naive_to_momentum(s);
        CHECK(l2_distance(fast, slow) < 1e-12);
    }
    SECTION("3-D") {
        const LatticeState s = random_lattice_state(3, 8, 2, rng);
        const LatticeState fast = to_momentum(s);
        const LatticeState slow = naive_to_momentum(s);
        CHECK(l2_distance(fast, slow) < 1e-12);
    }
    SECTION("uniform state concentrates at k = 0") {
        LatticeState s = make_lattice_state(1, 16, 1);
        for (Complex& a : s.amps) a = 0.25;  // norm 1
        const LatticeState m = to_momentum(s);
        CHECK(std::abs(m.at(0, 0) - Complex(1.0, 0.0)) < 1e-14);
        for (int b = 1; b < 16; ++b) CHECK(std::abs(m.at(b, 0)) < 1e-14);
    }
}

TEST_CASE("transforms are unitary and invert each other", "[lattice]") {
    Rng rng(43);
    const LatticeState s = random_lattice_state(3, 16, 4, rng);
    const LatticeState m = to_momentum(s);
    CHECK(std::abs(l2_norm(m) - 1.0) < 1e-13);  // Parseval
    const LatticeState back = to_position(m);
    CHECK(l2_distance(s, back) < 1e-13);
    REQUIRE_THROWS_AS(to_momentum(m), std::invalid_argument);
    REQUIRE_THROWS_AS(to_position(s), std::invalid_argument);
}

TEST_CASE("shift moves sites cyclically and exactly", "[lattice]") {
    Vector sp(1);
    sp << 1.0;
    SECTION("delta state moves one site") {
        const LatticeState d = delta_state(1, 8, {3, 0, 0}, sp);
        const LatticeState right = shift(d, Axis::X, +1);
        CHECK(std::abs(right.at(4, 0) - Complex(1.0, 0.0)) == 0.0);
        const LatticeState left = shift(d, Axis::X, -1);
        CHECK(std::abs(left.at(2, 0) - Complex(1.0, 0.0)) == 0.0);
        const LatticeState wrap = shift(delta_state(1, 8, {7, 0, 0}, sp), Axis::X, +1);
        CHECK(std::abs(wrap.at(0, 0) - Complex(1.0, 0.0)) == 0.0);
    }
    SECTION("shift then unshift restores the state bit for bit") {
        Rng rng(44);
        const LatticeState s = random_lattice_state(3, 8, 3, rng);
        for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
            const LatticeState round = shift(shift(s, a, +1), a, -1);
            CHECK(l2_distance(round, s) == 0.0);
        }
        CHECK(std::abs(l2_norm(shift(s, Axis::Y, +1)) - 1.0) < 1e-15);
    }
    SECTION("plane waves are shift eigenstates with phase e^{i k dx}") {
        // One right shift multiplies a wave of grid momentum m by e^{+2 pi i m/n}.
        const int n = 16;
        for (int m : {0, 1, 5, 8, -3}) {
            const LatticeState w = plane_wave(1, n, {m, 0, 0}, sp);
            const LatticeState sw = shift(w, Axis::X, +1);
            const Complex phase = std::polar(1.0, 2.0 * std::numbers::pi * m / n);
            double worst = 0.0;
            for (int x = 0; x < n; ++x)
                worst = std::max(worst, std::abs(sw.at(x, 0) - phase * w.at(x, 0)));
            CHECK(worst < 1e-14);
        }
    }
    SECTION("guards") {
        Rng rng(45);
        const LatticeState s = random_lattice_state(1, 8, 1, rng);
        REQUIRE_THROWS_AS(shift(s, Axis::Y, +1), std::invalid_argument);
        REQUIRE_THROWS_AS(shift(s, Axis::X, 2), std::invalid_argument);
        REQUIRE_THROWS_AS(shift(to_momentum(s), Axis::X, 1), std::invalid_argument);
    }
}

TEST_CASE("shift acts in momentum space as multiplication by e^{+i k dx}", "[lattice]") {
    Rng rng(46);
    const int n = 16;
    const LatticeState s = random_lattice_state(1, n, 2, rng);
    const LatticeState lhs = to_momentum(shift(s, Axis::X, +1));
    LatticeState rhs = to_momentum(s);
    for (int m = 0; m < n; ++m) {
        const Complex phase = std::polar(1.0, 2.0 * std::numbers::pi * signed_bin(m, n) / n);
        for (int c = 0; c < 2; ++c) rhs.at(m, c) *= phase;
    }
    CHECK(l2_distance(lhs, rhs) < 1e-13);
}

TEST_CASE("plane waves land on single momentum bins", "[lattice]") {
    Vector sp(2);
    sp << 0.6, Complex(0.0, 0.8);
    const int n = 16;
    const LatticeState w = plane_wave(3, n, {3, -2, 8}, sp);
    CHECK(std::abs(l2_norm(w) - 1.0) < 1e-13);
    const LatticeState m = to_momentum(w);
    const std::int64_t bin =
        flat_site(m, bin_of_signed(3, n), bin_of_signed(-2, n), bin_of_signed(8, n));
    CHECK(std::abs(m.at(bin, 0) - Complex(0.6, 0.0)) < 1e-13);
    CHECK(std::abs(m.at(bin, 1) - Complex(0.0, 0.8)) < 1e-13);
    double elsewhere = 0.0;
    for (std::int64_t site = 0; site < m.sites(); ++site) {
        if (site == bin) continue;
        for (int c = 0; c < 2; ++c) elsewhere = std::max(elsewhere, std::abs(m.at(site, c)));
    }
    CHECK(elsewhere < 1e-13);
}

TEST_CASE("gaussian packets peak at the requested momentum", "[lattice]") {
    const WalkParams p = make_walk_params(1, 128, 1.0, 0.0);
    Vector sp(2);
    sp << 1.0, 0.0;
    const double k0 = 0.3;
    const double sigma = 8.0;
    const LatticeState g = gaussian_packet(p, {64.0, 0.0, 0.0}, sigma, {k0, 0.0, 0.0}, sp);
    CHECK(std::abs(l2_norm(g) - 1.0) < 1e-13);

    SECTION("zero-momentum packet is a real positive envelope times the spinor") {
        const LatticeState flat = gaussian_packet(p, {64.0, 0.0, 0.0}, sigma, {0.0, 0.0, 0.0}, sp);
        for (int x = 0; x < p.n; ++x) {
            CHECK(flat.at(x, 0).imag() == 0.0);
            CHECK(flat.at(x, 0).real() >= 0.0);
            CHECK(std::abs(flat.at(x, 1)) == 0.0);
        }
        CHECK(flat.at(64, 0).real() > flat.at(32, 0).real());
    }

    SECTION("momentum histogram peaks at the nearest grid momentum to +k0") {
        const LatticeState m = to_momentum(g);
        int best = 0;
        double best_p = -1.0;
        for (int b = 0; b < p.n; ++b) {
            const double prob = std::norm(m.at(b, 0)) + std::norm(m.at(b, 1));
            if (prob > best_p) {
                best_p = prob;
                best = b;
            }
        }
        CHECK(best == bin_for_k(k0, p.n, p.dx));
        CHECK(signed_bin(best, p.n) > 0);  // +k0, not -k0
    }

    SECTION("momentum width is close to 1/(2 sigma)") {
        const LatticeState m = to_momentum(g);
        double mean = 0.0, mom2 = 0.0;
        for (int b = 0; b < p.n; ++b) {
            const double k = k_for_bin(b, p.n, p.dx);
            const double prob = std::norm(m.at(b, 0)) + std::norm(m.at(b, 1));
            mean += prob * k;
            mom2 += prob * k * k;
        }
        const double width = std::sqrt(std::max(0.0, mom2 - mean * mean));
        CHECK(std::abs(mean - k0) < 0.01);
        CHECK(std::abs(width - 1.0 / (2.0 * sigma)) < 0.1 / (2.0 * sigma));
    }

    SECTION("guards") {
        REQUIRE_THROWS_AS(gaussian_packet(p, {64.0, 0.0, 0.0}, 0.0, {k0, 0.0, 0.0}, sp),
                          std::invalid_argument);
        Vector zero = Vector::Zero(2);
        REQUIRE_THROWS_AS(gaussian_packet(p, {64.0, 0.0, 0.0}, sigma, {k0, 0.0, 0.0}, zero),
                          std::invalid_argument);
    }
}

TEST_CASE("parity reflection", "[lattice]") {
    Vector sp(1);
    sp << 1.0;
    SECTION("reflects sites through the origin") {
        const LatticeState d = delta_state(1, 8, {3, 0, 0}, sp);
        const LatticeState r = parity_reflect(d);
        CHECK(std::abs(r.at(5, 0) - Complex(1.0, 0.0)) == 0.0);
        CHECK(l2_distance(parity_reflect(r), d) == 0.0);
    }
    SECTION("conjugates shifts: r S r = S^{-1}") {
        Rng rng(47);
        const LatticeState s = random_lattice_state(3, 8, 2, rng);
        for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
            const LatticeState lhs = parity_reflect(shift(parity_reflect(s), a, +1));
            const LatticeState rhs = shift(s, a, -1);
            CHECK(l2_distance(lhs, rhs) == 0.0);
        }
    }
    SECTION("commutes with the transform onto reflected momenta") {
        Rng rng(48);
        const LatticeState s = random_lattice_state(1, 16, 2, rng);
        const LatticeState lhs = to_momentum(parity_reflect(s));
        LatticeState rhs = to_momentum(s);
        rhs = parity_reflect(rhs);
        CHECK(l2_distance(lhs, rhs) < 1e-13);
    }
}

TEST_CASE("momentum grid indexing", "[lattice]") {
    const int n = 16;
    for (int m = 0; m < n; ++m) {
        const int ms = signed_bin(m, n);
        CHECK(ms > -n / 2);
        CHECK(ms <= n / 2);
        CHECK(bin_of_signed(ms, n) == m);
        CHECK(bin_for_k(k_for_bin(m, n, 0.5), n, 0.5) == m);
    }
    CHECK(k_for_bin(n / 2, n, 1.0) == Catch::Approx(std::numbers::pi));
    CHECK(signed_bin(n / 2 + 1, n) == -n / 2 + 1);
}

TEST_CASE("sitewise application matches per-fiber multiplication", "[lattice]") {
    Rng rng(49);
    const Matrix m = random_unitary(3, rng);
    LatticeState s = random_lattice_state(1, 8, 3, rng);
    const LatticeState orig = s;
    apply_sitewise(m, s);
    for (int x = 0; x < 8; ++x) {
        Vector v(3);
        for (int c = 0; c < 3; ++c) v(c) = orig.at(x, c);
        const Vector w = m * v;
        for (int c = 0; c < 3; ++c) CHECK(std::abs(s.at(x, c) - w(c)) < 1e-14);
    }
    const Matrix wrong = identity(2);
    REQUIRE_THROWS_AS(apply_sitewise(wrong, s), std::invalid_argument);
}

TEST_CASE("state constructors validate their input", "[lattice]") {
    Vector sp(2);
    sp << 1.0, 0.0;
    REQUIRE_THROWS_AS(delta_state(1, 8, {9, 0, 0}, sp), std::invalid_argument);
    REQUIRE_THROWS_AS(delta_state(1, 8, {0, 0, 0}, Vector::Zero(2)), std::invalid_argument);
    REQUIRE_THROWS_AS(make_lattice_state(1, 12, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(make_lattice_state(1, 8, 0), std::invalid_argument);
    LatticeState z = make_lattice_state(1, 8, 1);
    REQUIRE_THROWS_AS(normalize(z), std::invalid_argument);
    Rng rng(50);
    const LatticeState a = random_lattice_state(1, 16, 2, rng);
    Rng rng2(50);
    const LatticeState b = random_lattice_state(1, 16, 2, rng2);
    CHECK(l2_distance(a, b) == 0.0);  // seeded reproducibility
}

TEST_CASE("snapshot csv round trip", "[lattice][io]") {
    Rng rng(51);
    SECTION("1-D position") {
        const LatticeState s = random_lattice_state(1, 8, 2, rng);
        std::stringstream ss;
        write_state_csv(s, ss);
        const std::string text = ss.str();
        CHECK(text.rfind("ix,component,re,im\n", 0) == 0);
        std::stringstream in(text);
        const LatticeState back = read_state_csv(in);
        REQUIRE(back.rep == Rep::Position);
        REQUIRE(back.n == 8);
        REQUIRE(back.d == 2);
        CHECK(l2_distance(s, back) == 0.0);  // 17 significant digits round-trip exactly
    }
    SECTION("3-D momentum") {
        const LatticeState s = random_lattice_state(3, 4, 4, rng, Rep::Momentum);
        std::stringstream ss;
        write_state_csv(s, ss);
        CHECK(ss.str().rfind("ikx,iky,ikz,component,re,im\n", 0) == 0);
        const LatticeState back = read_state_csv(ss);
        REQUIRE(back.rep == Rep::Momentum);
        REQUIRE(back.dims == 3);
        CHECK(l2_distance(s, back) == 0.0);
    }
    SECTION("malformed input is rejected") {
        std::stringstream bad_header("foo,component,re,im\n0,0,1,0\n");
        REQUIRE_THROWS_AS(read_state_csv(bad_header), std::runtime_error);
        // drop one row of a valid file
        const LatticeState s = random_lattice_state(1, 4, 1, rng);
        std::stringstream ss;
        write_state_csv(s, ss);
        std::string text = ss.str();
        text.erase(text.rfind("3,"));
        std::stringstream truncated(text);
        REQUIRE_THROWS_AS(read_state_csv(truncated), std::runtime_error);
        // duplicate a row (count is right, one slot filled twice)
        std::stringstream dup("ix,component,re,im\n0,0,1,0\n0,1,0,0\n1,0,0,0\n0,1,0,0\n");
        REQUIRE_THROWS_AS(read_state_csv(dup), std::runtime_error);
        std::stringstream garbled("ix,component,re,im\n0,0,abc,0\n1,0,0,0\n");
        REQUIRE_THROWS_AS(read_state_csv(garbled), std::runtime_error);
    }
}

TEST_CASE("coin set json round trip", "[lattice][io]") {
    SECTION("dirac and hadamard survive exactly") {
        for (const CoinSet& s : {make_dirac_set(), make_hadamard_set()}) {
            const nlohmann::json j = coin_set_to_json(s);
            const CoinSet back = coin_set_from_json(j);
            REQUIRE(back.dim == s.dim);
            REQUIRE(back.deltas.size() == s.deltas.size());
            for (std::size_t i = 0; i < s.deltas.size(); ++i)
                CHECK(testutil::mat_dist(back.deltas[i], s.deltas[i]) == 0.0);
            REQUIRE(back.q.has_value() == s.q.has_value());
            if (s.q) CHECK(testutil::mat_dist(*back.q, *s.q) == 0.0);
        }
        const CoinSet weyl = coin_set_from_json(coin_set_to_json(make_weyl_set()));
        CHECK_FALSE(weyl.q.has_value());
    }
    SECTION("schema violations are rejected") {
        nlohmann::json j = coin_set_to_json(make_line_set());
        j["extra"] = 1;
        REQUIRE_THROWS_AS(coin_set_from_json(j), std::runtime_error);
        nlohmann::json short_entries = coin_set_to_json(make_line_set());
        short_entries["deltas"][0]["re"] = {1.0, 0.0};
        REQUIRE_THROWS_AS(coin_set_from_json(short_entries), std::runtime_error);
        nlohmann::json no_dim = coin_set_to_json(make_line_set());
        no_dim.erase("dim");
        REQUIRE_THROWS_AS(coin_set_from_json(no_dim), std::runtime_error);
    }
    SECTION("named sets resolve") {
        CHECK(resolve_coin_set("dirac").dim == 4);
        CHECK(resolve_coin_set("weyl").deltas.size() == 3);
        CHECK(resolve_coin_set("line").deltas.size() == 1);
        REQUIRE_THROWS_AS(resolve_coin_set("/nonexistent/path.json"), std::runtime_error);
    }
}
