// Prints an ASCII histogram of a 1-D coined walk released from a single site.
// With the biased (Hadamard-style) coin the distribution is famously lopsided:
// most of the probability piles up in two ballistic peaks near +/- t/sqrt(2),
// nothing like the Gaussian of a classical random walk.

#include <cstdio>
#include <numbers>
#include <vector>

#include "qwalk/lattice.hpp"
#include "qwalk/operator_algebra.hpp"
#include "qwalk/walk.hpp"

using namespace qwalk;

int main() {
    const int n = 128;
    const int steps = 48;
    const int origin = n / 2;

    // theta = pi/2 at dx = 1 turns the coin into the balanced-but-biased flip.
    const WalkParams params = make_walk_params(1, n, 1.0, std::numbers::pi / 2.0);
    const StepOperator op = make_step_operator(params, make_hadamard_set());

    Vector spinor(2);
    spinor << Complex(1.0, 0.0), Complex(0.0, 0.0);
    LatticeState state = delta_state(1, n, {origin, 0, 0}, spinor);
    evolve(op, state, steps);

    std::vector<double> prob(static_cast<std::size_t>(n), 0.0);
    double peak = 0.0;
    for (int x = 0; x < n; ++x) {
        double p = 0.0;
        for (int c = 0; c < 2; ++c) p += std::norm(state.at(x, c));
        prob[static_cast<std::size_t>(x)] = p;
        peak = std::max(peak, p);
    }

    std::printf("single-site release, %d steps, biased coin, %d sites\n\n", steps, n);
    for (int x = origin - steps - 2; x <= origin + steps + 2; ++x) {
        const double p = prob[static_cast<std::size_t>(x)];
        if (p < 1e-9) continue;
        const int bars = static_cast<int>(p / peak * 60.0 + 0.5);
        std::printf("%+4d | %-60.*s %.4f\n", x - origin, bars,
                    "############################################################", p);
    }
    std::printf("\ntotal probability %.15f\n", l2_norm(state) * l2_norm(state));
    return 0;
}
