// Refinement study: walk a Gaussian packet, evolve the same packet with the
// exact continuum propagator, and print the gap at matched physical time as
// the mesh refines. The massive walk's gap shrinks level by level; the
// massless 1-D walk is exact to rounding at every resolution because its coin
// and shift factors commute.

#include <cstdio>

#include "qwalk/continuum.hpp"
#include "qwalk/operator_algebra.hpp"

using namespace qwalk;

namespace {

ConvergenceScanSpec base_spec() {
    ConvergenceScanSpec spec;
    spec.dims = 1;
    spec.set = make_line_set();
    spec.box_length = 64.0;
    spec.base_n = 128;
    spec.base_steps = 16;
    spec.levels = 4;
    spec.sigma = 6.0;
    spec.k0 = {0.3, 0.0, 0.0};
    spec.spinor = Vector::Zero(2);
    spec.spinor(0) = 1.0;
    return spec;
}

void print_table(const char* title, const ConvergenceResult& r) {
    std::printf("%s\n", title);
    std::printf("  %-10s %-7s %s\n", "dx", "steps", "packet gap");
    for (const ConvergenceRow& row : r.rows)
        std::printf("  %-10.5f %-7d %.3e\n", row.dx, row.steps, row.error);
    std::printf("  fitted order %.3f\n\n", r.fitted_order);
}

}  // namespace

int main() {
    ConvergenceScanSpec massive = base_spec();
    massive.mass = 0.25;
    print_table("massive packet (mass 0.25), 1-D line walk vs continuum:",
                convergence_scan(massive));

    ConvergenceScanSpec massless = base_spec();
    massless.mass = 0.0;
    massless.levels = 2;
    print_table("massless packet, same walk (exact to rounding):", convergence_scan(massless));
    return 0;
}
