// Builds an asymmetric double well with a known spectrum and recovers the
// levels three ways: closed form, oscillator-basis diagonalization, propagation.

#include <cstdio>

#include "mwell/mwell.hpp"

using namespace mwell;

int main()
{
    const auto model = build_double_well(SusyParams::double_well(-3.0, 0.5), default_susy_grid(), 5);
    const auto pot = model.potential_xi();

    const auto md = eigen_lowest(assemble(pot, BasisSpec::ho1d(1.0), 200), 5, false);

    const auto g = make_grid(-12.0, 12.0, 8);
    const auto v = pot.sample(g);
    const PropagationPlan<Grid1D> plan(g, v, PropagationPlan<Grid1D>::max_step(g, v), 1 << 14);
    auto psi = gaussian_packet(g, 0.7, 0.7);
    random_phase_mask(psi, 1, 3.0);
    normalize(psi);
    const auto sm = extract_spectrum(evolve(psi, plan).autocorrelation);

    std::printf("%s\n\n", describe(model).c_str());
    std::printf("%6s %12s %14s %14s\n", "level", "exact", "basis N=200", "propagation");
    for (std::size_t k = 0; k < 5; ++k) {
        const double e = model.levels[k];
        double peak = 0, best = 1e300;
        for (double p : sm.energies())
            if (std::abs(p - e) < best) {
                best = std::abs(p - e);
                peak = p;
            }
        std::printf("%6zu %12.6f %14.8f %14.4f\n", k, e, md.levels[k].energy, peak);
    }
    std::printf("\npropagation resolution 1/T = %.4f\n", 1.0 / plan.duration());
}
