// Center-vortex sectors of 2D SU(2) lattice gauge theory on a torus.
//
// Prints the twisted-sector ratios Z_k/Z, the electric-flux projections and
// the Wilson-loop bound for a few areas.

#include "twistgap/lgt2d.hpp"

#include <cstdio>

int main() {
    using namespace twistgap;
    const auto s = make_lgt2d(GroupDescriptor::su2(), Action::wilson(2.0), 4, 4);

    const auto table = sector_table(s);
    std::printf("sector  <vortex>        <flux>\n");
    for (int k = 0; k < table.n_sectors; ++k)
        std::printf("%6d  %.12f  %.12f\n", k, table.vortex[k], table.flux[k]);

    std::printf("\narea  <W> (plane)    <W> (torus)    bound\n");
    for (const auto& r : check_ty_bound(s, su2_spin(0.5), {1, 2, 4, 8}))
        std::printf("%4lld  %.10f  %.10f  %.10f%s\n", r.area, r.lhs, r.lhs_torus, r.rhs,
                    r.theorem_regime ? "" : "  (outside V = 2^p A)");
}
