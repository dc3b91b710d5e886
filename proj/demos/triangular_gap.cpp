// Off-axis decay rate of the anisotropic triangular Ising model: the closed
// form rho against finite tori of growing width.

#include "twistgap/ising_analytic.hpp"

#include <cmath>
#include <cstdio>

int main() {
    using namespace twistgap;
    const double t1 = 0.15, t = 0.15;
    const auto bound = tri_rho(t1, t);
    std::printf("t1 = %.2f, t = %.2f: %s, rho = %.12f, e^-rho = %.12f\n", t1, t, to_string(bound.phase).c_str(),
                bound.rho, std::exp(-bound.rho));

    std::printf("\n   M     N  (1 - Z-/Z)^(1/N)\n");
    for (int M : {4, 8, 16})
        for (int N : {64, 256, 1024}) {
            const auto pair = tri_partition_pair({t1, t, M, N});
            std::printf("%4d %5d  %.12f\n", M, N, std::exp(pair.one_minus_ratio.log_abs / N));
        }
}
