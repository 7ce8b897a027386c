// Forward solve for V = 0 and a Gaussian bump, then one Born sample of the
// potential difference compared against its Fourier transform.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "bispec/inversion.hpp"

using namespace bispec;

int main()
{
    RadialGrid g = build_grid(1.0, 400);
    double zeta = 10.0;
    int L = plane_wave_lmax(cplx(zeta, 1.0), g.R);

    RadialPotential V1 = RadialPotential::zero();
    RadialPotential V2 = RadialPotential::gaussian(0.1, 0.0, 0.2);
    SpectralDataset ds1 = build_dataset(V1, g, L, 20);
    SpectralDataset ds2 = build_dataset(V2, g, L, 20);

    double pi4 = std::pow(std::numbers::pi, 4);
    std::printf("lambda_1 = %.6f (pi^4 = %.6f), %d complete modes\n", ds1.mode(1).lambda, pi4, ds1.size());
    for (int k = 1; k <= 5; ++k) {
        const auto& a = ds1.mode(k);
        const auto& b = ds2.mode(k);
        std::printf("k=%d  l=%d q=%d  lambda %.4f -> %.4f\n", k, a.ell, a.q, a.lambda, b.lambda);
    }

    Vec3 xi{2.0, 0.0, 0.0};
    cplx s = sample_vhat_difference(ds1, ds2, xi, zeta);
    cplx exact = vhat_difference(V1, V2, xi, zeta, g.R);
    std::printf("Born sample  %.6e %+.6ei\n", s.real(), s.imag());
    std::printf("(V1-V2)^     %.6e %+.6ei\n", exact.real(), exact.imag());
    return 0;
}
