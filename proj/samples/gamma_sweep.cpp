// Sharpening sweep demo: Q rises with gamma, PSNR falls, omega rises until
// ringing sets in and then falls. Emits the sweep CSV on stdout.

#include <cmath>
#include <iostream>

#include "iqm/iqm.hpp"

namespace {

// Soft-edged shapes over a smooth background plus faint fine texture; enough
// edge content for unsharp masking to ring at high gamma.
iqm::LumaImage make_scene(std::uint64_t seed) {
    const int n = 128;
    iqm::NormalSampler rng(seed);
    iqm::LumaImage img(n, n, 0.0);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            img.at(x, y) = 0.5 + 0.2 * std::sin(0.07 * x) + 0.15 * std::cos(0.05 * y);
    for (int o = 0; o < 8; ++o) {
        const double cx = 8 + 112 * rng.uniform(), cy = 8 + 112 * rng.uniform();
        const double r = 7 + 16 * rng.uniform();
        const double off = (o % 2 ? 0.3 : -0.25);
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) < r * r) img.at(x, y) += off;
    }
    img.data = iqm::detail::convolve_separable(img.data, n, n,
                                               iqm::detail::gaussian_kernel(5, 0.45));
    for (auto& s : img.data) s = std::clamp(s + 0.05 * rng.next(), 0.0, 1.0);
    return img;
}

}  // namespace

int main() {
    const iqm::LumaImage img = make_scene(11);
    const iqm::SweepTable table = iqm::gamma_sweep(img, {0.8, 1.3, 2.5, 11.8, 13.8});
    iqm::write_sweep_csv(std::cout, table);
    return 0;
}
