// Minimal Q walkthrough: build a textured image, blur it, compare scores.

#include <iostream>

#include "iqm/iqm.hpp"

int main() {
    // Band-limited noise makes a reasonable stand-in for natural texture.
    iqm::LumaImage img(128, 128);
    iqm::NormalSampler rng(42);
    for (auto& s : img.data) s = std::clamp(0.5 + 0.25 * rng.next(), 0.0, 1.0);
    img = iqm::gaussian_blur(img, {.kernel_size = 7, .sigma_blur = 1.2});

    const iqm::QResult sharp = iqm::compute_q(img);
    const iqm::QResult blurred = iqm::compute_q(iqm::gaussian_blur(img, {9, 2.0}));

    std::cout << "Q(textured)  = " << iqm::format_human(sharp.q) << "  ("
              << sharp.selected_count << "/" << sharp.total_count << " patches selected)\n";
    std::cout << "Q(blurred)   = " << iqm::format_human(blurred.q) << "  ("
              << blurred.selected_count << "/" << blurred.total_count << " patches selected)\n";
    std::cout << "blur lowers Q: " << (blurred.q < sharp.q ? "yes" : "no") << "\n";
    return 0;
}
