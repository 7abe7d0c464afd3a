#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "iqm/metrics.hpp"
#include "iqm/omega.hpp"
#include "iqm/synth.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using iqm::LumaImage;
using iqm::OmegaParams;
using oracles::naive_omega;
using oracles::naive_region_q;

TEST_CASE("patch q of a flat region is zero") {
    REQUIRE(iqm::patch_q(LumaImage(16, 16, 0.3)) == 0.0);
}

TEST_CASE("patch q of a step edge matches the direct formula") {
    LumaImage patch(16, 16, 0.2);
    for (int y = 0; y < 16; ++y)
        for (int x = 8; x < 16; ++x) patch.at(x, y) = 0.8;
    REQUIRE(iqm::patch_q(patch) ==
            Catch::Approx(naive_region_q(patch, 0, 0, 16)).margin(1e-12));
    REQUIRE(iqm::patch_q(patch) > 0.0);
}

TEST_CASE("patch q agrees with a select-all one-patch compute_q") {
    const LumaImage patch = testutil::random_image(16, 16, 77).crop(0, 0, 16, 16);
    const iqm::QResult r = iqm::compute_q(patch, 16, -1.0);
    REQUIRE(r.total_count == 1);
    REQUIRE(r.selected_count == 1);
    REQUIRE(iqm::patch_q(patch) == r.q);
}

TEST_CASE("deviation ratio handles the flat-reference singularities") {
    REQUIRE(iqm::deviation_ratio(0.2, 0.2) == 0.0);
    REQUIRE(iqm::deviation_ratio(0.08, 0.13) == Catch::Approx(0.625).margin(1e-12));
    REQUIRE(iqm::deviation_ratio(0.0, 0.0) == 0.0);
    REQUIRE(iqm::deviation_ratio(0.0, 0.3) == 10.0);
    // invented texture on a flat patch pushes the weight to PSNR
    REQUIRE(iqm::weight(iqm::deviation_ratio(0.0, 0.3)) < 1e-18);
}

TEST_CASE("sigmoid weight anchors") {
    REQUIRE(iqm::weight(1.2) == 0.5);
    REQUIRE(iqm::weight(0.0) == Catch::Approx(0.997527376843365).margin(1e-12));
    REQUIRE(iqm::weight(3.5) == Catch::Approx(1.01299909808739e-05).epsilon(1e-9));
    // saturation at the open-interval limits
    REQUIRE(iqm::weight(1e6) == 0.0);
    REQUIRE(iqm::weight(-1e6) == 1.0);
}

TEST_CASE("sigmoid weight is strictly decreasing and symmetric about the midpoint") {
    double prev = 2.0;
    for (int i = 0; i <= 1000; ++i) {
        const double alpha = 6.0 * i / 1000.0;
        const double s = iqm::weight(alpha);
        REQUIRE(s < prev);
        prev = s;
    }
    for (double alpha : {0.0, 0.3, 0.9, 1.2, 2.0}) {
        REQUIRE(iqm::weight(alpha) + iqm::weight(2.0 * 1.2 - alpha) ==
                Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("clipped psnr") {
    const LumaImage a(16, 16, 0.5);
    SECTION("identical patches sit at the cap") {
        REQUIRE(iqm::clipped_psnr(a, a) == 50.0);
    }
    SECTION("0.1 offset gives 20 dB") {
        const LumaImage b(16, 16, 0.6);
        REQUIRE(iqm::clipped_psnr(a, b) == Catch::Approx(20.0).margin(1e-12));
    }
    SECTION("tiny errors are capped") {
        const LumaImage b(16, 16, 0.501);  // MSE 1e-6 -> 60 dB uncapped
        REQUIRE(iqm::clipped_psnr(a, b) == 50.0);
    }
    SECTION("shape mismatch") {
        REQUIRE_THROWS_AS(iqm::clipped_psnr(a, LumaImage(8, 16, 0.5)), iqm::DimensionError);
    }
}

TEST_CASE("omega of identical images obeys the closed-form tie") {
    const LumaImage img = testutil::textured_crop(4);
    const iqm::OmegaResult r = iqm::compute_omega(img, img);

    double mean_q = 0.0;
    for (const iqm::PatchOmega& p : r.per_patch) mean_q += p.q_ref;
    mean_q /= static_cast<double>(r.per_patch.size());

    const double sigma0 = iqm::weight(0.0);
    REQUIRE(r.omega == Catch::Approx((1.0 - sigma0) * 50.0 + sigma0 * mean_q).margin(1e-9));
    for (const iqm::PatchOmega& p : r.per_patch) {
        REQUIRE(p.alpha == 0.0);
        REQUIRE(p.p_prime == 50.0);
    }
}

TEST_CASE("omega rises with sharpening and falls once ringing appears") {
    const LumaImage img = testutil::textured_crop(11);
    std::vector<double> omegas;
    for (double gamma : {0.8, 1.3, 2.5, 11.8, 13.8})
        omegas.push_back(iqm::compute_omega(img, iqm::unsharp_mask(img, {gamma, 1.0})).omega);
    REQUIRE(omegas[0] < omegas[1]);
    REQUIRE(omegas[1] < omegas[2]);
    REQUIRE(omegas[4] < omegas[3]);
    REQUIRE(omegas[3] < omegas[2]);
}

TEST_CASE("omega equals the naive sequential loop") {
    const LumaImage ref = testutil::noisy_image(32, 32, 51);
    const LumaImage rest = testutil::noisy_image(32, 32, 52);
    const iqm::OmegaResult r = iqm::compute_omega(ref, rest);
    REQUIRE(r.per_patch.size() == 4);
    REQUIRE(r.omega == Catch::Approx(naive_omega(ref, rest, r.params)).margin(1e-12));
}

TEST_CASE("omega invariants per patch") {
    const LumaImage ref = testutil::textured_crop(15);
    const LumaImage rest = iqm::unsharp_mask(ref, {2.5, 1.0});
    const iqm::OmegaResult r = iqm::compute_omega(ref, rest);

    double mean = 0.0;
    for (const iqm::PatchOmega& p : r.per_patch) {
        REQUIRE(p.omega == (1.0 - p.sigma) * p.p_prime + p.sigma * p.q_rest);
        REQUIRE(p.omega >= std::min(p.p_prime, p.q_rest) - 1e-12);
        REQUIRE(p.omega <= std::max(p.p_prime, p.q_rest) + 1e-12);
        REQUIRE(p.sigma > 0.0);
        REQUIRE(p.sigma < 1.0);
        mean += p.omega;
    }
    mean /= static_cast<double>(r.per_patch.size());
    REQUIRE(r.omega == Catch::Approx(mean).margin(1e-12));
}

TEST_CASE("omega is deterministic across thread counts") {
    const LumaImage ref = testutil::textured_crop(16);
    const LumaImage rest = iqm::unsharp_mask(ref, {1.3, 1.0});
    const iqm::OmegaResult seq = iqm::compute_omega(ref, rest, {}, 1);
    for (int threads : {2, 5, 16}) {
        const iqm::OmegaResult par = iqm::compute_omega(ref, rest, {}, threads);
        REQUIRE(par.omega == seq.omega);
        for (std::size_t i = 0; i < seq.per_patch.size(); ++i)
            REQUIRE(par.per_patch[i].omega == seq.per_patch[i].omega);
    }
}

TEST_CASE("omega rejects mismatched or invalid inputs") {
    const LumaImage a(32, 32, 0.5);
    REQUIRE_THROWS_WITH(iqm::compute_omega(a, LumaImage(32, 48, 0.5)),
                        Catch::Matchers::ContainsSubstring("32x32") &&
                            Catch::Matchers::ContainsSubstring("32x48"));
    OmegaParams bad;
    bad.steepness = 0.0;
    REQUIRE_THROWS_AS(iqm::compute_omega(a, a, bad), iqm::ParamError);
    bad = OmegaParams{};
    bad.midpoint = -1.0;
    REQUIRE_THROWS_AS(iqm::compute_omega(a, a, bad), iqm::ParamError);
    bad = OmegaParams{};
    bad.psnr_cap = 49.0;
    REQUIRE_THROWS_AS(iqm::compute_omega(a, a, bad), iqm::ParamError);
    bad = OmegaParams{};
    bad.patch_size = 1;
    REQUIRE_THROWS_AS(iqm::compute_omega(a, a, bad), iqm::ParamError);
    // smaller than one patch
    REQUIRE_THROWS_AS(iqm::compute_omega(LumaImage(8, 8, 0.1), LumaImage(8, 8, 0.1)),
                      iqm::DimensionError);
}
