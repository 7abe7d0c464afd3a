// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Runs the same frozen tolerances the unit suites pin.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "iqm/iqm.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& why) {
        if (!cond && ok) {
            ok = false;
            detail = why;
        }
    }
};

// --- criterion bodies ---

void c1_sigmoid_anchor(Check& c) {
    const auto t0 = Clock::now();
    c.expect(std::abs(iqm::weight(1.2) - 0.5) <= 1e-12, "sigma(alpha0) != 0.5 within 1e-12");
    double prev = 2.0;
    for (int i = 0; i <= 1000; ++i) {
        const double alpha = 6.0 * i / 1000.0;
        const double s = iqm::weight(alpha);
        if (!(s < prev)) {
            c.expect(false, "sigma not strictly decreasing at alpha=" + std::to_string(alpha));
            break;
        }
        prev = s;
    }
    const double el = seconds_since(t0);
    c.expect(el < 1.0, "runtime " + std::to_string(el) + "s >= 1s");
}

void c2_sweep_shape(Check& c) {
    const auto t0 = Clock::now();
    const std::vector<double> gammas = {0.8, 1.3, 2.5, 11.8, 13.8};
    for (std::uint64_t seed : {11, 22, 33, 44, 55}) {
        const iqm::LumaImage img = testutil::textured_crop(seed);
        const iqm::SweepTable table = iqm::gamma_sweep(img, gammas);
        const auto& r = table.rows;
        for (std::size_t i = 1; i < r.size(); ++i) {
            c.expect(r[i].q > r[i - 1].q,
                     "Q not strictly increasing (seed " + std::to_string(seed) + ")");
            c.expect(r[i].psnr < r[i - 1].psnr,
                     "PSNR not strictly decreasing (seed " + std::to_string(seed) + ")");
        }
        std::size_t argmax = 0;
        for (std::size_t i = 1; i < r.size(); ++i)
            if (r[i].omega > r[argmax].omega) argmax = i;
        c.expect(argmax > 0 && argmax + 1 < r.size(),
                 "omega argmax not interior (seed " + std::to_string(seed) + ")");
        for (std::size_t i = 1; i < r.size(); ++i) {
            const bool rising = i <= argmax;
            c.expect(rising ? r[i].omega > r[i - 1].omega : r[i].omega < r[i - 1].omega,
                     "omega not unimodal (seed " + std::to_string(seed) + ")");
        }
    }
    const double el = seconds_since(t0);
    c.expect(el < 10.0, "runtime " + std::to_string(el) + "s >= 10s");
}

void c3_blur_monotonicity(Check& c) {
    const auto t0 = Clock::now();
    const iqm::DegradeSpec blur{9, 2.0, 0.0, 0};
    int holds = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const iqm::LumaImage img = testutil::textured_crop(seed);
        const double q = iqm::compute_q(img).q;
        const double qb = iqm::compute_q(iqm::gaussian_blur(img, blur)).q;
        ++total;
        if (qb < q) ++holds;
    }
    c.expect(holds == total, std::to_string(holds) + "/" + std::to_string(total) +
                                 " images satisfied Q(blurred) < Q(original)");
    const double el = seconds_since(t0);
    c.expect(el < 10.0, "runtime " + std::to_string(el) + "s >= 10s");
}

void c4_structure_tensor_oracle(Check& c) {
    const int k = 8;
    iqm::NormalSampler rng(1234);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        iqm::GradientField g;
        g.width = g.height = k;
        g.gx.resize(64);
        g.gy.resize(64);
        for (auto& v : g.gx) v = rng.next();
        for (auto& v : g.gy) v = rng.next();

        Eigen::MatrixXd stacked(64, 2);
        for (int i = 0; i < 64; ++i) {
            stacked(i, 0) = g.gx[static_cast<std::size_t>(i)];
            stacked(i, 1) = g.gy[static_cast<std::size_t>(i)];
        }
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
        const iqm::PatchSpectrum s = iqm::patch_spectrum(g, 0, 0, k);
        worst = std::max(worst, std::abs(s.s1 - svd.singularValues()(0)));
        worst = std::max(worst, std::abs(s.s2 - svd.singularValues()(1)));
    }
    c.expect(worst < 1e-9, "max |closed-form - SVD| = " + std::to_string(worst));
    c.detail = c.ok ? "" : c.detail;
}

void c5_omega_determinism_oracle(Check& c) {
    for (int pair = 0; pair < 20; ++pair) {
        const iqm::LumaImage ref = testutil::noisy_image(128, 128, 1000 + 2 * pair);
        const iqm::LumaImage rest = testutil::noisy_image(128, 128, 1001 + 2 * pair);
        const iqm::OmegaResult seq = iqm::compute_omega(ref, rest, {}, 1);
        for (int threads : {2, 4, 7}) {
            const iqm::OmegaResult par = iqm::compute_omega(ref, rest, {}, threads);
            c.expect(par.omega == seq.omega,
                     "thread count " + std::to_string(threads) + " changed omega");
        }
        const double naive = oracles::naive_omega(ref, rest, seq.params);
        c.expect(std::abs(seq.omega - naive) <= 1e-12,
                 "omega differs from the naive loop by " + std::to_string(seq.omega - naive));
    }
    const iqm::LumaImage img = testutil::textured_crop(4);
    const iqm::OmegaResult r = iqm::compute_omega(img, img);
    double mean_q = 0.0;
    for (const auto& p : r.per_patch) mean_q += p.q_ref;
    mean_q /= static_cast<double>(r.per_patch.size());
    const double tie = (1.0 - iqm::weight(0.0)) * 50.0 + iqm::weight(0.0) * mean_q;
    c.expect(std::abs(r.omega - tie) <= 1e-9, "identical-image closed-form tie violated");
}

void c6_psnr_closed_form(Check& c) {
    const iqm::LumaImage a(16, 16, 0.5), b(16, 16, 0.6);
    c.expect(std::abs(iqm::psnr(a, b) - 20.0) <= 1e-12, "0.1 offset PSNR != 20 dB");
    c.expect(iqm::clipped_psnr(a, a) == 50.0, "identical-patch clipped PSNR != 50");
}

void c7_freq_loss_oracle(Check& c) {
    for (int pair = 0; pair < 3; ++pair) {
        const iqm::LumaImage a = testutil::random_image(16, 16, 300 + 2 * pair);
        const iqm::LumaImage b = testutil::random_image(16, 16, 301 + 2 * pair);
        const double fast = iqm::freq_loss(a, b);
        const double naive = oracles::naive_freq_loss(a, b);
        c.expect(std::abs(fast - naive) <= 1e-9,
                 "freq_loss differs from brute-force DFT by " + std::to_string(fast - naive));
    }
    const iqm::LumaImage a = testutil::random_image(16, 16, 310);
    c.expect(iqm::freq_loss(a, a) == 0.0, "freq_loss(a,a) != 0 exactly");
}

void c8_composite_composition(Check& c) {
    iqm::LossParams params;  // beta = 0.1
    for (int pair = 0; pair < 20; ++pair) {
        const iqm::LumaImage gt = testutil::textured_crop(400 + pair, 64);
        const iqm::LumaImage rest =
            pair % 2 == 0 ? iqm::unsharp_mask(gt, {1.0 + 0.1 * pair, 1.0})
                          : iqm::gaussian_blur(gt, {5, 1.0, 0.0, 0});
        const double composite = iqm::composite_loss(gt, rest, iqm::BaseLoss::l1, params);
        const double expect = iqm::l1_loss(gt, rest) -
                              0.1 * iqm::compute_q(rest, params.q_patch_size, params.q_tau).q;
        c.expect(std::abs(composite - expect) <= 1e-12,
                 "composition differs by " + std::to_string(composite - expect));
    }
}

void c9_ttest_oracle(Check& c) {
    for (const oracles::TTestCase& tc : oracles::ttest_cases()) {
        const iqm::TTestResult r = iqm::paired_t_test(tc.xs, tc.ys);
        c.expect(std::abs(r.t_statistic - tc.t) <= 1e-6,
                 "t differs from the statistics oracle");
        c.expect(std::abs(r.p_value - tc.p) <= 1e-6, "p differs from the statistics oracle");
    }
    const std::vector<double> xs = {0.3, 0.4, 0.5, 0.6};
    const iqm::TTestResult same = iqm::paired_t_test(xs, xs);
    c.expect(same.p_value == 1.0, "xs = ys must give p = 1");
}

void c10_performance(Check& c) {
    // single pair, single thread: PSNR + SSIM + Q + omega under 1 s
    const iqm::LumaImage ref = testutil::textured_crop(900, 1024);
    const iqm::LumaImage rest = iqm::gaussian_blur(ref, {9, 2.0, 0.0, 0});
    const auto t0 = Clock::now();
    volatile double sink = 0.0;
    sink = sink + iqm::psnr(ref, rest);
    sink = sink + iqm::ssim(ref, rest);
    sink = sink + iqm::compute_q(rest).q;
    sink = sink + iqm::compute_omega(ref, rest).omega;
    const double single = seconds_since(t0);
    c.expect(single < 1.0,
             "measure on a 1024x1024 pair took " + std::to_string(single) + "s (>= 1s)");

    // batch of 100 such pairs: >= 3x speedup at 4 threads over 1 thread
    testutil::TempDir dir;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int i = 0; i < 2; ++i) {
        const std::string a = dir.file("ref" + std::to_string(i) + ".pgm");
        const std::string b = dir.file("rest" + std::to_string(i) + ".pgm");
        iqm::save_image(i == 0 ? ref : rest, a);
        iqm::save_image(i == 0 ? rest : ref, b);
        for (int rep = 0; rep < 50; ++rep) pairs.emplace_back(a, b);
    }
    iqm::EvalConfig cfg;
    cfg.metrics.l1 = false;
    cfg.metrics.freq = false;  // criterion names PSNR + SSIM + Q + omega

    cfg.threads = 1;
    const auto t1 = Clock::now();
    iqm::batch_evaluate(pairs, cfg);
    const double serial = seconds_since(t1);

    cfg.threads = 4;
    const auto t2 = Clock::now();
    iqm::batch_evaluate(pairs, cfg);
    const double parallel = seconds_since(t2);

    const double speedup = serial / parallel;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "batch speedup %.2fx at 4 threads (serial %.1fs, parallel %.1fs; need >= 3x)",
                  speedup, serial, parallel);
    c.expect(speedup >= 3.0, buf);
    if (c.ok && c.detail.empty()) c.detail = buf;
}

struct Criterion {
    const char* name;
    std::function<void(Check&)> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"sigmoid anchor: sigma(1.2)=0.5 within 1e-12, strictly decreasing on 1000-point grid",
         c1_sigmoid_anchor},
        {"sweep shape on 5 textured crops: Q up, PSNR down, omega unimodal interior peak",
         c2_sweep_shape},
        {"blur monotonicity: Q(blur K=9 sigma=2) < Q on 12/12 natural-like images",
         c3_blur_monotonicity},
        {"structure-tensor closed form matches full SVD within 1e-9 on 1000 patches",
         c4_structure_tensor_oracle},
        {"omega: thread-count invariant, naive-loop oracle within 1e-12, closed-form tie 1e-9",
         c5_omega_determinism_oracle},
        {"psnr closed form: 0.1 offset = 20 dB within 1e-12, identical clipped = 50",
         c6_psnr_closed_form},
        {"freq loss matches brute-force DFT within 1e-9, exact zero on identical",
         c7_freq_loss_oracle},
        {"composite loss equals l1 - 0.1*Q within 1e-12 on 20 pairs", c8_composite_composition},
        {"paired t-test matches the statistics oracle within 1e-6, p=1 on equal samples",
         c9_ttest_oracle},
        {"performance: 1024x1024 measure < 1s single-threaded, 100-pair batch >= 3x at 4 threads",
         c10_performance},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check check;
        try {
            criteria[i].body(check);
        } catch (const std::exception& e) {
            check.ok = false;
            check.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %zu. %s%s%s\n", check.ok ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    check.detail.empty() ? "" : " -- ", check.detail.c_str());
        std::fflush(stdout);
        if (!check.ok) ++failures;
    }
    std::printf("%zu/%zu acceptance criteria passed\n", criteria.size() - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
