// Command-line front end: sharpness (Q), ringing-aware quality (omega),
// classical metrics, synthetic blur/sharpen transforms, batch reports, and
// the paired t-test.

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "iqm/iqm.hpp"

namespace {

int default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Machine-readable output goes to --out or stdout.
void write_output(const std::string& out_path, const std::function<void(std::ostream&)>& fn) {
    if (out_path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw iqm::IoError("cannot open " + out_path + " for writing");
    fn(os);
    if (!os) throw iqm::IoError("write failed for " + out_path);
}

struct QOptions {
    int patch_size = iqm::kDefaultQPatchSize;
    double tau = -1.0;  // <0 means "resolve from delta/trials or shipped default"
    double delta = iqm::kDefaultCoherenceDelta;
    int trials = iqm::kDefaultCalibrationTrials;
    std::uint64_t calib_seed = iqm::kDefaultCalibrationSeed;
    bool calibrate_requested = false;

    double resolve_tau() const {
        if (tau >= 0.0) return tau;
        if (!calibrate_requested && patch_size == iqm::kDefaultQPatchSize)
            return iqm::kDefaultCoherenceThreshold;
        std::cerr << "calibrating coherence threshold for k=" << patch_size
                  << " (delta=" << iqm::format_human(delta) << ", trials=" << trials
                  << ", seed=" << calib_seed << "); pass --tau to skip\n";
        return iqm::calibrate_threshold(patch_size, delta, trials, calib_seed);
    }
};

void add_q_options(CLI::App* cmd, QOptions& opts) {
    cmd->add_option("--patch-size", opts.patch_size, "Q patch size k")
        ->capture_default_str();
    cmd->add_option("--tau", opts.tau,
                    "coherence selection threshold (default: noise-calibrated)");
    cmd->add_option("--delta", opts.delta, "calibration confidence level")
        ->capture_default_str()
        ->each([&](const std::string&) { opts.calibrate_requested = true; });
    cmd->add_option("--trials", opts.trials, "calibration Monte-Carlo trials")
        ->capture_default_str()
        ->each([&](const std::string&) { opts.calibrate_requested = true; });
    cmd->add_option("--calib-seed", opts.calib_seed, "calibration RNG seed")
        ->capture_default_str()
        ->each([&](const std::string&) { opts.calibrate_requested = true; });
}

void add_omega_options(CLI::App* cmd, iqm::OmegaParams& params) {
    cmd->add_option("--steepness", params.steepness, "sigmoid steepness R")
        ->capture_default_str();
    cmd->add_option("--midpoint", params.midpoint, "sigmoid midpoint alpha0")
        ->capture_default_str();
    cmd->add_option("--omega-patch-size", params.patch_size, "omega patch size m")
        ->capture_default_str();
    cmd->add_option("--alpha-cap", params.alpha_cap,
                    "deviation assigned when texture is invented on a flat patch")
        ->capture_default_str();
}

void add_metric_toggles(CLI::App* cmd, iqm::MetricToggles& toggles) {
    cmd->add_flag("--no-psnr", [&](std::size_t) { toggles.psnr = false; }, "disable PSNR");
    cmd->add_flag("--no-ssim", [&](std::size_t) { toggles.ssim = false; }, "disable SSIM");
    cmd->add_flag("--no-q", [&](std::size_t) { toggles.q = false; }, "disable Q");
    cmd->add_flag("--no-omega", [&](std::size_t) { toggles.omega = false; }, "disable omega");
    cmd->add_flag("--no-l1", [&](std::size_t) { toggles.l1 = false; }, "disable l1");
    cmd->add_flag("--no-freq", [&](std::size_t) { toggles.freq = false; }, "disable freq_loss");
}

void add_degrade_options(CLI::App* cmd, iqm::DegradeSpec& spec, std::string& config_path) {
    cmd->add_option("--config", config_path,
                    "key=value file (kernel_size, sigma_blur, sigma_noise, seed)");
    cmd->add_option("--kernel-size", spec.kernel_size, "blur kernel size K (odd)")
        ->capture_default_str();
    cmd->add_option("--sigma-blur", spec.sigma_blur, "blur Gaussian std")
        ->capture_default_str();
    cmd->add_option("--sigma-noise", spec.sigma_noise, "additive noise std")
        ->capture_default_str();
    cmd->add_option("--seed", spec.seed, "noise RNG seed")->capture_default_str();
}

void add_sharpen_options(CLI::App* cmd, iqm::SharpenSpec& spec, std::string& config_path) {
    cmd->add_option("--config", config_path, "key=value file (gamma, radius_sigma)");
    cmd->add_option("--gamma", spec.gamma, "sharpening amount")->capture_default_str();
    cmd->add_option("--radius-sigma", spec.radius_sigma, "unsharp Gaussian std")
        ->capture_default_str();
}

// Explicit flags win over config-file values.
void merge_degrade_config(const CLI::App* cmd, const std::string& path, iqm::DegradeSpec& spec) {
    if (path.empty()) return;
    const iqm::SynthFileConfig file = iqm::load_synth_config(path);
    if (file.kernel_size && cmd->count("--kernel-size") == 0) spec.kernel_size = *file.kernel_size;
    if (file.sigma_blur && cmd->count("--sigma-blur") == 0) spec.sigma_blur = *file.sigma_blur;
    if (file.sigma_noise && cmd->count("--sigma-noise") == 0) spec.sigma_noise = *file.sigma_noise;
    if (file.seed && cmd->count("--seed") == 0) spec.seed = *file.seed;
}

void merge_sharpen_config(const CLI::App* cmd, const std::string& path, iqm::SharpenSpec& spec) {
    if (path.empty()) return;
    const iqm::SynthFileConfig file = iqm::load_synth_config(path);
    if (file.gamma && cmd->count("--gamma") == 0) spec.gamma = *file.gamma;
    if (file.radius_sigma && cmd->count("--radius-sigma") == 0)
        spec.radius_sigma = *file.radius_sigma;
}

void print_measure_summary(const iqm::PairRow& row) {
    auto line = [](const char* name, const std::optional<double>& v, const char* unit) {
        if (v.has_value())
            std::cerr << name << " = " << iqm::format_human(*v) << unit << "\n";
    };
    line("psnr", row.psnr, " dB");
    line("ssim", row.ssim, "");
    line("q_ref", row.q_ref, "");
    line("q_rest", row.q_rest, "");
    line("omega", row.omega, "");
    line("l1", row.l1, "");
    line("freq_loss", row.freq, "");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"iqm - sharpness and ringing-aware image quality measurement"};
    app.require_subcommand(1);

    std::string out_path;
    int threads = default_threads();
    app.add_option("--out", out_path, "write machine-readable output to this file")
        ->capture_default_str();
    app.add_option("--threads", threads, "worker thread cap")->capture_default_str();

    // measure: every enabled metric on one pair
    auto* measure = app.add_subcommand("measure", "all metrics for a reference/restored pair");
    std::string m_ref, m_rest;
    QOptions m_q;
    iqm::MetricToggles m_toggles;
    iqm::OmegaParams m_omega;
    measure->add_option("ref", m_ref, "reference image")->required();
    measure->add_option("restored", m_rest, "restored image")->required();
    add_q_options(measure, m_q);
    add_omega_options(measure, m_omega);
    add_metric_toggles(measure, m_toggles);

    // q: no-reference sharpness of one image
    auto* qcmd = app.add_subcommand("q", "no-reference sharpness Q of one image");
    std::string q_img;
    QOptions q_q;
    qcmd->add_option("image", q_img, "input image")->required();
    add_q_options(qcmd, q_q);

    // omega: full-reference score plus per-patch breakdown
    auto* omega = app.add_subcommand("omega", "ringing-sensitive full-reference metric");
    std::string o_ref, o_rest, o_patch_csv;
    iqm::OmegaParams o_params;
    omega->add_option("ref", o_ref, "reference image")->required();
    omega->add_option("restored", o_rest, "restored image")->required();
    add_omega_options(omega, o_params);
    omega->add_option("--per-patch", o_patch_csv, "write the per-patch breakdown CSV here");

    // sweep: sharpen with each gamma, record Q / PSNR / omega
    auto* sweep = app.add_subcommand("sweep", "gamma sharpening sweep (Q, PSNR, omega)");
    std::string s_img;
    std::vector<double> s_gammas;
    QOptions s_q;
    iqm::OmegaParams s_omega;
    iqm::SharpenSpec s_spec;
    sweep->add_option("image", s_img, "input image")->required();
    sweep->add_option("--gammas", s_gammas, "comma-separated sharpening amounts, ascending")
        ->required()
        ->delimiter(',');
    add_q_options(sweep, s_q);
    add_omega_options(sweep, s_omega);
    sweep->add_option("--radius-sigma", s_spec.radius_sigma, "unsharp Gaussian std")
        ->capture_default_str();

    // degrade: blur + noise
    auto* degrade = app.add_subcommand("degrade", "Gaussian blur plus seeded noise");
    std::string d_in, d_out, d_config;
    iqm::DegradeSpec d_spec;
    degrade->add_option("image", d_in, "input image")->required();
    degrade->add_option("--out", d_out, "output image path")->required();
    add_degrade_options(degrade, d_spec, d_config);

    // sharpen: unsharp mask
    auto* sharpen = app.add_subcommand("sharpen", "unsharp-mask sharpening");
    std::string h_in, h_out, h_config;
    iqm::SharpenSpec h_spec;
    sharpen->add_option("image", h_in, "input image")->required();
    sharpen->add_option("--out", h_out, "output image path")->required();
    add_sharpen_options(sharpen, h_spec, h_config);

    // batch: manifest of pairs -> metric report CSV
    auto* batch = app.add_subcommand("batch", "evaluate a manifest of image pairs");
    std::string b_manifest;
    QOptions b_q;
    iqm::MetricToggles b_toggles;
    iqm::OmegaParams b_omega;
    batch->add_option("manifest", b_manifest, "text file: ref<TAB>restored per line")
        ->required();
    add_q_options(batch, b_q);
    add_omega_options(batch, b_omega);
    add_metric_toggles(batch, b_toggles);

    // ttest: paired t-test between a CSV column of two files
    auto* ttest = app.add_subcommand("ttest", "paired t-test on a CSV metric column");
    std::string t_a, t_b, t_col, t_col_b;
    ttest->add_option("csv_a", t_a, "first CSV file")->required();
    ttest->add_option("csv_b", t_b, "second CSV file (rows paired by order)")->required();
    ttest->add_option("--column", t_col, "column name in the first file")->required();
    ttest->add_option("--column-b", t_col_b, "column name in the second file (default: --column)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    }

    try {
        if (*measure) {
            iqm::EvalConfig cfg;
            cfg.q_patch_size = m_q.patch_size;
            cfg.q_tau = m_q.resolve_tau();
            cfg.omega = m_omega;
            cfg.metrics = m_toggles;
            cfg.threads = threads;
            const iqm::MetricReport report = iqm::batch_evaluate({{m_ref, m_rest}}, cfg);
            if (!report.rows.front().ok) throw iqm::Error(report.rows.front().error);
            write_output(out_path, [&](std::ostream& os) { iqm::write_report_csv(os, report); });
            print_measure_summary(report.rows.front());
        } else if (*qcmd) {
            const iqm::LumaImage img = iqm::load_image(q_img);
            const double tau = q_q.resolve_tau();
            const iqm::QResult r = iqm::compute_q(img, q_q.patch_size, tau, threads);
            write_output(out_path, [&](std::ostream& os) {
                os << "# iqm q patch_size=" << r.patch_size
                   << " tau=" << iqm::format_full(r.threshold) << " threads=" << threads << "\n";
                os << "q,selected,total,patch_size,tau\n";
                os << iqm::format_full(r.q) << ',' << r.selected_count << ',' << r.total_count
                   << ',' << r.patch_size << ',' << iqm::format_full(r.threshold) << "\n";
            });
            std::cerr << "q = " << iqm::format_human(r.q) << " (selected " << r.selected_count
                      << "/" << r.total_count << " patches, k=" << r.patch_size
                      << ", tau=" << iqm::format_human(r.threshold) << ")\n";
        } else if (*omega) {
            const iqm::LumaImage ref = iqm::load_image(o_ref);
            const iqm::LumaImage rest = iqm::load_image(o_rest);
            const iqm::OmegaResult r = iqm::compute_omega(ref, rest, o_params, threads);
            iqm::EvalConfig prov_cfg;
            prov_cfg.omega = o_params;
            prov_cfg.threads = threads;
            write_output(out_path, [&](std::ostream& os) {
                os << "# iqm omega " << prov_cfg.provenance() << "\n";
                os << "omega,patches,patch_size\n";
                os << iqm::format_full(r.omega) << ',' << r.per_patch.size() << ','
                   << r.params.patch_size << "\n";
            });
            if (!o_patch_csv.empty()) {
                std::ofstream os(o_patch_csv);
                if (!os) throw iqm::IoError("cannot open " + o_patch_csv + " for writing");
                iqm::write_omega_patch_csv(os, r, prov_cfg.provenance());
            }
            std::cerr << "omega = " << iqm::format_human(r.omega) << " (" << r.per_patch.size()
                      << " patches of " << r.params.patch_size << "x" << r.params.patch_size
                      << ", R=" << iqm::format_human(r.params.steepness)
                      << ", alpha0=" << iqm::format_human(r.params.midpoint) << ")\n";
        } else if (*sweep) {
            const iqm::LumaImage img = iqm::load_image(s_img);
            iqm::EvalConfig cfg;
            cfg.q_patch_size = s_q.patch_size;
            cfg.q_tau = s_q.resolve_tau();
            cfg.omega = s_omega;
            cfg.sweep_radius_sigma = s_spec.radius_sigma;
            cfg.threads = threads;
            const iqm::SweepTable table = iqm::gamma_sweep(img, s_gammas, cfg);
            write_output(out_path, [&](std::ostream& os) { iqm::write_sweep_csv(os, table); });
            const auto peak = std::max_element(
                table.rows.begin(), table.rows.end(),
                [](const iqm::SweepRow& a, const iqm::SweepRow& b) { return a.omega < b.omega; });
            std::cerr << "swept " << table.rows.size() << " gammas; omega peaks at gamma="
                      << iqm::format_human(peak->gamma) << " (omega="
                      << iqm::format_human(peak->omega) << ")\n";
        } else if (*degrade) {
            merge_degrade_config(degrade, d_config, d_spec);
            const iqm::LumaImage img = iqm::load_image(d_in);
            iqm::save_image(iqm::degrade(img, d_spec), d_out);
            std::cerr << "wrote " << d_out << " (K=" << d_spec.kernel_size
                      << ", sigma_blur=" << iqm::format_human(d_spec.sigma_blur)
                      << ", sigma_noise=" << iqm::format_human(d_spec.sigma_noise)
                      << ", seed=" << d_spec.seed << ")\n";
        } else if (*sharpen) {
            merge_sharpen_config(sharpen, h_config, h_spec);
            const iqm::LumaImage img = iqm::load_image(h_in);
            iqm::save_image(iqm::unsharp_mask(img, h_spec), h_out);
            std::cerr << "wrote " << h_out << " (gamma=" << iqm::format_human(h_spec.gamma)
                      << ", radius_sigma=" << iqm::format_human(h_spec.radius_sigma) << ")\n";
        } else if (*batch) {
            const auto pairs = iqm::parse_manifest(b_manifest);
            iqm::EvalConfig cfg;
            cfg.q_patch_size = b_q.patch_size;
            cfg.q_tau = b_q.resolve_tau();
            cfg.omega = b_omega;
            cfg.metrics = b_toggles;
            cfg.threads = threads;
            const iqm::MetricReport report = iqm::batch_evaluate(pairs, cfg);
            write_output(out_path, [&](std::ostream& os) { iqm::write_report_csv(os, report); });
            int failed = 0;
            for (const auto& row : report.rows)
                if (!row.ok) ++failed;
            std::cerr << report.rows.size() << " pairs evaluated";
            if (failed > 0) std::cerr << " (" << failed << " failed)";
            if (report.omega.count > 0)
                std::cerr << "; omega mean = " << iqm::format_human(report.omega.mean);
            std::cerr << "\n";
        } else if (*ttest) {
            const std::string col_b = t_col_b.empty() ? t_col : t_col_b;
            const std::vector<double> xs_all = iqm::read_csv_column(t_a, t_col);
            const std::vector<double> ys_all = iqm::read_csv_column(t_b, col_b);
            if (xs_all.size() != ys_all.size())
                throw iqm::Error("column lengths differ: " + std::to_string(xs_all.size()) +
                                 " vs " + std::to_string(ys_all.size()));
            std::vector<double> xs, ys;
            std::size_t dropped = 0;
            for (std::size_t i = 0; i < xs_all.size(); ++i) {
                if (std::isfinite(xs_all[i]) && std::isfinite(ys_all[i])) {
                    xs.push_back(xs_all[i]);
                    ys.push_back(ys_all[i]);
                } else {
                    ++dropped;
                }
            }
            if (dropped > 0)
                std::cerr << "dropped " << dropped << " pairs with non-finite values\n";
            const iqm::TTestResult r = iqm::paired_t_test(xs, ys);
            write_output(out_path, [&](std::ostream& os) {
                os << "# iqm ttest a=" << t_a << " b=" << t_b << " column=" << t_col
                   << " column_b=" << col_b << " n=" << xs.size() << "\n";
                os << "t,df,p,significant_at_5pct\n";
                os << iqm::format_full(r.t_statistic) << ',' << r.degrees_of_freedom << ','
                   << iqm::format_full(r.p_value) << ',' << (r.significant_at_5pct ? 1 : 0)
                   << "\n";
            });
            std::cerr << "t = " << iqm::format_human(r.t_statistic)
                      << ", df = " << r.degrees_of_freedom
                      << ", p = " << iqm::format_human(r.p_value) << " -> "
                      << (r.significant_at_5pct ? "significant" : "not significant")
                      << " at the 5% level\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
