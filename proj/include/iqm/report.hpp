#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "iqm/errors.hpp"
#include "iqm/image.hpp"
#include "iqm/image_io.hpp"
#include "iqm/metrics.hpp"
#include "iqm/omega.hpp"
#include "iqm/parallel.hpp"
#include "iqm/sharpness.hpp"
#include "iqm/stats.hpp"
#include "iqm/synth.hpp"

namespace iqm {

// ---- number and CSV formatting ----

// Full precision for CSV (17 significant digits round-trips a double).
inline std::string format_full(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// 6 significant digits for human-facing summaries.
inline std::string format_human(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

// ---- configuration ----

struct MetricToggles {
    bool psnr = true;
    bool ssim = true;
    bool q = true;
    bool omega = true;
    bool l1 = true;
    bool freq = true;

    std::string enabled_list() const {
        std::string s;
        auto add = [&](bool on, const char* name) {
            if (!on) return;
            if (!s.empty()) s += ',';
            s += name;
        };
        add(psnr, "psnr");
        add(ssim, "ssim");
        add(q, "q");
        add(omega, "omega");
        add(l1, "l1");
        add(freq, "freq_loss");
        return s.empty() ? "none" : s;
    }
};

struct EvalConfig {
    int q_patch_size = kDefaultQPatchSize;
    double q_tau = kDefaultCoherenceThreshold;
    OmegaParams omega;
    double sweep_radius_sigma = 1.0;
    MetricToggles metrics;
    int threads = 1;

    // Deterministic echo of every parameter, for output provenance.
    std::string provenance() const {
        std::ostringstream os;
        os << "metrics=" << metrics.enabled_list()
           << " q_patch_size=" << q_patch_size
           << " q_tau=" << format_full(q_tau)
           << " omega_steepness=" << format_full(omega.steepness)
           << " omega_midpoint=" << format_full(omega.midpoint)
           << " omega_patch_size=" << omega.patch_size
           << " psnr_cap=" << format_full(omega.psnr_cap)
           << " alpha_cap=" << format_full(omega.alpha_cap)
           << " sweep_radius_sigma=" << format_full(sweep_radius_sigma)
           << " threads=" << threads;
        return os.str();
    }
};

// ---- per-pair batch evaluation ----

struct PairRow {
    std::size_t index = 0;
    std::string ref_path;
    std::string rest_path;
    bool ok = false;
    std::string error;
    std::optional<double> psnr;
    std::optional<double> ssim;
    std::optional<double> q_ref;
    std::optional<double> q_rest;
    std::optional<double> omega;
    std::optional<double> l1;
    std::optional<double> freq;
};

struct MetricReport {
    std::vector<PairRow> rows;
    Summary psnr, ssim, q_ref, q_rest, omega, l1, freq;
    std::string provenance;
};

namespace detail {

inline void eval_pair(PairRow& row, const EvalConfig& cfg) {
    const LumaImage ref = load_image(row.ref_path);
    const LumaImage rest = load_image(row.rest_path);
    require_same_shape(ref, rest);
    if (cfg.metrics.psnr) row.psnr = iqm::psnr(ref, rest);
    if (cfg.metrics.ssim) row.ssim = iqm::ssim(ref, rest);
    if (cfg.metrics.q) {
        row.q_ref = compute_q(ref, cfg.q_patch_size, cfg.q_tau).q;
        row.q_rest = compute_q(rest, cfg.q_patch_size, cfg.q_tau).q;
    }
    if (cfg.metrics.omega) row.omega = compute_omega(ref, rest, cfg.omega).omega;
    if (cfg.metrics.l1) row.l1 = iqm::l1_loss(ref, rest);
    if (cfg.metrics.freq) row.freq = iqm::freq_loss(ref, rest);
    row.ok = true;
}

inline Summary column_summary(const std::vector<PairRow>& rows,
                              std::optional<double> PairRow::*member) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const PairRow& r : rows)
        if (r.ok && (r.*member).has_value()) values.push_back(*(r.*member));
    return summarize(values);
}

}  // namespace detail

// Evaluates every enabled metric on each (reference, restored) pair. A pair
// that fails to load or mismatches keeps its error in the row instead of
// aborting the batch; only an all-failed batch is an error. Rows are computed
// concurrently but stored and summarized in input order, so the report does
// not depend on scheduling.
inline MetricReport batch_evaluate(const std::vector<std::pair<std::string, std::string>>& pairs,
                                   const EvalConfig& cfg = {}) {
    if (pairs.empty()) throw ParamError("batch needs at least one image pair");

    MetricReport report;
    report.provenance = cfg.provenance();
    report.rows.resize(pairs.size());

    parallel_for(pairs.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            PairRow& row = report.rows[i];
            row.index = i;
            row.ref_path = pairs[i].first;
            row.rest_path = pairs[i].second;
            try {
                detail::eval_pair(row, cfg);
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        }
    });

    const auto failures = static_cast<std::size_t>(
        std::count_if(report.rows.begin(), report.rows.end(),
                      [](const PairRow& r) { return !r.ok; }));
    if (failures == report.rows.size())
        throw Error("all " + std::to_string(failures) + " pairs failed; first error: " +
                    report.rows.front().error);

    report.psnr = detail::column_summary(report.rows, &PairRow::psnr);
    report.ssim = detail::column_summary(report.rows, &PairRow::ssim);
    report.q_ref = detail::column_summary(report.rows, &PairRow::q_ref);
    report.q_rest = detail::column_summary(report.rows, &PairRow::q_rest);
    report.omega = detail::column_summary(report.rows, &PairRow::omega);
    report.l1 = detail::column_summary(report.rows, &PairRow::l1);
    report.freq = detail::column_summary(report.rows, &PairRow::freq);
    return report;
}

// ---- gamma sweep ----

struct SweepRow {
    double gamma = 0.0;
    double q = 0.0;
    double psnr = 0.0;   // versus the unsharpened original
    double omega = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::string provenance;
};

// Sharpens the image with each gamma and records Q, PSNR against the
// original, and omega. Reproduces the sharpen-until-ringing experiment.
inline SweepTable gamma_sweep(const LumaImage& img, const std::vector<double>& gammas,
                              const EvalConfig& cfg = {}) {
    if (gammas.empty()) throw ParamError("gamma sweep needs at least one gamma");
    if (!std::is_sorted(gammas.begin(), gammas.end()))
        throw ParamError("gamma list must be sorted ascending");

    SweepTable table;
    table.provenance = cfg.provenance();
    table.rows.resize(gammas.size());

    parallel_for(gammas.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            SweepRow& row = table.rows[i];
            row.gamma = gammas[i];
            const LumaImage sharp = unsharp_mask(img, {gammas[i], cfg.sweep_radius_sigma});
            row.q = compute_q(sharp, cfg.q_patch_size, cfg.q_tau).q;
            row.psnr = iqm::psnr(img, sharp);
            row.omega = compute_omega(img, sharp, cfg.omega).omega;
        }
    });
    return table;
}

// ---- CSV emission ----

inline void write_report_csv(std::ostream& os, const MetricReport& report) {
    os << "# iqm batch " << report.provenance << "\n";
    os << "id,ref,restored,psnr,ssim,q_ref,q_rest,omega,l1,freq_loss,error\n";
    auto cell = [](const std::optional<double>& v) {
        return v.has_value() ? format_full(*v) : std::string();
    };
    for (const PairRow& r : report.rows) {
        os << r.index << ',' << csv_quote(r.ref_path) << ',' << csv_quote(r.rest_path) << ','
           << cell(r.psnr) << ',' << cell(r.ssim) << ',' << cell(r.q_ref) << ','
           << cell(r.q_rest) << ',' << cell(r.omega) << ',' << cell(r.l1) << ','
           << cell(r.freq) << ',' << csv_quote(r.error) << "\n";
    }
    auto summary_line = [&](const char* name, const Summary& s) {
        if (s.count == 0) return;
        os << "# summary " << name << " mean=" << format_full(s.mean)
           << " std=" << format_full(s.stddev) << " count=" << s.count << "\n";
    };
    summary_line("psnr", report.psnr);
    summary_line("ssim", report.ssim);
    summary_line("q_ref", report.q_ref);
    summary_line("q_rest", report.q_rest);
    summary_line("omega", report.omega);
    summary_line("l1", report.l1);
    summary_line("freq_loss", report.freq);
}

inline void write_sweep_csv(std::ostream& os, const SweepTable& table) {
    os << "# iqm sweep " << table.provenance << "\n";
    os << "gamma,q,psnr,omega\n";
    for (const SweepRow& r : table.rows)
        os << format_full(r.gamma) << ',' << format_full(r.q) << ',' << format_full(r.psnr)
           << ',' << format_full(r.omega) << "\n";
}

inline void write_omega_patch_csv(std::ostream& os, const OmegaResult& result,
                                  const std::string& provenance) {
    os << "# iqm omega " << provenance << "\n";
    os << "patch_row,patch_col,q_ref,q_rest,alpha,sigma,p_prime,omega\n";
    for (const PatchOmega& p : result.per_patch)
        os << p.row << ',' << p.col << ',' << format_full(p.q_ref) << ','
           << format_full(p.q_rest) << ',' << format_full(p.alpha) << ','
           << format_full(p.sigma) << ',' << format_full(p.p_prime) << ','
           << format_full(p.omega) << "\n";
}

// ---- manifest and CSV input ----

// Batch manifest: one "ref<TAB>restored" per line; '#' comments and blank
// lines allowed.
inline std::vector<std::pair<std::string, std::string>> parse_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw FormatError(path + ":" + std::to_string(lineno) +
                              ": expected 'ref<TAB>restored'");
        pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return pairs;
}

// Reads one named column of a CSV file (as emitted above; '#' lines are
// skipped, the first remaining line is the header). Empty cells are ignored.
inline std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cell += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(cell);
                cell.clear();
            } else {
                cell += c;
            }
        }
        cells.push_back(cell);
        return cells;
    };

    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        header = split(line);
        break;
    }
    if (header.empty()) throw FormatError(path + ": no CSV header found");

    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == column) col = i;
    if (col == header.size()) {
        std::string names;
        for (const auto& h : header) names += (names.empty() ? "" : ", ") + h;
        throw FormatError(path + ": no column '" + column + "' (have: " + names + ")");
    }

    std::vector<double> values;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line);
        if (col >= cells.size() || cells[col].empty()) continue;
        try {
            std::size_t consumed = 0;
            const double v = std::stod(cells[col], &consumed);
            if (consumed != cells[col].size())
                throw std::invalid_argument("trailing characters");
            values.push_back(v);
        } catch (const std::exception&) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": cell '" + cells[col] +
                              "' in column '" + column + "' is not a number");
        }
    }
    return values;
}

}  // namespace iqm
