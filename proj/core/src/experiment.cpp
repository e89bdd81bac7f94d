#include "roughvol/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "roughvol/black_scholes.hpp"
#include "roughvol/errors.hpp"
#include "roughvol/gaussian_process.hpp"
#include "roughvol/time_grid.hpp"
#include "roughvol/version.hpp"

namespace roughvol {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_pct(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// RFC 4180 line: comma separated, CRLF terminated.
std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        out += csv_escape(fields[i]);
    }
    out += "\r\n";
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("short write to " + path.string());
}

std::vector<std::string> provenance(const ExperimentConfig& cfg) {
    return {std::to_string(cfg.mc.seed), std::to_string(cfg.mc.n_paths),
            std::to_string(cfg.steps_per_year)};
}

ModelParams cell_params(const ExperimentConfig& cfg, const ScenarioCell& cell) {
    ModelParams p = cfg.model;
    p.H = cell.hurst;
    p.rho = cell.rho;
    p.alpha = cell.alpha;
    return p;
}

TimeGrid cell_grid(const ExperimentConfig& cfg, const ScenarioCell& cell) {
    const double T = cfg.start_time + cell.lead_time;
    return TimeGrid::make(cfg.start_time, T, T + cell.window, cfg.steps_per_year);
}

CellResult price_cell(const ExperimentConfig& cfg, const ScenarioCell& cell) {
    CellResult out;
    out.cell = cell;
    const auto t0 = Clock::now();
    try {
        out.report = zero_vanna_report(cell_params(cfg, cell), cell_grid(cfg, cell), cfg.mc,
                                       cfg.smile);
        out.ok = true;
    } catch (const std::exception& e) {
        out.note = e.what();
    }
    out.seconds = seconds_since(t0);
    return out;
}

const CellResult* find_cell(const std::vector<CellResult>& results, double rho, double alpha,
                            double hurst, double lead, double window) {
    for (const auto& r : results)
        if (r.cell.rho == rho && r.cell.alpha == alpha && r.cell.hurst == hurst &&
            r.cell.lead_time == lead && r.cell.window == window)
            return &r;
    return nullptr;
}

const std::vector<std::string> kTableHeader = {
    "H",       "rho",           "alpha",   "T_minus_t",     "tau_minus_T", "Ev",
    "Ev_se",   "I_khat",        "I_khat_se", "ATMI",        "ATMI_se",     "diff_khat",
    "diff_khat_se", "diff_atm", "diff_atm_se", "k_hat",     "seed",        "n_paths",
    "steps_per_year", "status"};

std::string table_row(const ExperimentConfig& cfg, const CellResult& r) {
    std::vector<std::string> f = {fmt_full(r.cell.hurst), fmt_full(r.cell.rho),
                                  fmt_full(r.cell.alpha), fmt_full(r.cell.lead_time),
                                  fmt_full(r.cell.window)};
    if (r.ok) {
        const auto& rep = r.report;
        f.push_back(fmt_full(rep.forward_vol_strike.value));
        f.push_back(fmt_full(rep.forward_vol_strike.std_error));
        f.push_back(fmt_full(rep.zero_vanna_vol));
        f.push_back(fmt_full(rep.zero_vanna_vol_se));
        f.push_back(fmt_full(rep.atm_vol));
        f.push_back(fmt_full(rep.atm_vol_se));
        f.push_back(fmt_full(rep.diff_zero_vanna));
        f.push_back(fmt_full(rep.diff_zero_vanna_se));
        f.push_back(fmt_full(rep.diff_atm));
        f.push_back(fmt_full(rep.diff_atm_se));
        f.push_back(fmt_full(rep.zero_vanna_strike));
    } else {
        f.insert(f.end(), 11, "");
    }
    const auto prov = provenance(cfg);
    f.insert(f.end(), prov.begin(), prov.end());
    f.push_back(r.ok ? "ok" : r.note);
    return csv_line(f);
}

std::string table_csv(const ExperimentConfig& cfg, const std::vector<CellResult>& results) {
    std::string out = csv_line(kTableHeader);
    for (const auto& r : results) out += table_row(cfg, r);
    return out;
}

// Markdown mirror of the report tables: one block per (rho, alpha), rows by H
// with the three quantities, columns by (T - t, tau - T). Percent cells carry
// two decimals; full precision lives in the CSV.
std::string table_markdown(const ExperimentConfig& cfg, const std::vector<CellResult>& results) {
    std::ostringstream md;
    md << "# Forward-start implied vol vs vol swap strike\n";
    for (const double rho : cfg.axes.rho)
        for (const double alpha : cfg.axes.alpha) {
            md << "\n## rho = " << fmt_short(rho) << ", alpha = " << fmt_short(alpha) << "\n\n";
            md << "| H | quantity |";
            for (const double lead : cfg.axes.lead_time)
                for (const double window : cfg.axes.window)
                    md << " T-t=" << fmt_short(lead) << ", tau-T=" << fmt_short(window) << " |";
            md << "\n|---|---|";
            for (std::size_t i = 0; i < cfg.axes.lead_time.size() * cfg.axes.window.size(); ++i)
                md << "---|";
            md << "\n";
            const char* quantity[3] = {"E[v]", "I(khat) - E[v]", "ATMI - E[v]"};
            for (const double hurst : cfg.axes.hurst)
                for (int q = 0; q < 3; ++q) {
                    md << "| " << fmt_short(hurst) << " | " << quantity[q] << " |";
                    for (const double lead : cfg.axes.lead_time)
                        for (const double window : cfg.axes.window) {
                            const CellResult* r =
                                find_cell(results, rho, alpha, hurst, lead, window);
                            if (r == nullptr || !r->ok) {
                                md << " err |";
                                continue;
                            }
                            const double v = q == 0   ? r->report.forward_vol_strike.value
                                             : q == 1 ? r->report.diff_zero_vanna
                                                      : r->report.diff_atm;
                            md << " " << fmt_pct(v) << " |";
                        }
                    md << "\n";
                }
        }
    md << "\nStandard errors and raw decimals are in the csv next to this file.\n";
    return md.str();
}

std::string decay_csv(const ExperimentConfig& cfg, const DecayRun& run) {
    std::string out = csv_line({"delta", "error", "error_se", "Ev", "Ev_se", "I_khat",
                                "I_khat_se", "k_hat", "used_in_fit", "seed", "n_paths",
                                "steps_per_year", "status"});
    std::size_t series_index = 0;  // failed rungs never entered the series
    for (const auto& r : run.cells) {
        bool used = false;
        if (r.ok) {
            if (run.fit_ok)
                used = std::find(run.fit.used.begin(), run.fit.used.end(), series_index) !=
                       run.fit.used.end();
            ++series_index;
        }
        std::vector<std::string> f = {fmt_full(r.cell.window)};
        if (r.ok) {
            f.push_back(fmt_full(r.report.diff_zero_vanna));
            f.push_back(fmt_full(r.report.diff_zero_vanna_se));
            f.push_back(fmt_full(r.report.forward_vol_strike.value));
            f.push_back(fmt_full(r.report.forward_vol_strike.std_error));
            f.push_back(fmt_full(r.report.zero_vanna_vol));
            f.push_back(fmt_full(r.report.zero_vanna_vol_se));
            f.push_back(fmt_full(r.report.zero_vanna_strike));
            f.push_back(used ? "true" : "false");
        } else {
            f.insert(f.end(), 8, "");
        }
        const auto prov = provenance(cfg);
        f.insert(f.end(), prov.begin(), prov.end());
        f.push_back(r.ok ? "ok" : r.note);
        out += csv_line(f);
    }
    return out;
}

std::string decay_markdown(const ExperimentConfig& cfg, const DecayRun& run) {
    std::ostringstream md;
    md << "# Error decay against window length\n\n";
    md << "Scenario: H=" << fmt_short(cfg.axes.hurst.front())
       << ", rho=" << fmt_short(cfg.axes.rho.front())
       << ", alpha=" << fmt_short(cfg.axes.alpha.front())
       << ", T-t=" << fmt_short(cfg.axes.lead_time.front()) << "\n\n";
    md << "| tau-T | I(khat) - E[v] | SE |\n|---|---|---|\n";
    for (const auto& r : run.cells) {
        md << "| " << fmt_short(r.cell.window) << " | ";
        if (r.ok)
            md << fmt_pct(r.report.diff_zero_vanna) << " | " << fmt_pct(r.report.diff_zero_vanna_se)
               << " |\n";
        else
            md << "err | err |\n";
    }
    md << "\n";
    if (run.fit_ok) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "Fitted log|error| vs log(tau-T): slope %.4f +- %.4f, intercept %.4f, "
                      "r^2 %.4f, %zu of %zu points used.\n",
                      run.fit.slope, run.fit.slope_se, run.fit.intercept, run.fit.r_squared,
                      run.fit.used.size(), run.series.points.size());
        md << buf;
    } else {
        md << "No slope fit: " << run.fit_note << "\n";
    }
    return md.str();
}

std::string constants_csv(const ExperimentConfig& cfg, const AsymptoticsRun& run) {
    std::string out = csv_line({"H", "rho", "alpha", "term1", "term2", "term3", "total", "seed",
                                "n_paths", "steps_per_year", "status"});
    for (const auto& row : run.constants) {
        std::vector<std::string> f = {fmt_full(row.hurst), fmt_full(row.rho),
                                      fmt_full(row.alpha)};
        if (row.ok) {
            f.push_back(fmt_full(row.constants.term1));
            f.push_back(fmt_full(row.constants.term2));
            f.push_back(fmt_full(row.constants.term3));
            f.push_back(fmt_full(row.constants.total()));
        } else {
            f.insert(f.end(), 4, "");
        }
        const auto prov = provenance(cfg);
        f.insert(f.end(), prov.begin(), prov.end());
        f.push_back(row.ok ? "ok" : row.note);
        out += csv_line(f);
    }
    return out;
}

std::string predictions_csv(const ExperimentConfig& cfg, const AsymptoticsRun& run) {
    std::string out =
        csv_line({"H", "rho", "alpha", "T_minus_t", "tau_minus_T", "predicted", "measured",
                  "measured_se", "ratio", "resolvable", "sign_consistent", "seed", "n_paths",
                  "steps_per_year", "status"});
    for (const auto& row : run.predictions) {
        std::vector<std::string> f = {fmt_full(row.cell.hurst), fmt_full(row.cell.rho),
                                      fmt_full(row.cell.alpha), fmt_full(row.cell.lead_time),
                                      fmt_full(row.cell.window)};
        if (row.ok) {
            f.push_back(fmt_full(row.report.predicted));
            f.push_back(fmt_full(row.report.measured));
            f.push_back(fmt_full(row.report.measured_se));
            f.push_back(fmt_full(row.report.ratio));
            f.push_back(row.report.resolvable ? "true" : "false");
            f.push_back(row.report.sign_consistent ? "true" : "false");
        } else {
            f.insert(f.end(), 6, "");
        }
        const auto prov = provenance(cfg);
        f.insert(f.end(), prov.begin(), prov.end());
        f.push_back(row.ok ? "ok" : row.note);
        out += csv_line(f);
    }
    return out;
}

std::string asymptotics_markdown(const AsymptoticsRun& run) {
    std::ostringstream md;
    md << "# Small-window expansion: I(khat) - E[v] ~ C (tau-T)^(2H)\n\n";
    md << "| H | rho | alpha | term1 | term2 | term3 | C |\n|---|---|---|---|---|---|---|\n";
    for (const auto& row : run.constants) {
        md << "| " << fmt_short(row.hurst) << " | " << fmt_short(row.rho) << " | "
           << fmt_short(row.alpha) << " | ";
        if (row.ok)
            md << fmt_short(row.constants.term1) << " | " << fmt_short(row.constants.term2)
               << " | " << fmt_short(row.constants.term3) << " | "
               << fmt_short(row.constants.total()) << " |\n";
        else
            md << "err | err | err | err |\n";
    }
    md << "\n| H | rho | alpha | T-t | tau-T | predicted | measured | ratio | sign ok |\n";
    md << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& row : run.predictions) {
        md << "| " << fmt_short(row.cell.hurst) << " | " << fmt_short(row.cell.rho) << " | "
           << fmt_short(row.cell.alpha) << " | " << fmt_short(row.cell.lead_time) << " | "
           << fmt_short(row.cell.window) << " | ";
        if (row.ok)
            md << fmt_pct(row.report.predicted) << " | " << fmt_pct(row.report.measured) << " | "
               << fmt_short(row.report.ratio) << " | "
               << (row.report.sign_consistent ? "yes" : "NO") << " |\n";
        else
            md << "err | err | err | err |\n";
    }
    md << "\nPredictions keep the leading order only; agreement is in sign and order of "
          "magnitude.\n";
    return md.str();
}

std::string knots_csv(const ExperimentConfig& cfg, const std::vector<SmileKnot>& knots) {
    std::string out =
        csv_line({"strike", "vol", "vol_se", "usable", "seed", "n_paths", "steps_per_year",
                  "status"});
    for (const auto& knot : knots) {
        std::vector<std::string> f = {fmt_full(knot.strike)};
        if (knot.ok) {
            f.push_back(fmt_full(knot.vol));
            f.push_back(fmt_full(knot.vol_se));
            f.push_back("true");
        } else {
            f.insert(f.end(), 2, "");
            f.push_back("false");
        }
        const auto prov = provenance(cfg);
        f.insert(f.end(), prov.begin(), prov.end());
        f.push_back(knot.ok ? "ok" : knot.note);
        out += csv_line(f);
    }
    return out;
}

std::string price_markdown(const CellResult& r) {
    std::ostringstream md;
    md << "# Single scenario report\n\n";
    md << "Scenario: H=" << fmt_short(r.cell.hurst) << ", rho=" << fmt_short(r.cell.rho)
       << ", alpha=" << fmt_short(r.cell.alpha) << ", T-t=" << fmt_short(r.cell.lead_time)
       << ", tau-T=" << fmt_short(r.cell.window) << "\n\n";
    if (!r.ok) {
        md << "Failed: " << r.note << "\n";
        return md.str();
    }
    const auto& rep = r.report;
    md << "| quantity | value | SE |\n|---|---|---|\n";
    md << "| E[v] | " << fmt_pct(rep.forward_vol_strike.value) << " | "
       << fmt_pct(rep.forward_vol_strike.std_error) << " |\n";
    md << "| I(khat) | " << fmt_pct(rep.zero_vanna_vol) << " | " << fmt_pct(rep.zero_vanna_vol_se)
       << " |\n";
    md << "| ATMI | " << fmt_pct(rep.atm_vol) << " | " << fmt_pct(rep.atm_vol_se) << " |\n";
    md << "| I(khat) - E[v] | " << fmt_pct(rep.diff_zero_vanna) << " | "
       << fmt_pct(rep.diff_zero_vanna_se) << " |\n";
    md << "| ATMI - E[v] | " << fmt_pct(rep.diff_atm) << " | " << fmt_pct(rep.diff_atm_se)
       << " |\n";
    md << "\nZero-vanna log strike: " << fmt_full(rep.zero_vanna_strike) << "\n";
    return md.str();
}

std::string selftest_csv(const ExperimentConfig& cfg, const std::vector<CheckResult>& checks) {
    std::string out = csv_line(
        {"check", "pass", "detail", "seconds", "seed", "n_paths", "steps_per_year", "status"});
    for (const auto& c : checks) {
        std::vector<std::string> f = {c.name, c.pass ? "true" : "false", c.detail,
                                      fmt_full(c.seconds)};
        const auto prov = provenance(cfg);
        f.insert(f.end(), prov.begin(), prov.end());
        f.push_back(c.pass ? "ok" : "failed");
        out += csv_line(f);
    }
    return out;
}

std::string selftest_markdown(const std::vector<CheckResult>& checks) {
    std::ostringstream md;
    md << "# Selftest\n\n| check | result | detail |\n|---|---|---|\n";
    for (const auto& c : checks)
        md << "| " << c.name << " | " << (c.pass ? "pass" : "FAIL") << " | " << c.detail
           << " |\n";
    return md.str();
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["mode"] = cfg.mode;
    j["model"] = {{"sigma0", cfg.model.sigma0}, {"x0", cfg.model.x0}};
    j["axes"] = {{"H", cfg.axes.hurst},
                 {"rho", cfg.axes.rho},
                 {"alpha", cfg.axes.alpha},
                 {"T_minus_t", cfg.axes.lead_time},
                 {"tau_minus_T", cfg.axes.window}};
    j["start_time"] = cfg.start_time;
    j["steps_per_year"] = cfg.steps_per_year;
    j["mc"] = {{"n_paths", cfg.mc.n_paths},
               {"seed", cfg.mc.seed},
               {"batch_size", cfg.mc.batch_size},
               {"n_workers", cfg.mc.n_workers},
               {"control_variate", cfg.mc.control_variate}};
    j["smile"] = {{"n_knots", cfg.smile.n_knots}, {"width_stds", cfg.smile.width_stds}};
    j["decay"] = {{"deltas", cfg.decay_deltas}};
    j["prefix"] = cfg.prefix;
    j["selftest"] = {{"tamper_covariance", cfg.selftest_tamper_covariance}};
    return j;
}

}  // namespace

std::vector<ScenarioCell> expand_axes(const ScenarioAxes& axes) {
    std::vector<ScenarioCell> cells;
    cells.reserve(axes.rho.size() * axes.alpha.size() * axes.hurst.size() *
                  axes.lead_time.size() * axes.window.size());
    for (const double rho : axes.rho)
        for (const double alpha : axes.alpha)
            for (const double hurst : axes.hurst)
                for (const double lead : axes.lead_time)
                    for (const double window : axes.window)
                        cells.push_back({hurst, rho, alpha, lead, window});
    return cells;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.mode = j.value("mode", std::string("table"));
    if (j.contains("model")) {
        const auto& jm = j.at("model");
        cfg.model.sigma0 = jm.value("sigma0", cfg.model.sigma0);
        cfg.model.x0 = jm.value("x0", cfg.model.x0);
    }
    if (j.contains("axes")) {
        const auto& ja = j.at("axes");
        cfg.axes.hurst = ja.value("H", cfg.axes.hurst);
        cfg.axes.rho = ja.value("rho", cfg.axes.rho);
        cfg.axes.alpha = ja.value("alpha", cfg.axes.alpha);
        cfg.axes.lead_time = ja.value("T_minus_t", cfg.axes.lead_time);
        cfg.axes.window = ja.value("tau_minus_T", cfg.axes.window);
    }
    cfg.start_time = j.value("start_time", cfg.start_time);
    cfg.steps_per_year = j.value("steps_per_year", cfg.steps_per_year);
    if (!j.contains("mc") || !j.at("mc").contains("seed"))
        throw std::invalid_argument("config must set mc.seed explicitly");
    const auto& jmc = j.at("mc");
    cfg.mc.seed = jmc.at("seed").get<std::uint64_t>();
    cfg.mc.n_paths = jmc.value("n_paths", cfg.mc.n_paths);
    cfg.mc.batch_size = jmc.value("batch_size", cfg.mc.batch_size);
    cfg.mc.n_workers = jmc.value("n_workers", cfg.mc.n_workers);
    cfg.mc.control_variate = jmc.value("control_variate", cfg.mc.control_variate);
    if (j.contains("smile")) {
        const auto& js = j.at("smile");
        cfg.smile.n_knots = js.value("n_knots", cfg.smile.n_knots);
        cfg.smile.width_stds = js.value("width_stds", cfg.smile.width_stds);
    }
    if (j.contains("decay")) cfg.decay_deltas = j.at("decay").value("deltas", cfg.decay_deltas);
    cfg.prefix = j.value("prefix", cfg.prefix);
    if (j.contains("selftest"))
        cfg.selftest_tamper_covariance =
            j.at("selftest").value("tamper_covariance", cfg.selftest_tamper_covariance);
    return cfg;
}

std::string ExperimentConfig::to_json() const { return config_to_json(*this).dump(2); }

void ExperimentConfig::validate() const {
    static const char* kModes[] = {"table", "decay", "asymptotics", "price", "selftest"};
    if (std::find_if(std::begin(kModes), std::end(kModes),
                     [&](const char* m) { return mode == m; }) == std::end(kModes))
        throw std::invalid_argument("unknown mode " + mode);
    if (!(model.sigma0 > 0.0)) throw std::invalid_argument("model.sigma0 must be positive");
    if (!(start_time >= 0.0)) throw std::invalid_argument("start_time must be >= 0");
    if (steps_per_year < 1) throw std::invalid_argument("steps_per_year must be >= 1");
    if (mc.n_paths == 0) throw std::invalid_argument("mc.n_paths must be >= 1");
    if (mc.batch_size == 0) throw std::invalid_argument("mc.batch_size must be >= 1");
    if (mc.n_workers < 1) throw std::invalid_argument("mc.n_workers must be >= 1");
    if (smile.n_knots < 4) throw std::invalid_argument("smile.n_knots must be >= 4");
    if (!(smile.width_stds > 0.0)) throw std::invalid_argument("smile.width_stds must be > 0");
    if (mode == "selftest") return;
    const bool needs_windows = mode != "decay";
    if (axes.hurst.empty() || axes.rho.empty() || axes.alpha.empty() || axes.lead_time.empty() ||
        (needs_windows && axes.window.empty()))
        throw std::invalid_argument("scenario axes must not be empty for mode " + mode);
    if (mode == "decay") {
        if (decay_deltas.empty()) throw std::invalid_argument("decay.deltas must not be empty");
        for (std::size_t i = 0; i < decay_deltas.size(); ++i) {
            if (!(decay_deltas[i] > 0.0))
                throw std::invalid_argument("decay.deltas must be positive");
            if (i > 0 && !(decay_deltas[i - 1] > decay_deltas[i]))
                throw std::invalid_argument("decay.deltas must be strictly decreasing");
        }
    }
}

std::vector<CellResult> run_table(const ExperimentConfig& config) {
    std::vector<CellResult> out;
    for (const auto& cell : expand_axes(config.axes)) out.push_back(price_cell(config, cell));
    return out;
}

DecayRun run_decay(const ExperimentConfig& config) {
    DecayRun run;
    ScenarioCell cell;
    cell.hurst = config.axes.hurst.front();
    cell.rho = config.axes.rho.front();
    cell.alpha = config.axes.alpha.front();
    cell.lead_time = config.axes.lead_time.front();
    for (const double delta : config.decay_deltas) {
        cell.window = delta;
        run.cells.push_back(price_cell(config, cell));
        const auto& r = run.cells.back();
        if (r.ok)
            run.series.points.push_back(
                {delta, r.report.diff_zero_vanna, r.report.diff_zero_vanna_se});
    }
    try {
        run.fit = decay_slope(run.series);
        run.fit_ok = true;
    } catch (const std::exception& e) {
        run.fit_note = e.what();
    }
    return run;
}

AsymptoticsRun run_asymptotics(const ExperimentConfig& config) {
    AsymptoticsRun run;
    for (const double rho : config.axes.rho)
        for (const double alpha : config.axes.alpha)
            for (const double hurst : config.axes.hurst) {
                ConstantsRow row;
                row.hurst = hurst;
                row.rho = rho;
                row.alpha = alpha;
                try {
                    ModelParams p = config.model;
                    p.H = hurst;
                    p.rho = rho;
                    p.alpha = alpha;
                    row.constants = limit_constants(p);
                    row.ok = true;
                } catch (const std::exception& e) {
                    row.note = e.what();
                }
                run.constants.push_back(row);
            }
    for (const auto& cell : expand_axes(config.axes)) {
        PredictionRow row;
        row.cell = cell;
        const auto t0 = Clock::now();
        try {
            row.report = compare_prediction(cell_params(config, cell), cell_grid(config, cell),
                                            config.mc);
            row.ok = true;
        } catch (const std::exception& e) {
            row.note = e.what();
        }
        row.seconds = seconds_since(t0);
        run.predictions.push_back(row);
    }
    return run;
}

RunArtifacts run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const auto t0 = Clock::now();

    RunArtifacts artifacts;
    json manifest;
    manifest["library_version"] = library_version;
    manifest["mode"] = config.mode;
    manifest["config"] = config_to_json(config);

    auto emit = [&](const std::string& name, const std::string& content) {
        const auto path = dir / name;
        write_text(path, content);
        artifacts.files.push_back(path.string());
    };

    if (config.mode == "table") {
        const auto results = run_table(config);
        emit(config.prefix + ".csv", table_csv(config, results));
        emit(config.prefix + ".md", table_markdown(config, results));
        std::size_t failures = 0;
        json cells = json::array();
        for (const auto& r : results) {
            if (!r.ok) ++failures;
            cells.push_back({{"H", r.cell.hurst},
                             {"rho", r.cell.rho},
                             {"alpha", r.cell.alpha},
                             {"T_minus_t", r.cell.lead_time},
                             {"tau_minus_T", r.cell.window},
                             {"ok", r.ok},
                             {"seconds", r.seconds}});
        }
        manifest["cells"] = cells;
        artifacts.failed = failures == results.size();
        artifacts.summary = "table: " + std::to_string(results.size()) + " cells, " +
                            std::to_string(failures) + " failed";
    } else if (config.mode == "decay") {
        const DecayRun run = run_decay(config);
        emit(config.prefix + "_decay.csv", decay_csv(config, run));
        emit(config.prefix + "_decay.md", decay_markdown(config, run));
        std::size_t failures = 0;
        for (const auto& r : run.cells)
            if (!r.ok) ++failures;
        manifest["fit"] = run.fit_ok
                              ? json({{"slope", run.fit.slope},
                                      {"slope_se", run.fit.slope_se},
                                      {"intercept", run.fit.intercept},
                                      {"r_squared", run.fit.r_squared},
                                      {"points_used", run.fit.used.size()}})
                              : json({{"error", run.fit_note}});
        artifacts.failed = failures == run.cells.size();
        artifacts.summary =
            run.fit_ok ? "decay: slope " + fmt_short(run.fit.slope) + " +- " +
                             fmt_short(run.fit.slope_se)
                       : "decay: no slope fit (" + run.fit_note + ")";
    } else if (config.mode == "asymptotics") {
        const AsymptoticsRun run = run_asymptotics(config);
        emit(config.prefix + "_constants.csv", constants_csv(config, run));
        emit(config.prefix + "_predictions.csv", predictions_csv(config, run));
        emit(config.prefix + "_asymptotics.md", asymptotics_markdown(run));
        std::size_t failures = 0;
        for (const auto& r : run.predictions)
            if (!r.ok) ++failures;
        artifacts.failed = !run.predictions.empty() && failures == run.predictions.size();
        artifacts.summary = "asymptotics: " + std::to_string(run.constants.size()) +
                            " constant rows, " + std::to_string(run.predictions.size()) +
                            " prediction rows, " + std::to_string(failures) + " failed";
    } else if (config.mode == "price") {
        const auto cells = expand_axes(config.axes);
        const CellResult result = price_cell(config, cells.front());
        std::vector<CellResult> results = {result};
        emit(config.prefix + ".csv", table_csv(config, results));
        emit(config.prefix + "_knots.csv",
             knots_csv(config, result.ok ? result.report.knots : std::vector<SmileKnot>{}));
        emit(config.prefix + ".md", price_markdown(result));
        artifacts.failed = !result.ok;
        artifacts.summary = result.ok ? "price: ok in " + fmt_short(result.seconds) + " s"
                                      : "price: failed (" + result.note + ")";
    } else {  // selftest
        const auto checks = run_selftest(config);
        emit(config.prefix + "_selftest.csv", selftest_csv(config, checks));
        emit(config.prefix + "_selftest.md", selftest_markdown(checks));
        std::size_t failures = 0;
        std::string failed_names;
        json rows = json::array();
        for (const auto& c : checks) {
            if (!c.pass) {
                ++failures;
                if (!failed_names.empty()) failed_names += ", ";
                failed_names += c.name;
            }
            rows.push_back(
                {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"seconds", c.seconds}});
        }
        manifest["checks"] = rows;
        artifacts.failed = failures > 0;
        artifacts.summary = "selftest: " + std::to_string(checks.size() - failures) + "/" +
                            std::to_string(checks.size()) + " checks passed";
        if (failures > 0) artifacts.summary += " (failed: " + failed_names + ")";
    }

    manifest["outputs"] = artifacts.files;
    manifest["summary"] = artifacts.summary;
    manifest["failed"] = artifacts.failed;
    manifest["total_seconds"] = seconds_since(t0);
    const auto manifest_path = dir / "run_manifest.json";
    write_text(manifest_path, manifest.dump(2) + "\n");
    artifacts.files.push_back(manifest_path.string());
    return artifacts;
}

}  // namespace roughvol
