#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roughvol/asymptotics.hpp"
#include "roughvol/pricing.hpp"
#include "roughvol/rbergomi.hpp"

namespace roughvol {

/// Scenario axes expanded as a cartesian product, mirroring the table layout
/// of the reports: rho and alpha group tables, H picks the row, the two time
/// axes pick the column.
struct ScenarioAxes {
    std::vector<double> hurst;
    std::vector<double> rho;
    std::vector<double> alpha;
    std::vector<double> lead_time;  // T - t
    std::vector<double> window;     // tau - T
};

struct ScenarioCell {
    double hurst = 0.0;
    double rho = 0.0;
    double alpha = 0.0;
    double lead_time = 0.0;
    double window = 0.0;
};

std::vector<ScenarioCell> expand_axes(const ScenarioAxes& axes);

struct ExperimentConfig {
    std::string mode = "table";  // table | decay | asymptotics | price | selftest
    ModelParams model;           // sigma0 and x0 shared; H, rho, alpha come from the axes
    ScenarioAxes axes;
    double start_time = 0.0;  // t
    int steps_per_year = 100;
    MCConfig mc;  // seed is mandatory in config files (no wall-clock default)
    SmileConfig smile;
    std::vector<double> decay_deltas;  // strictly decreasing ladder for mode=decay
    std::string prefix = "run";        // output file stem
    bool selftest_tamper_covariance = false;  // injects an asymmetry; selftest must catch it

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json() const;  // round-trips the parsed config for the manifest

    void validate() const;
};

/// One priced scenario. When ok is false the note carries the reason and the
/// report fields are meaningless; table runs keep going and record the row.
struct CellResult {
    ScenarioCell cell;
    SmileReport report;
    bool ok = false;
    std::string note;
    double seconds = 0.0;
};

std::vector<CellResult> run_table(const ExperimentConfig& config);

struct DecayRun {
    std::vector<CellResult> cells;  // one per rung, largest delta first
    DecaySeries series;
    SlopeFit fit;
    bool fit_ok = false;
    std::string fit_note;  // InsufficientSignal text when the fit is missing
};

/// Rungs share the config seed (common random numbers policy: the seed is
/// never perturbed by the rung index; path batches are keyed by batch index
/// only, so each rung draws the same underlying normal stream).
DecayRun run_decay(const ExperimentConfig& config);

struct ConstantsRow {
    double hurst = 0.0;
    double rho = 0.0;
    double alpha = 0.0;
    LimitConstants constants;
    bool ok = false;
    std::string note;
};

struct PredictionRow {
    ScenarioCell cell;
    PredictionReport report;
    bool ok = false;
    std::string note;
    double seconds = 0.0;
};

struct AsymptoticsRun {
    std::vector<ConstantsRow> constants;
    std::vector<PredictionRow> predictions;
};

AsymptoticsRun run_asymptotics(const ExperimentConfig& config);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Named invariant checks at a fixed reduced scale (the config contributes
/// only seed, worker count and the tamper hook), sized to finish well under
/// a minute.
std::vector<CheckResult> run_selftest(const ExperimentConfig& config);

struct RunArtifacts {
    std::vector<std::string> files;  // paths written under the output directory
    std::string summary;             // one line per mode outcome
    bool failed = false;             // selftest failures or every cell failed
};

/// Dispatches on config.mode, writes csv/markdown artifacts plus
/// run_manifest.json into out_dir. CSV bytes depend only on config content
/// (worker count included only as provenance), never on timing.
RunArtifacts run_experiment(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace roughvol
