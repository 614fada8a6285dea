// Scenario configuration, Monte Carlo campaign execution and metric
// aggregation for the gradiometer-aided INS simulator.
#pragma once

#include "gravnav/ellipsefit.hpp"
#include "gravnav/fusion.hpp"
#include "gravnav/geodesy.hpp"
#include "gravnav/gradiometer.hpp"
#include "gravnav/gravmap.hpp"
#include "gravnav/ins.hpp"
#include "gravnav/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gravnav::harness {

/// Route description: endpoints, speed, cruise altitude.
struct RouteConfig {
    double start_lat_deg = 53.407579;  // Liverpool
    double start_lon_deg = -2.967853;
    double end_lat_deg = 43.604652;  // Toulouse
    double end_lon_deg = 1.444209;
    double speed_mps = 100.0;
    double altitude_m = 3000.0;
};

/// One synthetic fine-coverage region (axis split into lat bands that hug
/// the route corridor).
struct FineRegionConfig {
    double lat_min_deg = 0.0;
    double lat_max_deg = 0.0;
    double band_deg = 1.4;  ///< lat extent per generated grid band
};

/// Synthetic map-set description: a coarse full-coverage grid plus fine
/// corridor patches, all generated from seeded point-mass fields.
struct SyntheticMapConfig {
    double background_s2 = gravmap::kBackgroundGradient;
    double background_trend_per_deg = 0.0;  ///< vs latitude
    double trend_reference_lat_deg = 53.407579;
    double corridor_halfwidth_deg = 0.12;
    double margin_deg = 0.8;  ///< coarse-grid margin beyond the route box
    double reference_altitude_m = 3000.0;

    double coarse_resolution_deg = 1.0 / 60.0;
    int coarse_mass_count = 340;
    double coarse_depth_m = 5000.0;
    double coarse_anomaly_s2 = 1.4e-8;

    double fine_resolution_deg = 0.0008;
    double fine_masses_per_100km = 45.0;
    double fine_depth_m = 1200.0;
    double fine_anomaly_s2 = 2.8e-8;
    std::vector<FineRegionConfig> fine_regions;
};

struct MapsConfig {
    std::vector<std::string> files;  ///< GGV1 grids, loaded in order
    std::optional<SyntheticMapConfig> synthetic;
};

/// Sweep request: rerun the Monte Carlo per value of one parameter
/// ("phase_noise" or "failure_prob").
struct SweepConfig {
    std::string parameter;
    std::vector<double> values;
};

/// Complete run description; fully resolved values reproduce a campaign.
struct ScenarioConfig {
    std::string name = "liverpool_toulouse_synthetic";
    RouteConfig route;
    double ins_rate_hz = 100.0;
    ins::SensorErrorBudget budget;
    ins::AltimeterConfig altimeter;
    trajectory::VibrationConfig vibration;
    gradiometer::GradiometerConfig gradiometer_cfg;
    fusion::FilterConfig filter;
    MapsConfig maps;
    int runs = 10;
    std::uint64_t base_seed = 20260810;
    double truncate_s = 0.0;  ///< 0 = full route
    bool aided = true;
    SweepConfig sweep;
};

/// Paper-default scenario over the bundled synthetic map set.
ScenarioConfig default_scenario();

ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);
std::string scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const std::string& json_text);

/// Named-stream seed derivation: independent, individually reproducible
/// noise streams per (base seed, run index, stream name).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t run_index,
                          const std::string& stream);

/// Build the synthetic map set for a scenario (seeded from base_seed).
gravmap::MapSet build_maps(const ScenarioConfig& cfg);

/// Immutable per-scenario state shared by all runs: truth motion, clean
/// IMU, maps, and the per-epoch truth gradient channel.
class ScenarioEngine {
  public:
    explicit ScenarioEngine(const ScenarioConfig& cfg);

    const ScenarioConfig& config() const { return cfg_; }
    const trajectory::Route& route() const { return route_; }
    const trajectory::TruthSeries& truth() const { return truth_; }
    const std::vector<ins::ImuSample>& clean_imu() const { return clean_imu_; }
    const gravmap::MapSet& maps() const { return maps_; }

    /// Fusion epochs in the (possibly truncated) run.
    int epochs() const { return epochs_; }
    int steps_per_epoch() const { return steps_per_epoch_; }

    double true_gradient(int epoch) const { return true_gradient_[epoch]; }
    double upper_gravity(int epoch) const { return g_upper_[epoch]; }
    double vibration_scale(int epoch) const { return vibration_scale_[epoch]; }
    /// Whether the truth position at this epoch has fine (priority > 0)
    /// map coverage.
    bool fine_coverage(int epoch) const { return fine_coverage_[epoch] != 0; }
    const trajectory::StateVector& truth_state_at_epoch(int epoch) const;

  private:
    ScenarioConfig cfg_;
    trajectory::Route route_;
    trajectory::TruthSeries truth_;
    std::vector<ins::ImuSample> clean_imu_;
    gravmap::MapSet maps_;
    int epochs_ = 0;
    int steps_per_epoch_ = 0;
    std::vector<double> true_gradient_;
    std::vector<double> g_upper_;
    std::vector<double> vibration_scale_;
    std::vector<std::uint8_t> fine_coverage_;
};

/// One gradient estimate error sample (either method).
struct GradientErrorSample {
    double time_s = 0.0;
    double estimate_s2 = 0.0;
    double true_s2 = 0.0;
    double error_s2 = 0.0;
};

/// Per-run outputs.
struct RunMetrics {
    int run_index = 0;
    std::vector<double> radial_error_m;  ///< 1 Hz, index = epoch (0..epochs)
    std::vector<double> altitude_error_m;
    double mean_radial_m = 0.0;
    double final_radial_m = 0.0;
    std::vector<GradientErrorSample> pf_gradient;  ///< per epoch (aided runs)
    std::vector<GradientErrorSample> ellipse_fit_gradient;
    int failure_count = 0;
    int weight_underflow_count = 0;

    double mean_radial_after(double t0_s) const;
};

/// Execute one run. Deterministic per (config base seed, run_index).
RunMetrics run_scenario(const ScenarioEngine& engine, int run_index,
                        bool aided);

/// Same, with a config override differing from the engine's only in
/// sweep-safe fields (gradiometer noise/failure settings, filter tuning):
/// the shared truth/IMU/map state stays valid and per-run noise streams
/// stay draw-for-draw aligned across sweep points.
RunMetrics run_scenario(const ScenarioEngine& engine,
                        const ScenarioConfig& cfg_override, int run_index,
                        bool aided);

/// Aggregate of a single-parameter-point Monte Carlo.
struct AggregateMetrics {
    std::vector<RunMetrics> runs;
    std::vector<double> epoch_time_s;
    std::vector<double> mean_radial_m;  ///< across runs, per epoch
    std::vector<double> std_radial_m;
    double route_mean_radial_m = 0.0;      ///< route- and run-averaged
    double route_mean_post600_m = 0.0;     ///< excluding the first 600 s
    double route_std_radial_m = 0.0;       ///< run-to-run std of route averages
};

struct SweepPoint {
    double value = 0.0;
    AggregateMetrics aggregate;
};

struct MonteCarloResult {
    ScenarioConfig config;
    AggregateMetrics baseline;  ///< empty when only a sweep was requested
    std::vector<SweepPoint> sweep_points;
};

/// Monte Carlo over `cfg.runs` runs (worker pool, one run per worker).
/// With a sweep configured, reruns the campaign per swept value reusing the
/// same engine and per-run seeds (common random numbers).
MonteCarloResult monte_carlo(const ScenarioConfig& cfg);

/// Aggregate a set of runs.
AggregateMetrics aggregate_runs(std::vector<RunMetrics> runs);

/// Write radial_error_vs_time.csv, gradient_errors.csv, sweep_summary.csv
/// and the plain-text run manifest into out_dir.
void export_results(const MonteCarloResult& result,
                    const std::filesystem::path& out_dir);

/// Recover the resolved scenario config from a manifest written by
/// export_results.
ScenarioConfig load_manifest_config(const std::filesystem::path& manifest);

}  // namespace gravnav::harness
