// gravnav command-line interface:
//   gravnav simulate  — Monte Carlo campaigns over a scenario config
//   gravnav gravmap synth — synthesize a GGV1 grid from a mass-list file
#include <CLI11.hpp>

#include "gravnav/harness.hpp"

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

/// "name=v1,v2,v3" -> SweepConfig
gravnav::harness::SweepConfig parse_sweep(const std::string& text) {
    gravnav::harness::SweepConfig sweep;
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= text.size()) {
        throw gravnav::Error("bad --sweep spec '" + text +
                             "', expected name=v1,v2,...");
    }
    sweep.parameter = text.substr(0, eq);
    std::string values = text.substr(eq + 1);
    std::size_t pos = 0;
    while (pos < values.size()) {
        auto comma = values.find(',', pos);
        if (comma == std::string::npos) comma = values.size();
        sweep.values.push_back(std::stod(values.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return sweep;
}

int cmd_simulate(const std::string& config_path, int runs,
                 const std::string& out_dir, bool unaided,
                 const std::string& sweep_spec, double truncate_s,
                 std::int64_t seed, const std::string& emit_config,
                 bool export_truth) {
    namespace harness = gravnav::harness;

    harness::ScenarioConfig cfg = config_path.empty()
                                      ? harness::default_scenario()
                                      : harness::load_scenario(config_path);
    if (!emit_config.empty()) {
        harness::save_scenario(cfg, emit_config);
        std::cout << "wrote scenario config to " << emit_config << "\n";
        return 0;
    }
    if (runs > 0) cfg.runs = runs;
    if (unaided) cfg.aided = false;
    if (truncate_s > 0.0) cfg.truncate_s = truncate_s;
    if (seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed);
    if (!sweep_spec.empty()) cfg.sweep = parse_sweep(sweep_spec);

    std::cout << "scenario '" << cfg.name << "': " << cfg.runs << " run(s), "
              << (cfg.aided ? "gradiometer-aided" : "unaided INS")
              << (cfg.truncate_s > 0.0
                      ? ", truncated to " + std::to_string(cfg.truncate_s) + " s"
                      : std::string(", full route"))
              << "\n";

    const harness::MonteCarloResult result = harness::monte_carlo(cfg);
    harness::export_results(result, out_dir);

    if (export_truth) {
        harness::ScenarioEngine engine(cfg);
        gravnav::trajectory::export_truth_csv(
            engine.truth(), std::string(out_dir) + "/truth_states.csv");
        std::cout << "wrote truth_states.csv\n";
    }

    if (!result.baseline.runs.empty()) {
        std::cout << "route-averaged mean radial error: "
                  << result.baseline.route_mean_radial_m << " m (post-600 s: "
                  << result.baseline.route_mean_post600_m << " m)\n"
                  << "mean radial error at route end: "
                  << result.baseline.mean_radial_m.back() << " m\n";
    }
    for (const auto& p : result.sweep_points) {
        std::cout << cfg.sweep.parameter << " = " << p.value
                  << ": route-averaged mean radial error "
                  << p.aggregate.route_mean_radial_m << " m (std "
                  << p.aggregate.route_std_radial_m << ")\n";
    }
    std::cout << "results written to " << out_dir << "\n";
    return 0;
}

int cmd_gravmap_synth(const std::string& masses_path, const std::string& out_path,
                      double origin_lat, double origin_lon, double d_lat,
                      double d_lon, int rows, int cols, double ref_alt,
                      double background, int priority) {
    namespace gravmap = gravnav::gravmap;
    const auto masses = gravmap::load_mass_list(masses_path);
    gravmap::GridExtent extent;
    extent.origin_lat_deg = origin_lat;
    extent.origin_lon_deg = origin_lon;
    extent.d_lat_deg = d_lat;
    extent.d_lon_deg = d_lon;
    extent.n_rows = rows;
    extent.n_cols = cols;
    extent.priority = priority;
    gravmap::SynthOptions options;
    options.background_s2 = background;
    const auto grid = gravmap::synthesize_grid(masses, extent, ref_alt, options);
    gravmap::save_grid(grid, out_path);
    std::cout << "wrote " << rows << "x" << cols << " grid (" << masses.size()
              << " masses) to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gravity-gradiometer aided inertial navigation simulator"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run Monte Carlo campaigns");
    std::string config_path;
    std::string out_dir = "out";
    std::string sweep_spec;
    std::string emit_config;
    int runs = 0;
    bool unaided = false;
    bool export_truth = false;
    double truncate_s = 0.0;
    std::int64_t seed = -1;
    sim->add_option("--config", config_path,
                    "Scenario config file (JSON); built-in default if omitted");
    sim->add_option("--runs", runs, "Override run count");
    sim->add_option("--out", out_dir, "Output directory");
    sim->add_flag("--unaided", unaided, "Disable the particle-filter aiding");
    sim->add_option("--sweep", sweep_spec,
                    "Parameter sweep, e.g. phase_noise=0,5e-3,10e-3,15e-3 or "
                    "failure_prob=0,0.05,0.1,0.2,0.4");
    sim->add_option("--truncate", truncate_s, "Truncate the route [seconds]");
    sim->add_option("--seed", seed, "Override the base seed");
    sim->add_option("--emit-default-config", emit_config,
                    "Write the resolved config to this path and exit");
    sim->add_flag("--export-truth", export_truth,
                  "Also export the truth state series CSV");

    // gravmap synth
    auto* gravmap_cmd = app.add_subcommand("gravmap", "Gravity-gradient grid tools");
    auto* synth = gravmap_cmd->add_subcommand(
        "synth", "Synthesize a GGV1 grid from a point-mass list");
    std::string masses_path, grid_out;
    double origin_lat = 0.0, origin_lon = 0.0;
    double d_lat = 0.001, d_lon = 0.001;
    int rows = 101, cols = 101;
    double ref_alt = 3000.0;
    double background = gravnav::gravmap::kBackgroundGradient;
    int priority = 0;
    synth->add_option("--masses", masses_path,
                      "Mass list file: one 'lat lon depth mass' line per mass")
        ->required();
    synth->add_option("--out", grid_out, "Output grid path")->required();
    synth->add_option("--origin-lat", origin_lat, "Grid origin latitude [deg]");
    synth->add_option("--origin-lon", origin_lon, "Grid origin longitude [deg]");
    synth->add_option("--dlat", d_lat, "Cell height [deg]");
    synth->add_option("--dlon", d_lon, "Cell width [deg]");
    synth->add_option("--rows", rows, "Row count");
    synth->add_option("--cols", cols, "Column count");
    synth->add_option("--ref-alt", ref_alt, "Reference altitude [m]");
    synth->add_option("--background", background, "Background gradient [1/s^2]");
    synth->add_option("--priority", priority, "Grid priority");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            return cmd_simulate(config_path, runs, out_dir, unaided, sweep_spec,
                                truncate_s, seed, emit_config, export_truth);
        }
        if (gravmap_cmd->parsed() && synth->parsed()) {
            return cmd_gravmap_synth(masses_path, grid_out, origin_lat,
                                     origin_lon, d_lat, d_lon, rows, cols,
                                     ref_alt, background, priority);
        }
        std::cerr << "no subcommand executed\n";
        return 2;
    } catch (const gravnav::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
