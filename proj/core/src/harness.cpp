#include "gravnav/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace gravnav::harness {

ScenarioEngine::ScenarioEngine(const ScenarioConfig& cfg) : cfg_(cfg) {
    const geodesy::GeodeticPosition start{cfg.route.start_lat_deg,
                                          cfg.route.start_lon_deg, 0.0};
    const geodesy::GeodeticPosition end{cfg.route.end_lat_deg,
                                        cfg.route.end_lon_deg, 0.0};
    route_ = trajectory::build_route(start, end, cfg.route.speed_mps,
                                     cfg.route.altitude_m);

    trajectory::TruthOptions topt;
    topt.rate_hz = cfg.ins_rate_hz;
    topt.vibration = cfg.vibration;
    topt.seed = derive_seed(cfg.base_seed, 0, "vibration");
    truth_ = trajectory::truth_states(route_, topt);
    clean_imu_ = ins::synthesize_imu(truth_);
    maps_ = build_maps(cfg);

    const double f_meas = cfg.gradiometer_cfg.f_meas_hz;
    steps_per_epoch_ = static_cast<int>(std::llround(cfg.ins_rate_hz / f_meas));
    int epochs = static_cast<int>(route_.duration_s() * f_meas);
    if (cfg.truncate_s > 0.0) {
        epochs = std::min(epochs,
                          static_cast<int>(std::floor(cfg.truncate_s * f_meas)));
    }
    epochs_ = epochs;

    true_gradient_.resize(epochs_ + 1, 0.0);
    g_upper_.resize(epochs_ + 1, 0.0);
    vibration_scale_.resize(epochs_ + 1, 0.0);
    fine_coverage_.resize(epochs_ + 1, 0);
    for (int e = 0; e <= epochs_; ++e) {
        const trajectory::StateVector& x = truth_state_at_epoch(e);
        const geodesy::GeodeticPosition pos = x.position();
        true_gradient_[e] = maps_.query_gradient(pos);
        g_upper_[e] = geodesy::normal_gravity(pos.latitude_deg, pos.altitude_m);
        const std::size_t idx =
            static_cast<std::size_t>(e) * static_cast<std::size_t>(steps_per_epoch_);
        vibration_scale_[e] =
            cfg.vibration.sigma_mps2 > 0.0
                ? truth_.vibration_mps2[idx] / cfg.vibration.sigma_mps2
                : 0.0;
        for (const auto& grid : maps_.grids()) {
            if (grid.priority > 0 &&
                grid.contains(pos.latitude_deg, pos.longitude_deg)) {
                fine_coverage_[e] = 1;
                break;
            }
        }
    }
}

const trajectory::StateVector& ScenarioEngine::truth_state_at_epoch(
    int epoch) const {
    const std::size_t idx = static_cast<std::size_t>(epoch) *
                            static_cast<std::size_t>(steps_per_epoch_);
    return truth_.states[idx];
}

double RunMetrics::mean_radial_after(double t0_s) const {
    const auto start = static_cast<std::size_t>(std::max(0.0, t0_s));
    if (start >= radial_error_m.size()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = start; i < radial_error_m.size(); ++i) {
        sum += radial_error_m[i];
    }
    return sum / static_cast<double>(radial_error_m.size() - start);
}

namespace {

double horizontal_error_m(const geodesy::GeodeticPosition& truth,
                          const geodesy::GeodeticPosition& nav) {
    const geodesy::NedVector d = geodesy::geodetic_to_ned(truth, nav);
    return std::hypot(d.north_m, d.east_m);
}

}  // namespace

RunMetrics run_scenario(const ScenarioEngine& engine, int run_index,
                        bool aided) {
    return run_scenario(engine, engine.config(), run_index, aided);
}

namespace {
RunMetrics run_scenario_impl(const ScenarioEngine& engine,
                             const ScenarioConfig& cfg, int run_index,
                             bool aided);
}

RunMetrics run_scenario(const ScenarioEngine& engine,
                        const ScenarioConfig& cfg, int run_index, bool aided) {
    try {
        return run_scenario_impl(engine, cfg, run_index, aided);
    } catch (const Divergence& e) {
        throw Divergence("run " + std::to_string(run_index) + ": " + e.what());
    } catch (const OutOfCoverage& e) {
        throw OutOfCoverage("run " + std::to_string(run_index) + ": " + e.what());
    }
}

namespace {
RunMetrics run_scenario_impl(const ScenarioEngine& engine,
                             const ScenarioConfig& cfg, int run_index,
                             bool aided) {
    const trajectory::TruthSeries& truth = engine.truth();

    const std::vector<ins::ImuSample> imu = ins::corrupt_imu(
        engine.clean_imu(), cfg.budget,
        derive_seed(cfg.base_seed, run_index, "imu"));

    std::mt19937_64 grad_rng(derive_seed(cfg.base_seed, run_index, "gradiometer"));
    std::mt19937_64 pf_rng(derive_seed(cfg.base_seed, run_index, "fusion"));
    std::mt19937_64 alt_rng(derive_seed(cfg.base_seed, run_index, "altimeter"));
    std::normal_distribution<double> gauss(0.0, 1.0);

    ins::MechanizerOptions mopt;
    mopt.dt_s = 1.0 / cfg.ins_rate_hz;
    mopt.configured_speed_mps = cfg.route.speed_mps;
    ins::InsMechanizer mech(ins::NavState::from_state_vector(truth.states[0]),
                            mopt);

    fusion::Ensemble ensemble;
    if (aided) {
        ensemble = fusion::init_particles(cfg.filter, pf_rng);
    }

    RunMetrics metrics;
    metrics.run_index = run_index;
    metrics.radial_error_m.resize(engine.epochs() + 1, 0.0);
    metrics.altitude_error_m.resize(engine.epochs() + 1, 0.0);
    std::vector<gradiometer::PairSample> pair_stream;
    pair_stream.reserve(engine.epochs());

    std::size_t imu_cursor = 0;
    for (int epoch = 1; epoch <= engine.epochs(); ++epoch) {
        for (int s = 0; s < engine.steps_per_epoch(); ++s) {
            mech.step(imu[imu_cursor++]);
        }
        const trajectory::StateVector& truth_now =
            engine.truth_state_at_epoch(epoch);

        // altimeter aiding at the measurement rate
        const double measured_alt =
            truth_now.altitude_m + cfg.altimeter.sigma_m * gauss(alt_rng);
        mech.aid_altimeter(measured_alt, cfg.altimeter);

        // gradiometer measurement from the truth state
        gradiometer::PairSample pair = gradiometer::sample_pair(
            engine.true_gradient(epoch), engine.upper_gravity(epoch),
            cfg.gradiometer_cfg, grad_rng, engine.vibration_scale(epoch));
        pair.timestamp_s = static_cast<double>(epoch) /
                           cfg.gradiometer_cfg.f_meas_hz;
        pair_stream.push_back(pair);
        if (!pair.valid) ++metrics.failure_count;

        if (aided) {
            ins::NavSolution nav = mech.solution();
            const fusion::StepDiagnostics diag = fusion::fusion_step(
                nav, ensemble, pair, engine.maps(), cfg.filter,
                cfg.gradiometer_cfg, pf_rng);
            if (diag.weight_underflow) ++metrics.weight_underflow_count;
            // feed the correction back into the mechanization
            mech.set_state(ins::NavState::from_state_vector(nav.state));
            metrics.pf_gradient.push_back(
                {pair.timestamp_s, diag.gradient_at_mean_s2,
                 engine.true_gradient(epoch),
                 diag.gradient_at_mean_s2 - engine.true_gradient(epoch)});
        }

        const geodesy::GeodeticPosition nav_pos = mech.state().position;
        metrics.radial_error_m[epoch] =
            horizontal_error_m(truth_now.position(), nav_pos);
        metrics.altitude_error_m[epoch] =
            nav_pos.altitude_m - truth_now.altitude_m;
    }

    // conventional sliding-window estimates over the same measurement stream
    const auto estimates = ellipsefit::sliding_gradient_estimate(
        pair_stream, cfg.gradiometer_cfg, 20);
    for (const auto& est : estimates) {
        const int epoch = static_cast<int>(
            std::llround(est.timestamp_s * cfg.gradiometer_cfg.f_meas_hz));
        const double truth_grad = engine.true_gradient(epoch);
        metrics.ellipse_fit_gradient.push_back(
            {est.timestamp_s, est.gradient_s2, truth_grad,
             est.gradient_s2 - truth_grad});
    }

    const auto n = metrics.radial_error_m.size();
    metrics.final_radial_m = metrics.radial_error_m.back();
    metrics.mean_radial_m =
        std::accumulate(metrics.radial_error_m.begin(),
                        metrics.radial_error_m.end(), 0.0) /
        static_cast<double>(n);
    return metrics;
}
}  // namespace

AggregateMetrics aggregate_runs(std::vector<RunMetrics> runs) {
    AggregateMetrics agg;
    agg.runs = std::move(runs);
    if (agg.runs.empty()) return agg;
    const std::size_t epochs = agg.runs.front().radial_error_m.size();
    agg.epoch_time_s.resize(epochs);
    agg.mean_radial_m.assign(epochs, 0.0);
    agg.std_radial_m.assign(epochs, 0.0);
    const double n = static_cast<double>(agg.runs.size());
    for (std::size_t e = 0; e < epochs; ++e) {
        agg.epoch_time_s[e] = static_cast<double>(e);
        double sum = 0.0, sum2 = 0.0;
        for (const RunMetrics& r : agg.runs) {
            sum += r.radial_error_m[e];
            sum2 += r.radial_error_m[e] * r.radial_error_m[e];
        }
        const double mean = sum / n;
        agg.mean_radial_m[e] = mean;
        agg.std_radial_m[e] = n > 1.0
            ? std::sqrt(std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)))
            : 0.0;
    }
    double route_sum = 0.0, route_sum2 = 0.0, post_sum = 0.0;
    for (const RunMetrics& r : agg.runs) {
        route_sum += r.mean_radial_m;
        route_sum2 += r.mean_radial_m * r.mean_radial_m;
        post_sum += r.mean_radial_after(600.0);
    }
    agg.route_mean_radial_m = route_sum / n;
    agg.route_mean_post600_m = post_sum / n;
    agg.route_std_radial_m =
        agg.runs.size() > 1
            ? std::sqrt(std::max(0.0, (route_sum2 - n * agg.route_mean_radial_m *
                                                        agg.route_mean_radial_m) /
                                          (n - 1.0)))
            : 0.0;
    return agg;
}

namespace {

std::vector<RunMetrics> run_pool(const ScenarioEngine& engine,
                                 const ScenarioConfig& cfg, int runs,
                                 bool aided) {
    std::vector<RunMetrics> metrics(static_cast<std::size_t>(runs));
    const unsigned workers =
        std::max(1u, std::min(std::thread::hardware_concurrency(),
                              static_cast<unsigned>(runs)));
    std::vector<std::future<void>> futures;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&] {
            for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1)) {
                metrics[static_cast<std::size_t>(i)] =
                    run_scenario(engine, cfg, i, aided);
            }
        }));
    }
    for (auto& f : futures) f.get();
    return metrics;
}

void apply_sweep_value(ScenarioConfig& cfg, const std::string& parameter,
                       double value) {
    if (parameter == "phase_noise") {
        cfg.gradiometer_cfg.sigma_phi_rad = value;
    } else if (parameter == "failure_prob") {
        cfg.gradiometer_cfg.failure_probability = value;
    } else {
        throw Error("unknown sweep parameter '" + parameter +
                    "' (expected phase_noise or failure_prob)");
    }
}

}  // namespace

MonteCarloResult monte_carlo(const ScenarioConfig& cfg) {
    MonteCarloResult result;
    result.config = cfg;

    ScenarioEngine engine(cfg);
    if (cfg.sweep.parameter.empty()) {
        result.baseline =
            aggregate_runs(run_pool(engine, cfg, cfg.runs, cfg.aided));
        return result;
    }

    // truth, IMU and maps are invariant under both sweep parameters, so the
    // engine is shared; noise streams are seeded per run independent of the
    // swept value (common random numbers across sweep points)
    for (double value : cfg.sweep.values) {
        ScenarioConfig point_cfg = cfg;
        apply_sweep_value(point_cfg, cfg.sweep.parameter, value);
        SweepPoint point;
        point.value = value;
        point.aggregate = aggregate_runs(
            run_pool(engine, point_cfg, point_cfg.runs, point_cfg.aided));
        result.sweep_points.push_back(std::move(point));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kManifestBegin = "--- BEGIN RESOLVED CONFIG (JSON) ---";
constexpr const char* kManifestEnd = "--- END RESOLVED CONFIG ---";

void write_radial_csv(const AggregateMetrics& agg,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "time_s,mean_radial_error_m,std_radial_error_m";
    for (const RunMetrics& r : agg.runs) {
        out << ",run" << r.run_index << "_radial_error_m";
    }
    out << '\n';
    out.precision(10);
    for (std::size_t e = 0; e < agg.epoch_time_s.size(); ++e) {
        out << agg.epoch_time_s[e] << ',' << agg.mean_radial_m[e] << ','
            << agg.std_radial_m[e];
        for (const RunMetrics& r : agg.runs) {
            out << ',' << r.radial_error_m[e];
        }
        out << '\n';
    }
}

void write_gradient_csv(const AggregateMetrics& agg,
                        const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "run,method,time_s,estimate_s2,true_s2,error_s2\n";
    out.precision(12);
    for (const RunMetrics& r : agg.runs) {
        for (const auto& s : r.pf_gradient) {
            out << r.run_index << ",partial_pf," << s.time_s << ','
                << s.estimate_s2 << ',' << s.true_s2 << ',' << s.error_s2
                << '\n';
        }
        for (const auto& s : r.ellipse_fit_gradient) {
            out << r.run_index << ",ellipse_fit," << s.time_s << ','
                << s.estimate_s2 << ',' << s.true_s2 << ',' << s.error_s2
                << '\n';
        }
    }
}

}  // namespace

void export_results(const MonteCarloResult& result,
                    const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    const AggregateMetrics* main_agg = &result.baseline;
    if (result.baseline.runs.empty() && !result.sweep_points.empty()) {
        main_agg = &result.sweep_points.front().aggregate;
    }
    if (!main_agg->runs.empty()) {
        write_radial_csv(*main_agg, out_dir / "radial_error_vs_time.csv");
        write_gradient_csv(*main_agg, out_dir / "gradient_errors.csv");
    }

    {
        std::ofstream out(out_dir / "sweep_summary.csv");
        if (!out) throw Error("cannot write sweep_summary.csv");
        out << "parameter,value,runs,route_mean_radial_m,route_std_radial_m,"
               "route_mean_post600_m\n";
        out.precision(10);
        if (result.sweep_points.empty()) {
            if (!result.baseline.runs.empty()) {
                out << "none,0," << result.baseline.runs.size() << ','
                    << result.baseline.route_mean_radial_m << ','
                    << result.baseline.route_std_radial_m << ','
                    << result.baseline.route_mean_post600_m << '\n';
            }
        } else {
            for (const auto& p : result.sweep_points) {
                out << result.config.sweep.parameter << ',' << p.value << ','
                    << p.aggregate.runs.size() << ','
                    << p.aggregate.route_mean_radial_m << ','
                    << p.aggregate.route_std_radial_m << ','
                    << p.aggregate.route_mean_post600_m << '\n';
            }
        }
    }

    {
        std::ofstream out(out_dir / "manifest.txt");
        if (!out) throw Error("cannot write manifest.txt");
        out << "gravnav run manifest\n";
        out << "scenario: " << result.config.name << "\n";
        out << "runs: " << result.config.runs << "\n";
        out << "base_seed: " << result.config.base_seed << "\n";
        out << "per-run stream seeds (run: imu gradiometer fusion altimeter):\n";
        for (int i = 0; i < result.config.runs; ++i) {
            out << "  " << i << ": "
                << derive_seed(result.config.base_seed, i, "imu") << ' '
                << derive_seed(result.config.base_seed, i, "gradiometer") << ' '
                << derive_seed(result.config.base_seed, i, "fusion") << ' '
                << derive_seed(result.config.base_seed, i, "altimeter") << "\n";
        }
        out << kManifestBegin << "\n";
        out << scenario_to_json(result.config) << "\n";
        out << kManifestEnd << "\n";
    }
}

ScenarioConfig load_manifest_config(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw Error("cannot open manifest " + manifest.string());
    std::string line;
    std::string json_text;
    bool inside = false;
    while (std::getline(in, line)) {
        if (line == kManifestBegin) {
            inside = true;
            continue;
        }
        if (line == kManifestEnd) {
            inside = false;
            continue;
        }
        if (inside) {
            json_text += line;
            json_text += '\n';
        }
    }
    if (json_text.empty()) {
        throw Error("manifest has no embedded config block");
    }
    return scenario_from_json(json_text);
}

}  // namespace gravnav::harness
