#include "gravnav/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace gravnav::harness {

using nlohmann::json;

ScenarioConfig default_scenario() {
    ScenarioConfig cfg;
    SyntheticMapConfig maps;
    // fine SRTM2gravity-like coverage over the land segments only; the sea
    // crossing (~49.6..50.7 deg) falls back to the coarse grid
    maps.background_trend_per_deg = -1.63e-7;
    maps.fine_regions = {
        {50.70, 53.60, 1.5},
        {43.40, 49.60, 1.3},
    };
    cfg.maps.synthetic = maps;
    return cfg;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t run_index,
                          const std::string& stream) {
    auto splitmix = [](std::uint64_t x) {
        x += 0x9E3779B97f4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = splitmix(base_seed ^ splitmix(run_index + 1));
    for (unsigned char c : stream) {
        h = splitmix(h ^ c);
    }
    return h;
}

// ---------------------------------------------------------------------------
// JSON (field names mirror the config structs)
// ---------------------------------------------------------------------------

namespace {

json to_json(const RouteConfig& r) {
    return json{{"start_lat_deg", r.start_lat_deg},
                {"start_lon_deg", r.start_lon_deg},
                {"end_lat_deg", r.end_lat_deg},
                {"end_lon_deg", r.end_lon_deg},
                {"speed_mps", r.speed_mps},
                {"altitude_m", r.altitude_m}};
}

RouteConfig route_from_json(const json& j) {
    RouteConfig r;
    r.start_lat_deg = j.at("start_lat_deg");
    r.start_lon_deg = j.at("start_lon_deg");
    r.end_lat_deg = j.at("end_lat_deg");
    r.end_lon_deg = j.at("end_lon_deg");
    r.speed_mps = j.at("speed_mps");
    r.altitude_m = j.at("altitude_m");
    return r;
}

json to_json(const ins::SensorErrorBudget& b) {
    return json{{"accel_bias_mps2", b.accel_bias_mps2},
                {"accel_nonorthogonality_rad", b.accel_nonorthogonality_rad},
                {"accel_scale", b.accel_scale},
                {"accel_noise_density", b.accel_noise_density},
                {"gyro_bias_rps", b.gyro_bias_rps},
                {"gyro_nonorthogonality_rad", b.gyro_nonorthogonality_rad},
                {"gyro_scale", b.gyro_scale},
                {"gyro_noise_density", b.gyro_noise_density}};
}

ins::SensorErrorBudget budget_from_json(const json& j) {
    ins::SensorErrorBudget b;
    b.accel_bias_mps2 = j.at("accel_bias_mps2");
    b.accel_nonorthogonality_rad = j.at("accel_nonorthogonality_rad");
    b.accel_scale = j.at("accel_scale");
    b.accel_noise_density = j.at("accel_noise_density");
    b.gyro_bias_rps = j.at("gyro_bias_rps");
    b.gyro_nonorthogonality_rad = j.at("gyro_nonorthogonality_rad");
    b.gyro_scale = j.at("gyro_scale");
    b.gyro_noise_density = j.at("gyro_noise_density");
    return b;
}

json to_json(const ins::AltimeterConfig& a) {
    return json{{"sigma_m", a.sigma_m},
                {"rate_hz", a.rate_hz},
                {"position_gain", a.position_gain},
                {"velocity_gain_per_s", a.velocity_gain_per_s}};
}

ins::AltimeterConfig altimeter_from_json(const json& j) {
    ins::AltimeterConfig a;
    a.sigma_m = j.at("sigma_m");
    a.rate_hz = j.at("rate_hz");
    a.position_gain = j.at("position_gain");
    a.velocity_gain_per_s = j.at("velocity_gain_per_s");
    return a;
}

json to_json(const trajectory::VibrationConfig& v) {
    return json{{"sigma_mps2", v.sigma_mps2}, {"corner_hz", v.corner_hz}};
}

trajectory::VibrationConfig vibration_from_json(const json& j) {
    trajectory::VibrationConfig v;
    v.sigma_mps2 = j.at("sigma_mps2");
    v.corner_hz = j.at("corner_hz");
    return v;
}

json to_json(const gradiometer::GradiometerConfig& g) {
    return json{{"f_meas_hz", g.f_meas_hz},
                {"atom_mass_kg", g.atom_mass_kg},
                {"pulse_interval_s", g.pulse_interval_s},
                {"recoil_velocity_mps", g.recoil_velocity_mps},
                {"delta_z_m", g.delta_z_m},
                {"n_bar", g.n_bar},
                {"eta", g.eta},
                {"sigma_phi_rad", g.sigma_phi_rad},
                {"s0_bias", g.s0_bias},
                {"s1_bias", g.s1_bias},
                {"failure_probability", g.failure_probability},
                {"beam_radius_m", g.beam_radius_m},
                {"random_walk_intensity", g.random_walk_intensity}};
}

gradiometer::GradiometerConfig gradiometer_from_json(const json& j) {
    gradiometer::GradiometerConfig g;
    g.f_meas_hz = j.at("f_meas_hz");
    g.atom_mass_kg = j.at("atom_mass_kg");
    g.pulse_interval_s = j.at("pulse_interval_s");
    g.recoil_velocity_mps = j.at("recoil_velocity_mps");
    g.delta_z_m = j.at("delta_z_m");
    g.n_bar = j.at("n_bar");
    g.eta = j.at("eta");
    g.sigma_phi_rad = j.at("sigma_phi_rad");
    g.s0_bias = j.at("s0_bias");
    g.s1_bias = j.at("s1_bias");
    g.failure_probability = j.at("failure_probability");
    g.beam_radius_m = j.at("beam_radius_m");
    g.random_walk_intensity = j.at("random_walk_intensity");
    return g;
}

json to_json(const fusion::FilterConfig& f) {
    return json{{"n_particles", f.n_particles},
                {"resample_threshold_fraction", f.resample_threshold_fraction},
                {"alpha", f.alpha},
                {"sigma_s", f.sigma_s},
                {"sigma_pos_m", f.sigma_pos_m},
                {"sigma_vel_mps", f.sigma_vel_mps},
                {"sigma_att_deg", f.sigma_att_deg},
                {"delta_t_s", f.delta_t_s},
                {"initial_spread_factor", f.initial_spread_factor}};
}

fusion::FilterConfig filter_from_json(const json& j) {
    fusion::FilterConfig f;
    f.n_particles = j.at("n_particles");
    f.resample_threshold_fraction = j.at("resample_threshold_fraction");
    f.alpha = j.at("alpha");
    f.sigma_s = j.at("sigma_s");
    f.sigma_pos_m = j.at("sigma_pos_m");
    f.sigma_vel_mps = j.at("sigma_vel_mps");
    f.sigma_att_deg = j.at("sigma_att_deg");
    f.delta_t_s = j.at("delta_t_s");
    f.initial_spread_factor = j.at("initial_spread_factor");
    return f;
}

json to_json(const SyntheticMapConfig& s) {
    json regions = json::array();
    for (const auto& r : s.fine_regions) {
        regions.push_back(json{{"lat_min_deg", r.lat_min_deg},
                               {"lat_max_deg", r.lat_max_deg},
                               {"band_deg", r.band_deg}});
    }
    return json{{"background_s2", s.background_s2},
                {"background_trend_per_deg", s.background_trend_per_deg},
                {"trend_reference_lat_deg", s.trend_reference_lat_deg},
                {"corridor_halfwidth_deg", s.corridor_halfwidth_deg},
                {"margin_deg", s.margin_deg},
                {"reference_altitude_m", s.reference_altitude_m},
                {"coarse_resolution_deg", s.coarse_resolution_deg},
                {"coarse_mass_count", s.coarse_mass_count},
                {"coarse_depth_m", s.coarse_depth_m},
                {"coarse_anomaly_s2", s.coarse_anomaly_s2},
                {"fine_resolution_deg", s.fine_resolution_deg},
                {"fine_masses_per_100km", s.fine_masses_per_100km},
                {"fine_depth_m", s.fine_depth_m},
                {"fine_anomaly_s2", s.fine_anomaly_s2},
                {"fine_regions", regions}};
}

SyntheticMapConfig synthetic_from_json(const json& j) {
    SyntheticMapConfig s;
    s.background_s2 = j.at("background_s2");
    s.background_trend_per_deg = j.at("background_trend_per_deg");
    s.trend_reference_lat_deg = j.at("trend_reference_lat_deg");
    s.corridor_halfwidth_deg = j.at("corridor_halfwidth_deg");
    s.margin_deg = j.at("margin_deg");
    s.reference_altitude_m = j.at("reference_altitude_m");
    s.coarse_resolution_deg = j.at("coarse_resolution_deg");
    s.coarse_mass_count = j.at("coarse_mass_count");
    s.coarse_depth_m = j.at("coarse_depth_m");
    s.coarse_anomaly_s2 = j.at("coarse_anomaly_s2");
    s.fine_resolution_deg = j.at("fine_resolution_deg");
    s.fine_masses_per_100km = j.at("fine_masses_per_100km");
    s.fine_depth_m = j.at("fine_depth_m");
    s.fine_anomaly_s2 = j.at("fine_anomaly_s2");
    for (const auto& r : j.at("fine_regions")) {
        s.fine_regions.push_back(
            {r.at("lat_min_deg"), r.at("lat_max_deg"), r.at("band_deg")});
    }
    return s;
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["route"] = to_json(cfg.route);
    j["ins_rate_hz"] = cfg.ins_rate_hz;
    j["sensor_error_budget"] = to_json(cfg.budget);
    j["altimeter"] = to_json(cfg.altimeter);
    j["vibration"] = to_json(cfg.vibration);
    j["gradiometer"] = to_json(cfg.gradiometer_cfg);
    j["filter"] = to_json(cfg.filter);
    json maps;
    maps["files"] = cfg.maps.files;
    if (cfg.maps.synthetic) {
        maps["synthetic"] = to_json(*cfg.maps.synthetic);
    }
    j["maps"] = maps;
    j["runs"] = cfg.runs;
    j["base_seed"] = cfg.base_seed;
    j["truncate_s"] = cfg.truncate_s;
    j["aided"] = cfg.aided;
    json sweep;
    sweep["parameter"] = cfg.sweep.parameter;
    sweep["values"] = cfg.sweep.values;
    j["sweep"] = sweep;
    return j.dump(2);
}

ScenarioConfig scenario_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    ScenarioConfig cfg;
    cfg.name = j.at("name");
    cfg.route = route_from_json(j.at("route"));
    cfg.ins_rate_hz = j.at("ins_rate_hz");
    cfg.budget = budget_from_json(j.at("sensor_error_budget"));
    cfg.altimeter = altimeter_from_json(j.at("altimeter"));
    cfg.vibration = vibration_from_json(j.at("vibration"));
    cfg.gradiometer_cfg = gradiometer_from_json(j.at("gradiometer"));
    cfg.filter = filter_from_json(j.at("filter"));
    const json& maps = j.at("maps");
    cfg.maps.files = maps.at("files").get<std::vector<std::string>>();
    if (maps.contains("synthetic")) {
        cfg.maps.synthetic = synthetic_from_json(maps.at("synthetic"));
    }
    cfg.runs = j.at("runs");
    cfg.base_seed = j.at("base_seed");
    cfg.truncate_s = j.at("truncate_s");
    cfg.aided = j.at("aided");
    cfg.sweep.parameter = j.at("sweep").at("parameter");
    cfg.sweep.values = j.at("sweep").at("values").get<std::vector<double>>();
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open scenario file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return scenario_from_json(buf.str());
    } catch (const json::exception& e) {
        throw Error("bad scenario file " + path.string() + ": " + e.what());
    }
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << scenario_to_json(cfg) << '\n';
}

// ---------------------------------------------------------------------------
// Synthetic map building
// ---------------------------------------------------------------------------

namespace {

/// Masses drawn along the route corridor: parameter uniform along the
/// path, longitude jittered within the corridor halfwidth.
std::vector<gravmap::PointMassSpec> draw_corridor_masses(
    const geodesy::GreatEllipse& path, double lat_min, double lat_max,
    double halfwidth_deg, int count, double depth_m, double anomaly_s2,
    double reference_altitude_m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<gravmap::PointMassSpec> masses;
    masses.reserve(static_cast<std::size_t>(count));
    constexpr double kG = 6.67430e-11;
    int placed = 0;
    int guard = 0;
    while (placed < count && guard < count * 200) {
        ++guard;
        const double t = unit(rng);
        const geodesy::GeodeticPosition p = path.position(t);
        if (p.latitude_deg < lat_min || p.latitude_deg > lat_max) continue;
        gravmap::PointMassSpec m;
        m.lat_deg = p.latitude_deg;
        m.lon_deg = p.longitude_deg + (2.0 * unit(rng) - 1.0) * halfwidth_deg;
        m.depth_m = depth_m * (0.5 + unit(rng));
        const double amp = anomaly_s2 * (0.5 + unit(rng)) *
                           (unit(rng) < 0.5 ? -1.0 : 1.0);
        const double sep = reference_altitude_m + m.depth_m;
        m.mass_kg = amp * sep * sep * sep / (2.0 * kG);
        masses.push_back(m);
        ++placed;
    }
    return masses;
}

}  // namespace

gravmap::MapSet build_maps(const ScenarioConfig& cfg) {
    gravmap::MapSet maps;
    for (const auto& file : cfg.maps.files) {
        maps.add(gravmap::load_grid(file));
    }
    if (!cfg.maps.synthetic) {
        if (maps.empty()) {
            throw Error("scenario has neither map files nor a synthetic map spec");
        }
        return maps;
    }
    const SyntheticMapConfig& s = *cfg.maps.synthetic;
    std::mt19937_64 rng(derive_seed(cfg.base_seed, 0, "maps"));

    const geodesy::GeodeticPosition start{cfg.route.start_lat_deg,
                                          cfg.route.start_lon_deg, 0.0};
    const geodesy::GeodeticPosition end{cfg.route.end_lat_deg,
                                        cfg.route.end_lon_deg, 0.0};
    const geodesy::GreatEllipse path(start, end);
    const double route_km = path.length(1.0) / 1000.0;

    gravmap::SynthOptions opts;
    opts.background_s2 = s.background_s2;
    opts.background_trend_per_deg = s.background_trend_per_deg;
    opts.trend_reference_lat_deg = s.trend_reference_lat_deg;
    opts.cutoff_separations = 12.0;

    // coarse fallback grid over the padded route bounding box
    {
        const double lat_lo = std::min(start.latitude_deg, end.latitude_deg) -
                              s.margin_deg;
        const double lat_hi = std::max(start.latitude_deg, end.latitude_deg) +
                              s.margin_deg;
        double lon_lo = std::min(start.longitude_deg, end.longitude_deg);
        double lon_hi = std::max(start.longitude_deg, end.longitude_deg);
        lon_lo -= s.margin_deg;
        lon_hi += s.margin_deg;
        gravmap::GridExtent extent;
        extent.origin_lat_deg = lat_lo;
        extent.origin_lon_deg = lon_lo;
        extent.d_lat_deg = s.coarse_resolution_deg;
        extent.d_lon_deg = s.coarse_resolution_deg;
        extent.n_rows = static_cast<std::int32_t>(
                            std::ceil((lat_hi - lat_lo) / s.coarse_resolution_deg)) + 1;
        extent.n_cols = static_cast<std::int32_t>(
                            std::ceil((lon_hi - lon_lo) / s.coarse_resolution_deg)) + 1;
        extent.priority = 0;
        const int count = s.coarse_mass_count;
        const auto masses = draw_corridor_masses(
            path, lat_lo, lat_hi, (lon_hi - lon_lo) / 2.0, count,
            s.coarse_depth_m, s.coarse_anomaly_s2, s.reference_altitude_m, rng);
        maps.add(gravmap::synthesize_grid(masses, extent,
                                          s.reference_altitude_m, opts));
    }

    // fine corridor bands per region, each band from the region's mass set
    for (const auto& region : s.fine_regions) {
        // route length share of this region, for the mass budget
        const double region_span = region.lat_max_deg - region.lat_min_deg;
        const double total_span = std::abs(cfg.route.start_lat_deg -
                                           cfg.route.end_lat_deg);
        const double region_km = route_km * region_span / total_span;
        const int count = std::max(
            4, static_cast<int>(std::ceil(region_km / 100.0 *
                                          s.fine_masses_per_100km)));
        const auto masses = draw_corridor_masses(
            path, region.lat_min_deg, region.lat_max_deg,
            s.corridor_halfwidth_deg, count, s.fine_depth_m, s.fine_anomaly_s2,
            s.reference_altitude_m, rng);

        const int bands = std::max(
            1, static_cast<int>(std::ceil(region_span / region.band_deg)));
        const double band_height = region_span / bands;
        for (int band = 0; band < bands; ++band) {
            const double lat_lo = region.lat_min_deg + band * band_height;
            const double lat_hi = lat_lo + band_height +
                                  2.0 * s.fine_resolution_deg;  // overlap seam
            // longitude range of the route within the band, plus corridor
            double lon_lo = 1e9, lon_hi = -1e9;
            for (int i = 0; i <= 64; ++i) {
                const geodesy::GeodeticPosition p =
                    path.position(static_cast<double>(i) / 64.0);
                if (p.latitude_deg >= lat_lo - 0.1 &&
                    p.latitude_deg <= lat_hi + 0.1) {
                    lon_lo = std::min(lon_lo, p.longitude_deg);
                    lon_hi = std::max(lon_hi, p.longitude_deg);
                }
            }
            if (lon_lo > lon_hi) continue;  // band off the route
            lon_lo -= 2.0 * s.corridor_halfwidth_deg;
            lon_hi += 2.0 * s.corridor_halfwidth_deg;

            gravmap::GridExtent extent;
            extent.origin_lat_deg = lat_lo;
            extent.origin_lon_deg = lon_lo;
            extent.d_lat_deg = s.fine_resolution_deg;
            extent.d_lon_deg = s.fine_resolution_deg;
            extent.n_rows = static_cast<std::int32_t>(
                                std::ceil((lat_hi - lat_lo) / s.fine_resolution_deg)) + 1;
            extent.n_cols = static_cast<std::int32_t>(
                                std::ceil((lon_hi - lon_lo) / s.fine_resolution_deg)) + 1;
            extent.priority = 1;
            maps.add(gravmap::synthesize_grid(masses, extent,
                                              s.reference_altitude_m, opts));
        }
    }
    return maps;
}

}  // namespace gravnav::harness
