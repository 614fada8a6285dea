// Microbenchmarks for the hot paths: per-particle ellipse distance, map
// queries, mechanization steps and full fusion epochs.
#include <benchmark/benchmark.h>

#include "gravnav/fusion.hpp"
#include "gravnav/gradiometer.hpp"
#include "gravnav/gravmap.hpp"
#include "gravnav/harness.hpp"
#include "gravnav/ins.hpp"

#include <random>

namespace {

using namespace gravnav;

void BM_MinDistance(benchmark::State& state) {
    const gradiometer::CandidateEllipse ellipse{0.5756};
    gradiometer::PairSample pair;
    pair.s0_norm = 0.3;
    pair.s1_norm = -0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gradiometer::min_distance(pair, ellipse));
    }
}
BENCHMARK(BM_MinDistance);

void BM_BilinearQuery(benchmark::State& state) {
    gravmap::GravityGradientGrid grid;
    grid.origin_lat_deg = 49.0;
    grid.origin_lon_deg = -3.0;
    grid.d_lat_deg = grid.d_lon_deg = 0.001;
    grid.n_rows = grid.n_cols = 512;
    grid.values.assign(512 * 512, gravmap::kBackgroundGradient);
    gravmap::MapSet maps;
    maps.add(std::move(grid));
    const geodesy::GeodeticPosition pos{49.25, -2.75, 3000.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(maps.query_gradient(pos));
    }
}
BENCHMARK(BM_BilinearQuery);

void BM_MechanizeStep(benchmark::State& state) {
    trajectory::StateVector x;
    x.latitude_deg = 50.0;
    x.u_mps = 100.0;
    x.psi_deg = 160.0;
    x.altitude_m = 3000.0;
    ins::MechanizerOptions opt;
    ins::InsMechanizer mech(ins::NavState::from_state_vector(x), opt);
    ins::ImuSample imu;
    imu.specific_force_mps2 = {0.0, 0.0, -9.81};
    imu.angular_rate_rps = {1e-5, 0.0, -4e-5};
    for (auto _ : state) {
        mech.step(imu);
        benchmark::DoNotOptimize(mech.state());
    }
}
BENCHMARK(BM_MechanizeStep);

void BM_FitConic(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 2.0 * M_PI);
    std::vector<gradiometer::PairSample> samples(20);
    for (auto& s : samples) {
        const double psi = unit(rng);
        s.s0_norm = std::sin(psi);
        s.s1_norm = std::sin(psi - 0.5756);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(ellipsefit::fit_conic(samples));
    }
}
BENCHMARK(BM_FitConic);

void BM_FusionEpoch(benchmark::State& state) {
    gravmap::GravityGradientGrid grid;
    grid.origin_lat_deg = 49.0;
    grid.origin_lon_deg = -4.0;
    grid.d_lat_deg = grid.d_lon_deg = 0.01;
    grid.n_rows = grid.n_cols = 256;
    grid.values.assign(256 * 256, gravmap::kBackgroundGradient);
    gravmap::MapSet maps;
    maps.add(std::move(grid));

    fusion::FilterConfig fcfg;
    gradiometer::GradiometerConfig gcfg;
    std::mt19937_64 rng(11);
    fusion::Ensemble ensemble = fusion::init_particles(fcfg, rng);

    ins::NavSolution nav;
    nav.state.latitude_deg = 50.0;
    nav.state.longitude_deg = -2.5;
    nav.state.altitude_m = 3000.0;
    nav.state.u_mps = 100.0;
    nav.state.psi_deg = 160.0;

    gradiometer::PairSample pair;
    pair.s0_norm = 0.4;
    pair.s1_norm = -0.1;
    pair.valid = true;

    for (auto _ : state) {
        benchmark::DoNotOptimize(fusion::fusion_step(nav, ensemble, pair, maps,
                                                     fcfg, gcfg, rng));
    }
}
BENCHMARK(BM_FusionEpoch);

}  // namespace

BENCHMARK_MAIN();
