// Gridded vertical gravity-gradient maps: prioritized lookup with bilinear
// interpolation, an analytic point-mass synthesizer for building test fields,
// and the GGV1 binary raster format.
//
// Values are dg_z/dz in s^-2, down-positive gravity (gradient positive when
// gravity increases downward). Grids store the gradient evaluated at their
// reference altitude; altitude dependence between 0-3000 m is neglected.
#pragma once

#include "gravnav/errors.hpp"
#include "gravnav/geodesy.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gravnav::gravmap {

/// Background vertical gradient of normal gravity, s^-2.
inline constexpr double kBackgroundGradient = 3.07e-6;

/// Sanity bound on grid values (~30x background).
inline constexpr double kMaxGradientMagnitude = 1e-4;

/// Regular lat/lon raster of dg_z/dz values, row-major, north-up rows
/// (row i at origin_lat + i*d_lat, column j at origin_lon + j*d_lon).
struct GravityGradientGrid {
    double origin_lat_deg = 0.0;
    double origin_lon_deg = 0.0;
    double d_lat_deg = 0.0;
    double d_lon_deg = 0.0;
    std::int32_t n_rows = 0;
    std::int32_t n_cols = 0;
    std::int32_t priority = 0;  ///< higher wins when footprints overlap
    double reference_altitude_m = 0.0;
    std::vector<double> values;

    double& at(std::int32_t row, std::int32_t col) {
        return values[static_cast<std::size_t>(row) * n_cols + col];
    }
    double at(std::int32_t row, std::int32_t col) const {
        return values[static_cast<std::size_t>(row) * n_cols + col];
    }

    double max_lat_deg() const { return origin_lat_deg + (n_rows - 1) * d_lat_deg; }
    double max_lon_deg() const { return origin_lon_deg + (n_cols - 1) * d_lon_deg; }

    bool contains(double lat_deg, double lon_deg) const;

    /// Throws Error if the metadata or values violate the type invariants.
    void validate() const;
};

/// Bilinear interpolation at (lat, lon); exact at nodes, continuous inside
/// cells. Precondition: grid.contains(lat, lon).
double bilinear(const GravityGradientGrid& grid, double lat_deg, double lon_deg);

/// Prioritized collection of grids. Queries resolve on the highest-priority
/// grid containing the position; scenarios are expected to include one
/// fallback grid covering the whole route.
class MapSet {
  public:
    void add(GravityGradientGrid grid);

    /// dg_z/dz at `pos` from the best covering grid.
    /// Throws OutOfCoverage when no grid contains `pos`.
    double query_gradient(const geodesy::GeodeticPosition& pos) const;

    const std::vector<GravityGradientGrid>& grids() const { return grids_; }
    bool empty() const { return grids_.empty(); }

  private:
    std::vector<GravityGradientGrid> grids_;  // sorted by descending priority
};

/// Buried point mass used to synthesize anomaly fields.
struct PointMassSpec {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double depth_m = 0.0;  ///< below the ellipsoid surface, > 0
    double mass_kg = 0.0;  ///< nonzero; negative masses model deficits
};

/// Extent and resolution of a grid to synthesize.
struct GridExtent {
    double origin_lat_deg = 0.0;
    double origin_lon_deg = 0.0;
    double d_lat_deg = 0.0;
    double d_lon_deg = 0.0;
    std::int32_t n_rows = 0;
    std::int32_t n_cols = 0;
    std::int32_t priority = 0;
};

/// Analytic synthesis options. The gradient trend adds
/// `background_trend_per_deg * (lat - trend_reference_lat_deg)` to the
/// background term, letting scenarios carry a smooth along-route drift.
struct SynthOptions {
    double background_s2 = kBackgroundGradient;
    double background_trend_per_deg = 0.0;
    double trend_reference_lat_deg = 0.0;
    /// Contributions beyond this many vertical separations are dropped
    /// (relative error ~6e-4 at 12). Non-positive disables the cutoff.
    double cutoff_separations = 0.0;
};

/// dg_z/dz at one point from the analytic point-mass sum (no background).
double point_mass_gradient(const std::vector<PointMassSpec>& masses,
                           const geodesy::GeodeticPosition& pos);

/// Build a grid by evaluating the point-mass field plus background at every
/// node, at the given reference altitude.
/// Throws DegenerateGeometry if any node is within 1 m of a mass location.
GravityGradientGrid synthesize_grid(const std::vector<PointMassSpec>& masses,
                                    const GridExtent& extent,
                                    double reference_altitude_m,
                                    const SynthOptions& options = {});

/// GGV1 binary raster I/O. save/load round trips are bit-exact.
/// load_grid throws FormatError (with byte offset) on malformed input.
GravityGradientGrid load_grid(const std::filesystem::path& path);
void save_grid(const GravityGradientGrid& grid, const std::filesystem::path& path);

/// Parse a mass-list text file: one "lat lon depth mass" line per mass;
/// blank lines and lines starting with '#' are skipped.
std::vector<PointMassSpec> load_mass_list(const std::filesystem::path& path);

}  // namespace gravnav::gravmap
