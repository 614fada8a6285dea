#include "gravnav/gravmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gravnav::gravmap {

namespace {

constexpr double kGravitationalConstant = 6.67430e-11;  // m^3 kg^-1 s^-2
constexpr char kMagic[4] = {'G', 'G', 'V', '1'};

}  // namespace

bool GravityGradientGrid::contains(double lat_deg, double lon_deg) const {
    return lat_deg >= origin_lat_deg && lat_deg <= max_lat_deg() &&
           lon_deg >= origin_lon_deg && lon_deg <= max_lon_deg();
}

void GravityGradientGrid::validate() const {
    if (n_rows < 2 || n_cols < 2) {
        throw Error("grid must have at least 2 rows and 2 columns");
    }
    if (!(d_lat_deg > 0.0) || !(d_lon_deg > 0.0)) {
        throw Error("grid cell size must be positive");
    }
    if (values.size() != static_cast<std::size_t>(n_rows) * n_cols) {
        throw Error("grid value count does not match n_rows*n_cols");
    }
    for (double v : values) {
        if (!std::isfinite(v) || std::abs(v) >= kMaxGradientMagnitude) {
            throw Error("grid value out of sane gradient range");
        }
    }
}

double bilinear(const GravityGradientGrid& grid, double lat_deg, double lon_deg) {
    const double fr = (lat_deg - grid.origin_lat_deg) / grid.d_lat_deg;
    const double fc = (lon_deg - grid.origin_lon_deg) / grid.d_lon_deg;
    auto cell = [](double f, std::int32_t n) {
        auto i = static_cast<std::int32_t>(std::floor(f));
        return std::clamp(i, std::int32_t{0}, n - 2);
    };
    const std::int32_t r = cell(fr, grid.n_rows);
    const std::int32_t c = cell(fc, grid.n_cols);
    const double a = fr - r;
    const double b = fc - c;
    return (1.0 - a) * (1.0 - b) * grid.at(r, c) +
           (1.0 - a) * b * grid.at(r, c + 1) +
           a * (1.0 - b) * grid.at(r + 1, c) +
           a * b * grid.at(r + 1, c + 1);
}

void MapSet::add(GravityGradientGrid grid) {
    grid.validate();
    grids_.push_back(std::move(grid));
    std::stable_sort(grids_.begin(), grids_.end(),
                     [](const GravityGradientGrid& a, const GravityGradientGrid& b) {
                         return a.priority > b.priority;
                     });
}

double MapSet::query_gradient(const geodesy::GeodeticPosition& pos) const {
    for (const auto& grid : grids_) {
        if (grid.contains(pos.latitude_deg, pos.longitude_deg)) {
            return bilinear(grid, pos.latitude_deg, pos.longitude_deg);
        }
    }
    std::ostringstream msg;
    msg << "no grid covers lat=" << pos.latitude_deg
        << " lon=" << pos.longitude_deg;
    throw OutOfCoverage(msg.str());
}

double point_mass_gradient(const std::vector<PointMassSpec>& masses,
                           const geodesy::GeodeticPosition& pos) {
    double sum = 0.0;
    for (const auto& m : masses) {
        const geodesy::GeodeticPosition mass_pos{m.lat_deg, m.lon_deg, -m.depth_m};
        const geodesy::NedVector d = geodesy::geodetic_to_ned(mass_pos, pos);
        const double horiz2 = d.north_m * d.north_m + d.east_m * d.east_m;
        const double zsep = pos.altitude_m + m.depth_m;  // obs above mass
        const double r2 = horiz2 + zsep * zsep;
        const double r = std::sqrt(r2);
        if (r < 1.0) {
            throw DegenerateGeometry("evaluation point within 1 m of a point mass");
        }
        sum += kGravitationalConstant * m.mass_kg * (3.0 * zsep * zsep - r2) /
               (r2 * r2 * r);
    }
    return sum;
}

GravityGradientGrid synthesize_grid(const std::vector<PointMassSpec>& masses,
                                    const GridExtent& extent,
                                    double reference_altitude_m,
                                    const SynthOptions& options) {
    GravityGradientGrid grid;
    grid.origin_lat_deg = extent.origin_lat_deg;
    grid.origin_lon_deg = extent.origin_lon_deg;
    grid.d_lat_deg = extent.d_lat_deg;
    grid.d_lon_deg = extent.d_lon_deg;
    grid.n_rows = extent.n_rows;
    grid.n_cols = extent.n_cols;
    grid.priority = extent.priority;
    grid.reference_altitude_m = reference_altitude_m;
    grid.values.assign(static_cast<std::size_t>(extent.n_rows) * extent.n_cols, 0.0);

    for (std::int32_t r = 0; r < grid.n_rows; ++r) {
        const double lat = grid.origin_lat_deg + r * grid.d_lat_deg;
        for (std::int32_t c = 0; c < grid.n_cols; ++c) {
            grid.at(r, c) = options.background_s2 +
                            options.background_trend_per_deg *
                                (lat - options.trend_reference_lat_deg);
        }
    }

    // Per-mass scatter: each mass only touches nodes within its cutoff
    // radius, which keeps wide grids with many masses tractable.
    const double mlat = geodesy::kDegToRad *
                        (geodesy::EllipsoidModel::wgs84().semi_major_axis_m);
    for (const auto& m : masses) {
        const double zsep0 = reference_altitude_m + m.depth_m;
        std::int32_t r0 = 0, r1 = grid.n_rows - 1;
        std::int32_t c0 = 0, c1 = grid.n_cols - 1;
        if (options.cutoff_separations > 0.0) {
            const double radius_m = options.cutoff_separations * std::abs(zsep0);
            const double dlat = radius_m / mlat / grid.d_lat_deg;
            const double coslat = std::cos(m.lat_deg * geodesy::kDegToRad);
            const double dlon = radius_m / (mlat * std::max(coslat, 0.05)) /
                                grid.d_lon_deg;
            const double frow = (m.lat_deg - grid.origin_lat_deg) / grid.d_lat_deg;
            const double fcol = (m.lon_deg - grid.origin_lon_deg) / grid.d_lon_deg;
            r0 = std::max<std::int32_t>(0, static_cast<std::int32_t>(frow - dlat));
            r1 = std::min<std::int32_t>(grid.n_rows - 1,
                                        static_cast<std::int32_t>(frow + dlat) + 1);
            c0 = std::max<std::int32_t>(0, static_cast<std::int32_t>(fcol - dlon));
            c1 = std::min<std::int32_t>(grid.n_cols - 1,
                                        static_cast<std::int32_t>(fcol + dlon) + 1);
            if (r0 > r1 || c0 > c1) continue;
        }
        const geodesy::GeodeticPosition mass_pos{m.lat_deg, m.lon_deg, -m.depth_m};
        const auto [rn, re] = geodesy::radii_of_curvature(m.lat_deg);
        const double north_per_deg = (rn - m.depth_m) * geodesy::kDegToRad;
        const double east_per_deg = (re - m.depth_m) *
                                    std::cos(m.lat_deg * geodesy::kDegToRad) *
                                    geodesy::kDegToRad;
        for (std::int32_t r = r0; r <= r1; ++r) {
            const double north = (grid.origin_lat_deg + r * grid.d_lat_deg -
                                  mass_pos.latitude_deg) * north_per_deg;
            for (std::int32_t c = c0; c <= c1; ++c) {
                const double east = (grid.origin_lon_deg + c * grid.d_lon_deg -
                                     mass_pos.longitude_deg) * east_per_deg;
                const double r2 = north * north + east * east + zsep0 * zsep0;
                const double rr = std::sqrt(r2);
                if (rr < 1.0) {
                    throw DegenerateGeometry(
                        "grid node within 1 m of a point mass");
                }
                grid.at(r, c) += kGravitationalConstant * m.mass_kg *
                                 (3.0 * zsep0 * zsep0 - r2) / (r2 * r2 * rr);
            }
        }
    }
    grid.validate();
    return grid;
}

// ---------------------------------------------------------------------------
// GGV1 file format: magic "GGV1"; header origin_lat, origin_lon, d_lat,
// d_lon (f64), n_rows, n_cols, priority (i32), reference_altitude (f64);
// then n_rows*n_cols f64 values row-major. All little-endian.
// ---------------------------------------------------------------------------

namespace {

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, std::size_t& offset, const char* field) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) {
        throw FormatError(std::string("truncated grid file reading ") + field,
                          offset);
    }
    offset += sizeof(T);
    return value;
}

}  // namespace

void save_grid(const GravityGradientGrid& grid, const std::filesystem::path& path) {
    grid.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out.write(kMagic, sizeof(kMagic));
    write_raw(out, grid.origin_lat_deg);
    write_raw(out, grid.origin_lon_deg);
    write_raw(out, grid.d_lat_deg);
    write_raw(out, grid.d_lon_deg);
    write_raw(out, grid.n_rows);
    write_raw(out, grid.n_cols);
    write_raw(out, grid.priority);
    write_raw(out, grid.reference_altitude_m);
    out.write(reinterpret_cast<const char*>(grid.values.data()),
              static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

GravityGradientGrid load_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::size_t offset = 0;
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("bad magic, expected GGV1", 0);
    }
    offset = 4;
    GravityGradientGrid grid;
    grid.origin_lat_deg = read_raw<double>(in, offset, "origin_lat");
    grid.origin_lon_deg = read_raw<double>(in, offset, "origin_lon");
    grid.d_lat_deg = read_raw<double>(in, offset, "d_lat");
    grid.d_lon_deg = read_raw<double>(in, offset, "d_lon");
    grid.n_rows = read_raw<std::int32_t>(in, offset, "n_rows");
    grid.n_cols = read_raw<std::int32_t>(in, offset, "n_cols");
    grid.priority = read_raw<std::int32_t>(in, offset, "priority");
    grid.reference_altitude_m = read_raw<double>(in, offset, "reference_altitude");
    if (grid.n_rows < 2 || grid.n_cols < 2) {
        throw FormatError("grid dimensions must be at least 2x2", offset);
    }
    const std::size_t count =
        static_cast<std::size_t>(grid.n_rows) * static_cast<std::size_t>(grid.n_cols);
    grid.values.resize(count);
    in.read(reinterpret_cast<char*>(grid.values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double)) {
        throw FormatError("truncated value block",
                          offset + static_cast<std::size_t>(in.gcount()));
    }
    try {
        grid.validate();
    } catch (const Error& e) {
        throw FormatError(e.what(), offset);
    }
    return grid;
}

std::vector<PointMassSpec> load_mass_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open mass list " + path.string());
    }
    std::vector<PointMassSpec> masses;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        PointMassSpec m;
        if (!(row >> m.lat_deg >> m.lon_deg >> m.depth_m >> m.mass_kg)) {
            throw Error("bad mass-list line " + std::to_string(lineno) +
                        ": expected 'lat lon depth mass'");
        }
        if (!(m.depth_m > 0.0) || m.mass_kg == 0.0) {
            throw Error("mass-list line " + std::to_string(lineno) +
                        ": depth must be > 0 and mass nonzero");
        }
        masses.push_back(m);
    }
    return masses;
}

}  // namespace gravnav::gravmap
