#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sphaerica/geometry.hpp"
#include "sphaerica/quadrature.hpp"

namespace sphaerica {

enum class CsvSchema { scalar, vector };

/// Rows of a field file. Angles are kept exactly as read so that a load/save
/// cycle reproduces the file.
struct FieldTable {
    CsvSchema schema = CsvSchema::scalar;
    std::vector<double> lon_deg, lat_deg;
    std::vector<double> values;  ///< scalar schema
    std::vector<Vec3> vectors;   ///< vector schema

    std::size_t size() const { return lon_deg.size(); }
    std::vector<UnitVector> nodes() const;
    ScalarSamples scalar_samples() const;
    VectorSamples vector_samples() const;
};

FieldTable make_table(const std::vector<UnitVector>& nodes, const std::vector<double>& values);
FieldTable make_table(const std::vector<UnitVector>& nodes, const std::vector<Vec3>& vectors);

/// Canonical text of a double: 17 significant digits, "." decimal point.
std::string format_number(double x);

/// Throws ValidationError naming the source and 1-based row for schema errors,
/// non-finite values, latitudes outside [−90, 90] and repeated nodes.
FieldTable parse_field_csv(std::istream& in, const std::string& source = "<stream>");
FieldTable load_field_csv(const std::string& path);

void write_field_csv(std::ostream& out, const FieldTable& t);
/// Throws Error when the file cannot be written.
void save_field_csv(const std::string& path, const FieldTable& t);

/// Checks that the table's nodes coincide with `expected` (same order, within 1e-9).
void require_nodes(const FieldTable& t, const std::vector<UnitVector>& expected, const std::string& what);

/// Every option of a run. Unset optionals take command-specific defaults.
struct RunConfig {
    std::string command;
    std::optional<double> cap_lon, cap_lat, cap_radius;
    std::optional<std::size_t> n_t, n_phi, m;
    std::optional<int> J;
    std::uint64_t seed = 7;
    std::optional<int> n_min, n_max;
    std::size_t M = 200;
    std::optional<double> rho_bar;
    double lambda = 1e-12;
    std::size_t N = 5;
    double R = 1.0, GM = 1.0, omega = 1.0, G = 1.0;
    std::string in;
    std::string out = ".";
};

/// Applies one key=value assignment; keys match the long CLI flags without dashes.
void apply_setting(RunConfig& c, const std::string& key, const std::string& value);

/// Reads a flat key=value file ('#' starts a comment, blank lines ignored).
void load_config(RunConfig& c, const std::string& path);

}  // namespace sphaerica
