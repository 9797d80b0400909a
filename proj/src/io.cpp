#include "sphaerica/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "sphaerica/errors.hpp"

namespace sphaerica {

namespace {

constexpr const char* kScalarHeader = "lon_deg,lat_deg,value";
constexpr const char* kVectorHeader = "lon_deg,lat_deg,vx,vy,vz";

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc() || ptr != last) throw ValidationError(where + ": not a number: '" + text + "'");
    if (!std::isfinite(v)) throw ValidationError(where + ": non-finite value");
    return v;
}

template <class T>
T parse_integer(const std::string& text, const std::string& key) {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ValidationError("setting " + key + ": not a valid integer: '" + text + "'");
    }
    return v;
}

}  // namespace

std::vector<UnitVector> FieldTable::nodes() const {
    std::vector<UnitVector> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(UnitVector::from_lonlat_deg(lon_deg[i], lat_deg[i]));
    return out;
}

ScalarSamples FieldTable::scalar_samples() const {
    if (schema != CsvSchema::scalar) throw ValidationError("expected a scalar field file");
    return ScalarSamples{values};
}

VectorSamples FieldTable::vector_samples() const {
    if (schema != CsvSchema::vector) throw ValidationError("expected a vector field file");
    VectorSamples s;
    s.values = vectors;
    s.tangential = false;
    return s;
}

FieldTable make_table(const std::vector<UnitVector>& nodes, const std::vector<double>& values) {
    if (nodes.size() != values.size()) throw ValidationError("make_table: node and value counts differ");
    FieldTable t;
    t.schema = CsvSchema::scalar;
    for (const auto& n : nodes) {
        t.lon_deg.push_back(n.lon_deg());
        t.lat_deg.push_back(n.lat_deg());
    }
    t.values = values;
    return t;
}

FieldTable make_table(const std::vector<UnitVector>& nodes, const std::vector<Vec3>& vectors) {
    if (nodes.size() != vectors.size()) throw ValidationError("make_table: node and vector counts differ");
    FieldTable t;
    t.schema = CsvSchema::vector;
    for (const auto& n : nodes) {
        t.lon_deg.push_back(n.lon_deg());
        t.lat_deg.push_back(n.lat_deg());
    }
    t.vectors = vectors;
    return t;
}

std::string format_number(double x) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf, static_cast<std::size_t>(n));
}

FieldTable parse_field_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(source + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    FieldTable t;
    std::size_t columns = 0;
    if (line == kScalarHeader) {
        t.schema = CsvSchema::scalar;
        columns = 3;
    } else if (line == kVectorHeader) {
        t.schema = CsvSchema::vector;
        columns = 5;
    } else {
        throw ValidationError(source + ": unknown header '" + line + "'");
    }
    std::set<std::tuple<long long, long long, long long>> seen;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw ValidationError(source + ": row " + std::to_string(row) + ": empty line");
        }
        const std::string where = source + ": row " + std::to_string(row);
        const auto cells = split(line, ',');
        if (cells.size() != columns) {
            throw ValidationError(where + ": expected " + std::to_string(columns) + " columns, found " +
                                  std::to_string(cells.size()));
        }
        std::vector<double> v;
        for (const auto& c : cells) v.push_back(parse_double(c, where));
        if (v[1] < -90.0 || v[1] > 90.0) throw ValidationError(where + ": latitude outside [-90, 90]");
        const Vec3 p = UnitVector::from_lonlat_deg(v[0], v[1]).vec();
        const auto key = std::make_tuple(std::llround(p.x * 1e12), std::llround(p.y * 1e12), std::llround(p.z * 1e12));
        if (!seen.insert(key).second) throw ValidationError(where + ": duplicate node");
        t.lon_deg.push_back(v[0]);
        t.lat_deg.push_back(v[1]);
        if (t.schema == CsvSchema::scalar) {
            t.values.push_back(v[2]);
        } else {
            t.vectors.push_back({v[2], v[3], v[4]});
        }
    }
    return t;
}

FieldTable load_field_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    return parse_field_csv(in, path);
}

void write_field_csv(std::ostream& out, const FieldTable& t) {
    out << (t.schema == CsvSchema::scalar ? kScalarHeader : kVectorHeader) << '\n';
    for (std::size_t i = 0; i < t.size(); ++i) {
        out << format_number(t.lon_deg[i]) << ',' << format_number(t.lat_deg[i]);
        if (t.schema == CsvSchema::scalar) {
            out << ',' << format_number(t.values[i]);
        } else {
            const Vec3& v = t.vectors[i];
            out << ',' << format_number(v.x) << ',' << format_number(v.y) << ',' << format_number(v.z);
        }
        out << '\n';
    }
}

void save_field_csv(const std::string& path, const FieldTable& t) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    write_field_csv(out, t);
    if (!out) throw Error("write failed for " + path);
}

void require_nodes(const FieldTable& t, const std::vector<UnitVector>& expected, const std::string& what) {
    if (t.size() != expected.size()) {
        throw ValidationError(what + ": expected " + std::to_string(expected.size()) + " rows, found " +
                              std::to_string(t.size()));
    }
    const auto nodes = t.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (norm(nodes[i].vec() - expected[i].vec()) > 1e-9) {
            throw ValidationError(what + ": row " + std::to_string(i + 1) + " does not match the grid node");
        }
    }
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
    const auto real = [&] { return parse_double(value, "setting " + key); };
    const auto size = [&] { return parse_integer<std::size_t>(value, key); };
    if (key == "command") c.command = value;
    else if (key == "cap-center-lon") c.cap_lon = real();
    else if (key == "cap-center-lat") c.cap_lat = real();
    else if (key == "cap-radius") c.cap_radius = real();
    else if (key == "nt") c.n_t = size();
    else if (key == "nphi") c.n_phi = size();
    else if (key == "m") c.m = size();
    else if (key == "J") c.J = parse_integer<int>(value, key);
    else if (key == "seed") c.seed = parse_integer<std::uint64_t>(value, key);
    else if (key == "nmin") c.n_min = parse_integer<int>(value, key);
    else if (key == "nmax") c.n_max = parse_integer<int>(value, key);
    else if (key == "M") c.M = size();
    else if (key == "rho-bar") c.rho_bar = real();
    else if (key == "lambda") c.lambda = real();
    else if (key == "N") c.N = size();
    else if (key == "R") c.R = real();
    else if (key == "GM") c.GM = real();
    else if (key == "omega") c.omega = real();
    else if (key == "G") c.G = real();
    else if (key == "in") c.in = value;
    else if (key == "out") c.out = value;
    else throw ValidationError("unknown setting '" + key + "'");
}

void load_config(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config " + path);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(path + ": line " + std::to_string(row) + ": expected key=value");
        apply_setting(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

}  // namespace sphaerica
