#pragma once

// Serialization at the tool boundary: snapshot CSV, coin-set JSON, report
// JSON, and the scan CSV writers. Floating-point CSV fields print with 17
// significant digits so written states round-trip bit exactly.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/continuum.hpp"
#include "qwalk/dispersion.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/operator_algebra.hpp"
#include "qwalk/report.hpp"

namespace qwalk {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline nlohmann::json report_to_json(const CertReport& r) {
    nlohmann::json details = nlohmann::json::array();
    for (const auto& [label, res] : r.details)
        details.push_back({{"item", label}, {"residual", res}});
    return nlohmann::json{{"check", r.check},
                          {"residual_max", r.residual_max},
                          {"tolerance", r.tolerance},
                          {"pass", r.pass},
                          {"details", details}};
}

// --- state snapshots ---------------------------------------------------------

// Columns: ix[,iy,iz] or ikx[,iky,ikz], then component,re,im. Momentum rows
// carry signed bin indices. Rows run in flat site order, component innermost.
inline void write_state_csv(const LatticeState& s, std::ostream& os) {
    const bool mom = s.rep == Rep::Momentum;
    if (s.dims == 1)
        os << (mom ? "ikx" : "ix") << ",component,re,im\n";
    else
        os << (mom ? "ikx,iky,ikz" : "ix,iy,iz") << ",component,re,im\n";
    const int n = s.n;
    const int nz = (s.dims == 3) ? n : 1;
    const int ny = (s.dims == 3) ? n : 1;
    auto index_of = [&](int i) { return mom ? signed_bin(i, n) : i; };
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < n; ++x) {
                const std::int64_t site = flat_site(s, x, y, z);
                for (int c = 0; c < s.d; ++c) {
                    os << index_of(x);
                    if (s.dims == 3) os << ',' << index_of(y) << ',' << index_of(z);
                    const Complex& a = s.at(site, c);
                    os << ',' << c << ',' << fmt17(a.real()) << ',' << fmt17(a.imag()) << '\n';
                }
            }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline long parse_long(const std::string& s, const char* what) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error(std::string("state csv: bad ") + what + " field '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error(std::string("state csv: bad ") + what + " field '" + s + "'");
    return v;
}

}  // namespace detail

// Reads a snapshot produced by write_state_csv. The grid size, internal
// dimension, dims, and representation are recovered from the header and the
// index ranges; missing or duplicate rows are errors.
inline LatticeState read_state_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("state csv: empty input");
    const auto head = detail::split_csv_line(header);
    int dims = 0;
    Rep rep = Rep::Position;
    if (head.size() == 4 && head[0] == "ix" && head[1] == "component")
        dims = 1, rep = Rep::Position;
    else if (head.size() == 4 && head[0] == "ikx" && head[1] == "component")
        dims = 1, rep = Rep::Momentum;
    else if (head.size() == 6 && head[0] == "ix" && head[1] == "iy" && head[2] == "iz")
        dims = 3, rep = Rep::Position;
    else if (head.size() == 6 && head[0] == "ikx" && head[1] == "iky" && head[2] == "ikz")
        dims = 3, rep = Rep::Momentum;
    else
        throw std::runtime_error("state csv: unrecognized header '" + header + "'");

    struct Row {
        long idx[3] = {0, 0, 0};
        long c = 0;
        double re = 0.0, im = 0.0;
    };
    std::vector<Row> rows;
    long idx_min = 0, idx_max = 0, c_max = 0;
    bool first = true;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != head.size())
            throw std::runtime_error("state csv: wrong field count in '" + line + "'");
        Row r;
        for (int a = 0; a < dims; ++a)
            r.idx[a] = detail::parse_long(f[static_cast<std::size_t>(a)], "index");
        r.c = detail::parse_long(f[static_cast<std::size_t>(dims)], "component");
        r.re = detail::parse_double(f[static_cast<std::size_t>(dims) + 1], "re");
        r.im = detail::parse_double(f[static_cast<std::size_t>(dims) + 2], "im");
        if (r.c < 0) throw std::runtime_error("state csv: negative component index");
        for (int a = 0; a < dims; ++a) {
            if (first) {
                idx_min = idx_max = r.idx[a];
            } else {
                idx_min = std::min(idx_min, r.idx[a]);
                idx_max = std::max(idx_max, r.idx[a]);
            }
            first = false;
        }
        c_max = std::max(c_max, r.c);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("state csv: no data rows");
    const long n_long = idx_max - idx_min + 1;
    if (n_long < 2 || n_long > (1 << 24) || !is_power_of_two(static_cast<int>(n_long)))
        throw std::runtime_error("state csv: index range is not a power-of-two grid");
    const int n = static_cast<int>(n_long);
    if (rep == Rep::Position && idx_min != 0)
        throw std::runtime_error("state csv: position indices must start at 0");
    const int d = static_cast<int>(c_max) + 1;
    LatticeState s = make_lattice_state(dims, n, d, rep);
    const std::size_t expected = s.amps.size();
    if (rows.size() != expected)
        throw std::runtime_error("state csv: row count does not cover the grid exactly");
    std::vector<bool> seen(expected, false);
    for (const Row& r : rows) {
        int coord[3] = {0, 0, 0};
        for (int a = 0; a < dims; ++a) {
            long v = r.idx[a];
            if (rep == Rep::Momentum) {
                if (v < -(n / 2) + 1 || v > n / 2)
                    throw std::runtime_error("state csv: momentum index out of range");
                coord[a] = bin_of_signed(static_cast<int>(v), n);
            } else {
                if (v < 0 || v >= n) throw std::runtime_error("state csv: index out of range");
                coord[a] = static_cast<int>(v);
            }
        }
        if (r.c >= d) throw std::runtime_error("state csv: component out of range");
        const std::int64_t site = flat_site(s, coord[0], coord[1], coord[2]);
        const std::size_t slot = static_cast<std::size_t>(site * d + r.c);
        if (seen[slot]) throw std::runtime_error("state csv: duplicate row");
        seen[slot] = true;
        s.amps[slot] = Complex(r.re, r.im);
    }
    return s;
}

// --- coin sets ---------------------------------------------------------------

inline nlohmann::json matrix_to_json(const Matrix& m) {
    std::vector<double> re, im;
    re.reserve(static_cast<std::size_t>(m.size()));
    im.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    return nlohmann::json{{"re", re}, {"im", im}};
}

inline Matrix matrix_from_json(const nlohmann::json& j, int dim, const std::string& what) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im"))
        throw std::runtime_error("coin set: " + what + " needs 're' and 'im' arrays");
    for (const auto& [key, value] : j.items())
        if (key != "re" && key != "im")
            throw std::runtime_error("coin set: unknown key '" + key + "' in " + what);
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const std::size_t want = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
    if (!re.is_array() || !im.is_array() || re.size() != want || im.size() != want)
        throw std::runtime_error("coin set: " + what + " must hold dim*dim row-major entries");
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int jj = 0; jj < dim; ++jj) {
            const std::size_t flat = static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
                                     static_cast<std::size_t>(jj);
            m(i, jj) = Complex(re[flat].get<double>(), im[flat].get<double>());
        }
    return m;
}

inline nlohmann::json coin_set_to_json(const CoinSet& set) {
    require_coin_set_shape(set, "coin_set_to_json");
    nlohmann::json deltas = nlohmann::json::array();
    for (const Matrix& d : set.deltas) deltas.push_back(matrix_to_json(d));
    nlohmann::json j{{"dim", set.dim}, {"deltas", deltas}};
    if (set.q) j["q"] = matrix_to_json(*set.q);
    return j;
}

inline CoinSet coin_set_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::runtime_error("coin set: top level must be an object");
    for (const auto& [key, value] : j.items())
        if (key != "dim" && key != "deltas" && key != "q")
            throw std::runtime_error("coin set: unknown key '" + key + "'");
    if (!j.contains("dim") || !j.at("dim").is_number_integer())
        throw std::runtime_error("coin set: integer 'dim' required");
    CoinSet set;
    set.dim = j.at("dim").get<int>();
    if (set.dim < 1 || set.dim > 64) throw std::runtime_error("coin set: dim out of range");
    if (!j.contains("deltas") || !j.at("deltas").is_array() || j.at("deltas").empty() ||
        j.at("deltas").size() > 3)
        throw std::runtime_error("coin set: 'deltas' must hold 1 to 3 matrices");
    int di = 0;
    for (const auto& dj : j.at("deltas"))
        set.deltas.push_back(matrix_from_json(dj, set.dim, "deltas[" + std::to_string(di++) + "]"));
    if (j.contains("q") && !j.at("q").is_null())
        set.q = matrix_from_json(j.at("q"), set.dim, "q");
    return set;
}

// Maps a name ("dirac", "weyl", "line") or a JSON file path to a coin set.
inline CoinSet resolve_coin_set(const std::string& name_or_path) {
    if (name_or_path == "dirac") return make_dirac_set();
    if (name_or_path == "weyl") return make_weyl_set();
    if (name_or_path == "line") return make_line_set();
    std::ifstream in(name_or_path);
    if (!in) throw std::runtime_error("coin set: cannot open '" + name_or_path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("coin set: invalid JSON in '" + name_or_path + "': " + e.what());
    }
    return coin_set_from_json(j);
}

// --- scan tables ---------------------------------------------------------------

inline void write_convergence_csv(const ConvergenceResult& r, std::ostream& os) {
    os << "dx,steps,error,fitted_order\n";
    for (const ConvergenceRow& row : r.rows)
        os << fmt17(row.dx) << ',' << row.steps << ',' << fmt17(row.error) << ','
           << fmt17(r.fitted_order) << '\n';
}

inline void write_dispersion_csv(const std::vector<DispersionRow>& rows, std::ostream& os) {
    os << "kx,ky,kz,branch,omega_walk,omega_dirac,residual\n";
    for (const DispersionRow& row : rows)
        for (std::size_t b = 0; b < row.omega_walk.size(); ++b)
            os << fmt17(row.k[0]) << ',' << fmt17(row.k[1]) << ',' << fmt17(row.k[2]) << ',' << b
               << ',' << fmt17(row.omega_walk[b]) << ',' << fmt17(row.omega_dirac[b]) << ','
               << fmt17(row.residual[b]) << '\n';
}

struct AnisotropyEntry {
    double k_mag = 0.0;
    std::string dir_a;
    std::string dir_b;
    double delta_omega = 0.0;
};

inline void write_anisotropy_csv(const std::vector<AnisotropyEntry>& rows, std::ostream& os) {
    os << "k_mag,dir_a,dir_b,delta_omega\n";
    for (const AnisotropyEntry& row : rows)
        os << fmt17(row.k_mag) << ',' << row.dir_a << ',' << row.dir_b << ','
           << fmt17(row.delta_omega) << '\n';
}

}  // namespace qwalk
