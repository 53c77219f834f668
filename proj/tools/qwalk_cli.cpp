// Command-line front end for the walk library.
//
// Subcommands: check-algebra, evolve, converge, dispersion, anisotropy,
// phase-shift. Every subcommand takes --config/--out/--seed/--tol/--threads;
// values resolve as built-in defaults, then config-file keys, then explicit
// flags. Unknown config keys are rejected before any computation.
//
// Exit codes: 0 = success / all certifications pass, 1 = a certification
// failed, 2 = usage, config, or IO error. All inputs are validated before the
// first output file is created, and a fixed seed plus a fixed config yields
// byte-identical outputs.

#include <array>
#include <cstdint>
#include <limits>
#include <numbers>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qwalk/continuum.hpp"
#include "qwalk/dispersion.hpp"
#include "qwalk/io.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/operator_algebra.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/walk.hpp"

namespace {

using nlohmann::json;
using namespace qwalk;

constexpr int kExitPass = 0;
constexpr int kExitCertFailure = 1;
constexpr int kExitUsage = 2;

// Options shared by every subcommand. The CLI::Option pointers record whether
// a flag was given explicitly, which is what lets flags out-rank config keys.
struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    double tol = kDefaultTol;
    unsigned threads = 0;  // 0 = keep the hardware-concurrency default

    CLI::Option* o_out = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_tol = nullptr;
    CLI::Option* o_threads = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--config", c.config_path, "JSON config file (flags override its keys)");
    c.o_out = cmd->add_option("--out", c.out_dir, "Directory for output files (default: .)");
    c.o_seed = cmd->add_option("--seed", c.seed, "RNG seed for randomized inputs");
    c.o_tol = cmd->add_option("--tol", c.tol, "Certification tolerance");
    c.o_threads = cmd->add_option("--threads", c.threads, "Worker threads for kernels");
}

// --- config plumbing ---------------------------------------------------------

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("config: invalid JSON in '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config: top level must be an object");
    return j;
}

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const std::string& a : allowed)
            if (key == a) ok = true;
        if (!ok) throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }
}

double jnum(const json& j, const std::string& what) {
    if (!j.is_number()) throw std::invalid_argument(what + ": expected a number");
    return j.get<double>();
}

int jint(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw std::invalid_argument(what + ": expected an integer");
    return j.get<int>();
}

std::string jstr(const json& j, const std::string& what) {
    if (!j.is_string()) throw std::invalid_argument(what + ": expected a string");
    return j.get<std::string>();
}

// Fixed-length numeric array; entries beyond `dims` stay zero.
std::array<double, 3> jvec3(const json& j, int dims, const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != dims)
        throw std::invalid_argument(what + ": expected an array of " + std::to_string(dims) +
                                    " numbers");
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int a = 0; a < dims; ++a) out[static_cast<std::size_t>(a)] = jnum(j[static_cast<std::size_t>(a)], what);
    return out;
}

std::array<int, 3> jivec3(const json& j, int dims, const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != dims)
        throw std::invalid_argument(what + ": expected an array of " + std::to_string(dims) +
                                    " integers");
    std::array<int, 3> out{0, 0, 0};
    for (int a = 0; a < dims; ++a) out[static_cast<std::size_t>(a)] = jint(j[static_cast<std::size_t>(a)], what);
    return out;
}

// Spinor as {"re": [...], "im": [...]}, both arrays of length dim.
Vector jspinor(const json& j, int dim, const std::string& what) {
    if (!j.is_object()) throw std::invalid_argument(what + ": expected an object");
    check_keys(j, {"re", "im"}, what);
    if (!j.contains("re") || !j.contains("im"))
        throw std::invalid_argument(what + ": needs 're' and 'im' arrays");
    const json& re = j.at("re");
    const json& im = j.at("im");
    if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != dim ||
        static_cast<int>(im.size()) != dim)
        throw std::invalid_argument(what + ": 're' and 'im' must be arrays of length " +
                                    std::to_string(dim));
    Vector v(dim);
    for (int i = 0; i < dim; ++i)
        v(i) = Complex(jnum(re[static_cast<std::size_t>(i)], what),
                       jnum(im[static_cast<std::size_t>(i)], what));
    return v;
}

// Overlays config values onto the common options; explicit flags still win.
void apply_common_config(const json& cfg, CommonOpts& c) {
    if (cfg.contains("out") && c.o_out->count() == 0) c.out_dir = jstr(cfg.at("out"), "config.out");
    if (cfg.contains("seed") && c.o_seed->count() == 0) {
        if (!cfg.at("seed").is_number_unsigned() && !cfg.at("seed").is_number_integer())
            throw std::invalid_argument("config.seed: expected a nonnegative integer");
        c.seed = cfg.at("seed").get<std::uint64_t>();
    }
    if (cfg.contains("tol") && c.o_tol->count() == 0) c.tol = jnum(cfg.at("tol"), "config.tol");
    if (cfg.contains("threads") && c.o_threads->count() == 0)
        c.threads = static_cast<unsigned>(jint(cfg.at("threads"), "config.threads"));
}

const std::vector<std::string> kCommonKeys{"out", "seed", "tol", "threads"};

std::vector<std::string> with_common(std::initializer_list<const char*> extra) {
    std::vector<std::string> keys = kCommonKeys;
    for (const char* k : extra) keys.emplace_back(k);
    return keys;
}

std::filesystem::path prepare_out_dir(const CommonOpts& c) {
    std::filesystem::path dir(c.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("out: cannot create directory '" + c.out_dir + "'");
    return dir;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("out: cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("out: short write to '" + path.string() + "'");
}

json direction_json(const std::array<double, 3>& v, int dims) {
    json arr = json::array();
    for (int a = 0; a < dims; ++a) arr.push_back(v[static_cast<std::size_t>(a)]);
    return arr;
}

std::string direction_label(const std::array<double, 3>& v) {
    return fmt17(v[0]) + " " + fmt17(v[1]) + " " + fmt17(v[2]);
}

void emit(const json& report) { std::cout << report.dump(2) << "\n"; }

// --- check-algebra -------------------------------------------------------------

// Residual report for the raw involution/Hermiticity requirements; the other
// certifications build on these.
CertReport check_involutions(const CoinSet& set, double tol) {
    require_coin_set_shape(set, "check_involutions");
    const Matrix id = identity(set.dim);
    std::vector<std::pair<std::string, double>> details;
    for (std::size_t a = 0; a < set.deltas.size(); ++a) {
        const Matrix& d = set.deltas[a];
        const std::string name = std::string("delta_") + axis_name(Axis(static_cast<int>(a)));
        details.emplace_back(name + "^2 - I", operator_norm(Matrix(d * d - id)));
        details.emplace_back(name + " - " + name + "^dag", operator_norm(Matrix(d - d.adjoint())));
    }
    if (set.q) {
        details.emplace_back("q^2 - I", operator_norm(Matrix((*set.q) * (*set.q) - id)));
        details.emplace_back("q - q^dag", operator_norm(Matrix(*set.q - set.q->adjoint())));
    }
    return make_report("involutions", tol, std::move(details));
}

int run_check_algebra(const CommonOpts& common, const json& cfg, std::string set_arg,
                      bool set_flag_given) {
    check_keys(cfg, with_common({"set"}), "config");
    if (cfg.contains("set") && !set_flag_given) set_arg = jstr(cfg.at("set"), "config.set");
    if (set_arg.empty()) set_arg = "dirac";

    const CoinSet set = resolve_coin_set(set_arg);

    json reports = json::array();
    json skipped = json::array();
    bool pass = true;
    const auto add = [&](const CertReport& r) {
        reports.push_back(report_to_json(r));
        pass = pass && r.pass;
    };

    add(check_involutions(set, common.tol));
    add(check_anticommuting(set, common.tol));
    if (set.deltas.size() >= 2)
        add(check_equal_norm(set, common.tol));
    else
        skipped.push_back({{"check", "equal_norm"}, {"reason", "needs at least two axes"}});
    if (set.q) {
        add(check_parity_covariance(set, common.tol));
        add(check_gamma_relations(set, common.tol));
    } else {
        skipped.push_back({{"check", "parity_covariance"}, {"reason", "set has no coin generator q"}});
        skipped.push_back({{"check", "gamma_relations"}, {"reason", "set has no coin generator q"}});
    }

    // Residuals are computed in double arithmetic, so a measured zero only
    // establishes the relations to machine resolution. A certificate tighter
    // than that cannot be issued no matter what the numbers say.
    const double floor = std::numeric_limits<double>::epsilon();
    json out{{"command", "check-algebra"},
             {"set", set_arg},
             {"dim", set.dim},
             {"axes", set.deltas.size()},
             {"tol", common.tol},
             {"reports", reports},
             {"skipped", skipped}};
    if (common.tol < floor) {
        pass = false;
        out["note"] = "tolerance below double-precision resolution; certificate not establishable";
    }
    out["pass"] = pass;
    emit(out);
    return pass ? kExitPass : kExitCertFailure;
}

// --- evolve ----------------------------------------------------------------------

struct StartSpec {
    std::string kind;  // delta | gaussian | file | random
    std::array<int, 3> site{0, 0, 0};
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double sigma = 0.0;
    std::array<double, 3> k0{0.0, 0.0, 0.0};
    Vector spinor;
    std::string path;
};

StartSpec parse_start(const json& j, int dims, int dim) {
    if (!j.is_object()) throw std::invalid_argument("config.start: expected an object");
    if (!j.contains("kind")) throw std::invalid_argument("config.start: needs a 'kind'");
    StartSpec s;
    s.kind = jstr(j.at("kind"), "config.start.kind");
    if (s.kind == "delta") {
        check_keys(j, {"kind", "site", "spinor"}, "config.start");
        if (!j.contains("site") || !j.contains("spinor"))
            throw std::invalid_argument("config.start: delta needs 'site' and 'spinor'");
        s.site = jivec3(j.at("site"), dims, "config.start.site");
        s.spinor = jspinor(j.at("spinor"), dim, "config.start.spinor");
    } else if (s.kind == "gaussian") {
        check_keys(j, {"kind", "center", "sigma", "k0", "spinor"}, "config.start");
        if (!j.contains("center") || !j.contains("sigma") || !j.contains("k0") ||
            !j.contains("spinor"))
            throw std::invalid_argument(
                "config.start: gaussian needs 'center', 'sigma', 'k0', and 'spinor'");
        s.center = jvec3(j.at("center"), dims, "config.start.center");
        s.sigma = jnum(j.at("sigma"), "config.start.sigma");
        s.k0 = jvec3(j.at("k0"), dims, "config.start.k0");
        s.spinor = jspinor(j.at("spinor"), dim, "config.start.spinor");
    } else if (s.kind == "file") {
        check_keys(j, {"kind", "path"}, "config.start");
        if (!j.contains("path")) throw std::invalid_argument("config.start: file needs a 'path'");
        s.path = jstr(j.at("path"), "config.start.path");
    } else if (s.kind == "random") {
        check_keys(j, {"kind"}, "config.start");
    } else {
        throw std::invalid_argument("config.start.kind: must be delta, gaussian, file, or random");
    }
    return s;
}

LatticeState build_start(const StartSpec& spec, const WalkParams& params, int dim,
                         std::uint64_t seed) {
    if (spec.kind == "delta") return delta_state(params.dims, params.n, spec.site, spec.spinor);
    if (spec.kind == "gaussian")
        return gaussian_packet(params, spec.center, spec.sigma, spec.k0, spec.spinor);
    if (spec.kind == "file") {
        std::ifstream in(spec.path);
        if (!in) throw std::runtime_error("start: cannot open '" + spec.path + "'");
        LatticeState s = read_state_csv(in);
        if (s.dims != params.dims || s.n != params.n || s.d != dim)
            throw std::invalid_argument("start: state in '" + spec.path +
                                        "' does not match the configured lattice");
        return s;
    }
    Rng rng(seed);
    return random_lattice_state(params.dims, params.n, dim, rng);
}

std::string snapshot_name(int step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "state_%06d.csv", step);
    return std::string(buf);
}

int run_evolve(const CommonOpts& common, const json& cfg, int steps_flag, bool steps_given) {
    check_keys(cfg,
               with_common({"dims", "n", "dx", "mass", "coin_set", "axis_order", "steps",
                            "snapshot_every", "start"}),
               "config");
    for (const char* key : {"dims", "n", "dx", "coin_set", "start"})
        if (!cfg.contains(key))
            throw std::invalid_argument(std::string("config: evolve needs '") + key + "'");

    const int dims = jint(cfg.at("dims"), "config.dims");
    const int n = jint(cfg.at("n"), "config.n");
    const double dx = jnum(cfg.at("dx"), "config.dx");
    const double mass = cfg.contains("mass") ? jnum(cfg.at("mass"), "config.mass") : 0.0;
    const std::string set_name = jstr(cfg.at("coin_set"), "config.coin_set");
    int steps = cfg.contains("steps") ? jint(cfg.at("steps"), "config.steps") : 0;
    if (steps_given) steps = steps_flag;
    const int snapshot_every =
        cfg.contains("snapshot_every") ? jint(cfg.at("snapshot_every"), "config.snapshot_every") : 0;

    AxisOrder order = kDefaultAxisOrder;
    if (cfg.contains("axis_order"))
        order = parse_axis_order(jstr(cfg.at("axis_order"), "config.axis_order"));

    if (steps < 0) throw std::invalid_argument("config.steps: must be nonnegative");
    if (snapshot_every < 0) throw std::invalid_argument("config.snapshot_every: must be nonnegative");
    if (snapshot_every > 0 && steps % snapshot_every != 0)
        throw std::invalid_argument("config.snapshot_every: must divide steps");

    // Everything that can fail is constructed before the first file is opened.
    const WalkParams params = make_walk_params(dims, n, dx, mass);
    const CoinSet set = resolve_coin_set(set_name);
    const StepOperator op = make_step_operator(params, set, order);
    const StartSpec start_spec = parse_start(cfg.at("start"), dims, set.dim);
    LatticeState state = build_start(start_spec, params, set.dim, common.seed);
    const double initial_norm = l2_norm(state);

    const std::filesystem::path dir = prepare_out_dir(common);
    std::vector<std::string> snapshots;
    const auto snap = [&](int step) {
        const std::string name = snapshot_name(step);
        std::ostringstream os;
        write_state_csv(state, os);
        write_text_file(dir / name, os.str());
        snapshots.push_back(name);
    };

    snap(0);
    if (snapshot_every > 0) {
        for (int done = snapshot_every; done <= steps; done += snapshot_every) {
            evolve(op, state, snapshot_every);
            snap(done);
        }
    } else if (steps > 0) {
        evolve(op, state, steps);
        snap(steps);
    }
    const double final_norm = l2_norm(state);

    emit(json{{"command", "evolve"},
              {"dims", dims},
              {"n", n},
              {"dx", dx},
              {"mass", mass},
              {"theta", params.theta},
              {"dt", params.dt},
              {"coin_set", set_name},
              {"axis_order", axis_order_string(order)},
              {"steps", steps},
              {"snapshot_every", snapshot_every},
              {"start", start_spec.kind},
              {"initial_norm", initial_norm},
              {"final_norm", final_norm},
              {"snapshots", snapshots}});
    return kExitPass;
}

// --- converge ----------------------------------------------------------------------

int run_converge(const CommonOpts& common, const json& cfg, int dims_flag, bool dims_given,
                 int levels_flag, bool levels_given) {
    check_keys(cfg,
               with_common({"dims", "levels", "coin_set", "mass", "box_length", "base_n",
                            "base_steps", "sigma", "k0", "spinor"}),
               "config");

    int dims = 1;
    if (cfg.contains("dims")) dims = jint(cfg.at("dims"), "config.dims");
    if (dims_given) dims = dims_flag;
    if (dims != 1 && dims != 3) throw std::invalid_argument("dims: must be 1 or 3");

    // Baselines chosen so the defaults finish quickly and sit inside the
    // small-k regime where the refinement study is meaningful.
    ConvergenceScanSpec spec;
    spec.dims = dims;
    std::string set_name;
    if (dims == 1) {
        set_name = "line";
        spec.mass = 0.25;
        spec.box_length = 64.0;
        spec.base_n = 128;
        spec.base_steps = 16;
        spec.levels = 4;
        spec.sigma = 6.0;
        spec.k0 = {0.3, 0.0, 0.0};
    } else {
        set_name = "dirac";
        spec.mass = 0.1;
        spec.box_length = 8.0;
        spec.base_n = 16;
        spec.base_steps = 4;
        spec.levels = 3;
        spec.sigma = 1.2;
        spec.k0 = {0.35, 0.2, -0.15};
    }

    if (cfg.contains("coin_set")) set_name = jstr(cfg.at("coin_set"), "config.coin_set");
    if (cfg.contains("mass")) spec.mass = jnum(cfg.at("mass"), "config.mass");
    if (cfg.contains("box_length")) spec.box_length = jnum(cfg.at("box_length"), "config.box_length");
    if (cfg.contains("base_n")) spec.base_n = jint(cfg.at("base_n"), "config.base_n");
    if (cfg.contains("base_steps")) spec.base_steps = jint(cfg.at("base_steps"), "config.base_steps");
    if (cfg.contains("levels")) spec.levels = jint(cfg.at("levels"), "config.levels");
    if (levels_given) spec.levels = levels_flag;
    if (cfg.contains("sigma")) spec.sigma = jnum(cfg.at("sigma"), "config.sigma");
    if (cfg.contains("k0")) spec.k0 = jvec3(cfg.at("k0"), dims, "config.k0");

    spec.set = resolve_coin_set(set_name);
    if (cfg.contains("spinor"))
        spec.spinor = jspinor(cfg.at("spinor"), spec.set.dim, "config.spinor");
    else {
        spec.spinor = Vector::Zero(spec.set.dim);
        spec.spinor(0) = 1.0;
    }

    const ConvergenceResult result = convergence_scan(spec);

    const std::filesystem::path dir = prepare_out_dir(common);
    std::ostringstream os;
    write_convergence_csv(result, os);
    write_text_file(dir / "converge.csv", os.str());

    json rows = json::array();
    for (const ConvergenceRow& row : result.rows)
        rows.push_back({{"dx", row.dx}, {"steps", row.steps}, {"error", row.error}});
    emit(json{{"command", "converge"},
              {"dims", dims},
              {"coin_set", set_name},
              {"mass", spec.mass},
              {"box_length", spec.box_length},
              {"base_n", spec.base_n},
              {"base_steps", spec.base_steps},
              {"levels", spec.levels},
              {"sigma", spec.sigma},
              {"k0", direction_json(spec.k0, dims)},
              {"fitted_order", result.fitted_order},
              {"rows", rows},
              {"csv", "converge.csv"}});
    return kExitPass;
}

// --- dispersion ----------------------------------------------------------------------

int run_dispersion(const CommonOpts& common, const json& cfg, int dims_flag, bool dims_given,
                   double kmax_flag, bool kmax_given) {
    check_keys(cfg, with_common({"dims", "coin_set", "mass", "dx", "kmax", "samples", "direction"}),
               "config");

    int dims = 1;
    if (cfg.contains("dims")) dims = jint(cfg.at("dims"), "config.dims");
    if (dims_given) dims = dims_flag;
    if (dims != 1 && dims != 3) throw std::invalid_argument("dims: must be 1 or 3");

    std::string set_name = dims == 1 ? "line" : "dirac";
    double mass = 0.25;
    double dx = 0.5;
    double kmax = 0.5;
    int samples = 32;
    std::array<double, 3> direction = dims == 1 ? std::array<double, 3>{1.0, 0.0, 0.0}
                                                : std::array<double, 3>{1.0, 1.0, 1.0};

    if (cfg.contains("coin_set")) set_name = jstr(cfg.at("coin_set"), "config.coin_set");
    if (cfg.contains("mass")) mass = jnum(cfg.at("mass"), "config.mass");
    if (cfg.contains("dx")) dx = jnum(cfg.at("dx"), "config.dx");
    if (cfg.contains("kmax")) kmax = jnum(cfg.at("kmax"), "config.kmax");
    if (kmax_given) kmax = kmax_flag;
    if (cfg.contains("samples")) samples = jint(cfg.at("samples"), "config.samples");
    if (cfg.contains("direction")) direction = jvec3(cfg.at("direction"), dims, "config.direction");

    if (!(kmax > 0.0)) throw std::invalid_argument("kmax: must be positive");
    if (samples < 1) throw std::invalid_argument("samples: must be positive");
    double dir_norm = 0.0;
    for (double c : direction) dir_norm += c * c;
    dir_norm = std::sqrt(dir_norm);
    if (dir_norm == 0.0) throw std::invalid_argument("direction: must be nonzero");
    for (double c : direction)
        if (std::abs(c) / dir_norm * kmax * dx > std::numbers::pi + 1e-12)
            throw std::invalid_argument("kmax: outside the Brillouin zone for this dx");

    // The lattice size is irrelevant to fiber-level dispersion; any valid n do.
    const WalkParams params = make_walk_params(dims, 8, dx, mass);
    const StepOperator op = make_step_operator(params, resolve_coin_set(set_name));

    std::vector<std::array<double, 3>> ks;
    ks.reserve(static_cast<std::size_t>(samples));
    for (int i = 1; i <= samples; ++i) {
        const double mag = kmax * static_cast<double>(i) / static_cast<double>(samples);
        std::array<double, 3> k{0.0, 0.0, 0.0};
        for (int a = 0; a < dims; ++a)
            k[static_cast<std::size_t>(a)] = direction[static_cast<std::size_t>(a)] / dir_norm * mag;
        ks.push_back(k);
    }

    const std::vector<DispersionRow> rows = dispersion_table(op, ks);
    double max_residual = 0.0;
    for (const DispersionRow& row : rows)
        for (double r : row.residual) max_residual = std::max(max_residual, r);

    const std::filesystem::path dir = prepare_out_dir(common);
    std::ostringstream os;
    write_dispersion_csv(rows, os);
    write_text_file(dir / "dispersion.csv", os.str());

    emit(json{{"command", "dispersion"},
              {"dims", dims},
              {"coin_set", set_name},
              {"mass", mass},
              {"dx", dx},
              {"kmax", kmax},
              {"samples", samples},
              {"direction", direction_json(direction, dims)},
              {"max_residual", max_residual},
              {"csv", "dispersion.csv"}});
    return kExitPass;
}

// --- anisotropy ----------------------------------------------------------------------

int run_anisotropy(const CommonOpts& common, const json& cfg) {
    check_keys(cfg, with_common({"coin_set", "mass", "dx", "k_mags", "dir_a", "dir_b"}), "config");

    std::string set_name = "dirac";
    double mass = 0.3;
    double dx = 1.0;
    std::vector<double> k_mags{0.1, 0.2, 0.3, 0.4, 0.5};
    std::array<double, 3> dir_a{1.0, 0.0, 0.0};
    std::array<double, 3> dir_b{1.0, 1.0, 1.0};

    if (cfg.contains("coin_set")) set_name = jstr(cfg.at("coin_set"), "config.coin_set");
    if (cfg.contains("mass")) mass = jnum(cfg.at("mass"), "config.mass");
    if (cfg.contains("dx")) dx = jnum(cfg.at("dx"), "config.dx");
    if (cfg.contains("k_mags")) {
        if (!cfg.at("k_mags").is_array() || cfg.at("k_mags").empty())
            throw std::invalid_argument("config.k_mags: expected a nonempty array");
        k_mags.clear();
        for (const json& v : cfg.at("k_mags")) k_mags.push_back(jnum(v, "config.k_mags"));
    }
    if (cfg.contains("dir_a")) dir_a = jvec3(cfg.at("dir_a"), 3, "config.dir_a");
    if (cfg.contains("dir_b")) dir_b = jvec3(cfg.at("dir_b"), 3, "config.dir_b");

    const CoinSet set = resolve_coin_set(set_name);
    const WalkParams params = make_walk_params(3, 8, dx, mass);
    const StepOperator op = make_step_operator(params, set);

    std::vector<AnisotropyEntry> entries;
    json rows = json::array();
    double max_continuum = 0.0;
    for (double k : k_mags) {
        const double walk_delta = anisotropy(op, k, dir_a, dir_b);
        const double cont_delta = continuum_anisotropy(set.dim, mass, 3, k, dir_a, dir_b);
        max_continuum = std::max(max_continuum, cont_delta);
        entries.push_back({k, direction_label(dir_a), direction_label(dir_b), walk_delta});
        rows.push_back({{"k_mag", k},
                        {"delta_omega", walk_delta},
                        {"continuum_delta_omega", cont_delta}});
    }

    const std::filesystem::path dir = prepare_out_dir(common);
    std::ostringstream os;
    write_anisotropy_csv(entries, os);
    write_text_file(dir / "anisotropy.csv", os.str());

    emit(json{{"command", "anisotropy"},
              {"coin_set", set_name},
              {"mass", mass},
              {"dx", dx},
              {"dir_a", direction_json(dir_a, 3)},
              {"dir_b", direction_json(dir_b, 3)},
              {"rows", rows},
              {"max_continuum_delta", max_continuum},
              {"csv", "anisotropy.csv"}});
    return kExitPass;
}

// --- phase-shift ----------------------------------------------------------------------

int run_phase_shift(const json& cfg, double p_flag, bool p_given, double v_flag, bool v_given,
                    double l_flag, bool l_given, double dx_flag, bool dx_given) {
    check_keys(cfg, with_common({"p", "v", "L", "dx"}), "config");

    InterferometerScenario s;
    s.v = 2200.0;
    s.L = 1.0;
    s.dx = kPlanckLengthSI;
    if (cfg.contains("v")) s.v = jnum(cfg.at("v"), "config.v");
    if (v_given) s.v = v_flag;
    if (cfg.contains("L")) s.L = jnum(cfg.at("L"), "config.L");
    if (l_given) s.L = l_flag;
    if (cfg.contains("dx")) s.dx = jnum(cfg.at("dx"), "config.dx");
    if (dx_given) s.dx = dx_flag;

    // Default momentum: a massive nonrelativistic probe at the given speed.
    s.p = kNeutronMassSI * s.v;
    if (cfg.contains("p")) s.p = jnum(cfg.at("p"), "config.p");
    if (p_given) s.p = p_flag;

    const double delta_phi = phase_shift_estimate(s);
    emit(json{{"command", "phase-shift"},
              {"scenario", {{"p", s.p}, {"v", s.v}, {"L", s.L}, {"dx", s.dx}}},
              {"delta_phi", delta_phi},
              {"delta_phi_per_meter_dx", delta_phi / s.dx}});
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice walk toolkit: algebra certification, evolution, and continuum checks"};
    app.require_subcommand(1);

    std::array<CommonOpts, 6> common;

    CLI::App* c_check = app.add_subcommand("check-algebra", "Certify a coin set's operator algebra");
    add_common(c_check, common[0]);
    std::string set_arg;
    CLI::Option* o_set = c_check->add_option("--set", set_arg, "Named set (dirac, weyl, line) or JSON file");
    std::string set_file;
    CLI::Option* o_set_file = c_check->add_option("--set-file", set_file, "Coin set JSON file");
    o_set->excludes(o_set_file);

    CLI::App* c_evolve = app.add_subcommand("evolve", "Run a walk and write state snapshots");
    add_common(c_evolve, common[1]);
    int steps_flag = 0;
    CLI::Option* o_steps = c_evolve->add_option("--steps", steps_flag, "Number of steps (overrides config)");

    CLI::App* c_converge = app.add_subcommand("converge", "Walk-vs-continuum refinement study");
    add_common(c_converge, common[2]);
    int conv_dims = 1, conv_levels = 0;
    CLI::Option* o_cdims = c_converge->add_option("--dims", conv_dims, "Lattice dimension (1 or 3)");
    CLI::Option* o_clevels = c_converge->add_option("--levels", conv_levels, "Refinement levels");

    CLI::App* c_disp = app.add_subcommand("dispersion", "Tabulate walk vs continuum branches");
    add_common(c_disp, common[3]);
    int disp_dims = 1;
    double disp_kmax = 0.5;
    CLI::Option* o_ddims = c_disp->add_option("--dims", disp_dims, "Lattice dimension (1 or 3)");
    CLI::Option* o_dkmax = c_disp->add_option("--kmax", disp_kmax, "Largest sampled |k|");

    CLI::App* c_aniso = app.add_subcommand("anisotropy", "Direction dependence of the walk dispersion");
    add_common(c_aniso, common[4]);

    CLI::App* c_phase = app.add_subcommand("phase-shift", "Accumulated interferometer phase estimate");
    add_common(c_phase, common[5]);
    double ps_p = 0.0, ps_v = 0.0, ps_l = 0.0, ps_dx = 0.0;
    CLI::Option* o_pp = c_phase->add_option("--p", ps_p, "Probe momentum (kg m/s)");
    CLI::Option* o_pv = c_phase->add_option("--v", ps_v, "Probe speed (m/s)");
    CLI::Option* o_pl = c_phase->add_option("--L", ps_l, "Arm length (m)");
    CLI::Option* o_pdx = c_phase->add_option("--dx", ps_dx, "Lattice spacing (m)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    const std::array<CLI::App*, 6> cmds{c_check, c_evolve, c_converge, c_disp, c_aniso, c_phase};
    int active = -1;
    for (int i = 0; i < 6; ++i)
        if (cmds[static_cast<std::size_t>(i)]->parsed()) active = i;

    try {
        CommonOpts& c = common[static_cast<std::size_t>(active)];
        const json cfg = load_config(c.config_path);
        apply_common_config(cfg, c);
        if (c.threads > 0) set_thread_count(c.threads);

        switch (active) {
            case 0: {
                std::string chosen = set_arg;
                bool given = o_set->count() > 0;
                if (o_set_file->count() > 0) {
                    chosen = set_file;
                    given = true;
                }
                return run_check_algebra(c, cfg, chosen, given);
            }
            case 1:
                return run_evolve(c, cfg, steps_flag, o_steps->count() > 0);
            case 2:
                return run_converge(c, cfg, conv_dims, o_cdims->count() > 0, conv_levels,
                                    o_clevels->count() > 0);
            case 3:
                return run_dispersion(c, cfg, disp_dims, o_ddims->count() > 0, disp_kmax,
                                      o_dkmax->count() > 0);
            case 4:
                return run_anisotropy(c, cfg);
            case 5:
                return run_phase_shift(cfg, ps_p, o_pp->count() > 0, ps_v, o_pv->count() > 0, ps_l,
                                       o_pl->count() > 0, ps_dx, o_pdx->count() > 0);
            default:
                return kExitUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
