// Command-line driver: spectrum, measure, correlate, gff, wh, convergence, mc, verify.

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sixv/acceptance.hpp"
#include "sixv/correlation.hpp"
#include "sixv/montecarlo.hpp"
#include "sixv/spectral.hpp"
#include "sixv/wienerhopf.hpp"

namespace fs = std::filesystem;
using namespace sixv;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kOutEnv = "SIXV_OUT_DIR";
constexpr int kExitUsage = 1;
constexpr int kExitAcceptance = 2;

// Bad flags or values outside the module caps.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string subcommand;
    std::vector<int> L;
    std::vector<double> c;
    std::vector<double> zeta;
    int M = 0;
    long sweeps = 0;
    long burn_in = 1000;
    int chains = 0;
    std::uint64_t seed = 1;
    std::string out;
    std::vector<double> grid_h;
    std::vector<double> cutoff_X;
    std::optional<double> tolerance;
    std::string geometry = "even";
    int W = 32;
    int H = 32;
    std::string quad;
    std::vector<int> criteria;
    int threads = 0;
};

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {buf, r.ptr};
}

std::string num(long v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string csv() const {
        std::string s;
        auto line = [&s](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) s += ',';
                const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
                if (!quote) {
                    s += cells[i];
                    continue;
                }
                s += '"';
                for (char ch : cells[i]) s += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                s += '"';
            }
            s += '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return s;
    }
};

// Grid points run on a pool; results keep the input order.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t n, int threads, F f) {
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    int t = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    t = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), std::max<std::size_t>(n, 1)));
    if (t <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < t; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<int> Ls(const RunConfig& cfg, std::vector<int> fallback) {
    auto v = cfg.L.empty() ? std::move(fallback) : cfg.L;
    for (int L : v)
        if (L < 2 || L % 2 || L > kDefaultMaxL)
            throw UsageError("L must be even in [2, " + std::to_string(kDefaultMaxL) + "], got " + std::to_string(L));
    return v;
}

std::vector<double> Cs(const RunConfig& cfg, std::vector<double> fallback) {
    auto v = cfg.c.empty() ? std::move(fallback) : cfg.c;
    for (double c : v)
        if (!(c > 0 && c <= 2)) throw UsageError("c must lie in (0, 2], got " + num(c));
    return v;
}

std::vector<Face> parse_points(const std::string& s) {
    std::vector<Face> pts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        Face f;
        char comma = 0;
        std::stringstream is(item);
        if (!(is >> f.x >> comma >> f.y) || comma != ',') throw UsageError("bad point '" + item + "' (expected x,y)");
        pts.push_back(f);
    }
    if (pts.empty() || pts.size() % 2) throw UsageError("--quad needs an even number of points");
    return pts;
}

std::string join_points(const std::vector<Face>& pts) {
    std::string s;
    for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? ";" : "") + std::to_string(pts[i].x) + "," + std::to_string(pts[i].y);
    return s;
}

// ---- subcommands ----

Table cmd_spectrum(const RunConfig& cfg) {
    const auto Lv = Ls(cfg, {2, 4, 6, 8});
    const auto cv = Cs(cfg, {std::sqrt(3.0)});
    std::vector<std::pair<int, double>> grid;
    for (int L : Lv)
        for (double c : cv) grid.emplace_back(L, c);
    const double tol = cfg.tolerance.value_or(kEigenResidualTol);
    Table t{{"L", "c", "delta", "basis_size", "sectors", "lambda0", "second_Lambda", "max_residual", "residual_ok"}, {}};
    t.rows = parallel_map<std::vector<std::string>>(grid.size(), cfg.threads, [&](std::size_t i) {
        const auto [L, c] = grid[i];
        const EigenSystem sys = build_and_codiagonalize(L, ModelParams::from_c(c));
        std::vector<double> mags;
        for (std::size_t k = 0; k < sys.size(); ++k) mags.push_back(std::abs(sys.Lambda(k)));
        std::sort(mags.rbegin(), mags.rend());
        return std::vector<std::string>{num(L), num(c), num(sys.params().delta()), num(static_cast<long>(sys.basis().size())),
                                        num(static_cast<long>(sys.sectors().size())), num(sys.lambda0()),
                                        num(mags.size() > 1 ? mags[1] : 0.0), num(sys.max_residual()),
                                        sys.max_residual() <= tol ? "1" : "0"};
    });
    return t;
}

std::vector<Table> cmd_measure(const RunConfig& cfg) {
    const auto Lv = Ls(cfg, {2, 4, 6, 8});
    const auto cv = Cs(cfg, {std::sqrt(3.0)});
    std::vector<std::pair<int, double>> grid;
    for (int L : Lv)
        for (double c : cv) grid.emplace_back(L, c);
    struct Point {
        std::vector<std::vector<std::string>> atoms;
        std::vector<std::string> summary;
    };
    const auto pts = parallel_map<Point>(grid.size(), cfg.threads, [&](std::size_t i) {
        const auto [L, c] = grid[i];
        const ModelParams p = ModelParams::from_c(c);
        const SpectralMeasure mu = spectral_measure(build_and_codiagonalize(L, p));
        Point pt;
        for (const auto& a : mu.atoms) pt.atoms.push_back({num(L), num(c), num(a.a), num(a.b), num(a.weight)});
        const auto conc = rescale_and_concentrate(mu, 4.0 / L, 0.2, 0.5, 3.0, 5, sigma_squared(p).value);
        const auto cm = class_m_report(mu, 0.5);
        pt.summary = {num(L),
                      num(c),
                      num(static_cast<long>(mu.atoms.size())),
                      num(mu.total_mass()),
                      num(conc.window_mass),
                      num(conc.cone_fraction),
                      conc.empty ? "nan" : num(conc.rank_correlation),
                      num(cm.sup_strip),
                      num(cm.sup_box)};
        return pt;
    });
    Table atoms{{"L", "c", "a", "b", "weight"}, {}};
    Table summary{{"L", "c", "atoms", "total_mass", "window_mass", "cone_fraction", "rank_correlation", "sup_strip", "sup_box"}, {}};
    for (const auto& pt : pts) {
        atoms.rows.insert(atoms.rows.end(), pt.atoms.begin(), pt.atoms.end());
        summary.rows.push_back(pt.summary);
    }
    return {atoms, summary};
}

Table cmd_correlate(const RunConfig& cfg, bool& agree) {
    const auto Lv = Ls(cfg, {4, 6});
    const auto cv = Cs(cfg, {std::sqrt(3.0)});
    const auto pts = parse_points(cfg.quad.empty() ? "0,0;1,0;2,0;3,0" : cfg.quad);
    if (pts.size() != 4) throw UsageError("correlate needs a four-point quad");
    const PointQuad q{pts};
    if (!q.horizontally_ordered()) throw UsageError("quad must be horizontally ordered");
    if (cfg.M < 0) throw UsageError("M must be non-negative");
    const double tol = cfg.tolerance.value_or(1e-10);
    std::vector<std::pair<int, double>> grid;
    for (int L : Lv)
        for (double c : cv) grid.emplace_back(L, c);
    Table t{{"L", "c", "quad", "spectral", "direct", "abs_diff", "M", "torus_transfer", "torus_brute"}, {}};
    std::atomic<bool> ok{true};
    t.rows = parallel_map<std::vector<std::string>>(grid.size(), cfg.threads, [&](std::size_t i) {
        const auto [L, c] = grid[i];
        const ModelParams p = ModelParams::from_c(c);
        const EigenSystem sys = build_and_codiagonalize(L, p);
        const double s = cylinder_two_point_spectral(spectral_measure(sys), q);
        const double d = cylinder_two_point_direct(sys, q);
        if (std::abs(s - d) > tol) ok = false;
        double tt = NAN, tb = NAN;
        if (cfg.M > 0) {
            const TorusChain chain(cfg.M, L, p);
            tt = DirectCorrelator::torus(chain, L).two_point(q);
            if (cfg.M * L <= kBruteForceCap)
                tb = torus_brute_force(cfg.M, L, p, [&](const TorusConfig& tc) {
                    return double(tc.height_difference(pts[0], pts[1])) * tc.height_difference(pts[2], pts[3]);
                });
        }
        return std::vector<std::string>{num(L), num(c), join_points(pts), num(s), num(d), num(std::abs(s - d)),
                                        num(cfg.M), num(tt), num(tb)};
    });
    agree = ok;
    return t;
}

Table cmd_gff(const RunConfig& cfg) {
    const auto cv = Cs(cfg, {1.0, std::numbers::sqrt2, std::sqrt(3.0), 2.0});
    const auto pts = parse_points(cfg.quad.empty() ? "0,0;1,0;2,0;3,0" : cfg.quad);
    std::vector<Point2> p2;
    for (const Face f : pts) p2.push_back({double(f.x), double(f.y)});
    Table t{{"c", "delta", "zeta", "sigma2", "via_arccos", "via_arcsin", "quad", "gff_value"}, {}};
    for (double c : cv) {
        const ModelParams p = ModelParams::from_c(c);
        const SigmaSquared s = sigma_squared(p);
        t.rows.push_back({num(c), num(p.delta()), num(p.zeta()), num(s.value), num(s.via_arccos), num(s.via_arcsin),
                          join_points(pts), num(gff_k_point(p2, s.value))});
    }
    return t;
}

wh::WHParams wh_params(const RunConfig& cfg, double zeta) {
    wh::WHParams p;
    p.zeta = zeta;
    if (!cfg.grid_h.empty()) p.h = cfg.grid_h.front();
    if (!cfg.cutoff_X.empty()) p.X = cfg.cutoff_X.front();
    if (cfg.tolerance) p.tol = *cfg.tolerance;
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return p;
}

// Rounded inputs just above the endpoint 2pi/3 are snapped to it.
std::vector<double> zetas(const RunConfig& cfg) {
    if (!cfg.zeta.empty()) {
        const double top = 2 * std::numbers::pi / 3;
        std::vector<double> z = cfg.zeta;
        for (double& v : z)
            if (v > top && v <= top + 1e-4) {
                std::cerr << "note: zeta " << num(v) << " snapped to 2pi/3\n";
                v = top;
            }
        return z;
    }
    if (!cfg.c.empty()) {
        std::vector<double> z;
        for (double c : Cs(cfg, {})) {
            if (c < 1.0) throw UsageError("the Wiener-Hopf sweep needs c in [1, 2]");
            z.push_back(wh::WHParams::from_c(c).zeta);
        }
        return z;
    }
    const double pi = std::numbers::pi;
    return {0.0, pi / 6, pi / 3, pi / 2, 2 * pi / 3};
}

Table cmd_wh(const RunConfig& cfg) {
    const auto zs = zetas(cfg);
    std::vector<wh::WHParams> ps;
    for (double z : zs) ps.push_back(wh_params(cfg, z));
    Table t{{"zeta", "c", "ratio_target", "ratio_neumann", "ratio_closed", "fpp_exact", "fpp_closed", "fpp_neumann", "fpp_rh",
             "residual", "iterations"},
            {}};
    t.rows = parallel_map<std::vector<std::string>>(ps.size(), cfg.threads, [&](std::size_t i) {
        const wh::WHParams& p = ps[i];
        const double c = 2 * std::sin((std::numbers::pi - p.zeta) / 2);
        const wh::WHSolution s = wh::solve_neumann(p);
        const wh::ClosedFormSolution cf = wh::T_closed_form(p, false);
        const wh::FComparison f = wh::f_second_derivative_all(p);
        return std::vector<std::string>{num(p.zeta),      num(c),         num(wh::ratio_target(p.zeta)),
                                        num(s.ratio()),   num(cf.ratio()), num(-std::asin(c / 2)),
                                        num(f.closed),    num(f.neumann), num(f.rh),
                                        num(s.residual),  num(s.iterations)};
    });
    return t;
}

Table cmd_convergence(const RunConfig& cfg) {
    const auto zs = cfg.zeta.empty() ? std::vector<double>{std::numbers::pi / 6} : zetas(cfg);
    const auto hs = cfg.grid_h.empty() ? std::vector<double>{0.04, 0.02, 0.01} : cfg.grid_h;
    const auto Xs = cfg.cutoff_X.empty() ? std::vector<double>{20.0, 40.0} : cfg.cutoff_X;
    for (double h : hs)
        for (double X : Xs) {
            RunConfig probe = cfg;
            probe.grid_h = {h};
            probe.cutoff_X = {X};
            for (double z : zs) wh_params(probe, z);
        }
    Table t{{"zeta", "h", "X", "ratio", "ratio_error"}, {}};
    const auto per_zeta = parallel_map<std::vector<wh::ConvergenceRow>>(
        zs.size(), cfg.threads, [&](std::size_t i) { return wh::convergence_study(zs[i], hs, Xs); });
    for (std::size_t i = 0; i < zs.size(); ++i)
        for (const auto& r : per_zeta[i]) t.rows.push_back({num(zs[i]), num(r.h), num(r.X), num(r.ratio), num(r.ratio_error)});
    return t;
}

Table cmd_mc(const RunConfig& cfg) {
    using namespace sixv::mc;
    const auto cv = Cs(cfg, {std::sqrt(3.0)});
    const double c = cv.front();
    Geometry g;
    if (cfg.geometry == "torus") {
        const int M = cfg.M > 0 ? cfg.M : 8;
        const int L = cfg.L.empty() ? 8 : cfg.L.front();
        if (M % 2 || L % 2 || M < 2 || L < 2 || M > 512 || L > 512) throw UsageError("torus needs even M, L in [2, 512]");
        g = Geometry::torus(M, L);
    } else if (cfg.geometry == "even") {
        if (cfg.W % 2 || cfg.H % 2 || cfg.W < 4 || cfg.H < 4 || cfg.W > 512 || cfg.H > 512)
            throw UsageError("even domain needs even W, H in [4, 512]");
        g = Geometry::even_domain(cfg.W, cfg.H);
    } else {
        throw UsageError("geometry must be 'even' or 'torus'");
    }
    MCParams p;
    p.model = ModelParams::from_c(c);
    p.samples = cfg.sweeps > 0 ? cfg.sweeps : 10000;
    p.burn_in = cfg.burn_in;
    p.chains = cfg.chains > 0 ? cfg.chains : 1;
    p.seed = cfg.seed;
    p.threads = cfg.threads;
    if (p.chains > 256 || p.samples > 100000000L || p.burn_in < 0) throw UsageError("MC budget outside caps");
    const bool torus = g.kind() == Geometry::Kind::torus;
    const Face centre{g.width() / 2, g.height() / 2};
    std::vector<std::string> names;
    std::vector<FieldObservable> obs;
    names.push_back(torus ? "centre_minus_origin_sq" : "centre_height_sq");
    obs.push_back([centre, torus](const HeightField& f) {
        const double d = torus ? f.at(centre) - f.at({0, 0}) : f.at(centre);
        return d * d;
    });
    if (!cfg.quad.empty()) {
        const auto pts = parse_points(cfg.quad);
        for (const Face q : pts)
            if (!g.in_domain(g.index(q.x, q.y))) throw UsageError("quad point outside the geometry");
        names.push_back("quad " + join_points(pts));
        obs.push_back([pts](const HeightField& f) { return height_product(f, pts); });
    }
    if (!torus) {
        // Spin and tree statistics use a generator keyed by the chain position.
        auto spins = [p](const HeightField& f) {
            CounterRng rng(f.seed ^ 0x6a09e667f3bcc908ULL, (f.stream << 40) ^ f.counter);
            return sample_spin_config(f, p.model, rng);
        };
        const int R = std::min(g.width(), g.height()) / 2 - 1;
        names.push_back("tree_depth_centre");
        obs.push_back([spins, centre](const HeightField& f) { return build_level_line_tree(spins(f)).depth(centre); });
        names.push_back("tree_odd_vertices");
        obs.push_back([spins](const HeightField& f) { return build_level_line_tree(spins(f)).odd_vertex_count(); });
        names.push_back("alternating_circuits_centre");
        obs.push_back([spins, centre, R](const HeightField& f) {
            return count_alternating(spins(f), Region::annulus(centre, 1, R), AltMode::circuit);
        });
    }
    const auto est = run_chains(g, p, obs);
    Table t{{"observable", "mean", "stderr", "tau", "samples", "batches", "sufficient", "note"}, {}};
    for (std::size_t i = 0; i < est.size(); ++i)
        t.rows.push_back({names[i], num(est[i].mean), num(est[i].stderr_), num(est[i].tau), num(est[i].samples),
                          num(est[i].batches), est[i].sufficient ? "1" : "0", est[i].note});
    return t;
}

Table cmd_verify(const RunConfig& cfg, bool& passed, nlohmann::json& timing) {
    acceptance::Options opt;
    opt.seed = cfg.seed;
    opt.threads = cfg.threads;
    if (cfg.sweeps > 0) opt.exactness_sweeps = cfg.sweeps;
    if (cfg.chains > 0) opt.gff_chains = cfg.chains;
    for (int id : cfg.criteria)
        if (id < 1 || id > acceptance::kCriteria) throw UsageError("unknown criterion " + std::to_string(id));
    const auto results = acceptance::run_all(opt, cfg.criteria, [](const acceptance::CriterionResult& r) {
        std::fprintf(stderr, "[%s] %2d %-32s %8.1fs  %s\n", acceptance::status_name(r.status), r.id, r.name.c_str(),
                     r.seconds, r.detail.c_str());
    });
    Table t{{"id", "criterion", "status", "soft", "detail"}, {}};
    for (const auto& r : results) {
        t.rows.push_back({num(r.id), r.name, acceptance::status_name(r.status), r.soft ? "1" : "0", r.detail});
        timing[std::to_string(r.id)] = r.seconds;
    }
    passed = acceptance::all_passed(results);
    return t;
}

std::string timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

nlohmann::json parameters(const RunConfig& cfg) {
    nlohmann::json j;
    j["L"] = cfg.L;
    j["c"] = cfg.c;
    j["zeta"] = cfg.zeta;
    j["M"] = cfg.M;
    j["sweeps"] = cfg.sweeps;
    j["burn_in"] = cfg.burn_in;
    j["chains"] = cfg.chains;
    j["seed"] = cfg.seed;
    j["grid_h"] = cfg.grid_h;
    j["cutoff_X"] = cfg.cutoff_X;
    j["tolerance"] = cfg.tolerance ? nlohmann::json(*cfg.tolerance) : nlohmann::json();
    j["geometry"] = cfg.geometry;
    j["W"] = cfg.W;
    j["H"] = cfg.H;
    j["quad"] = cfg.quad;
    j["criteria"] = cfg.criteria;
    j["threads"] = cfg.threads;
    return j;
}

void emit(const RunConfig& cfg, const std::vector<std::pair<std::string, Table>>& tables, nlohmann::json extra) {
    std::cout << tables.front().second.csv();
    if (cfg.out.empty()) return;
    const fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, table] : tables) {
        const fs::path file = dir / (name + ".csv");
        std::ofstream os(file, std::ios::binary);
        if (!(os << table.csv())) throw std::runtime_error("cannot write " + file.string());
        files.push_back(file.filename().string());
    }
    nlohmann::json m;
    m["subcommand"] = cfg.subcommand;
    m["parameters"] = parameters(cfg);
    m["seed"] = cfg.seed;
    m["files"] = files;
    m["versions"] = {{"sixv", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__},
                     {"cplusplus", __cplusplus}};
    m["timestamp"] = timestamp();
    if (!extra.is_null()) m["extra"] = std::move(extra);
    std::ofstream os(dir / (cfg.subcommand + ".manifest.json"));
    os << m.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Six-vertex transfer-matrix, spectral, Wiener-Hopf and Monte Carlo toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value configuration file; flags override it");
    RunConfig cfg;
    app.add_option("--L", cfg.L, "cylinder circumferences (comma list); torus height for mc")->delimiter(',');
    app.add_option("--c", cfg.c, "vertex weights c (comma list)")->delimiter(',');
    app.add_option("--zeta", cfg.zeta, "Wiener-Hopf anisotropy values (comma list)")->delimiter(',');
    app.add_option("--M", cfg.M, "torus columns");
    app.add_option("--sweeps", cfg.sweeps, "MC samples per chain (mc) or exactness sweeps (verify)");
    app.add_option("--burn-in", cfg.burn_in, "MC burn-in sweeps");
    app.add_option("--chains", cfg.chains, "independent MC chains");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--out", cfg.out, "output directory for CSV files and the manifest")->envname(kOutEnv);
    app.add_option("--grid-h", cfg.grid_h, "Wiener-Hopf grid spacing (comma list for convergence)")->delimiter(',');
    app.add_option("--cutoff-X", cfg.cutoff_X, "Wiener-Hopf cutoff (comma list for convergence)")->delimiter(',');
    app.add_option("--tolerance", cfg.tolerance, "agreement or iteration tolerance");
    app.add_option("--geometry", cfg.geometry, "mc geometry: even or torus");
    app.add_option("--W", cfg.W, "even domain width");
    app.add_option("--H", cfg.H, "even domain height");
    app.add_option("--quad", cfg.quad, "points as x,y;x,y;...");
    app.add_option("--criteria", cfg.criteria, "acceptance criteria to run (comma list)")->delimiter(',');
    app.add_option("--threads", cfg.threads, "worker threads (0: hardware concurrency)");
    for (const char* name : {"spectrum", "measure", "correlate", "gff", "wh", "convergence", "mc", "verify"})
        app.add_subcommand(name)->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    try {
        const std::string& s = cfg.subcommand;
        if (s == "spectrum") {
            emit(cfg, {{"spectrum", cmd_spectrum(cfg)}}, {});
        } else if (s == "measure") {
            auto t = cmd_measure(cfg);
            emit(cfg, {{"measure", t[0]}, {"measure_summary", t[1]}}, {});
        } else if (s == "correlate") {
            bool agree = true;
            emit(cfg, {{"correlate", cmd_correlate(cfg, agree)}}, {});
            if (!agree) {
                std::cerr << "spectral and direct correlators disagree beyond the tolerance\n";
                return kExitAcceptance;
            }
        } else if (s == "gff") {
            emit(cfg, {{"gff", cmd_gff(cfg)}}, {});
        } else if (s == "wh") {
            emit(cfg, {{"wh", cmd_wh(cfg)}}, {});
        } else if (s == "convergence") {
            emit(cfg, {{"convergence", cmd_convergence(cfg)}}, {});
        } else if (s == "mc") {
            emit(cfg, {{"mc", cmd_mc(cfg)}}, {});
        } else {
            bool passed = false;
            nlohmann::json timing;
            auto t = cmd_verify(cfg, passed, timing);
            emit(cfg, {{"verify", t}}, {{"seconds", timing}});
            return passed ? 0 : kExitAcceptance;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return 0;
}
