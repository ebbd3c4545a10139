// beltrami: command-line driver over the C API.
//
//   beltrami solve --map kabs:0.3 --grid 128 --h bump:0.5,0,0.3 --mean 1,0 --out run
//   beltrami probe --builtin radial:2 --grid 128 --out probe
//   beltrami verify-transform --a 0.5,0 --b 0,0
//
// Exit codes: 0 success, 1 usage or input error, 2 non-convergence (or a
// failed verification).

#include <beltrami/beltrami.h>

#include <CLI11.hpp>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bt_status s) {
  if (s != BT_OK) throw UsageError(bt_last_error());
}

struct FieldDeleter {
  void operator()(bt_field* f) const { bt_field_free(f); }
};
struct MapDeleter {
  void operator()(bt_map* m) const { bt_map_free(m); }
};
struct ReportDeleter {
  void operator()(bt_report* r) const { bt_report_free(r); }
};
struct RegularityDeleter {
  void operator()(bt_regularity* r) const { bt_regularity_free(r); }
};
using Field = std::unique_ptr<bt_field, FieldDeleter>;
using Map = std::unique_ptr<bt_map, MapDeleter>;
using Report = std::unique_ptr<bt_report, ReportDeleter>;
using Regularity = std::unique_ptr<bt_regularity, RegularityDeleter>;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    char* end = nullptr;
    const double v = std::strtod(piece.c_str(), &end);
    if (piece.empty() || end != piece.c_str() + piece.size() || !std::isfinite(v))
      throw UsageError(std::string("cannot parse ") + what + " '" + text + "'");
    out.push_back(v);
  }
  return out;
}

std::array<double, 2> parse_complex(const std::string& text, const char* what) {
  const auto v = parse_list(text, what);
  if (v.size() != 2) throw UsageError(std::string(what) + " must be 're,im', got '" + text + "'");
  return {v[0], v[1]};
}

// Options shared by commands that obtain a field by solving.
struct SolveConfig {
  std::string map;
  int grid = 64;
  double period = 2.0 * std::numbers::pi;
  std::string mean = "1,0";
  std::string h;
  double tol = 1e-10;
  int max_iter = 1000;
  double damping = 1.0;
  std::string solver = "auto";
  std::uint64_t seed = 1;

  void add_to(CLI::App* app, bool map_required) {
    auto* m = app->add_option("--map", map, "map grammar, e.g. kabs:0.3 or linear:0.5,0,0,0+zterm:0.02,1,0");
    if (map_required) m->required();
    app->add_option("--grid", grid, "grid points per axis (power of two >= 16)")->capture_default_str();
    app->add_option("--period", period, "torus period")->capture_default_str();
    app->add_option("--mean", mean, "prescribed mean of f_z as re,im")->capture_default_str();
    app->add_option("--h", h, "forcing: BFLD1 path, or mode:re,im,k1,k2 / bump:re,im,sigma terms joined by '+'");
    app->add_option("--tol", tol, "relative residual tolerance")->capture_default_str();
    app->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
    app->add_option("--damping", damping, "Picard damping for non-autonomous maps, in (0,1]")->capture_default_str();
    app->add_option("--solver", solver, "auto, neumann or changevar (the last two need a linear: map)")
        ->check(CLI::IsMember({"auto", "neumann", "changevar"}))
        ->capture_default_str();
    app->add_option("--seed", seed, "seed for randomized sampling")->capture_default_str();
  }

  json to_json() const {
    json j;
    j["map"] = map;
    j["grid"] = grid;
    j["period"] = period;
    j["mean"] = mean;
    j["h"] = h;
    j["tol"] = tol;
    j["max_iter"] = max_iter;
    j["damping"] = damping;
    j["solver"] = solver;
    j["seed"] = seed;
    return j;
  }

  // Forcing at grid size n; a file is used only when its grid matches.
  Field forcing(int n) const {
    if (h.empty()) return nullptr;
    bt_field* f = nullptr;
    if (fs::is_regular_file(h)) {
      check(bt_field_read(h.c_str(), &f));
      Field owned(f);
      if (bt_field_n(f) != n)
        throw UsageError("forcing file '" + h + "' has n=" + std::to_string(bt_field_n(f)) + ", need " +
                         std::to_string(n));
      return owned;
    }
    check(bt_field_from_forcing(h.c_str(), n, period, &f));
    return Field(f);
  }

  std::pair<Field, Report> solve(int n) const {
    Map m = parse_map();
    Field hf = forcing(n);
    bt_solve_options opt;
    bt_solve_options_default(&opt);
    const auto c = parse_complex(mean, "--mean");
    opt.c_mean[0] = c[0];
    opt.c_mean[1] = c[1];
    opt.tol = tol;
    opt.max_iter = max_iter;
    opt.damping = damping;
    opt.seed = seed;
    bt_field* out = nullptr;
    bt_report* rep = nullptr;
    if (solver == "auto") {
      check(bt_solve(m.get(), hf.get(), n, period, &opt, &out, &rep));
    } else {
      if (!bt_map_is_autonomous(m.get()) || map.rfind("linear:", 0) != 0)
        throw UsageError("--solver " + solver + " needs a plain linear: map");
      const auto v = parse_list(map.substr(7), "linear coefficients");
      const double a[2] = {v[0], v[1]}, b[2] = {v[2], v[3]};
      Field u = hf ? std::move(hf) : nullptr;
      if (!u) {
        bt_field* z = nullptr;
        check(bt_field_create(n, period, 0, 0, 0, 0, nullptr, &z));
        u.reset(z);
      }
      check(bt_solve_linear(a, b, u.get(), solver == "changevar" ? BT_LINEAR_CHANGEVAR : BT_LINEAR_NEUMANN, &opt,
                            &out, &rep));
    }
    return {Field(out), Report(rep)};
  }

  Map parse_map() const {
    bt_map* m = nullptr;
    check(bt_map_parse(map.c_str(), &m));
    return Map(m);
  }
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory '" + dir + "': " + ec.message());
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw UsageError("cannot write " + p.string());
  os << text;
}

void write_manifest(const std::string& dir, const std::string& command, const std::vector<std::string>& argv,
                    json config, json outputs) {
  json j;
  j["tool"] = "beltrami";
  j["version"] = bt_version();
  j["command"] = command;
  j["argv"] = argv;
  j["config"] = std::move(config);
  j["outputs"] = std::move(outputs);
  write_file(fs::path(dir) / "manifest.json", j.dump(2) + "\n");
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

// Obtains the analyzed field from --field or by solving.
struct FieldSource {
  std::string field_path;
  SolveConfig solve;

  Field load(json& info) const {
    if (!field_path.empty()) {
      bt_field* f = nullptr;
      check(bt_field_read(field_path.c_str(), &f));
      return Field(f);
    }
    if (solve.map.empty()) throw UsageError("need --field or --map");
    auto [f, rep] = solve.solve(solve.grid);
    info["solve_converged"] = bt_report_converged(rep.get()) != 0;
    info["solve_final_residual"] = bt_report_final_residual(rep.get());
    if (!bt_report_converged(rep.get())) throw std::runtime_error("solve did not converge");
    return std::move(f);
  }

  // Mask of the forcing-free region when requested and h is available.
  std::vector<uint8_t> mask(bool forcing_free, int n) const {
    if (!forcing_free) return {};
    Field h = solve.forcing(n);
    if (!h) return {};
    std::vector<uint8_t> m(static_cast<std::size_t>(n) * n);
    check(bt_forcing_free_mask(h.get(), 1e-12, m.data(), m.size()));
    return m;
  }
};

std::vector<double> default_p_grid() {
  std::vector<double> p;
  for (int i = 0; i <= 36; ++i) p.push_back(1.0 + 0.25 * i);
  return p;
}

// ---- commands ---------------------------------------------------------------

int cmd_solve(const SolveConfig& cfg, const std::string& out, const std::vector<std::string>& argv) {
  auto [f, rep] = cfg.solve(cfg.grid);
  ensure_dir(out);
  const fs::path dir(out);
  check(bt_field_write(f.get(), (dir / "solution.bfld").c_str()));
  check(bt_report_write_csv(rep.get(), (dir / "report.csv").c_str(), (dir / "summary.csv").c_str()));
  double range[2];
  check(bt_write_dz_graymap(f.get(), (dir / "dz.pgm").c_str(), range));
  const bool converged = bt_report_converged(rep.get()) != 0;
  json outputs;
  outputs["solution"] = "solution.bfld";
  outputs["report"] = "report.csv";
  outputs["summary"] = "summary.csv";
  outputs["heatmap"] = {{"file", "dz.pgm"}, {"quantity", "|f_z|"}, {"min", range[0]}, {"max", range[1]}};
  outputs["converged"] = converged;
  write_manifest(out, "solve", argv, cfg.to_json(), outputs);
  std::printf("iterations=%d final_residual=%s contraction_ratio=%s converged=%d\n", bt_report_iterations(rep.get()),
              fmt(bt_report_final_residual(rep.get())).c_str(), fmt(bt_report_contraction_ratio(rep.get())).c_str(),
              converged ? 1 : 0);
  if (*bt_report_warning(rep.get())) std::fprintf(stderr, "warning: %s\n", bt_report_warning(rep.get()));
  return converged ? kExitOk : kExitNotConverged;
}

struct ProbeConfig {
  std::string ladder;
  std::string builtin;
  int levels = 3;
  std::string p_list;
  bool second_order = false;
  double k = -1.0;
};

int cmd_probe(const SolveConfig& cfg, const ProbeConfig& pc, const std::string& out,
              const std::vector<std::string>& argv) {
  const std::vector<double> p_grid = pc.p_list.empty() ? default_p_grid() : parse_list(pc.p_list, "--p");
  bt_regularity* raw = nullptr;
  json info;
  if (!pc.builtin.empty() && pc.builtin.rfind("radial:", 0) == 0) {
    const double K = parse_list(pc.builtin.substr(7), "radial distortion").at(0);
    check(bt_probe_radial(cfg.grid, static_cast<size_t>(pc.levels), cfg.period, K, p_grid.data(), p_grid.size(), &raw));
  } else {
    std::vector<Field> fields;
    if (!pc.ladder.empty()) {
      std::stringstream ss(pc.ladder);
      std::string path;
      while (std::getline(ss, path, ',')) {
        bt_field* f = nullptr;
        check(bt_field_read(path.c_str(), &f));
        fields.emplace_back(f);
      }
    } else if (pc.builtin == "identity") {
      for (int i = 0; i < pc.levels; ++i) {
        bt_field* f = nullptr;
        check(bt_field_create(cfg.grid << i, cfg.period, 1, 0, 0, 0, nullptr, &f));
        fields.emplace_back(f);
      }
    } else if (!pc.builtin.empty()) {
      throw UsageError("unknown --builtin '" + pc.builtin + "' (expected radial:K or identity)");
    } else if (!cfg.map.empty()) {
      bool converged = true;
      for (int i = 0; i < pc.levels; ++i) {
        auto [f, rep] = cfg.solve(cfg.grid << i);
        converged = converged && bt_report_converged(rep.get());
        fields.push_back(std::move(f));
      }
      info["solves_converged"] = converged;
      if (!converged) {
        std::fprintf(stderr, "error: a ladder solve did not converge\n");
        return kExitNotConverged;
      }
    } else {
      throw UsageError("probe needs --ladder, --builtin or --map");
    }
    std::vector<const bt_field*> ptrs;
    for (const auto& f : fields) ptrs.push_back(f.get());
    double k = pc.k;
    if (pc.second_order && k < 0.0) {
      if (cfg.map.empty()) throw UsageError("--second-order needs --k or --map");
      k = bt_map_k(cfg.parse_map().get());
    }
    check(bt_probe_fields(ptrs.data(), ptrs.size(), p_grid.data(), p_grid.size(), pc.second_order ? 1 : 0, k, &raw));
  }
  Regularity r(raw);
  ensure_dir(out);
  check(bt_regularity_write_csv(r.get(), (fs::path(out) / "regularity.csv").c_str()));
  json config = cfg.to_json();
  config["ladder"] = pc.ladder;
  config["builtin"] = pc.builtin;
  config["levels"] = pc.levels;
  config["p"] = p_grid;
  config["second_order"] = pc.second_order;
  config["k"] = pc.k;
  json outputs = info;
  outputs["regularity"] = "regularity.csv";
  outputs["p_critical"] = fmt(bt_regularity_p_critical(r.get()));
  outputs["fit_r2"] = fmt(bt_regularity_fit_r2(r.get()));
  write_manifest(out, "probe", argv, config, outputs);
  std::printf("p_critical=%s fit_r2=%s\n", fmt(bt_regularity_p_critical(r.get())).c_str(),
              fmt(bt_regularity_fit_r2(r.get())).c_str());
  if (pc.second_order)
    std::printf("stable_below_threshold=%d\n", bt_regularity_stable_below_threshold(r.get()));
  return kExitOk;
}

int cmd_verify(const std::string& a_text, const std::string& b_text, int trials, std::uint64_t seed,
               const std::string& out, const std::vector<std::string>& argv) {
  const auto a = parse_complex(a_text, "--a"), b = parse_complex(b_text, "--b");
  bt_transform t;
  check(bt_verify_transform(a.data(), b.data(), trials, seed, &t));
  const bool pass = t.residual <= 1e-8;
  std::printf("mu=%s,%s\nnu=%s,%s\npath=%s\n", fmt(t.mu[0]).c_str(), fmt(t.mu[1]).c_str(), fmt(t.nu[0]).c_str(),
              fmt(t.nu[1]).c_str(), t.numeric_root ? "numeric-root" : "printed-formula");
  std::printf("printed_mu=%s,%s\nprinted_nu=%s,%s\n", fmt(t.printed_mu[0]).c_str(), fmt(t.printed_mu[1]).c_str(),
              fmt(t.printed_nu[0]).c_str(), fmt(t.printed_nu[1]).c_str());
  std::printf("residual=%s\nliteral_ab_residual=%s\ninduced_coefficient=%s,%s\n", fmt(t.residual).c_str(),
              fmt(t.literal_residual).c_str(), fmt(t.induced_coefficient[0]).c_str(),
              fmt(t.induced_coefficient[1]).c_str());
  std::printf("mu_bound=%s nu_bound=%s\n", t.mu_bound_excess <= 1e-12 ? "ok" : "violated",
              t.nu_bound_excess <= 1e-12 ? "ok" : "violated");
  ensure_dir(out);
  write_file(fs::path(out) / "transform.csv",
             csv_line({"a_re", "a_im", "b_re", "b_im", "mu_re", "mu_im", "nu_re", "nu_im", "path", "residual",
                       "literal_ab_residual", "mu_bound_excess", "nu_bound_excess"}) +
                 csv_line({fmt(a[0]), fmt(a[1]), fmt(b[0]), fmt(b[1]), fmt(t.mu[0]), fmt(t.mu[1]), fmt(t.nu[0]),
                           fmt(t.nu[1]), t.numeric_root ? "numeric-root" : "printed-formula", fmt(t.residual),
                           fmt(t.literal_residual), fmt(t.mu_bound_excess), fmt(t.nu_bound_excess)}));
  json config{{"a", a_text}, {"b", b_text}, {"trials", trials}, {"seed", seed}};
  write_manifest(out, "verify-transform", argv, config, {{"transform", "transform.csv"}, {"pass", pass}});
  return pass ? kExitOk : kExitNotConverged;
}

int cmd_coefficients(const FieldSource& src, double k, bool forcing_free, const std::string& out,
                     const std::vector<std::string>& argv) {
  json info;
  Field f = src.load(info);
  if (k < 0.0) {
    if (src.solve.map.empty()) throw UsageError("need --k or --map");
    k = bt_map_k(src.solve.parse_map().get());
  }
  const auto mask = src.mask(forcing_free, bt_field_n(f.get()));
  bt_coefficients c;
  bt_field *mu = nullptr, *nu = nullptr;
  check(bt_coefficients_analyze(f.get(), k, mask.empty() ? nullptr : mask.data(), &c, &mu, &nu));
  Field mu_f(mu), nu_f(nu);
  ensure_dir(out);
  const fs::path dir(out);
  check(bt_field_write(mu_f.get(), (dir / "mu.bfld").c_str()));
  check(bt_field_write(nu_f.get(), (dir / "nu.bfld").c_str()));
  write_file(dir / "coefficients.csv",
             csv_line({"k", "max_mu_plus_nu", "used", "flagged", "gradient_residual", "k_prime", "directional_max",
                       "directional_degenerate"}) +
                 csv_line({fmt(k), fmt(c.max_sum), std::to_string(c.used), std::to_string(c.flagged),
                           fmt(c.gradient_residual), fmt(c.k_prime), fmt(c.directional_max),
                           std::to_string(c.directional_degenerate)}));
  json config = src.solve.to_json();
  config["field"] = src.field_path;
  config["k"] = k;
  config["forcing_free"] = forcing_free;
  info["coefficients"] = "coefficients.csv";
  info["mu"] = "mu.bfld";
  info["nu"] = "nu.bfld";
  write_manifest(out, "coefficients", argv, config, info);
  std::printf("max_mu_plus_nu=%s gradient_residual=%s k_prime=%s directional_max=%s\n", fmt(c.max_sum).c_str(),
              fmt(c.gradient_residual).c_str(), fmt(c.k_prime).c_str(), fmt(c.directional_max).c_str());
  return kExitOk;
}

int cmd_hodograph(const FieldSource& src, int samples, double jmin, bool forcing_free, const std::string& out,
                  const std::vector<std::string>& argv) {
  if (src.solve.map.empty()) throw UsageError("hodograph needs --map for the map A");
  json info;
  Field f = src.load(info);
  Map m = src.solve.parse_map();
  const auto mask = src.mask(forcing_free, bt_field_n(f.get()));
  bt_hodograph h;
  check(bt_hodograph_check(f.get(), m.get(), samples, jmin, mask.empty() ? nullptr : mask.data(), src.solve.seed, &h));
  ensure_dir(out);
  write_file(fs::path(out) / "hodograph.csv",
             csv_line({"residual", "printed_residual", "max_ratio", "accepted", "skipped"}) +
                 csv_line({fmt(h.residual), fmt(h.printed_residual), fmt(h.max_ratio), std::to_string(h.accepted),
                           std::to_string(h.skipped)}));
  json config = src.solve.to_json();
  config["field"] = src.field_path;
  config["samples"] = samples;
  config["jacobian_min"] = jmin;
  config["forcing_free"] = forcing_free;
  info["hodograph"] = "hodograph.csv";
  write_manifest(out, "hodograph", argv, config, info);
  std::printf("residual=%s printed_residual=%s max_ratio=%s accepted=%d skipped=%d\n", fmt(h.residual).c_str(),
              fmt(h.printed_residual).c_str(), fmt(h.max_ratio).c_str(), h.accepted, h.skipped);
  return kExitOk;
}

int cmd_report(const FieldSource& src, bool forcing_free, const std::string& out,
               const std::vector<std::string>& argv) {
  json info;
  Field f = src.load(info);
  const auto mask = src.mask(forcing_free, bt_field_n(f.get()));
  bt_distortion d;
  check(bt_distortion_stats(f.get(), mask.empty() ? nullptr : mask.data(), &d));
  double p2 = 0.0;
  bt_field* fz = nullptr;
  check(bt_field_dz(f.get(), &fz));
  Field fz_f(fz);
  check(bt_field_lp_norm(fz, 2.0, 0, &p2));
  ensure_dir(out);
  const fs::path dir(out);
  double range[2];
  check(bt_write_dz_graymap(f.get(), (dir / "dz.pgm").c_str(), range));
  write_file(dir / "distortion.csv",
             csv_line({"distortion_max", "q50", "q90", "q99", "q100", "degenerate", "counted", "dz_l2"}) +
                 csv_line({fmt(d.max), fmt(d.quantiles[0]), fmt(d.quantiles[1]), fmt(d.quantiles[2]),
                           fmt(d.quantiles[3]), std::to_string(d.degenerate), std::to_string(d.counted), fmt(p2)}));
  json config = src.solve.to_json();
  config["field"] = src.field_path;
  config["forcing_free"] = forcing_free;
  info["distortion"] = "distortion.csv";
  info["heatmap"] = {{"file", "dz.pgm"}, {"quantity", "|f_z|"}, {"min", range[0]}, {"max", range[1]}};
  write_manifest(out, "report", argv, config, info);
  std::printf("distortion_max=%s degenerate=%zu counted=%zu\n", fmt(d.max).c_str(), d.degenerate, d.counted);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic Beltrami equation solver and regularity probes"};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  const std::vector<std::string> args(argv, argv + argc);

  std::string out = "out";
  SolveConfig solve_cfg;
  auto* solve = app.add_subcommand("solve", "solve an equation and write the solution, report and heatmap");
  solve_cfg.add_to(solve, true);
  solve->add_option("--out", out, "output directory")->capture_default_str();

  SolveConfig probe_cfg;
  ProbeConfig pc;
  auto* probe = app.add_subcommand("probe", "Sobolev exponent probe over a refinement ladder");
  probe_cfg.add_to(probe, false);
  probe->add_option("--ladder", pc.ladder, "comma-separated BFLD1 files at n, 2n, 4n, ...");
  probe->add_option("--builtin", pc.builtin, "radial:K or identity");
  probe->add_option("--levels", pc.levels, "levels for --builtin or --map")->capture_default_str();
  probe->add_option("--p", pc.p_list, "comma-separated exponents (default 1 to 10 step 0.25)");
  probe->add_flag("--second-order", pc.second_order, "probe the derivatives of f_z");
  probe->add_option("--k", pc.k, "ellipticity constant for --second-order");
  probe->add_option("--out", out, "output directory")->capture_default_str();

  std::string a_text = "0,0", b_text = "0,0";
  int trials = 4;
  std::uint64_t vseed = 1;
  auto* verify = app.add_subcommand("verify-transform", "compute mu, nu and check the change of variables");
  verify->add_option("--a", a_text, "a as re,im")->capture_default_str();
  verify->add_option("--b", b_text, "b as re,im")->capture_default_str();
  verify->add_option("--trials", trials, "random test polynomials")->capture_default_str();
  verify->add_option("--seed", vseed, "seed")->capture_default_str();
  verify->add_option("--out", out, "output directory")->capture_default_str();

  FieldSource coef_src;
  double coef_k = -1.0;
  bool coef_free = false;
  auto* coef = app.add_subcommand("coefficients", "recover pointwise mu, nu and check the gradient equation");
  coef_src.solve.add_to(coef, false);
  coef->add_option("--field", coef_src.field_path, "BFLD1 solution (otherwise solve with --map)");
  coef->add_option("--k", coef_k, "ellipticity constant (default: the map's)");
  coef->add_flag("--forcing-free", coef_free, "restrict to samples where the forcing vanishes");
  coef->add_option("--out", out, "output directory")->capture_default_str();

  FieldSource hodo_src;
  int hodo_samples = 200;
  double hodo_jmin = 0.1;
  bool hodo_free = false;
  auto* hodo = app.add_subcommand("hodograph", "check the equation satisfied by the local inverse");
  hodo_src.solve.add_to(hodo, true);
  hodo->add_option("--field", hodo_src.field_path, "BFLD1 solution (otherwise solve with --map)");
  hodo->add_option("--samples", hodo_samples, "sample points")->capture_default_str();
  hodo->add_option("--jacobian-min", hodo_jmin, "minimum Jacobian of f at sample points")->capture_default_str();
  hodo->add_flag("--forcing-free", hodo_free, "restrict to samples where the forcing vanishes");
  hodo->add_option("--out", out, "output directory")->capture_default_str();

  FieldSource rep_src;
  bool rep_free = false;
  auto* report = app.add_subcommand("report", "distortion statistics and |f_z| heatmap of a field");
  rep_src.solve.add_to(report, false);
  report->add_option("--field", rep_src.field_path, "BFLD1 field (otherwise solve with --map)");
  report->add_flag("--forcing-free", rep_free, "restrict to samples where the forcing vanishes");
  report->add_option("--out", out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(solve_cfg, out, args);
    if (*probe) return cmd_probe(probe_cfg, pc, out, args);
    if (*verify) return cmd_verify(a_text, b_text, trials, vseed, out, args);
    if (*coef) return cmd_coefficients(coef_src, coef_k, coef_free, out, args);
    if (*hodo) return cmd_hodograph(hodo_src, hodo_samples, hodo_jmin, hodo_free, out, args);
    if (*report) return cmd_report(rep_src, rep_free, out, args);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNotConverged;
  }
  return kExitUsage;
}
