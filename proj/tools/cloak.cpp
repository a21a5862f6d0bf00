// Command-line driver: mesh building, optimization runs, efficacy tables, field export and
// cylinder landscapes.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cloak/axisym.hpp"
#include "cloak/config.hpp"
#include "cloak/error.hpp"
#include "cloak/export.hpp"
#include "cloak/geometry.hpp"
#include "cloak/metrics.hpp"
#include "cloak/scenarios.hpp"
#include "cloak/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace cloak;

namespace {

struct Options {
  std::string config_path;
  std::string out;
  std::int64_t seed = -1;
  bool force = false;
  int example = 1;
  std::string load = "XT";
  double mesh_h = 0.0;
  std::vector<std::string> sets;
  // subcommand specific
  std::string design_dir;
  std::string designs = "NC";
  std::string kind = "uniform-p";
  int grid = 0;
};

Config effective_config(const Options& o) {
  Config cfg = o.config_path.empty() ? Config{} : Config::load(o.config_path);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw config_error("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed >= 0) cfg.set("run.seed", std::to_string(o.seed));
  if (o.mesh_h > 0.0) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", o.mesh_h);
    cfg.set("geometry.h", buf);
  }
  return cfg;
}

void warn_unused(const Config& cfg) {
  for (const auto& k : cfg.unused_keys()) std::cerr << "warning: unused config key '" << k << "'\n";
}

fs::path prepare_out(const Options& o) {
  if (o.out.empty()) throw config_error("--out is required for this command");
  const fs::path dir(o.out);
  std::error_code ec;
  if (fs::exists(dir, ec) && !fs::is_empty(dir, ec) && !o.force)
    throw io_error("output directory " + dir.string() + " is not empty (use --force to overwrite)");
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw io_error("cannot open " + p.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Config snapshot records the scenario identity so a run directory is self-describing.
std::string snapshot(Config cfg, int example, const std::string& load) {
  cfg.set("run.example", std::to_string(example));
  cfg.set("run.load", load);
  return cfg.canonical();
}

std::string design_csv(const DesignField& d) {
  std::string out = "node,xi,eta\n";
  char buf[96];
  for (Eigen::Index i = 0; i < d.xi.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", static_cast<long>(i), d.xi(i), d.eta(i));
    out += buf;
  }
  return out;
}

DesignField read_design(const fs::path& p, int nodes) {
  std::istringstream is(read_file(p));
  std::string line;
  std::getline(is, line);
  DesignField d;
  d.xi = Eigen::VectorXd::Zero(nodes);
  d.eta = Eigen::VectorXd::Zero(nodes);
  int count = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    long n = 0;
    double xi = 0, eta = 0;
    if (std::sscanf(line.c_str(), "%ld,%lf,%lf", &n, &xi, &eta) != 3 || n < 0 || n >= nodes)
      throw io_error("malformed design row in " + p.string() + ": " + line);
    d.xi(n) = xi;
    d.eta(n) = eta;
    ++count;
  }
  if (count != nodes) throw io_error(p.string() + " does not cover every mesh node");
  return d;
}

void require_same_mesh(const Mesh& a, const Mesh& b, const std::string& where) {
  bool same = a.num_nodes() == b.num_nodes() && a.num_tris() == b.num_tris();
  for (int i = 0; same && i < a.num_nodes(); ++i) same = a.nodes[i] == b.nodes[i];
  if (!same) throw config_error("mesh in " + where + " does not match the mesh rebuilt from its config");
}

std::vector<std::string> single_loads(int example) {
  std::vector<std::string> out;
  for (const auto& l : example_loads(example))
    if (l != "MT" && l != "MD") out.push_back(l);
  return out;
}

void write_manifest(const fs::path& dir) {
  json m;
  const fs::path cfg = dir / "config.txt";
  m["config_hash"] = fs::exists(cfg) ? fnv1a_hex(read_file(cfg)) : "";
  json files = json::object();
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  for (const auto& p : entries) files[p.filename().string()] = file_hash(p.string());
  m["files"] = files;
  const fs::path summary = dir / "summary.json";
  if (fs::exists(summary)) m["summary"] = json::parse(read_file(summary));
  write_text((dir / "manifest.json").string(), m.dump(2) + "\n");
}

// ---- subcommands ----

int cmd_mesh(const Options& o) {
  const Config cfg = effective_config(o);
  const Scenario sc = make_scenario(o.example, o.load, cfg);
  const Geometry geo = build_geometry(sc.geometry);
  warn_unused(cfg);
  const fs::path dir = prepare_out(o);
  save_mesh(geo.physical, (dir / "mesh.cloakmesh").string());
  save_mesh(geo.filled, (dir / "virtual.cloakmesh").string());
  double area[3] = {0, 0, 0};
  for (int t = 0; t < geo.physical.num_tris(); ++t) area[static_cast<int>(geo.physical.region[t])] += geo.physical.area(t);
  json j{{"nodes", geo.physical.num_nodes()},
         {"triangles", geo.physical.num_tris()},
         {"h", geo.physical.h},
         {"area_exterior", area[0]},
         {"area_cloak", area[1]},
         {"area_inhomogeneity", area[2]}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_virtual(const Options& o, bool nocloak) {
  const Config cfg = effective_config(o);
  const Scenario sc = make_scenario(o.example, o.load, cfg);
  const Geometry geo = build_geometry(sc.geometry);
  warn_unused(cfg);
  const fs::path dir = prepare_out(o);
  FieldSet f;
  f.base = sc.base;
  f.stiffness_ratio = sc.stiffness_ratio;
  json g = json::object();
  std::string csv = "load,g_percent\n";
  for (const auto& l : sc.loads) {
    const Eigen::VectorXd ut = solve_virtual(geo, l, sc.base, sc.solver.pivot_tol);
    f.loads.push_back(to_string(l.id));
    if (!nocloak) {
      f.u.push_back(ut);
      continue;
    }
    const Eigen::VectorXd u = solve_nocloak(geo, l, sc.base, sc.stiffness_ratio, sc.solver.pivot_tol);
    f.u.push_back(u);
    const double v = g_hat(u, ut, geo.physical);
    g[to_string(l.id)] = v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s,%.1f\n", to_string(l.id), 100.0 * v);
    csv += buf;
  }
  write_text((dir / "config.txt").string(), snapshot(cfg, o.example, o.load));
  save_mesh(geo.physical, (dir / "mesh.cloakmesh").string());
  write_vtk(geo.physical, f, (dir / (nocloak ? "nocloak.vtk" : "virtual.vtk")).string());
  json j{{"example", o.example}, {"load", o.load}, {"triangles", geo.physical.num_tris()}};
  if (nocloak) {
    write_text((dir / "nocloak.csv").string(), csv);
    j["g_nocloak"] = g;
  }
  write_text((dir / "summary.json").string(), j.dump(2) + "\n");
  write_manifest(dir);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_optimize(const Options& o) {
  const Config cfg = effective_config(o);
  const Scenario sc = make_scenario(o.example, o.load, cfg);
  const Geometry geo = build_geometry(sc.geometry);
  warn_unused(cfg);
  const fs::path dir = prepare_out(o);
  const Problem pb{geo, sc.loads, sc.base, sc.stiffness_ratio, sc.solver};
  const RunResult r = newton_continuation(pb);

  write_text((dir / "config.txt").string(), snapshot(cfg, o.example, o.load));
  save_mesh(geo.physical, (dir / "mesh.cloakmesh").string());
  write_text((dir / "trace.csv").string(), trace_csv(r, sc.loads));
  write_text((dir / "design.csv").string(), design_csv(r.design));
  FieldSet f;
  f.base = sc.base;
  f.stiffness_ratio = sc.stiffness_ratio;
  f.xi = r.design.xi;
  f.eta = r.design.eta;
  f.u = r.u;
  f.gamma = r.gamma;
  for (const auto& l : sc.loads) f.loads.push_back(to_string(l.id));
  write_vtk(geo.physical, f, (dir / "fields.vtk").string());

  json g = json::object(), gnc = json::object();
  for (std::size_t l = 0; l < sc.loads.size(); ++l) {
    g[to_string(sc.loads[l].id)] = r.g[l];
    gnc[to_string(sc.loads[l].id)] = r.g_nocloak[l];
  }
  json j{{"example", o.example},
         {"load", o.load},
         {"converged", r.converged},
         {"message", r.message},
         {"k_reached", r.k_reached},
         {"steps", r.trace.size()},
         {"triangles", geo.physical.num_tris()},
         {"g", g},
         {"g_multi", r.g_multi},
         {"g_nocloak", gnc},
         {"g_multi_nocloak", r.g_multi_nocloak},
         {"design_metric", design_metric(r.design.xi, r.design.eta, DesignField::zero(geo.physical).xi,
                                         DesignField::zero(geo.physical).eta, geo.physical,
                                         {sc.solver.m1, sc.solver.m2, sc.solver.alpha1, sc.solver.alpha2})},
         {"auxetic_fraction", auxetic_fraction(r.design.xi, r.design.eta, geo.physical, sc.base)}};
  write_text((dir / "summary.json").string(), j.dump(2) + "\n");
  write_manifest(dir);
  std::cout << j.dump(2) << "\n";
  if (!r.converged) throw solver_error(r.message);
  return 0;
}

struct SavedRun {
  Config cfg;
  int example = 1;
  std::string load;
  Scenario scenario;
  Geometry geometry;
  DesignField design;
};

SavedRun load_run(const fs::path& dir) {
  SavedRun s;
  s.cfg = Config::parse(read_file(dir / "config.txt"));
  s.example = s.cfg.get_int("run.example", 1);
  s.load = s.cfg.get_string("run.load", "XT");
  s.scenario = make_scenario(s.example, s.load, s.cfg);
  s.geometry = build_geometry(s.scenario.geometry);
  require_same_mesh(s.geometry.physical, load_mesh((dir / "mesh.cloakmesh").string()), dir.string());
  s.design = read_design(dir / "design.csv", s.geometry.physical.num_nodes());
  return s;
}

int cmd_evaluate(const Options& o) {
  if (o.design_dir.empty()) throw config_error("evaluate needs --design DIR (an optimize output directory)");
  const SavedRun run = load_run(o.design_dir);
  const Scenario& sc = run.scenario;
  const std::vector<std::string> names =
      o.load.empty() || o.load == "all" ? single_loads(run.example) : std::vector<std::string>{o.load};
  json g = json::object();
  std::string csv = "load,g\n";
  for (const auto& name : names) {
    for (const auto& l : scenario_loads(run.example, name, frame_of(sc.geometry), sc.traction, sc.strain)) {
      const Eigen::VectorXd ut = solve_virtual(run.geometry, l, sc.base, sc.solver.pivot_tol);
      const Eigen::VectorXd u = solve_design(run.geometry.physical, l, run.design, sc.base, sc.stiffness_ratio,
                                             sc.solver.quad_degree, sc.solver.pivot_tol);
      const double v = g_hat(u, ut, run.geometry.physical);
      g[to_string(l.id)] = v;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s,%.17g\n", to_string(l.id), v);
      csv += buf;
    }
  }
  if (!o.out.empty()) {
    const fs::path dir = prepare_out(o);
    write_text((dir / "evaluate.csv").string(), csv);
  }
  std::cout << json{{"design", o.design_dir}, {"g", g}}.dump(2) << "\n";
  return 0;
}

int cmd_table(const Options& o) {
  const Config cfg = effective_config(o);
  const Scenario sc = make_scenario(o.example, "XT", cfg);
  const Geometry geo = build_geometry(sc.geometry);
  warn_unused(cfg);
  std::vector<std::string> rows;
  std::vector<DesignField> designs;
  std::stringstream ss(o.designs);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (tok.empty()) continue;
    if (tok == "NC") {
      rows.push_back("NC");
      designs.push_back(DesignField::zero(geo.physical));
      continue;
    }
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw config_error("--designs entries are NC or NAME=RUN_DIR, got '" + tok + "'");
    const SavedRun run = load_run(tok.substr(eq + 1));
    require_same_mesh(geo.physical, run.geometry.physical, tok.substr(eq + 1));
    rows.push_back(tok.substr(0, eq));
    designs.push_back(run.design);
  }
  std::vector<LoadCase> service;
  for (const auto& name : single_loads(o.example)) {
    auto ls = scenario_loads(o.example, name, frame_of(sc.geometry), sc.traction, sc.strain);
    service.push_back(ls.front());
  }
  const EfficacyTable t = efficacy_table(geo, rows, designs, service, sc.base, sc.stiffness_ratio, sc.solver.quad_degree);
  const std::string csv = t.to_csv();
  if (!o.out.empty()) {
    const fs::path dir = prepare_out(o);
    write_text((dir / "table.csv").string(), csv);
  }
  std::cout << csv;
  return 0;
}

int cmd_axisym(const Options& o) {
  Config cfg = effective_config(o);
  axisym::CylinderSpec s;
  s.r_i = cfg.get_double("axisym.r_i", s.r_i);
  s.r_c = cfg.get_double("axisym.r_c", s.r_c);
  s.r_o = cfg.get_double("axisym.r_o", s.r_o);
  s.mu0 = cfg.get_double("axisym.mu0", s.mu0);
  s.kappa0 = cfg.get_double("axisym.kappa0", s.kappa0);
  s.sigma_inf = cfg.get_double("axisym.sigma_inf", s.sigma_inf);
  s.validate();
  const axisym::ProfileKind kind = axisym::parse_profile_kind(o.kind);
  const bool one_d = kind == axisym::ProfileKind::UniformP;
  const int n = o.grid > 1 ? o.grid : (one_d ? 401 : 81);
  const double lo = cfg.get_double("axisym.min", 0.25), hi = cfg.get_double("axisym.max", one_d ? 4.0 : 8.0);
  const double lo2 = cfg.get_double("axisym.min2", lo), hi2 = cfg.get_double("axisym.max2", hi);
  warn_unused(cfg);
  const auto p1 = axisym::linspace(lo, hi, n);
  const auto p2 = one_d ? std::vector<double>{} : axisym::linspace(lo2, hi2, n);
  const axisym::Landscape L = axisym::objective_landscape(s, kind, p1, p2);

  const auto best = std::min_element(L.g.begin(), L.g.end()) - L.g.begin();
  json j{{"kind", o.kind}, {"points", L.g.size()}};
  if (one_d) {
    j["grid_argmin"] = p1[best];
    j["minimizer"] = axisym::minimize_uniform_P(s, lo, hi);
    j["perfect_P"] = axisym::perfect_uniform_P(s);
  } else {
    j["grid_argmin"] = {p1[best / p2.size()], p2[best % p2.size()]};
    const auto [mlo, mhi] = axisym::mu_limits(s);
    j["mu_limits"] = {mlo, mhi};
  }
  j["g_min"] = L.g[best];
  if (!o.out.empty()) {
    const fs::path dir = prepare_out(o);
    write_text((dir / ("landscape_" + o.kind + ".csv")).string(), L.to_csv());
    write_text((dir / "summary.json").string(), j.dump(2) + "\n");
    write_manifest(dir);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_report(const Options& o) {
  if (o.out.empty()) throw config_error("report needs --out DIR (an existing run directory)");
  if (!fs::is_directory(o.out)) throw io_error(o.out + " is not a directory");
  write_manifest(o.out);
  std::cout << read_file(fs::path(o.out) / "manifest.json");
  return 0;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Io: return 4;
    case ErrorKind::Mesh:
    case ErrorKind::Solver: return 3;
  }
  return 3;
}

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Mesh: return "mesh";
    case ErrorKind::Solver: return "solver";
  }
  return "unknown";
}

int fail(const char* kind, const std::string& message, int code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic cloak design by optimization"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool scenario) {
    sub->add_option("--config", o.config_path, "Config file (section.key = value lines)")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "RNG seed override");
    sub->add_flag("--force", o.force, "Overwrite a non-empty output directory");
    sub->add_option("--set", o.sets, "Config override key=value (repeatable)");
    if (scenario) {
      sub->add_option("--example", o.example, "Benchmark example")->check(CLI::Range(1, 4));
      sub->add_option("--load", o.load, "Load: XT, YT, ST, XD, YD, SD, MT, MD");
      sub->add_option("--mesh-h", o.mesh_h, "Target mesh size")->check(CLI::PositiveNumber);
    }
  };

  auto* mesh = app.add_subcommand("mesh", "Build and save the physical and virtual meshes");
  common(mesh, true);
  auto* virt = app.add_subcommand("virtual", "Solve the virtual (homogeneous) problems");
  common(virt, true);
  auto* nc = app.add_subcommand("nocloak", "Solve without a cloak and report the normalized distance");
  common(nc, true);
  auto* opt = app.add_subcommand("optimize", "Run the Newton continuation and write a run directory");
  common(opt, true);
  auto* ev = app.add_subcommand("evaluate", "Evaluate a saved design under service loads");
  common(ev, false);
  ev->add_option("--design", o.design_dir, "Run directory written by optimize")->required();
  ev->add_option("--load", o.load, "Service load (default: all single loads)");
  auto* tab = app.add_subcommand("table", "Efficacy table: designs x service loads, in percent");
  common(tab, true);
  tab->add_option("--designs", o.designs, "Comma list of NC or NAME=RUN_DIR");
  auto* ax = app.add_subcommand("axisym", "Objective landscapes for the hollow cylinder");
  common(ax, false);
  ax->add_option("--kind", o.kind, "uniform-p, uniform-kappa-mu or linear-p");
  ax->add_option("--n", o.grid, "Grid points per axis");
  auto* rep = app.add_subcommand("report", "Write manifest.json with content hashes for a run directory");
  common(rep, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config", e.what(), 2);
  }
  if (ev->parsed() && ev->count("--load") == 0) o.load = "all";

  try {
    if (mesh->parsed()) return cmd_mesh(o);
    if (virt->parsed()) return cmd_virtual(o, false);
    if (nc->parsed()) return cmd_virtual(o, true);
    if (opt->parsed()) return cmd_optimize(o);
    if (ev->parsed()) return cmd_evaluate(o);
    if (tab->parsed()) return cmd_table(o);
    if (ax->parsed()) return cmd_axisym(o);
    if (rep->parsed()) return cmd_report(o);
  } catch (const Error& e) {
    return fail(kind_name(e.kind()), e.what(), exit_code(e.kind()));
  } catch (const std::exception& e) {
    return fail("solver", e.what(), 3);
  }
  return 0;
}
