// Command-line driver: exponent, solve, singular, harnack, barrier.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "bhl/barriers.hpp"
#include "bhl/config.hpp"
#include "bhl/errors.hpp"
#include "bhl/field_io.hpp"
#include "bhl/harnack.hpp"
#include "bhl/singular.hpp"
#include "bhl/spherical.hpp"

using namespace bhl;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Overrides {
  std::string config;
  std::optional<double> p, opening, c, epsilon;
  std::optional<int> dim;
  std::string grid, out;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "config file (key = value, [section] per command)");
  sub->add_option("--p", o.p, "exponent p > 1");
  sub->add_option("--dim", o.dim, "dimension N");
  sub->add_option("--opening", o.opening, "cone opening (radians)");
  sub->add_option("--c", o.c, "potential strength c >= 0");
  sub->add_option("--epsilon", o.epsilon, "truncation radius");
  sub->add_option("--grid", o.grid, "grid size n_r,n_theta");
  sub->add_option("--out", o.out, "output directory");
}

RunConfig make_config(const std::string& cmd, const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : RunConfig::load(o.config, cmd);
  cfg.command = cmd;
  if (o.p) cfg.p = *o.p;
  if (o.dim) cfg.N = *o.dim;
  if (o.opening) cfg.opening = *o.opening;
  if (o.c) cfg.c = *o.c;
  if (o.epsilon) cfg.epsilon = *o.epsilon;
  if (!o.grid.empty()) {
    auto comma = o.grid.find(',');
    if (comma == std::string::npos) throw ConfigError("--grid expects n_r,n_theta");
    cfg.set("n_r", o.grid.substr(0, comma));
    cfg.set("n_theta", o.grid.substr(comma + 1));
  }
  if (!o.out.empty()) cfg.out = o.out;
  cfg.validate();
  return cfg;
}

std::string path_in(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.out) / name).string(); }

template <class F>
void write_with(const RunConfig& cfg, const std::string& name, F&& writer) {
  std::ostringstream os;
  writer(os);
  write_file_atomic(path_in(cfg, name), os.str());
}

void write_json(const RunConfig& cfg, const std::string& name, const std::string& body) {
  ojson j;
  j["config_hash"] = cfg.hash();
  const ojson parsed = ojson::parse(body);
  for (auto& [k, v] : parsed.items()) j[k] = v;
  write_file_atomic(path_in(cfg, name), j.dump(2) + "\n");
}

SolverOptions solver_opts(const RunConfig& cfg) {
  SolverOptions so;
  so.tol = cfg.tol;
  so.max_iterations = cfg.max_iterations;
  return so;
}

AngularGeometry geometry_for(const RunConfig& cfg, int N) {
  if (cfg.geometry == "planar-sector") return AngularGeometry::planar_sector;
  if (cfg.geometry == "axisymmetric-cap") return AngularGeometry::axisymmetric_cap;
  return N == 2 ? AngularGeometry::planar_sector : AngularGeometry::axisymmetric_cap;
}

int cmd_exponent(const RunConfig& cfg) {
  const auto ps = cfg.p_list.empty() ? std::vector<double>{cfg.p} : cfg.p_list;
  const auto Ns = cfg.N_list.empty() ? std::vector<int>{cfg.N} : cfg.N_list;
  const auto ths = cfg.theta0_list.empty() ? std::vector<double>{cfg.opening} : cfg.theta0_list;
  const auto cs = cfg.c_list.empty() ? std::vector<double>{cfg.c} : cfg.c_list;
  const auto kind = parse_exponent_kind(cfg.kind);
  std::vector<ExponentRow> rows;
  std::optional<AngularProfile> first;
  ojson flags = ojson::array();
  for (double p : ps)
    for (int N : Ns)
      for (double th : ths) {
        std::map<double, double> by_c;
        for (double c : cs) {
          auto prof = exponent_for_opening(th, p, N, kind, c, geometry_for(cfg, N), 1e-8);
          if (!first) first = prof;
          rows.push_back({p, th, c, prof.a, prof.lambda, N, kind});
          by_c[c] = prof.a;
        }
        double prev = -1.0;
        for (auto& [c, a] : by_c) {
          if (a < prev) {
            flags.push_back({{"p", p}, {"N", N}, {"theta0", th}, {"c", c}, {"a", a}});
            std::cerr << "anomaly: exponent decreases in c at p=" << p << " N=" << N << " c=" << c << '\n';
          }
          prev = a;
        }
      }
  write_with(cfg, "exponents.csv", [&](std::ostream& os) { write_exponent_csv(os, rows, cfg.hash()); });
  write_with(cfg, "profile.csv", [&](std::ostream& os) { write_profile_csv(os, *first, cfg.hash()); });
  if (!flags.empty()) write_json(cfg, "exponent_flags.json", ojson{{"c_monotonicity_anomalies", flags}}.dump());
  for (auto& r : rows)
    std::cout << "p=" << r.p << " N=" << r.N << " theta0=" << r.theta0 << " " << to_string(r.kind) << " c=" << r.c
              << " a=" << r.a << '\n';
  return 0;
}

int cmd_solve(const RunConfig& cfg) {
  if (cfg.N != 2) throw ConfigError("solve runs in the plane (N = 2)");
  const DomainSpec dom = cfg.domain == "sector" ? DomainSpec::sector(cfg.opening, cfg.radius)
                                                : DomainSpec::half_disk(cfg.radius);
  const double th0 = cfg.domain == "sector" ? cfg.opening : std::numbers::pi;
  const std::size_t nr = cfg.n_r ? cfg.n_r : dyadic_radial_count(cfg.epsilon, cfg.radius, cfg.per_octave);
  auto grid = std::make_shared<const PolarGrid>(build_polar_grid(dom, nr, cfg.n_theta, cfg.epsilon, cfg.q));
  auto prof = exponent_for_opening(th0, cfg.p, 2, ExponentKind::singular, cfg.c, AngularGeometry::planar_sector);
  auto u = solve_dirichlet(grid, cfg.p, PotentialSpec::inverse_power(cfg.c),
                           [&](double r, double th) {
                             return std::max(0.0, std::pow(r, -prof.a) * prof.eval(std::min(th, prof.theta0)));
                           },
                           solver_opts(cfg));
  write_with(cfg, "grid.csv", [&](std::ostream& os) { write_grid_csv(os, *grid, cfg.hash()); });
  write_with(cfg, "field.csv", [&](std::ostream& os) { write_field_csv(os, u, cfg.hash()); });
  write_json(cfg, "solver_log.json", solver_log_json(u.log));
  std::cout << "solved: " << grid->size() << " nodes, " << u.log.iterations
            << " Newton steps, residual " << u.log.final_residual << '\n';
  return 0;
}

LadderOptions ladder_opts(const RunConfig& cfg) {
  LadderOptions o;
  o.radius = cfg.radius;
  o.eps0 = cfg.eps0;
  o.K = cfg.K;
  o.per_octave = cfg.per_octave;
  o.n_theta = cfg.n_theta;
  o.solver = solver_opts(cfg);
  return o;
}

int cmd_singular(const RunConfig& cfg) {
  auto L = build_ladder(cfg.p, cfg.c, ladder_opts(cfg));
  LadderReport rep;
  int code = 0;
  std::optional<ScalarField> limit;
  try {
    limit = singular_limit(L, &rep);
  } catch (const SingularError& e) {
    rep = analyze_ladder(L);
    std::cerr << e.what() << '\n';
    code = static_cast<int>(Module::singular);
  }
  const ScalarField& u = limit ? *limit : L.fields.back();
  auto sing = singularity_test(u);
  // homothety matched on the truncation arc, the finest ladder radius
  auto blow = blowup_rate(u, L.profile, L.epsilons);
  ojson j = ojson::parse(ladder_json(rep));
  j["beta"] = L.profile.a;
  j["singularity_verdict"] = to_string(sing.verdict);
  j["singularity_ratios"] = sing.ratios;
  write_json(cfg, "ladder.json", j.dump());
  write_with(cfg, "grid.csv", [&](std::ostream& os) { write_grid_csv(os, u.grid(), cfg.hash()); });
  write_with(cfg, "field.csv", [&](std::ostream& os) { write_field_csv(os, u, cfg.hash()); });
  write_with(cfg, "blowup.csv", [&](std::ostream& os) { write_blowup_csv(os, blow, cfg.hash()); });
  std::cout << "beta=" << L.profile.a << " verdict=" << to_string(sing.verdict) << '\n';
  return code;
}

int cmd_harnack(const RunConfig& cfg) {
  std::optional<ScalarField> u1, u2;
  if (!cfg.field1.empty() || !cfg.field2.empty()) {
    if (cfg.field1.empty() || cfg.field2.empty() || cfg.grid_file.empty())
      throw ConfigError("harnack needs field1, field2 and grid_file together");
    std::ifstream gf(cfg.grid_file), f1(cfg.field1), f2(cfg.field2);
    if (!gf || !f1 || !f2) throw ConfigError("cannot open harnack input files");
    auto grid = std::make_shared<const PolarGrid>(read_grid_csv(gf, DomainSpec::half_disk(cfg.radius)));
    u1 = read_field_csv(f1, grid);
    u2 = read_field_csv(f2, grid);
  } else {
    auto o = ladder_opts(cfg);
    u1 = build_ladder(cfg.p, cfg.c, o).fields.back();
    const double amp = cfg.arc_amp;
    o.arc_shape = [amp](double t) { return 1.0 + amp * std::sin(t) * std::sin(t); };
    u2 = build_ladder(cfg.p, cfg.c, o).fields.back();
  }
  const double R = cfg.radius;
  HarnackReport rep;
  const std::string gid = std::to_string(u1->grid().n_r()) + "x" + std::to_string(u1->grid().n_theta());
  rep.add("harn-int", 0.05 * R, interior_harnack(*u1, {0.5 * R, 0.3 * R}, 0.05 * R), {0.05 * R}, gid);
  for (int h = 2; h <= 4; ++h)
    rep.add("harn-h", 0.25 * R, chained_harnack(*u1, {0.5 * R, 0.0}, 0.25 * R, h), {double(h)}, gid);
  auto d = boundary_decay(*u1, {0.5 * R, 0.0}, 0.1 * R);
  rep.add("harn-hold", 0.1 * R, d.delta, {0.1 * R}, gid);
  rep.add("norm-est", 0.25 * R, carleson_constant(*u1, {0.5 * R, 0.0}, 0.25 * R), {0.25 * R}, gid);
  rep.add("norm-est2", 0.25 * R, two_sided_slope(*u1, {0.5 * R, 0.0}, 0.25 * R), {0.25 * R}, gid);
  auto a = apriori_alpha(*u1, {0.0, 0.5 * R});
  rep.add("a-prior0", R, a.alpha, a.radii, gid);
  auto uni = ratio_uniformity(*u1, R / 16.0);
  rep.add("unif1", R / 16.0, uni.c9, {R / 32.0, R / 8.0}, gid);
  rep.add("unif1'", R / 16.0, uni.c9_vertical, {R / 32.0, R / 8.0}, gid);
  rep.add("bhi1", 0.25 * R, boundary_harnack(*u1, *u2, {0.5 * R, 0.0}, 0.25 * R, &rep.excluded), {0.25 * R}, gid);
  for (int k = 0; k <= 5; ++k) {
    const double r = R * std::ldexp(1.0, -k);
    rep.add("bhi2", r, boundary_harnack_annulus(*u1, *u2, r, &rep.excluded), {r / 2.0, r}, gid);
  }
  auto s = singularity_test(*u1);
  rep.add("sing1", s.radii.empty() ? 0.0 : s.radii.back(), s.ratios.empty() ? 0.0 : s.ratios.back(), s.radii, gid);
  const double eK = u1->grid().inner_radius();
  auto q = quotient_constancy(*u1, *u2, 0.25 * R, 8.0 * eK);
  rep.add("quotient-k", 0.25 * R, q.deviation, {8.0 * eK, 0.25 * R}, gid);
  write_json(cfg, "harnack.json", rep.to_json());
  write_with(cfg, "harnack.csv", [&](std::ostream& os) { os << "# config-hash: " << cfg.hash() << '\n' << rep.to_csv(); });
  bool ok = true;
  for (auto& r : rep.records)
    if (!std::isfinite(r.constant) || (r.estimate_id != "quotient-k" && !(r.constant > 0.0))) ok = false;
  std::cout << "harnack: " << rep.records.size() << " records, quotient deviation " << q.deviation << '\n';
  return ok ? 0 : static_cast<int>(Module::verifier);
}

int cmd_barrier(const RunConfig& cfg) {
  // unit-distance normalization, so the effective bound is the raw one
  const double r = cfg.barrier_r;
  const double C0 = std::max(cfg.C0, cfg.c);  // c|x|^{-p} needs a bound C0 >= c
  const auto dom = DomainSpec::half_disk(std::max(cfg.radius, 4.0 * r));
  const Point P{0.0, 0.0};
  auto lp = lower_barrier_params(cfg.p, cfg.N, C0, r, normal_point(dom, P, r / 2.0, NormalSide::inward));
  auto lower = certify_lower(lp);
  auto up = upper_barrier_params(dom, P, cfg.p, cfg.N, C0, r);
  auto upper = certify_upper(up);
  write_json(cfg, "certification_lower.json", certification_json(lower));
  write_json(cfg, "certification_upper.json", certification_json(upper));
  std::cout << "lower a=" << lp.a << " " << (lower.pass() ? "PASS" : "FAIL") << "; upper b=" << up.b
            << " lambda1=" << up.eigen.lambda1 << " " << (upper.pass() ? "PASS" : "FAIL") << '\n';
  return lower.pass() && upper.pass() ? 0 : static_cast<int>(Module::barriers);
}

void print_error(const std::string& module, const std::string& kind, const std::string& msg) {
  ojson j;
  j["error"] = {{"module", module}, {"kind", kind}, {"message", msg}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary Harnack and singular-solution experiments for the p-Laplacian"};
  app.require_subcommand(1);
  std::map<std::string, Overrides> ov;
  std::map<std::string, int (*)(const RunConfig&)> run = {{"exponent", cmd_exponent},
                                                          {"solve", cmd_solve},
                                                          {"singular", cmd_singular},
                                                          {"harnack", cmd_harnack},
                                                          {"barrier", cmd_barrier}};
  const std::map<std::string, std::string> help = {{"exponent", "separable-solution exponent table"},
                                                   {"solve", "truncated Dirichlet solve with separable arc data"},
                                                   {"singular", "truncation ladder and singular limit"},
                                                   {"harnack", "measure Harnack-type constants"},
                                                   {"barrier", "certify the comparison barriers"}};
  for (auto& [name, text] : help) add_common(app.add_subcommand(name, text), ov[name]);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    for (auto& [name, fn] : run) {
      if (!app.got_subcommand(name)) continue;
      RunConfig cfg = make_config(name, ov[name]);
      fs::create_directories(cfg.out);
      return fn(cfg);
    }
  } catch (const Error& e) {
    print_error(to_string(e.module()), e.kind(), e.what());
    return static_cast<int>(e.module());
  } catch (const std::exception& e) {
    print_error("cli", "internal", e.what());
    return static_cast<int>(Module::cli);
  }
  return static_cast<int>(Module::cli);
}
