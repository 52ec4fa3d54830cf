#include "bhl/field_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bhl/errors.hpp"

namespace bhl {

namespace {

void header(std::ostream& os, const std::string& hash) {
  if (!hash.empty()) os << "# config-hash: " << hash << '\n';
}

std::string num(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

// next data line, skipping comments; false at EOF
bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return true;
  }
  return false;
}

NodeTag parse_tag(const std::string& s) {
  if (s == "interior") return NodeTag::interior;
  if (s == "dirichlet-zero" || s == "dirichlet_zero") return NodeTag::dirichlet_zero;
  if (s == "truncation-arc" || s == "truncation_arc") return NodeTag::truncation_arc;
  throw ConfigError("unknown node tag '" + s + "'");
}

}  // namespace

void write_grid_csv(std::ostream& os, const PolarGrid& g, const std::string& hash) {
  header(os, hash);
  os << "node_id,r,theta,x,y,tag\n";
  for (std::size_t id = 0; id < g.size(); ++id) {
    const Point x = g.node_point(id);
    os << id << ',' << num(g.r(g.radial_index(id))) << ',' << num(g.theta(g.angular_index(id))) << ',' << num(x.x)
       << ',' << num(x.y) << ',' << to_string(g.tag(id)) << '\n';
  }
}

void write_field_csv(std::ostream& os, const ScalarField& f, const std::string& hash) {
  header(os, hash);
  const PolarGrid& g = f.grid();
  os << "node_id,r,theta,value\n";
  for (std::size_t id = 0; id < g.size(); ++id)
    os << id << ',' << num(g.r(g.radial_index(id))) << ',' << num(g.theta(g.angular_index(id))) << ',' << num(f[id])
       << '\n';
}

std::string solver_log_json(const SolverLog& log, const std::string& hash) {
  nlohmann::ordered_json j;
  if (!hash.empty()) j["config_hash"] = hash;
  j["iterations"] = log.iterations;
  j["final_residual"] = log.final_residual;
  j["regularization_floor"] = log.regularization_floor;
  j["p"] = log.p;
  j["potential_c"] = log.potential_c;
  return j.dump(2);
}

PolarGrid read_grid_csv(std::istream& is, std::optional<DomainSpec> dom) {
  std::string line;
  if (!next_line(is, line) || line != "node_id,r,theta,x,y,tag") throw ConfigError("grid CSV: bad header");
  std::vector<double> rs, ts;
  std::vector<NodeTag> tags;
  Point center{};
  bool first = true;
  while (next_line(is, line)) {
    auto f = split(line);
    if (f.size() != 6) throw ConfigError("grid CSV: expected 6 columns");
    const std::size_t id = std::stoul(f[0]);
    if (id != tags.size()) throw ConfigError("grid CSV: node ids must be consecutive");
    const double r = std::stod(f[1]), t = std::stod(f[2]);
    if (first) {
      center = Point{std::stod(f[3]), std::stod(f[4])} - polar_point(r, t);
      first = false;
    }
    rs.push_back(r);
    ts.push_back(t);
    tags.push_back(parse_tag(f[5]));
  }
  if (tags.empty()) throw ConfigError("grid CSV: no nodes");
  // angles vary fastest
  std::size_t nt = 1;
  while (nt < rs.size() && rs[nt] == rs[0]) ++nt;
  if (rs.size() % nt != 0) throw ConfigError("grid CSV: not a tensor grid");
  std::vector<double> radii, angles(ts.begin(), ts.begin() + static_cast<std::ptrdiff_t>(nt));
  for (std::size_t i = 0; i < rs.size(); i += nt) radii.push_back(rs[i]);
  return PolarGrid(std::move(radii), std::move(angles), std::move(tags), center, std::move(dom));
}

ScalarField read_field_csv(std::istream& is, std::shared_ptr<const PolarGrid> grid) {
  std::string line;
  if (!next_line(is, line) || line != "node_id,r,theta,value") throw ConfigError("field CSV: bad header");
  std::vector<double> v(grid->size(), 0.0);
  std::size_t count = 0;
  while (next_line(is, line)) {
    auto f = split(line);
    if (f.size() != 4) throw ConfigError("field CSV: expected 4 columns");
    const std::size_t id = std::stoul(f[0]);
    if (id >= grid->size()) throw ConfigError("field CSV: node id outside the grid");
    const double r = std::stod(f[1]), t = std::stod(f[2]);
    if (std::abs(r - grid->r(grid->radial_index(id))) > 1e-12 * std::max(1.0, r) ||
        std::abs(t - grid->theta(grid->angular_index(id))) > 1e-12)
      throw ConfigError("field CSV: coordinates do not match the grid");
    v[id] = std::stod(f[3]);
    ++count;
  }
  if (count != grid->size()) throw ConfigError("field CSV: node count does not match the grid");
  return ScalarField(std::move(grid), std::move(v));
}

void write_exponent_csv(std::ostream& os, const std::vector<ExponentRow>& rows, const std::string& hash) {
  header(os, hash);
  os << "p,N,theta0,kind,c,a,lambda\n";
  for (const auto& r : rows)
    os << num(r.p) << ',' << r.N << ',' << num(r.theta0) << ',' << to_string(r.kind) << ',' << num(r.c) << ','
       << num(r.a) << ',' << num(r.lambda) << '\n';
}

void write_profile_csv(std::ostream& os, const AngularProfile& prof, const std::string& hash, std::size_t samples) {
  header(os, hash);
  os << "theta,eta\n";
  for (std::size_t k = 0; k < samples; ++k) {
    const double th = prof.theta0 * static_cast<double>(k) / static_cast<double>(samples - 1);
    os << num(th) << ',' << num(prof.eval(th)) << '\n';
  }
}

void write_blowup_csv(std::ostream& os, const std::vector<BlowupPoint>& pts, const std::string& hash) {
  header(os, hash);
  os << "r,sup_deviation\n";
  for (const auto& b : pts) os << num(b.r) << ',' << num(b.sup_deviation) << '\n';
}

void write_file_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
    if (!f) throw ConfigError("write failed for '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bhl
