#include "bhl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bhl/errors.hpp"

namespace bhl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& k, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad value for '" + k + "': " + v);
  }
}

long to_long(const std::string& k, const std::string& v) {
  double d = to_double(k, v);
  if (d != static_cast<double>(static_cast<long>(d))) throw ConfigError("'" + k + "' must be an integer");
  return static_cast<long>(d);
}

template <class T, class F>
std::vector<T> to_list(const std::string& v, F conv) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(conv(trim(item)));
  return out;
}

std::string num(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += num(static_cast<double>(v[i]));
  }
  return s;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& v) {
  const auto& k = key;
  if (k == "p") p = to_double(k, v);
  else if (k == "N" || k == "dim") N = static_cast<int>(to_long(k, v));
  else if (k == "domain") domain = v;
  else if (k == "opening") opening = to_double(k, v);
  else if (k == "radius") radius = to_double(k, v);
  else if (k == "c") c = to_double(k, v);
  else if (k == "n_r") n_r = static_cast<std::size_t>(to_long(k, v));
  else if (k == "n_theta") n_theta = static_cast<std::size_t>(to_long(k, v));
  else if (k == "epsilon") epsilon = to_double(k, v);
  else if (k == "q") q = to_double(k, v);
  else if (k == "eps0") eps0 = to_double(k, v);
  else if (k == "K") K = static_cast<int>(to_long(k, v));
  else if (k == "per_octave") per_octave = static_cast<std::size_t>(to_long(k, v));
  else if (k == "tol") tol = to_double(k, v);
  else if (k == "max_iterations") max_iterations = static_cast<int>(to_long(k, v));
  else if (k == "p_list") p_list = to_list<double>(v, [&](const std::string& s) { return to_double(k, s); });
  else if (k == "theta0_list") theta0_list = to_list<double>(v, [&](const std::string& s) { return to_double(k, s); });
  else if (k == "c_list") c_list = to_list<double>(v, [&](const std::string& s) { return to_double(k, s); });
  else if (k == "N_list") N_list = to_list<int>(v, [&](const std::string& s) { return static_cast<int>(to_long(k, s)); });
  else if (k == "kind") kind = v;
  else if (k == "geometry") geometry = v;
  else if (k == "C0") C0 = to_double(k, v);
  else if (k == "barrier_r") barrier_r = to_double(k, v);
  else if (k == "field1") field1 = v;
  else if (k == "field2") field2 = v;
  else if (k == "grid_file") grid_file = v;
  else if (k == "arc_amp") arc_amp = to_double(k, v);
  else if (k == "out") out = v;
  else throw ConfigError("unknown key '" + k + "'");
}

RunConfig RunConfig::parse(const std::string& text, const std::string& command) {
  RunConfig cfg;
  cfg.command = command;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  std::string current;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hashpos = line.find('#');
    if (hashpos != std::string::npos) line = line.substr(0, hashpos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
      current = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    sections[current].emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (auto& [k, v] : sections[""]) cfg.set(k, v);
  for (auto& [k, v] : sections[command]) cfg.set(k, v);
  return cfg;
}

RunConfig RunConfig::load(const std::string& path, const std::string& command) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), command);
}

void RunConfig::validate() const {
  if (!(p > 1.0)) throw ConfigError("p must be > 1");
  for (double x : p_list)
    if (!(x > 1.0)) throw ConfigError("p_list entries must be > 1");
  if (N < 2) throw ConfigError("N must be >= 2");
  if (domain != "half_disk" && domain != "sector") throw ConfigError("domain must be half_disk or sector");
  if (!(opening > 0.0 && opening < 2.0 * 3.141592653589793)) throw ConfigError("opening must lie in (0, 2pi)");
  if (!(radius > 0.0)) throw ConfigError("radius must be > 0");
  if (!(c >= 0.0)) throw ConfigError("c must be >= 0");
  for (double x : c_list)
    if (!(x >= 0.0)) throw ConfigError("c_list entries must be >= 0");
  if (n_theta < 4) throw ConfigError("n_theta must be >= 4");
  if (n_r != 0 && n_r < 4) throw ConfigError("n_r must be 0 or >= 4");
  if (!(epsilon > 0.0 && epsilon < radius)) throw ConfigError("epsilon must lie in (0, radius)");
  if (!(q < 1.0)) throw ConfigError("q must be < 1");
  if (!(eps0 > 0.0 && eps0 < radius)) throw ConfigError("eps0 must lie in (0, radius)");
  if (K < 1) throw ConfigError("K must be >= 1");
  if (per_octave < 2) throw ConfigError("per_octave must be >= 2");
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (kind != "singular" && kind != "regular") throw ConfigError("kind must be singular or regular");
  if (geometry != "auto" && geometry != "planar-sector" && geometry != "axisymmetric-cap")
    throw ConfigError("geometry must be auto, planar-sector or axisymmetric-cap");
  if (!(C0 >= 0.0)) throw ConfigError("C0 must be >= 0");
  if (!(barrier_r > 0.0)) throw ConfigError("barrier_r must be > 0");
  if (!(arc_amp > -1.0)) throw ConfigError("arc_amp must be > -1");
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os << '[' << command << "]\n";
  os << "p = " << num(p) << '\n';
  os << "N = " << N << '\n';
  os << "domain = " << domain << '\n';
  os << "opening = " << num(opening) << '\n';
  os << "radius = " << num(radius) << '\n';
  os << "c = " << num(c) << '\n';
  os << "n_r = " << n_r << '\n';
  os << "n_theta = " << n_theta << '\n';
  os << "epsilon = " << num(epsilon) << '\n';
  os << "q = " << num(q) << '\n';
  os << "eps0 = " << num(eps0) << '\n';
  os << "K = " << K << '\n';
  os << "per_octave = " << per_octave << '\n';
  os << "tol = " << num(tol) << '\n';
  os << "max_iterations = " << max_iterations << '\n';
  os << "p_list = " << join(p_list) << '\n';
  os << "theta0_list = " << join(theta0_list) << '\n';
  os << "c_list = " << join(c_list) << '\n';
  os << "N_list = " << join(N_list) << '\n';
  os << "kind = " << kind << '\n';
  os << "geometry = " << geometry << '\n';
  os << "C0 = " << num(C0) << '\n';
  os << "barrier_r = " << num(barrier_r) << '\n';
  os << "field1 = " << field1 << '\n';
  os << "field2 = " << field2 << '\n';
  os << "grid_file = " << grid_file << '\n';
  os << "arc_amp = " << num(arc_amp) << '\n';
  os << "out = " << out << '\n';
  return os.str();
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize())));
  return buf;
}

}  // namespace bhl
