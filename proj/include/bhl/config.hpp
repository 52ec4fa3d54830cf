#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bhl {

/// Flat key = value configuration with one [section] per command. Keys
/// before any section apply to every command; the command's section overrides them.
struct RunConfig {
  std::string command = "solve";
  double p = 2.0;
  int N = 2;
  std::string domain = "half_disk";  // half_disk | sector
  double opening = 3.141592653589793;
  double radius = 1.0;
  double c = 0.0;
  std::size_t n_r = 0;  // 0: dyadic count from per_octave
  std::size_t n_theta = 129;
  double epsilon = 1.0 / 64.0;
  double q = 0.0;  // radial grading; <= 0 means log-uniform
  double eps0 = 0.125;
  int K = 5;
  std::size_t per_octave = 16;
  double tol = 1e-8;
  int max_iterations = 200;
  std::vector<double> p_list, theta0_list, c_list;
  std::vector<int> N_list;
  std::string kind = "singular";
  std::string geometry = "auto";  // auto | planar-sector | axisymmetric-cap
  double C0 = 0.0;
  double barrier_r = 1.0;
  std::string field1, field2, grid_file;
  double arc_amp = 0.3;
  std::string out = "out";

  static RunConfig parse(const std::string& text, const std::string& command);
  static RunConfig load(const std::string& path, const std::string& command);
  void set(const std::string& key, const std::string& value);
  void validate() const;
  std::string serialize() const;
  /// FNV-1a 64 of the serialized form, as 16 hex digits.
  std::string hash() const;
  bool operator==(const RunConfig&) const = default;
};

std::uint64_t fnv1a64(const std::string& s);

}  // namespace bhl
