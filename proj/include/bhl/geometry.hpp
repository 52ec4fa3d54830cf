#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace bhl {

struct Point {
  double x = 0.0;
  double y = 0.0;

  Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  Point operator*(double s) const { return {x * s, y * s}; }
  double dot(Point o) const { return x * o.x + y * o.y; }
  double norm() const;
  double angle() const;  // in [0, 2π)
};

inline Point operator*(double s, Point p) { return p * s; }
double distance(Point a, Point b);
Point polar_point(double r, double theta);

enum class Shape { sector, half_disk, lipschitz_polygon };

/// Planar domain with its singular boundary point at the origin.
///
/// A sector is {r e^{iθ} : 0 ≤ r ≤ R, 0 ≤ θ ≤ ω}. The half-disk is the upper
/// half of the disk of radius R, so its flat edge passes through 0 with outward
/// normal ν₀ = (0, -1). Polygons are given counter-clockwise and must have the
/// origin on their boundary.
class DomainSpec {
 public:
  static DomainSpec sector(double opening, double radius = 1.0);
  static DomainSpec half_disk(double radius = 1.0);
  static DomainSpec lipschitz_polygon(std::vector<Point> vertices);

  Shape shape() const { return shape_; }
  double opening() const { return opening_; }
  double radius() const { return radius_; }
  const std::vector<Point>& vertices() const { return vertices_; }

  /// Lipschitz graph constant m: the largest |cot(φ/2)| over boundary corners
  /// with interior angle φ.
  double lipschitz_constant() const;

  /// Interior/exterior sphere radius R₀ for the C² part of the boundary near
  /// the origin; empty for shapes with a corner at the origin.
  std::optional<double> sphere_radius() const;
  bool is_c2_near_origin() const { return sphere_radius().has_value(); }

  bool contains(Point x, double tol = 1e-12) const;
  bool on_boundary(Point x, double tol = 1e-12) const;

  /// Outward unit normal at a boundary point lying on a flat edge or the arc.
  Point outward_normal(Point boundary_point) const;
  Point nearest_boundary_point(Point x) const;

  std::string describe() const;

 private:
  DomainSpec() = default;
  Shape shape_ = Shape::sector;
  double opening_ = 0.0;
  double radius_ = 1.0;
  std::vector<Point> vertices_;
};

/// ρ(x), the Euclidean distance from x to ∂Ω. Throws GeometryError when x is
/// outside the closure.
double distance_to_boundary(const DomainSpec& dom, Point x);

enum class NormalSide { inward, outward };

/// N_r(P) = P - rν_P (inward) or 𝒩_r(P) = P + rν_P (outward).
Point normal_point(const DomainSpec& dom, Point boundary_point, double r, NormalSide side);

struct Ball {
  Point center;
  double radius = 0.0;
  bool contains(Point x, double tol = 0.0) const;
};

struct ChainOfBalls {
  std::vector<Ball> balls;
  /// ceil(j / h): the achieved ratio between chain length and depth index.
  int achieved_n0 = 0;
};

ChainOfBalls chain_of_balls(const DomainSpec& dom, Point Q, double r, Point x, Point y, int h);

/// Direct check of the chain clauses: x ∈ B₁, y ∈ B_j, consecutive balls
/// intersect, 2Bᵢ ⊂ B_{2r}(Q) ∩ Ω (sampled on the doubled circles). Returns the
/// names of the failed clauses; empty means the chain is valid.
std::vector<std::string> check_chain(const DomainSpec& dom, Point Q, double r, Point x, Point y,
                                     const std::vector<Ball>& balls, int samples = 64);

enum class NodeTag : int { interior = 0, dirichlet_zero = 1, truncation_arc = 2 };
const char* to_string(NodeTag tag);

/// Tensor grid in (r, θ) around `center`. Node ids are i * n_theta + j with i
/// the radial index (innermost first) and j the angular index.
class PolarGrid {
 public:
  PolarGrid(std::vector<double> radii, std::vector<double> angles, std::vector<NodeTag> tags,
            Point center = {}, std::optional<DomainSpec> domain = std::nullopt);

  std::size_t n_r() const { return radii_.size(); }
  std::size_t n_theta() const { return angles_.size(); }
  std::size_t size() const { return radii_.size() * angles_.size(); }
  std::size_t id(std::size_t i, std::size_t j) const { return i * angles_.size() + j; }
  std::size_t radial_index(std::size_t id) const { return id / angles_.size(); }
  std::size_t angular_index(std::size_t id) const { return id % angles_.size(); }

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& angles() const { return angles_; }
  double r(std::size_t i) const { return radii_[i]; }
  double theta(std::size_t j) const { return angles_[j]; }
  double theta_extent() const { return angles_.back() - angles_.front(); }
  double inner_radius() const { return radii_.front(); }
  double outer_radius() const { return radii_.back(); }
  Point center() const { return center_; }
  NodeTag tag(std::size_t id) const { return tags_[id]; }
  const std::vector<NodeTag>& tags() const { return tags_; }
  const std::optional<DomainSpec>& domain() const { return domain_; }

  Point node_point(std::size_t id) const;
  /// Local mesh size at node (largest adjacent radial step or arc step).
  double local_spacing(std::size_t id) const;
  /// Max over the grid of (Δ ln r)² + Δθ², the relative resolution of a
  /// log-polar grid.
  double relative_resolution_sq() const;

  /// Bilinear interpolation in (ln r, θ) of nodal values; nullopt outside.
  std::optional<double> interpolate(const std::vector<double>& values, double r, double theta) const;

 private:
  std::vector<double> radii_;
  std::vector<double> angles_;
  std::vector<NodeTag> tags_;
  Point center_;
  std::optional<DomainSpec> domain_;
};

/// Graded polar grid of Ω ∖ B_ε(0) for sector and half-disk domains.
///
/// Radial steps shrink by the factor q toward ε. A non-positive q selects the
/// log-uniform grading q = (ε/R)^{1/(n_r-1)}, under which r_i = ε (R/ε)^{i/(n_r-1)}.
PolarGrid build_polar_grid(const DomainSpec& dom, std::size_t n_r, std::size_t n_theta,
                           double epsilon, double q = 0.0);

/// Log-uniform annular sector r_in ≤ |x - center| ≤ r_out, 0 ≤ θ ≤ theta_extent.
/// The inner arc is tagged truncation-arc, the remaining boundary dirichlet-zero.
PolarGrid build_annulus_grid(Point center, double r_in, double r_out, std::size_t n_r,
                             std::size_t n_theta, double theta_extent);

/// Number of log-uniform radial nodes so that each octave holds `per_octave`
/// steps between ε and R (R/ε should be a power of two for dyadic alignment).
std::size_t dyadic_radial_count(double epsilon, double radius, std::size_t per_octave);

}  // namespace bhl
