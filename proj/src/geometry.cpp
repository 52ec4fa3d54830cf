#include "bhl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bhl/errors.hpp"

namespace bhl {

namespace {

constexpr double kPi = std::numbers::pi;

struct Segment {
  Point a;
  Point b;
};

Point closest_on_segment(const Segment& s, Point x) {
  const Point d = s.b - s.a;
  const double len2 = d.dot(d);
  if (len2 == 0.0) return s.a;
  const double t = std::clamp((x - s.a).dot(d) / len2, 0.0, 1.0);
  return s.a + d * t;
}

// Closest point on the arc {R e^{iθ} : θ ∈ [0, extent]}.
Point closest_on_arc(double R, double extent, Point x) {
  const double r = x.norm();
  if (r > 0.0) {
    const double a = x.angle();
    if (a <= extent) return x * (R / r);
  }
  const Point e0 = polar_point(R, 0.0);
  const Point e1 = polar_point(R, extent);
  return distance(x, e0) <= distance(x, e1) ? e0 : e1;
}

std::vector<Segment> segments_of(const DomainSpec& dom) {
  std::vector<Segment> segs;
  switch (dom.shape()) {
    case Shape::sector:
      segs.push_back({{0.0, 0.0}, polar_point(dom.radius(), 0.0)});
      segs.push_back({{0.0, 0.0}, polar_point(dom.radius(), dom.opening())});
      break;
    case Shape::half_disk:
      segs.push_back({{-dom.radius(), 0.0}, {dom.radius(), 0.0}});
      break;
    case Shape::lipschitz_polygon: {
      const auto& v = dom.vertices();
      for (std::size_t k = 0; k < v.size(); ++k) segs.push_back({v[k], v[(k + 1) % v.size()]});
      break;
    }
  }
  return segs;
}

bool has_arc(const DomainSpec& dom) { return dom.shape() != Shape::lipschitz_polygon; }
double arc_extent(const DomainSpec& dom) {
  return dom.shape() == Shape::half_disk ? kPi : dom.opening();
}

double polygon_interior_angle(const std::vector<Point>& v, std::size_t k) {
  const std::size_t n = v.size();
  const Point prev = v[(k + n - 1) % n] - v[k];
  const Point next = v[(k + 1) % n] - v[k];
  // Counter-clockwise order: interior angle measured from `next` to `prev`.
  double a = std::atan2(next.x * prev.y - next.y * prev.x, next.dot(prev));
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

}  // namespace

std::string to_string(Module m) {
  switch (m) {
    case Module::geometry: return "geometry";
    case Module::solver: return "plaplace_solver";
    case Module::exponents: return "spherical_exponents";
    case Module::barriers: return "barriers";
    case Module::verifier: return "harnack_verifier";
    case Module::singular: return "singular_solutions";
    case Module::cli: return "cli";
  }
  return "unknown";
}

double Point::norm() const { return std::hypot(x, y); }

double Point::angle() const {
  double a = std::atan2(y, x);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

double distance(Point a, Point b) { return (a - b).norm(); }
Point polar_point(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

DomainSpec DomainSpec::sector(double opening, double radius) {
  if (!(opening > 0.0 && opening < 2.0 * kPi))
    throw GeometryError("configuration", "sector opening must lie in (0, 2π)");
  if (!(radius > 0.0)) throw GeometryError("configuration", "sector radius must be positive");
  DomainSpec d;
  d.shape_ = Shape::sector;
  d.opening_ = opening;
  d.radius_ = radius;
  return d;
}

DomainSpec DomainSpec::half_disk(double radius) {
  if (!(radius > 0.0)) throw GeometryError("configuration", "half-disk radius must be positive");
  DomainSpec d;
  d.shape_ = Shape::half_disk;
  d.opening_ = kPi;
  d.radius_ = radius;
  return d;
}

DomainSpec DomainSpec::lipschitz_polygon(std::vector<Point> vertices) {
  if (vertices.size() < 3) throw GeometryError("configuration", "polygon needs at least 3 vertices");
  double area2 = 0.0;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const Point a = vertices[k];
    const Point b = vertices[(k + 1) % vertices.size()];
    area2 += a.x * b.y - a.y * b.x;
  }
  if (area2 < 0.0) std::reverse(vertices.begin(), vertices.end());
  DomainSpec d;
  d.shape_ = Shape::lipschitz_polygon;
  d.vertices_ = std::move(vertices);
  double rmax = 0.0;
  for (const auto& v : d.vertices_) rmax = std::max(rmax, v.norm());
  d.radius_ = rmax;
  if (!d.on_boundary({0.0, 0.0}, 1e-12))
    throw GeometryError("configuration", "the origin must lie on the polygon boundary");
  return d;
}

double DomainSpec::lipschitz_constant() const {
  auto corner = [](double interior_angle) {
    return std::abs(std::cos(interior_angle / 2.0) / std::sin(interior_angle / 2.0));
  };
  switch (shape_) {
    case Shape::sector: return std::max(corner(opening_), corner(kPi / 2.0));
    case Shape::half_disk: return corner(kPi / 2.0);
    case Shape::lipschitz_polygon: {
      double m = 0.0;
      for (std::size_t k = 0; k < vertices_.size(); ++k)
        m = std::max(m, corner(polygon_interior_angle(vertices_, k)));
      return m;
    }
  }
  return 0.0;
}

std::optional<double> DomainSpec::sphere_radius() const {
  // Interior balls B_{R/4}((x₁, R/4)) stay in the half-disk for |x₁| ≤ R/√2.
  if (shape_ == Shape::half_disk) return radius_ / 4.0;
  if (shape_ == Shape::sector && std::abs(opening_ - kPi) < 1e-14) return radius_ / 4.0;
  return std::nullopt;
}

bool DomainSpec::contains(Point x, double tol) const {
  switch (shape_) {
    case Shape::half_disk:
      return x.y >= -tol && x.norm() <= radius_ + tol;
    case Shape::sector: {
      if (x.norm() > radius_ + tol) return false;
      if (x.norm() <= tol) return true;
      if (x.angle() <= opening_) return true;
      return on_boundary(x, tol);
    }
    case Shape::lipschitz_polygon: {
      if (on_boundary(x, tol)) return true;
      int winding = 0;
      const auto& v = vertices_;
      for (std::size_t k = 0; k < v.size(); ++k) {
        const Point a = v[k];
        const Point b = v[(k + 1) % v.size()];
        const double cross = (b.x - a.x) * (x.y - a.y) - (x.x - a.x) * (b.y - a.y);
        if (a.y <= x.y) {
          if (b.y > x.y && cross > 0.0) ++winding;
        } else if (b.y <= x.y && cross < 0.0) {
          --winding;
        }
      }
      return winding != 0;
    }
  }
  return false;
}

Point DomainSpec::nearest_boundary_point(Point x) const {
  Point best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_of(*this)) {
    const Point c = closest_on_segment(s, x);
    const double d = distance(c, x);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (has_arc(*this)) {
    const Point c = closest_on_arc(radius_, arc_extent(*this), x);
    if (distance(c, x) < best_d) best = c;
  }
  return best;
}

bool DomainSpec::on_boundary(Point x, double tol) const {
  return distance(nearest_boundary_point(x), x) <= tol;
}

Point DomainSpec::outward_normal(Point P) const {
  const double tol = 1e-10 * std::max(1.0, radius_);
  if (!on_boundary(P, tol)) throw GeometryError("domain-membership", "point is not on the boundary");
  std::vector<std::pair<double, Point>> candidates;
  switch (shape_) {
    case Shape::half_disk:
      if (std::abs(P.y) <= tol && std::abs(P.x) < radius_ - tol) return {0.0, -1.0};
      return P * (1.0 / P.norm());
    case Shape::sector: {
      const double r = P.norm();
      if (std::abs(r - radius_) <= tol) return P * (1.0 / r);
      const Point e0{1.0, 0.0};
      const Point e1 = polar_point(1.0, opening_);
      if (std::abs(P.x * e0.y - P.y * e0.x) <= tol && P.dot(e0) >= -tol) return {0.0, -1.0};
      if (std::abs(P.x * e1.y - P.y * e1.x) <= tol && P.dot(e1) >= -tol)
        return {-std::sin(opening_), std::cos(opening_)};
      break;
    }
    case Shape::lipschitz_polygon: {
      const auto& v = vertices_;
      for (std::size_t k = 0; k < v.size(); ++k) {
        const Segment s{v[k], v[(k + 1) % v.size()]};
        if (distance(closest_on_segment(s, P), P) <= tol) {
          const Point d = s.b - s.a;
          const double len = d.norm();
          return {d.y / len, -d.x / len};
        }
      }
      break;
    }
  }
  throw GeometryError("domain-membership", "no unique outward normal at this boundary point");
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  switch (shape_) {
    case Shape::sector: os << "sector(opening=" << opening_ << ", radius=" << radius_ << ")"; break;
    case Shape::half_disk: os << "half-disk(radius=" << radius_ << ")"; break;
    case Shape::lipschitz_polygon: os << "polygon(" << vertices_.size() << " vertices)"; break;
  }
  return os.str();
}

double distance_to_boundary(const DomainSpec& dom, Point x) {
  const double tol = 1e-12 * std::max(1.0, dom.radius());
  if (!dom.contains(x, tol))
    throw GeometryError("domain-membership", "point lies outside the closure of the domain");
  return distance(dom.nearest_boundary_point(x), x);
}

Point normal_point(const DomainSpec& dom, Point P, double r, NormalSide side) {
  const auto R0 = dom.sphere_radius();
  if (!R0) throw GeometryError("not-c2", "normal points need a C2 boundary near the origin");
  if (!(r > 0.0)) throw GeometryError("out-of-tube", "normal offset must be positive");
  if (r > *R0 * (1.0 + 1e-12)) throw GeometryError("out-of-tube", "normal offset exceeds R0");
  const Point nu = dom.outward_normal(P);
  return side == NormalSide::inward ? P - nu * r : P + nu * r;
}

bool Ball::contains(Point x, double tol) const { return distance(x, center) <= radius + tol; }

ChainOfBalls chain_of_balls(const DomainSpec& dom, Point Q, double r, Point x, Point y, int h) {
  const double tol = 1e-12 * std::max(1.0, dom.radius());
  if (h < 1) throw GeometryError("precondition", "h must be a positive integer");
  if (!(r > 0.0)) throw GeometryError("precondition", "r must be positive");
  if (!dom.on_boundary(Q, tol)) throw GeometryError("precondition", "Q must lie on the boundary");
  for (const Point p : {x, y}) {
    if (!dom.contains(p, tol)) throw GeometryError("precondition", "x and y must lie in the domain");
    if (distance(p, Q) >= 1.5 * r) throw GeometryError("precondition", "x and y must lie in B_{3r/2}(Q)");
  }
  const double depth_floor = r / std::ldexp(1.0, h);
  if (std::min(distance_to_boundary(dom, x), distance_to_boundary(dom, y)) < depth_floor * (1.0 - 1e-12))
    throw GeometryError("precondition", "min(rho(x), rho(y)) must be at least r/2^h");

  auto radius_at = [&](Point z) {
    return std::min(distance_to_boundary(dom, z), 2.0 * r - distance(z, Q)) / 4.0;
  };
  constexpr int kMaxSteps = 100000;

  // Climb away from the nearest boundary point until depth r/4 is reached.
  const double target_depth = r / 4.0;
  auto ascend = [&](Point z) {
    std::vector<Point> path{z};
    for (int k = 0; k < kMaxSteps; ++k) {
      const double rho = distance_to_boundary(dom, z);
      if (rho >= target_depth) return path;
      Point dir = z - dom.nearest_boundary_point(z);
      const double len = dir.norm();
      if (len == 0.0) throw GeometryError("construction", "chain start lies on the boundary");
      z = z + dir * (radius_at(z) / len);
      if (!dom.contains(z, tol)) throw GeometryError("construction", "ascent left the domain");
      path.push_back(z);
    }
    throw GeometryError("construction", "ascent did not reach the target depth");
  };

  ChainOfBalls out;
  if (distance(x, y) == 0.0) {
    out.balls.push_back({x, radius_at(x)});
    out.achieved_n0 = 1;
    return out;
  }

  std::vector<Point> path = ascend(x);
  std::vector<Point> tail = ascend(y);
  const Point a = path.back();
  const Point b = tail.back();
  Point z = a;
  for (int k = 0; k < kMaxSteps && distance(z, b) > 0.0; ++k) {
    const double rad = radius_at(z);
    if (!(rad > 0.0)) throw GeometryError("construction", "traverse touched the boundary");
    const double rem = distance(z, b);
    z = rem <= rad ? b : z + (b - z) * (rad / rem);
    path.push_back(z);
  }
  if (distance(z, b) > 0.0) throw GeometryError("construction", "traverse did not terminate");
  path.pop_back();  // b is the last point of the reversed tail
  path.insert(path.end(), tail.rbegin(), tail.rend());

  out.balls.reserve(path.size());
  for (const Point p : path) out.balls.push_back({p, radius_at(p)});
  out.achieved_n0 = static_cast<int>((out.balls.size() + h - 1) / h);
  return out;
}

std::vector<std::string> check_chain(const DomainSpec& dom, Point Q, double r, Point x, Point y,
                                     const std::vector<Ball>& balls, int samples) {
  std::vector<std::string> failed;
  if (balls.empty()) return {"non-empty chain"};
  if (!balls.front().contains(x, 1e-14)) failed.emplace_back("x in B_1");
  if (!balls.back().contains(y, 1e-14)) failed.emplace_back("y in B_j");
  for (std::size_t i = 0; i + 1 < balls.size(); ++i) {
    if (distance(balls[i].center, balls[i + 1].center) >= balls[i].radius + balls[i + 1].radius) {
      failed.push_back("B_" + std::to_string(i + 1) + " meets B_" + std::to_string(i + 2));
      break;
    }
  }
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const Ball& B = balls[i];
    bool ok = B.radius > 0.0 && distance(B.center, Q) + 2.0 * B.radius < 2.0 * r &&
              dom.contains(B.center) && distance_to_boundary(dom, B.center) > 2.0 * B.radius;
    for (int k = 0; ok && k < samples; ++k) {
      const Point s = B.center + polar_point(2.0 * B.radius, 2.0 * kPi * k / samples);
      ok = dom.contains(s, 0.0) && !dom.on_boundary(s, 0.0) && distance(s, Q) < 2.0 * r;
    }
    if (!ok) {
      failed.push_back("2B_" + std::to_string(i + 1) + " inside B_2r(Q) ∩ Ω");
      break;
    }
  }
  return failed;
}

const char* to_string(NodeTag tag) {
  switch (tag) {
    case NodeTag::interior: return "interior";
    case NodeTag::dirichlet_zero: return "dirichlet-zero";
    case NodeTag::truncation_arc: return "truncation-arc";
  }
  return "unknown";
}

PolarGrid::PolarGrid(std::vector<double> radii, std::vector<double> angles, std::vector<NodeTag> tags,
                     Point center, std::optional<DomainSpec> domain)
    : radii_(std::move(radii)),
      angles_(std::move(angles)),
      tags_(std::move(tags)),
      center_(center),
      domain_(std::move(domain)) {
  if (radii_.size() < 2 || angles_.size() < 2) throw GeometryError("configuration", "grid too small");
  if (!(radii_.front() > 0.0)) throw GeometryError("configuration", "innermost radius must be positive");
  for (std::size_t i = 1; i < radii_.size(); ++i)
    if (!(radii_[i] > radii_[i - 1])) throw GeometryError("configuration", "radii must increase strictly");
  for (std::size_t j = 1; j < angles_.size(); ++j)
    if (!(angles_[j] > angles_[j - 1])) throw GeometryError("configuration", "angles must increase strictly");
  if (tags_.size() != size()) throw GeometryError("configuration", "tag count does not match node count");
}

Point PolarGrid::node_point(std::size_t id) const {
  return center_ + polar_point(radii_[radial_index(id)], angles_[angular_index(id)]);
}

double PolarGrid::local_spacing(std::size_t id) const {
  const std::size_t i = radial_index(id);
  const std::size_t j = angular_index(id);
  double h = 0.0;
  if (i > 0) h = std::max(h, radii_[i] - radii_[i - 1]);
  if (i + 1 < radii_.size()) h = std::max(h, radii_[i + 1] - radii_[i]);
  if (j > 0) h = std::max(h, radii_[i] * (angles_[j] - angles_[j - 1]));
  if (j + 1 < angles_.size()) h = std::max(h, radii_[i] * (angles_[j + 1] - angles_[j]));
  return h;
}

double PolarGrid::relative_resolution_sq() const {
  double ds = 0.0;
  double dt = 0.0;
  for (std::size_t i = 1; i < radii_.size(); ++i) ds = std::max(ds, std::log(radii_[i] / radii_[i - 1]));
  for (std::size_t j = 1; j < angles_.size(); ++j) dt = std::max(dt, angles_[j] - angles_[j - 1]);
  return ds * ds + dt * dt;
}

std::optional<double> PolarGrid::interpolate(const std::vector<double>& values, double r,
                                             double theta) const {
  const double rtol = 1e-12 * radii_.back();
  const double ttol = 1e-12;
  if (r < radii_.front() - rtol || r > radii_.back() + rtol) return std::nullopt;
  if (theta < angles_.front() - ttol || theta > angles_.back() + ttol) return std::nullopt;
  r = std::clamp(r, radii_.front(), radii_.back());
  theta = std::clamp(theta, angles_.front(), angles_.back());
  auto locate = [](const std::vector<double>& v, double t) {
    auto it = std::upper_bound(v.begin(), v.end(), t);
    std::size_t k = it == v.begin() ? 0 : static_cast<std::size_t>(it - v.begin()) - 1;
    return std::min(k, v.size() - 2);
  };
  const std::size_t i = locate(radii_, r);
  const std::size_t j = locate(angles_, theta);
  const double s = (std::log(r) - std::log(radii_[i])) / (std::log(radii_[i + 1]) - std::log(radii_[i]));
  const double t = (theta - angles_[j]) / (angles_[j + 1] - angles_[j]);
  const double v00 = values[id(i, j)];
  const double v01 = values[id(i, j + 1)];
  const double v10 = values[id(i + 1, j)];
  const double v11 = values[id(i + 1, j + 1)];
  return (1 - s) * ((1 - t) * v00 + t * v01) + s * ((1 - t) * v10 + t * v11);
}

namespace {

std::vector<double> uniform_angles(std::size_t n, double extent) {
  std::vector<double> a(n);
  for (std::size_t j = 0; j < n; ++j) a[j] = extent * static_cast<double>(j) / static_cast<double>(n - 1);
  a.back() = extent;
  return a;
}

std::vector<double> log_uniform_radii(double r_in, double r_out, std::size_t n) {
  std::vector<double> r(n);
  const double span = std::log(r_out / r_in);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = r_in * std::exp(span * static_cast<double>(i) / static_cast<double>(n - 1));
  r.front() = r_in;
  r.back() = r_out;
  return r;
}

std::vector<NodeTag> sector_tags(std::size_t n_r, std::size_t n_theta) {
  std::vector<NodeTag> tags(n_r * n_theta, NodeTag::interior);
  for (std::size_t i = 0; i < n_r; ++i) {
    for (std::size_t j = 0; j < n_theta; ++j) {
      NodeTag& t = tags[i * n_theta + j];
      if (j == 0 || j + 1 == n_theta || i + 1 == n_r) t = NodeTag::dirichlet_zero;
      else if (i == 0) t = NodeTag::truncation_arc;
    }
  }
  return tags;
}

}  // namespace

PolarGrid build_polar_grid(const DomainSpec& dom, std::size_t n_r, std::size_t n_theta, double epsilon,
                           double q) {
  if (dom.shape() == Shape::lipschitz_polygon)
    throw GeometryError("configuration", "polar grids need a sector or half-disk domain");
  if (n_r < 4 || n_theta < 4) throw GeometryError("configuration", "insufficient resolution (need n_r, n_theta >= 4)");
  const double R = dom.radius();
  if (!(epsilon > 0.0 && epsilon < R)) throw GeometryError("configuration", "epsilon must lie in (0, R)");

  std::vector<double> radii;
  if (q <= 0.0) {
    radii = log_uniform_radii(epsilon, R, n_r);
  } else {
    if (!(q < 1.0)) throw GeometryError("configuration", "grading ratio q must lie in (0, 1)");
    const std::size_t steps = n_r - 1;
    const double outer_step = (R - epsilon) * (1.0 - q) / (1.0 - std::pow(q, static_cast<double>(steps)));
    radii.assign(n_r, 0.0);
    radii.back() = R;
    double h = outer_step;
    for (std::size_t k = n_r - 1; k > 0; --k) {
      radii[k - 1] = radii[k] - h;
      h *= q;
    }
    radii.front() = epsilon;
  }
  const double extent = dom.shape() == Shape::half_disk ? std::numbers::pi : dom.opening();
  return PolarGrid(std::move(radii), uniform_angles(n_theta, extent), sector_tags(n_r, n_theta), Point{}, dom);
}

PolarGrid build_annulus_grid(Point center, double r_in, double r_out, std::size_t n_r, std::size_t n_theta,
                             double theta_extent) {
  if (n_r < 4 || n_theta < 4) throw GeometryError("configuration", "insufficient resolution (need n_r, n_theta >= 4)");
  if (!(r_in > 0.0 && r_out > r_in)) throw GeometryError("configuration", "need 0 < r_in < r_out");
  return PolarGrid(log_uniform_radii(r_in, r_out, n_r), uniform_angles(n_theta, theta_extent),
                   sector_tags(n_r, n_theta), center);
}

std::size_t dyadic_radial_count(double epsilon, double radius, std::size_t per_octave) {
  const double octaves = std::log2(radius / epsilon);
  const auto whole = static_cast<std::size_t>(std::ceil(octaves - 1e-9));
  return per_octave * std::max<std::size_t>(whole, 1) + 1;
}

}  // namespace bhl
