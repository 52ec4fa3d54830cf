#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bhl/harnack.hpp"
#include "bhl/plaplace.hpp"
#include "bhl/singular.hpp"
#include "bhl/spherical.hpp"

namespace bhl {

/// Every writer emits "# config-hash: <hash>" first when a hash is given.
void write_grid_csv(std::ostream& os, const PolarGrid& g, const std::string& hash = {});
void write_field_csv(std::ostream& os, const ScalarField& f, const std::string& hash = {});
std::string solver_log_json(const SolverLog& log, const std::string& hash = {});

/// Reads node_id,r,theta,x,y,tag; the tensor structure is rebuilt from the
/// distinct radii and angles.
PolarGrid read_grid_csv(std::istream& is, std::optional<DomainSpec> dom = std::nullopt);
/// Reads node_id,r,theta,value onto `grid`; node ids and coordinates must match.
ScalarField read_field_csv(std::istream& is, std::shared_ptr<const PolarGrid> grid);

struct ExponentRow {
  double p, theta0, c, a, lambda;
  int N;
  ExponentKind kind;
};
void write_exponent_csv(std::ostream& os, const std::vector<ExponentRow>& rows, const std::string& hash = {});
void write_profile_csv(std::ostream& os, const AngularProfile& prof, const std::string& hash = {},
                       std::size_t samples = 513);
void write_blowup_csv(std::ostream& os, const std::vector<BlowupPoint>& pts, const std::string& hash = {});

/// Writes text to path through a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace bhl
