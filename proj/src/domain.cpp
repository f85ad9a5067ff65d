#include "cvxdef/domain.hpp"

#include <cmath>

#include "cvxdef/errors.hpp"

namespace cvxdef {

double Box::diameter() const { return norm(subtract(hi, lo)); }

bool Box::contains(std::span<const double> x) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
  return true;
}

Vector Box::center() const {
  Vector c = add(lo, hi);
  for (double& v : c) v *= 0.5;
  return c;
}

DomainSpec::DomainSpec(std::string name, std::size_t dim, std::string expr_text, Box region, Vector seed_point,
                       std::optional<double> collar_radius, std::uint64_t seed)
    : name_(std::move(name)),
      dim_(dim),
      expr_text_(std::move(expr_text)),
      region_(std::move(region)),
      seed_point_(std::move(seed_point)),
      collar_radius_(0.0),
      collar_given_(collar_radius.has_value()),
      seed_(seed) {
  if (dim_ == 0) throw DimensionError("spec '" + name_ + "': dim must be positive");
  if (region_.lo.size() != dim_ || region_.hi.size() != dim_)
    throw DimensionError("spec '" + name_ + "': region arrays must have length dim");
  if (seed_point_.size() != dim_) throw DimensionError("spec '" + name_ + "': seed_point must have length dim");
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!std::isfinite(region_.lo[i]) || !std::isfinite(region_.hi[i]) || !(region_.lo[i] < region_.hi[i]))
      throw DimensionError("spec '" + name_ + "': region needs lo < hi in every coordinate");
  }
  if (!all_finite(seed_point_)) throw NonFiniteError("spec '" + name_ + "': seed_point is not finite");
  collar_radius_ = collar_radius.value_or(0.1 * region_.diameter());
  if (!(collar_radius_ > 0.0) || !std::isfinite(collar_radius_))
    throw DimensionError("spec '" + name_ + "': collar_radius must be positive");
  field_ = std::make_shared<const ExprField>(parse_expr(expr_text_, dim_), dim_);
}

}  // namespace cvxdef
