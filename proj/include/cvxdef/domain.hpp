#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "cvxdef/field.hpp"
#include "cvxdef/linalg.hpp"

namespace cvxdef {

struct Box {
  Vector lo;
  Vector hi;

  std::size_t dim() const noexcept { return lo.size(); }
  double diameter() const;
  bool contains(std::span<const double> x) const;
  Vector center() const;
};

/// Implicit domain {r < 0} restricted to a box region.
class DomainSpec {
 public:
  DomainSpec(std::string name, std::size_t dim, std::string expr_text, Box region, Vector seed_point,
             std::optional<double> collar_radius = std::nullopt, std::uint64_t seed = 42);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& expr_text() const noexcept { return expr_text_; }
  const Expr& expr() const noexcept { return field_->expr(); }
  const Box& region() const noexcept { return region_; }
  const Vector& seed_point() const noexcept { return seed_point_; }
  double collar_radius() const noexcept { return collar_radius_; }
  bool collar_radius_given() const noexcept { return collar_given_; }
  std::uint64_t seed() const noexcept { return seed_; }

  const ExprField& field() const noexcept { return *field_; }
  std::shared_ptr<const ExprField> field_ptr() const noexcept { return field_; }

 private:
  std::string name_;
  std::size_t dim_;
  std::string expr_text_;
  Box region_;
  Vector seed_point_;
  double collar_radius_;
  bool collar_given_;
  std::uint64_t seed_;
  std::shared_ptr<const ExprField> field_;
};

}  // namespace cvxdef
