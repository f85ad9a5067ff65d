#pragma once

#include <string>
#include <vector>

#include "cvxdef/domain.hpp"
#include "cvxdef/errors.hpp"

namespace cvxdef {

/// Malformed or unreadable spec file.
class SpecFileError : public Error {
 public:
  using Error::Error;
};

std::vector<std::string> builtin_names();

/// Throws SpecFileError for an unknown name.
DomainSpec builtin_spec(const std::string& name);

/// Parses a JSON spec document.
DomainSpec parse_spec_json(const std::string& text);

/// `builtin:NAME` or a path to a JSON spec file.
DomainSpec load_spec(const std::string& source);

/// JSON text of a spec, in the same layout parse_spec_json reads.
std::string spec_to_json(const DomainSpec& spec, int indent = 2);

}  // namespace cvxdef
