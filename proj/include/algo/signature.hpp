#pragma once

#include <string>
#include <vector>

namespace algo {

// Entry point of a FunctionCall-style program: the function (or Solution
// method) name and its parameter names.
struct Signature {
  std::string name;
  std::vector<std::string> params;

  friend bool operator==(const Signature&, const Signature&) = default;
};

}  // namespace algo
