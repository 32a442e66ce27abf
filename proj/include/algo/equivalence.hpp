#pragma once

#include <string>
#include <string_view>

namespace algo {

// How a program's output is compared against the expected output.
//   Exact: byte equality after normalizing CRLF/CR line endings to LF.
//   Token: whitespace-delimited token sequences must match; two tokens also
//          match when both are finite decimal numbers within 1e-6.
enum class EquivalencePolicy { Exact, Token };

inline constexpr double kNumericTolerance = 1e-6;

bool compare_outputs(std::string_view expected, std::string_view actual,
                     EquivalencePolicy policy = EquivalencePolicy::Token);

std::string_view to_string(EquivalencePolicy policy);
EquivalencePolicy equivalence_from_string(std::string_view text);

}  // namespace algo
