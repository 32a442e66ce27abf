#include "algo/equivalence.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

#include "algo/errors.hpp"

namespace algo {
namespace {

std::string normalize_line_endings(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

bool is_integer_literal(std::string_view tok) {
  std::size_t i = (!tok.empty() && (tok[0] == '-' || tok[0] == '+')) ? 1 : 0;
  if (i == tok.size()) return false;
  for (; i < tok.size(); ++i) {
    if (tok[i] < '0' || tok[i] > '9') return false;
  }
  return true;
}

std::optional<double> parse_decimal(std::string_view tok) {
  if (!tok.empty() && tok[0] == '+') tok.remove_prefix(1);
  double value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool tokens_match(std::string_view a, std::string_view b) {
  if (a == b) return true;
  // Integers compare exactly: doubles would conflate large distinct values.
  if (is_integer_literal(a) && is_integer_literal(b)) return false;
  auto x = parse_decimal(a);
  auto y = parse_decimal(b);
  return x && y && std::fabs(*x - *y) <= kNumericTolerance;
}

}  // namespace

bool compare_outputs(std::string_view expected, std::string_view actual, EquivalencePolicy policy) {
  if (policy == EquivalencePolicy::Exact) {
    return normalize_line_endings(expected) == normalize_line_endings(actual);
  }
  auto want = tokenize(expected);
  auto got = tokenize(actual);
  if (want.size() != got.size()) return false;
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (!tokens_match(want[i], got[i])) return false;
  }
  return true;
}

std::string_view to_string(EquivalencePolicy policy) {
  return policy == EquivalencePolicy::Exact ? "exact" : "token";
}

EquivalencePolicy equivalence_from_string(std::string_view text) {
  if (text == "exact") return EquivalencePolicy::Exact;
  if (text == "token") return EquivalencePolicy::Token;
  throw SchemaError("equivalence", "expected 'exact' or 'token', got '" + std::string(text) + "'");
}

}  // namespace algo
