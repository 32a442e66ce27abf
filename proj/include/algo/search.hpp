#pragma once

#include <optional>
#include <string>
#include <vector>

#include "algo/generation.hpp"
#include "algo/problem.hpp"
#include "algo/verifier.hpp"

namespace algo {

enum class StrategyKind { Implicit, InstructionEnumerator, Iterative };

std::string_view to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(std::string_view text);

struct StrategySpec {
  StrategyKind kind = StrategyKind::Implicit;
  int sample_budget = 1;
  // Empty means "use the problem's categories" for the enumerator.
  std::vector<std::string> instruction_set;
  int max_rounds = 3;

  // Throws ConfigError. `resolved_instructions` is the set actually used.
  void validate(const std::vector<std::string>& resolved_instructions = {}) const;
};

struct RankedEntry {
  GeneratedProgram candidate;
  Verdict verdict;
  int rank = 0;
};

struct RankedCandidates {
  std::vector<RankedEntry> entries;

  const RankedEntry* top() const { return entries.empty() ? nullptr : &entries.front(); }
  // Category of the top-ranked candidate (instruction enumerator only).
  std::optional<std::string> selected_category() const;
  // Category of the first candidate, in generation order, whose verdict passed.
  std::optional<std::string> first_passing_category;
};

// Orders by (pass desc, cases_passed desc, passed_public_tests desc,
// attempt asc, transcript hash asc, source asc). Input order never matters.
RankedCandidates rank_candidates(std::vector<std::pair<GeneratedProgram, Verdict>> verdicts);

// Everything a strategy needs beyond the problem.
struct SearchContext {
  Services& services;
  const Suite& suite;
  EquivalencePolicy policy = EquivalencePolicy::Token;
};

inline constexpr int kRefinementCounterexamples = 3;

RankedCandidates run_implicit(const Problem& problem, const StrategySpec& spec, SearchContext& ctx);
RankedCandidates run_instruction_enumerator(const Problem& problem, const StrategySpec& spec,
                                            SearchContext& ctx);
RankedCandidates run_iterative(const Problem& problem, const StrategySpec& spec, SearchContext& ctx);

// Dispatches on spec.kind.
RankedCandidates run_strategy(const Problem& problem, const StrategySpec& spec, SearchContext& ctx);

// Renders failing cases for the Refinement prompt.
std::string format_counterexamples(const std::vector<Counterexample>& cexs, std::size_t limit);

}  // namespace algo
