#include "algo/search.hpp"

#include <algorithm>
#include <thread>
#include <tuple>

#include "algo/errors.hpp"

namespace algo {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Implicit: return "implicit";
    case StrategyKind::InstructionEnumerator: return "instruction_enumerator";
    case StrategyKind::Iterative: return "iterative";
  }
  return "?";
}

StrategyKind strategy_kind_from_string(std::string_view text) {
  if (text == "implicit") return StrategyKind::Implicit;
  if (text == "instruction_enumerator" || text == "enumerator") return StrategyKind::InstructionEnumerator;
  if (text == "iterative") return StrategyKind::Iterative;
  throw ConfigError("unknown strategy '" + std::string(text) + "'");
}

void StrategySpec::validate(const std::vector<std::string>& resolved) const {
  if (sample_budget < 1) throw ConfigError("strategy.sample_budget must be >= 1");
  if (kind == StrategyKind::InstructionEnumerator && instruction_set.empty() && resolved.empty()) {
    throw ConfigError("instruction enumerator needs a non-empty instruction set");
  }
  if (kind == StrategyKind::Iterative && max_rounds < 1) throw ConfigError("strategy.max_rounds must be >= 1");
}

std::optional<std::string> RankedCandidates::selected_category() const {
  if (entries.empty()) return std::nullopt;
  return entries.front().candidate.category;
}

RankedCandidates rank_candidates(std::vector<std::pair<GeneratedProgram, Verdict>> verdicts) {
  auto key = [](const std::pair<GeneratedProgram, Verdict>& e) {
    const auto& [c, v] = e;
    return std::make_tuple(!v.pass, -v.cases_passed, !c.passed_public_tests, c.provenance.attempt,
                           std::cref(c.provenance.transcript_hash), std::cref(c.source));
  };
  std::sort(verdicts.begin(), verdicts.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  RankedCandidates out;
  int rank = 1;
  for (auto& [c, v] : verdicts) out.entries.push_back({std::move(c), std::move(v), rank++});
  return out;
}

namespace {

// Verifies candidates concurrently; the executor's process slots bound the
// number of live guest processes.
std::vector<Verdict> verify_all(const Problem& problem, const std::vector<GeneratedProgram>& candidates,
                                SearchContext& ctx) {
  std::vector<Verdict> verdicts(candidates.size());
  std::vector<std::exception_ptr> errors(candidates.size());
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          verdicts[i] = verify_candidate(problem, candidates[i], ctx.suite, ctx.services.executor,
                                         ctx.services.candidate_limits, ctx.policy);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return verdicts;
}

RankedCandidates rank_verified(const Problem& problem, std::vector<GeneratedProgram> candidates,
                               SearchContext& ctx) {
  auto verdicts = verify_all(problem, candidates, ctx);
  std::optional<std::string> first_passing;
  std::vector<std::pair<GeneratedProgram, Verdict>> pairs;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!first_passing && verdicts[i].pass) first_passing = candidates[i].category;
    pairs.emplace_back(std::move(candidates[i]), std::move(verdicts[i]));
  }
  auto ranked = rank_candidates(std::move(pairs));
  ranked.first_passing_category = first_passing;
  return ranked;
}

}  // namespace

RankedCandidates run_implicit(const Problem& problem, const StrategySpec& spec, SearchContext& ctx) {
  spec.validate();
  std::vector<GeneratedProgram> candidates;
  for (int i = 1; i <= spec.sample_budget; ++i) {
    // One sample per draw; the attempt number keeps request hashes distinct.
    try {
      candidates.push_back(generate_candidate(problem, std::nullopt, ctx.services, 1, i));
    } catch (const EmptyResponse&) {
    }
  }
  return rank_verified(problem, std::move(candidates), ctx);
}

RankedCandidates run_instruction_enumerator(const Problem& problem, const StrategySpec& spec,
                                            SearchContext& ctx) {
  const auto& instructions = spec.instruction_set.empty() ? problem.categories : spec.instruction_set;
  spec.validate(instructions);
  std::vector<GeneratedProgram> candidates;
  for (const auto& instruction : instructions) {
    try {
      candidates.push_back(generate_candidate(problem, instruction, ctx.services, kCandidateMaxAttempts));
    } catch (const EmptyResponse&) {
    }
  }
  return rank_verified(problem, std::move(candidates), ctx);
}

std::string format_counterexamples(const std::vector<Counterexample>& cexs, std::size_t limit) {
  std::string out;
  std::size_t n = std::min(limit, cexs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = cexs[i];
    out += "Input:\n" + c.input;
    if (!c.input.empty() && c.input.back() != '\n') out += '\n';
    out += "Expected output:\n" + c.expected;
    if (!c.expected.empty() && c.expected.back() != '\n') out += '\n';
    out += "Your output:\n" + c.actual;
    if (!c.actual.empty() && c.actual.back() != '\n') out += '\n';
    if (i + 1 < n) out += '\n';
  }
  return out;
}

RankedCandidates run_iterative(const Problem& problem, const StrategySpec& spec, SearchContext& ctx) {
  spec.validate();
  std::vector<std::pair<GeneratedProgram, Verdict>> rounds;
  std::optional<std::string> first_passing;
  for (int round = 1; round <= spec.max_rounds; ++round) {
    GeneratedProgram program;
    try {
      if (round == 1) {
        program = generate_candidate(problem, std::nullopt, ctx.services, 1, 1);
      } else {
        const auto& [prev, prev_verdict] = rounds.back();
        program = generate_refinement(problem, prev,
                                      format_counterexamples(prev_verdict.counterexamples,
                                                             kRefinementCounterexamples),
                                      ctx.services, round);
      }
    } catch (const EmptyResponse&) {
      // Nothing to refine from when round 1 produced no program.
      if (rounds.empty()) break;
      continue;
    }
    Verdict verdict = verify_candidate(problem, program, ctx.suite, ctx.services.executor,
                                       ctx.services.candidate_limits, ctx.policy);
    bool passed = verdict.pass;
    if (passed) first_passing = program.category;
    rounds.emplace_back(std::move(program), std::move(verdict));
    if (passed) break;
  }
  auto ranked = rank_candidates(std::move(rounds));
  ranked.first_passing_category = first_passing;
  return ranked;
}

RankedCandidates run_strategy(const Problem& problem, const StrategySpec& spec, SearchContext& ctx) {
  switch (spec.kind) {
    case StrategyKind::Implicit: return run_implicit(problem, spec, ctx);
    case StrategyKind::InstructionEnumerator: return run_instruction_enumerator(problem, spec, ctx);
    case StrategyKind::Iterative: return run_iterative(problem, spec, ctx);
  }
  throw ConfigError("unknown strategy");
}

}  // namespace algo
