#include "algo/verifier.hpp"

#include <algorithm>
#include <json.hpp>

#include "algo/digest.hpp"
#include "algo/errors.hpp"

namespace algo {
using nlohmann::json;

std::vector<TestCase> Suite::tests() const {
  std::vector<TestCase> out;
  out.reserve(cases.size());
  for (const auto& c : cases) out.push_back(c.test);
  return out;
}

Suite Suite::prefix(std::size_t size) const {
  Suite s = *this;
  if (size < s.cases.size()) s.cases.resize(size);
  return s;
}

Suite suite_from_tests(std::span<const TestCase> tests) {
  Suite s;
  for (std::size_t i = 0; i < tests.size(); ++i) s.cases.push_back({tests[i], 0, static_cast<int>(i)});
  s.requested = s.generated = static_cast<int>(tests.size());
  return s;
}

Suite build_suite(const Problem& problem, const VerifierBundle& bundle, int size, std::uint64_t seed,
                  const Executor& executor, const SuiteLimits& limits) {
  if (size < 1) throw DomainError("suite size must be >= 1");
  Suite suite;
  suite.requested = size;
  const int budget = kDrawBudgetFactor * size;
  const GuestProgram generator{bundle.batch_generator.source, std::nullopt};
  const GuestProgram validator{bundle.validator.source, std::nullopt};

  for (int round = 0; static_cast<int>(suite.cases.size()) < size && suite.generated < budget; ++round) {
    int want = std::min(size - static_cast<int>(suite.cases.size()), budget - suite.generated);
    std::uint64_t round_seed = round == 0 ? seed : derive_seed(seed, "round-" + std::to_string(round));
    auto gen = executor.run(generator, batch_generator_request(want, round_seed, bundle.max_var_length),
                            limits.tools);
    if (gen.status != RunStatus::OK) break;
    std::vector<std::string> inputs;
    try {
      inputs = parse_generated_inputs(gen.stdout_text);
    } catch (const ParseError&) {
      break;
    }
    if (inputs.size() > static_cast<std::size_t>(want)) inputs.resize(want);
    if (inputs.empty()) break;

    const int first_draw = suite.generated;
    suite.generated += static_cast<int>(inputs.size());

    auto verdicts = executor.run_batch(validator, inputs, limits.tools);
    std::vector<std::string> accepted;
    std::vector<int> draws;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (validator_accepts(verdicts[i])) {
        accepted.push_back(inputs[i]);
        draws.push_back(first_draw + static_cast<int>(i));
      } else {
        ++suite.rejected_by_validator;
      }
    }

    auto outputs = executor.run_batch(problem.guest(bundle.oracle.source), accepted, limits.oracle);
    for (std::size_t i = 0; i < accepted.size(); ++i) {
      const auto& o = outputs[i];
      if (o.status == RunStatus::OK) {
        suite.cases.push_back({{accepted[i], o.stdout_text}, round_seed, draws[i]});
      } else if (o.status == RunStatus::TLE || o.status == RunStatus::OutputTruncated || o.recursion_error) {
        ++suite.skipped_oracle;
      } else {
        ++suite.oracle_errors;
      }
    }
  }

  const int minimum = std::max(1, size / 3);
  if (static_cast<int>(suite.cases.size()) < minimum) {
    throw SuiteTooSmall(static_cast<int>(suite.cases.size()), size);
  }
  return suite;
}

// ---------------------------------------------------------------------------

bool operator==(const Counterexample& a, const Counterexample& b) {
  return a.case_index == b.case_index && a.input == b.input && a.expected == b.expected && a.actual == b.actual;
}

Verdict Verdict::restricted_to(std::size_t size) const {
  Verdict v;
  std::size_t n = std::min(size, case_results.size());
  v.case_results.assign(case_results.begin(), case_results.begin() + static_cast<std::ptrdiff_t>(n));
  v.cases_run = static_cast<int>(n);
  v.cases_passed = static_cast<int>(std::count(v.case_results.begin(), v.case_results.end(), true));
  for (const auto& c : counterexamples) {
    if (c.case_index < n) v.counterexamples.push_back(c);
  }
  v.pass = v.cases_run >= 1 && v.cases_passed == v.cases_run;
  return v;
}

Verdict verify_candidate(const Problem& problem, const GeneratedProgram& candidate, const Suite& suite,
                         const Executor& executor, const ResourceLimits& limits, EquivalencePolicy policy,
                         int max_counterexamples) {
  if (suite.cases.empty()) throw DomainError("cannot verify against an empty suite");
  auto tests = suite.tests();
  auto results = run_cases(problem, candidate.source, tests, executor, limits, policy);

  Verdict v;
  v.cases_run = static_cast<int>(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    v.case_results.push_back(r.matched);
    if (r.matched) {
      ++v.cases_passed;
      continue;
    }
    if (static_cast<int>(v.counterexamples.size()) < max_counterexamples) {
      std::string actual = r.run == RunStatus::OK ? r.actual : "<" + std::string(to_string(r.run)) + ">";
      v.counterexamples.push_back({i, tests[i].input, tests[i].expected_output, std::move(actual)});
    }
  }
  v.pass = v.cases_passed == v.cases_run;
  return v;
}

// ---------------------------------------------------------------------------

std::string serialize_suite(const Suite& suite) {
  std::string out;
  for (const auto& c : suite.cases) {
    json line = {
        {"draw", c.draw},
        {"expected_output", c.test.expected_output},
        {"input", c.test.input},
        {"seed", c.seed},
    };
    out += line.dump();
    out += '\n';
  }
  return out;
}

Suite parse_suite(std::string_view text) {
  Suite suite;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    try {
      json doc = json::parse(line);
      suite.cases.push_back({{doc.at("input").get<std::string>(), doc.at("expected_output").get<std::string>()},
                             doc.at("seed").get<std::uint64_t>(),
                             doc.at("draw").get<int>()});
    } catch (const json::exception& e) {
      throw ParseError(std::string("suite record: ") + e.what());
    }
  }
  suite.requested = suite.generated = static_cast<int>(suite.cases.size());
  return suite;
}

std::string serialize_suite_stats(const Suite& suite) {
  json doc = {
      {"cases", suite.cases.size()},
      {"generated", suite.generated},
      {"oracle_errors", suite.oracle_errors},
      {"rejected_by_validator", suite.rejected_by_validator},
      {"requested", suite.requested},
      {"skipped_oracle", suite.skipped_oracle},
  };
  return doc.dump(2) + "\n";
}

void apply_suite_stats(Suite& suite, std::string_view text) {
  try {
    json doc = json::parse(text);
    suite.requested = doc.at("requested").get<int>();
    suite.generated = doc.at("generated").get<int>();
    suite.rejected_by_validator = doc.at("rejected_by_validator").get<int>();
    suite.skipped_oracle = doc.at("skipped_oracle").get<int>();
    suite.oracle_errors = doc.value("oracle_errors", 0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("suite stats: ") + e.what());
  }
}

}  // namespace algo
