#include "algo/llm_gateway.hpp"

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "algo/digest.hpp"
#include "algo/errors.hpp"

namespace algo {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<PromptKind, std::string_view> kKindNames[] = {
    {PromptKind::NaiveSolution, "NaiveSolution"},   {PromptKind::TaggedSolution, "TaggedSolution"},
    {PromptKind::Oracle, "Oracle"},                 {PromptKind::InputValidator, "InputValidator"},
    {PromptKind::InputGenerator, "InputGenerator"}, {PromptKind::BatchGenerator, "BatchGenerator"},
    {PromptKind::Refinement, "Refinement"},
};

constexpr std::pair<PromptKind, std::string_view> kKindStems[] = {
    {PromptKind::NaiveSolution, "naive_solution"},   {PromptKind::TaggedSolution, "tagged_solution"},
    {PromptKind::Oracle, "oracle"},                  {PromptKind::InputValidator, "input_validator"},
    {PromptKind::InputGenerator, "input_generator"}, {PromptKind::BatchGenerator, "batch_generator"},
    {PromptKind::Refinement, "refinement"},
};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string render_examples(const Problem& problem) {
  std::ostringstream out;
  for (std::size_t i = 0; i < problem.public_tests.size(); ++i) {
    const auto& t = problem.public_tests[i];
    out << "Example " << (i + 1) << ":\nInput:\n" << t.input;
    if (t.input.empty() || t.input.back() != '\n') out << '\n';
    out << "Output:\n" << t.expected_output;
    if (t.expected_output.empty() || t.expected_output.back() != '\n') out << '\n';
    if (i + 1 < problem.public_tests.size()) out << '\n';
  }
  return out.str();
}

std::string joined_params(const Signature& sig) {
  std::string out;
  for (const auto& p : sig.params) out += (out.empty() ? "" : ", ") + p;
  return out;
}

Slots problem_slots(const Problem& problem) {
  Slots slots;
  slots["id"] = problem.id;
  slots["title"] = problem.title;
  slots["description"] = problem.description;
  slots["constraints"] = problem.constraints;
  slots["examples"] = render_examples(problem);
  if (problem.io_style == IoStyle::FunctionCall && problem.signature) {
    const auto& sig = *problem.signature;
    std::string params = joined_params(sig);
    slots["signature"] = "def " + sig.name + "(self" + (params.empty() ? "" : ", " + params) + ")";
    slots["io_format"] = "Implement a class named Solution with the method `" + slots["signature"] +
                         "`. Each example input is a JSON array holding the arguments in order; "
                         "the returned value is compared as JSON.";
    slots["input_format"] = "a JSON array holding the arguments (" + params + ") in order";
  } else {
    slots["signature"] = "";
    slots["io_format"] =
        "Read the input from standard input and print the answer to standard output.";
    slots["input_format"] = "the complete text the program reads from standard input, as one string";
  }
  return slots;
}

}  // namespace

std::string_view to_string(PromptKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

PromptKind prompt_kind_from_string(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  for (const auto& [k, stem] : kKindStems) {
    if (stem == text) return k;
  }
  throw ParseError("unknown prompt kind '" + std::string(text) + "'");
}

std::string_view file_stem(PromptKind kind) {
  for (const auto& [k, stem] : kKindStems) {
    if (k == kind) return stem;
  }
  return "unknown";
}

void GenerationRequest::validate() const {
  if (!(temperature >= 0)) throw DomainError("temperature must be >= 0");
  if (attempt < 1) throw DomainError("attempt must be >= 1");
  if (rendered_prompt.empty()) throw DomainError("rendered prompt is empty");
}

std::string GenerationRequest::canonical_encoding() const {
  json doc = {
      {"attempt", attempt},
      {"kind", std::string(to_string(kind))},
      {"prompt", rendered_prompt},
      {"temperature", temperature},
  };
  return doc.dump();
}

std::string GenerationRequest::hash() const { return sha256_hex(canonical_encoding()); }

// ---------------------------------------------------------------------------

PromptTemplate parse_prompt_template(std::string_view text, const std::string& name) {
  PromptTemplate t;
  t.name = name;
  std::size_t pos = 0;
  bool separated = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line == "---") {
      separated = true;
      break;
    }
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("template " + name + ": bad header line '" + line + "'");
    std::string key = trim(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    if (key == "name") {
      t.name = value;
    } else if (key == "version") {
      t.version = std::stoi(value);
    } else if (key == "source") {
      t.source = value;
    } else if (key == "slots") {
      std::istringstream in(value);
      std::string slot;
      while (std::getline(in, slot, ',')) {
        if (auto s = trim(slot); !s.empty()) t.slots.push_back(s);
      }
    }
  }
  if (!separated) throw ParseError("template " + name + ": missing '---' separator");
  t.body = pos < text.size() ? std::string(text.substr(pos)) : std::string();
  return t;
}

const PromptCatalog& PromptCatalog::builtin() {
  static const PromptCatalog catalog = [] {
    PromptCatalog c;
    for (const auto& [stem, text] : embedded_prompt_templates()) {
      c.templates_[prompt_kind_from_string(stem)] = parse_prompt_template(text, stem);
    }
    c.set_default("language", "Python 3");
    return c;
  }();
  return catalog;
}

PromptCatalog PromptCatalog::from_directory(const fs::path& dir) {
  PromptCatalog c;
  for (const auto& [kind, stem] : kKindStems) {
    fs::path p = dir / (std::string(stem) + ".tmpl");
    c.templates_[kind] = parse_prompt_template(read_text(p), std::string(stem));
  }
  c.set_default("language", "Python 3");
  return c;
}

const PromptTemplate& PromptCatalog::get(PromptKind kind) const {
  auto it = templates_.find(kind);
  if (it == templates_.end()) throw ConfigError("no prompt template for " + std::string(to_string(kind)));
  return it->second;
}

std::string render_prompt(PromptKind kind, const Problem& problem, const Slots& extras,
                          const PromptCatalog& catalog) {
  const PromptTemplate& tmpl = catalog.get(kind);
  for (const auto& slot : tmpl.slots) {
    if (!extras.contains(slot)) throw MissingSlot(slot);
  }
  Slots builtin = problem_slots(problem);
  const std::string& body = tmpl.body;
  std::string out;
  out.reserve(body.size() + problem.description.size());
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t open = body.find("{{", pos);
    if (open == std::string::npos) {
      out.append(body, pos, std::string::npos);
      break;
    }
    std::size_t close = body.find("}}", open + 2);
    if (close == std::string::npos) throw ParseError("template " + tmpl.name + ": unterminated placeholder");
    out.append(body, pos, open - pos);
    std::string slot = trim(std::string_view(body).substr(open + 2, close - open - 2));
    if (auto it = extras.find(slot); it != extras.end()) {
      out += it->second;
    } else if (auto b = builtin.find(slot); b != builtin.end()) {
      out += b->second;
    } else if (auto d = catalog.defaults().find(slot); d != catalog.defaults().end()) {
      out += d->second;
    } else {
      throw MissingSlot(slot);
    }
    pos = close + 2;
  }
  return out;
}

std::string extract_program(std::string_view response) {
  std::size_t fence = response.find("```");
  if (fence != std::string_view::npos) {
    std::size_t start = response.find('\n', fence);
    if (start != std::string_view::npos) {
      ++start;
      std::size_t close = response.find("```", start);
      std::string_view block = response.substr(start, close == std::string_view::npos ? std::string_view::npos
                                                                                       : close - start);
      if (!trim(block).empty()) return std::string(block);
    }
  }
  std::string whole = trim(response);
  if (whole.empty()) throw EmptyResponse();
  return whole;
}

// ---------------------------------------------------------------------------
// HTTP transport

HttpChatTransport::HttpChatTransport(std::string endpoint, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be a URL: " + endpoint);
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_ = endpoint;
    path_ = "/v1/chat/completions";
  } else {
    base_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
  }
}

std::string HttpChatTransport::request_body(const GenerationRequest& request, const std::string& model) {
  json body = {
      {"model", model},
      {"temperature", request.temperature},
      {"messages", json::array({{{"role", "user"}, {"content", request.rendered_prompt}}})},
  };
  return body.dump();
}

std::string HttpChatTransport::parse_response(std::string_view body) {
  try {
    json doc = json::parse(body);
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw TransportFailure("response content is not text", false);
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw TransportFailure(std::string("malformed chat response: ") + e.what(), false);
  }
}

std::string HttpChatTransport::send(const GenerationRequest& request, const std::string& model) {
  httplib::Client client(base_);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(path_, headers, request_body(request, model), "application/json");
  if (!res) throw TransportFailure("HTTP request failed: " + httplib::to_string(res.error()), true);
  if (res->status == 429 || res->status >= 500) {
    throw TransportFailure("HTTP status " + std::to_string(res->status), true);
  }
  if (res->status != 200) {
    throw TransportFailure("HTTP status " + std::to_string(res->status) + ": " + res->body, false);
  }
  return parse_response(res->body);
}

// ---------------------------------------------------------------------------
// Scripted transport

ScriptedTransport::ScriptedTransport(const fs::path& script) {
  std::ifstream in(script);
  if (!in) throw ConfigError("cannot open model script " + script.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(script.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    Entry e;
    e.problem = doc.value("problem", "");
    e.kind = prompt_kind_from_string(doc.at("kind").get<std::string>());
    e.attempt = doc.value("attempt", 0);
    e.contains = doc.value("contains", "");
    if (doc.contains("program")) {
      fs::path file = script.parent_path() / doc["program"].get<std::string>();
      std::string lang = file.extension().string();
      if (!lang.empty()) lang.erase(0, 1);
      if (lang == "py") lang = "python";
      e.response = "```" + lang + "\n" + read_text(file) + "```\n";
    } else {
      e.response = doc.at("response").get<std::string>();
    }
    entries_.push_back(std::move(e));
  }
}

std::string ScriptedTransport::send(const GenerationRequest& request, const std::string&) {
  for (const auto& e : entries_) {
    if (!e.problem.empty() && e.problem != request.problem_id) continue;
    if (e.kind != request.kind) continue;
    if (e.attempt != 0 && e.attempt != request.attempt) continue;
    if (!e.contains.empty() && request.rendered_prompt.find(e.contains) == std::string::npos) continue;
    return e.response;
  }
  throw TransportFailure("model script has no entry for " + request.problem_id + " " +
                             std::string(to_string(request.kind)) + " attempt " +
                             std::to_string(request.attempt),
                         false);
}

std::unique_ptr<ChatTransport> make_transport(const std::string& endpoint, const std::string& api_key) {
  constexpr std::string_view kScript = "script://";
  if (endpoint.rfind(kScript, 0) == 0) {
    return std::make_unique<ScriptedTransport>(endpoint.substr(kScript.size()));
  }
  return std::make_unique<HttpChatTransport>(endpoint, api_key);
}

// ---------------------------------------------------------------------------
// Gateway

std::string_view to_string(GatewayMode mode) {
  switch (mode) {
    case GatewayMode::Live: return "live";
    case GatewayMode::Record: return "record";
    case GatewayMode::Replay: return "replay";
  }
  return "?";
}

GatewayMode gateway_mode_from_string(std::string_view text) {
  if (text == "live") return GatewayMode::Live;
  if (text == "record") return GatewayMode::Record;
  if (text == "replay") return GatewayMode::Replay;
  throw ConfigError("unknown gateway mode '" + std::string(text) + "'");
}

Gateway::Gateway(GatewayOptions options, std::unique_ptr<ChatTransport> transport,
                 std::shared_ptr<TranscriptStore> store)
    : options_(std::move(options)),
      transport_(std::move(transport)),
      store_(std::move(store)),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
  if (options_.mode != GatewayMode::Replay && !transport_) {
    throw ConfigError("live and record modes need a transport");
  }
  if (options_.mode != GatewayMode::Live && !store_) {
    throw ConfigError("record and replay modes need a transcript store");
  }
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

std::string Gateway::complete(const GenerationRequest& request) {
  request.validate();
  ++calls_;
  const std::string hash = request.hash();
  switch (options_.mode) {
    case GatewayMode::Replay: {
      auto t = store_->find(hash);
      if (!t) throw ReplayMiss(hash);
      return t->response_text;
    }
    case GatewayMode::Record: {
      if (auto t = store_->find(hash)) return t->response_text;
      std::string text = call_transport(request);
      Transcript t{hash, text, "", options_.model_tag, request.kind, request.attempt};
      auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      char buf[32];
      std::tm tm{};
      gmtime_r(&now, &tm);
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
      t.timestamp = buf;
      store_->append(t);
      return text;
    }
    case GatewayMode::Live:
      return call_transport(request);
  }
  throw ConfigError("bad gateway mode");
}

std::string Gateway::call_transport(const GenerationRequest& request) {
  {
    std::unique_lock lock(flight_mu_);
    flight_cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    Gateway* g;
    ~Release() {
      std::lock_guard lock(g->flight_mu_);
      --g->in_flight_;
      g->flight_cv_.notify_one();
    }
  } release{this};

  auto delay = options_.initial_backoff;
  for (int tries = 0;; ++tries) {
    try {
      return transport_->send(request, options_.model_tag);
    } catch (const TransportFailure& f) {
      if (!f.retryable() || tries >= options_.retries) throw TransportError(f.what(), tries);
    }
    sleeper_(delay);
    delay *= 2;
  }
}

}  // namespace algo
