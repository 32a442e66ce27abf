#include <fstream>
#include <json.hpp>
#include <sstream>

#include "algo/errors.hpp"
#include "algo/llm_gateway.hpp"

namespace algo {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kRecords = "records.jsonl";
constexpr const char* kIndex = "index.tsv";

json to_json(const Transcript& t) {
  return {
      {"attempt", t.attempt},
      {"kind", std::string(to_string(t.kind))},
      {"model_tag", t.model_tag},
      {"request_hash", t.request_hash},
      {"response_text", t.response_text},
      {"timestamp", t.timestamp},
  };
}

Transcript from_json(const json& doc) {
  Transcript t;
  t.request_hash = doc.at("request_hash").get<std::string>();
  t.response_text = doc.at("response_text").get<std::string>();
  t.timestamp = doc.value("timestamp", "");
  t.model_tag = doc.value("model_tag", "");
  t.kind = prompt_kind_from_string(doc.at("kind").get<std::string>());
  t.attempt = doc.value("attempt", 1);
  return t;
}

}  // namespace

TranscriptStore::TranscriptStore(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  load_index();
}

bool TranscriptStore::exists(const fs::path& dir) { return fs::is_regular_file(dir / kRecords); }

// The record file is authoritative: the index is rebuilt from it whenever the
// two disagree (e.g. after an interrupted append).
void TranscriptStore::load_index() {
  std::unordered_map<std::string, std::uint64_t> from_records;
  std::vector<std::string> order;
  {
    std::ifstream in(dir_ / kRecords, std::ios::binary);
    std::string line;
    std::uint64_t offset = 0;
    while (std::getline(in, line)) {
      std::uint64_t here = offset;
      offset += line.size() + 1;
      if (line.empty()) continue;
      try {
        auto doc = json::parse(line);
        std::string hash = doc.at("request_hash").get<std::string>();
        if (from_records.emplace(hash, here).second) order.push_back(hash);
      } catch (const json::exception&) {
        // A torn final line from a crash; ignore it.
      }
    }
  }
  std::unordered_map<std::string, std::uint64_t> from_index;
  {
    std::ifstream in(dir_ / kIndex);
    std::string hash;
    std::uint64_t offset;
    while (in >> hash >> offset) from_index.emplace(hash, offset);
  }
  if (from_index != from_records) {
    std::ofstream out(dir_ / kIndex, std::ios::trunc);
    for (const auto& h : order) out << h << '\t' << from_records[h] << '\n';
  }
  index_ = std::move(from_records);
}

Transcript TranscriptStore::read_at(std::uint64_t offset) const {
  std::ifstream in(dir_ / kRecords, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(offset));
  std::string line;
  if (!std::getline(in, line)) throw ParseError("transcript store truncated at offset " + std::to_string(offset));
  return from_json(json::parse(line));
}

std::optional<Transcript> TranscriptStore::find(const std::string& request_hash) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(request_hash);
  if (it == index_.end()) return std::nullopt;
  return read_at(it->second);
}

bool TranscriptStore::append(const Transcript& transcript) {
  std::lock_guard lock(mu_);
  if (index_.contains(transcript.request_hash)) return false;
  fs::path records = dir_ / kRecords;
  std::uint64_t offset = fs::exists(records) ? fs::file_size(records) : 0;
  {
    std::ofstream out(records, std::ios::binary | std::ios::app);
    out << to_json(transcript).dump() << '\n';
    out.flush();
    if (!out) throw Error("cannot append to " + records.string());
  }
  {
    std::ofstream out(dir_ / kIndex, std::ios::app);
    out << transcript.request_hash << '\t' << offset << '\n';
  }
  index_.emplace(transcript.request_hash, offset);
  return true;
}

std::size_t TranscriptStore::size() const {
  std::lock_guard lock(mu_);
  return index_.size();
}

}  // namespace algo
