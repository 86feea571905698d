#ifndef LATENTLENS_CORPUS_HPP
#define LATENTLENS_CORPUS_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentlens/errors.hpp"
#include "latentlens/format.hpp"

namespace latentlens {

enum class Emotion { neutral, amusement, anger, disgust, sleepiness };

inline constexpr std::array<const char*, 5> kEmotionNames = {
    "neutral", "amusement", "anger", "disgust", "sleepiness"};

inline const char* emotion_name(Emotion e) {
  return kEmotionNames[static_cast<std::size_t>(e)];
}

// Lower-cases before matching; "amused" is accepted as an alias of
// "amusement" (EmoV-DB uses both spellings in the wild).
inline Emotion parse_emotion(const std::string& raw) {
  std::string s;
  s.reserve(raw.size());
  for (char c : raw) s += char(std::tolower(static_cast<unsigned char>(c)));
  if (s == "amused") s = "amusement";
  for (std::size_t i = 0; i < kEmotionNames.size(); ++i)
    if (s == kEmotionNames[i]) return static_cast<Emotion>(i);
  throw UnknownCategory(raw);
}

struct UtteranceRecord {
  std::string id;
  std::string wav_path;
  std::string speaker;
  Emotion emotion = Emotion::neutral;
  std::optional<std::string> transcript;

  bool operator==(const UtteranceRecord&) const = default;
};

struct Embedding {
  std::string id;
  std::vector<double> vector;
};

struct Dataset {
  std::vector<UtteranceRecord> records;       // ascending id order
  std::map<std::string, Embedding> embeddings;
  std::map<std::string, std::vector<double>> features;  // optional, may be empty
};

struct JoinReport {
  std::vector<std::string> dropped_ids;
};

namespace detail {

// JSON-Lines reader skipping blank and '#'-comment lines. Calls fn(line_no, json).
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    fn(line_no, obj);
  }
}

}  // namespace detail

inline std::vector<UtteranceRecord> parse_manifest(const std::filesystem::path& path) {
  std::vector<UtteranceRecord> records;
  std::set<std::string> seen;
  detail::for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& obj) {
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("wav_path") ||
        !obj.contains("speaker") || !obj.contains("emotion"))
      throw ParseError(line_no, "manifest line needs id, wav_path, speaker, emotion");
    UtteranceRecord rec;
    rec.id = obj.at("id").get<std::string>();
    if (rec.id.empty()) throw ParseError(line_no, "empty id");
    if (!seen.insert(rec.id).second) throw DuplicateId(rec.id);
    rec.wav_path = obj.at("wav_path").get<std::string>();
    rec.speaker = obj.at("speaker").get<std::string>();
    try {
      rec.emotion = parse_emotion(obj.at("emotion").get<std::string>());
    } catch (const UnknownCategory&) {
      throw UnknownCategory(line_no, obj.at("emotion").get<std::string>());
    }
    if (obj.contains("transcript")) rec.transcript = obj.at("transcript").get<std::string>();
    records.push_back(std::move(rec));
  });
  return records;
}

inline void write_manifest(const std::filesystem::path& path,
                           const std::vector<UtteranceRecord>& records) {
  std::ofstream out(path);
  for (const auto& rec : records) {
    nlohmann::json obj;
    obj["id"] = rec.id;
    obj["wav_path"] = rec.wav_path;
    obj["speaker"] = rec.speaker;
    obj["emotion"] = emotion_name(rec.emotion);
    if (rec.transcript) obj["transcript"] = *rec.transcript;
    out << obj.dump() << '\n';
  }
}

inline std::map<std::string, Embedding> load_embeddings(
    const std::filesystem::path& path,
    std::optional<std::size_t> expected_dim = std::nullopt) {
  std::map<std::string, Embedding> out;
  std::optional<std::size_t> dim = expected_dim;
  detail::for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& obj) {
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("vector") ||
        !obj.at("vector").is_array())
      throw ParseError(line_no, "embedding line needs id and vector array");
    Embedding emb;
    emb.id = obj.at("id").get<std::string>();
    for (const auto& v : obj.at("vector")) {
      if (!v.is_number()) throw ParseError(line_no, "vector entries must be numbers");
      emb.vector.push_back(v.get<double>());
    }
    if (dim && emb.vector.size() != *dim)
      throw DimensionMismatch(emb.id, emb.vector.size(), *dim);
    if (!dim) dim = emb.vector.size();
    for (std::size_t i = 0; i < emb.vector.size(); ++i)
      if (!std::isfinite(emb.vector[i])) throw NonFinite(emb.id, i);
    if (out.count(emb.id)) throw DuplicateId(emb.id);
    out.emplace(emb.id, std::move(emb));
  });
  return out;
}

inline void write_embeddings(const std::filesystem::path& path,
                             const std::map<std::string, Embedding>& embeddings) {
  std::ofstream out(path);
  for (const auto& [id, emb] : embeddings) {
    out << "{\"id\": " << nlohmann::json(id).dump() << ", \"vector\": [";
    for (std::size_t i = 0; i < emb.vector.size(); ++i) {
      if (i) out << ", ";
      out << format_double(emb.vector[i]);
    }
    out << "]}\n";
  }
}

// Intersection join over ids; ids missing from any input are dropped and
// reported, not fatal. Records come out in ascending id order.
inline Dataset join_dataset(
    std::vector<UtteranceRecord> records,
    const std::map<std::string, Embedding>& embeddings,
    const std::map<std::string, std::vector<double>>* features,
    JoinReport* report = nullptr) {
  std::set<std::string> keep;
  for (const auto& rec : records) {
    if (!embeddings.count(rec.id)) continue;
    if (features && !features->count(rec.id)) continue;
    keep.insert(rec.id);
  }
  JoinReport local;
  std::set<std::string> all;
  for (const auto& rec : records) all.insert(rec.id);
  for (const auto& [id, _] : embeddings) all.insert(id);
  if (features)
    for (const auto& [id, _] : *features) all.insert(id);
  for (const auto& id : all)
    if (!keep.count(id)) local.dropped_ids.push_back(id);
  if (report) *report = local;
  if (keep.empty()) throw EmptyJoin();

  Dataset ds;
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (auto& rec : records)
    if (keep.count(rec.id)) ds.records.push_back(std::move(rec));
  for (const auto& id : keep) {
    ds.embeddings.emplace(id, embeddings.at(id));
    if (features) ds.features.emplace(id, features->at(id));
  }
  return ds;
}

// Synthesizes a manifest from an EmoV-DB-style tree: per-speaker folders
// holding files named <emotion>_<range>_<idx>.wav. The manifest remains the
// source of truth; this is a convenience for bootstrapping one.
inline std::vector<UtteranceRecord> scan_emov_tree(const std::filesystem::path& root) {
  std::vector<UtteranceRecord> records;
  if (!std::filesystem::is_directory(root))
    throw ParseError("not a directory: " + root.string());
  std::vector<std::filesystem::path> speakers;
  for (const auto& entry : std::filesystem::directory_iterator(root))
    if (entry.is_directory()) speakers.push_back(entry.path());
  std::sort(speakers.begin(), speakers.end());
  for (const auto& spk : speakers) {
    std::vector<std::filesystem::path> wavs;
    for (const auto& entry : std::filesystem::directory_iterator(spk))
      if (entry.path().extension() == ".wav") wavs.push_back(entry.path());
    std::sort(wavs.begin(), wavs.end());
    for (const auto& wav : wavs) {
      const std::string stem = wav.stem().string();
      const std::size_t underscore = stem.find('_');
      if (underscore == std::string::npos) continue;
      Emotion emo;
      try {
        emo = parse_emotion(stem.substr(0, underscore));
      } catch (const UnknownCategory&) {
        continue;  // stray file, skip
      }
      UtteranceRecord rec;
      rec.id = spk.filename().string() + "_" + stem;
      rec.wav_path = wav.string();
      rec.speaker = spk.filename().string();
      rec.emotion = emo;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace latentlens

#endif
