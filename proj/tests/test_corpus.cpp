#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "latentlens/corpus.hpp"
#include "test_util.hpp"

using namespace latentlens;

namespace {

std::filesystem::path write_file(const std::filesystem::path& path,
                                 const std::string& content) {
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("parse_manifest maps fields directly") {
  auto dir = test_util::scratch_dir("manifest_basic");
  auto path = write_file(dir / "m.jsonl",
      R"({"id":"a1","wav_path":"a1.wav","speaker":"s1","emotion":"anger"})" "\n");
  auto records = parse_manifest(path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].id == "a1");
  CHECK(records[0].wav_path == "a1.wav");
  CHECK(records[0].speaker == "s1");
  CHECK(records[0].emotion == Emotion::anger);
  CHECK_FALSE(records[0].transcript.has_value());
}

TEST_CASE("parse_manifest rejects duplicate ids") {
  auto dir = test_util::scratch_dir("manifest_dup");
  auto path = write_file(dir / "m.jsonl",
      R"({"id":"a1","wav_path":"a.wav","speaker":"s","emotion":"anger"})" "\n"
      R"({"id":"a1","wav_path":"b.wav","speaker":"s","emotion":"neutral"})" "\n");
  CHECK_THROWS_AS(parse_manifest(path), DuplicateId);
}

TEST_CASE("emotion strings normalize case and the amused alias") {
  CHECK(parse_emotion("Sleepiness") == Emotion::sleepiness);
  CHECK(parse_emotion("AMUSED") == Emotion::amusement);
  CHECK(parse_emotion("neutral") == Emotion::neutral);
  CHECK_THROWS_AS(parse_emotion("joy"), UnknownCategory);
}

TEST_CASE("parse_manifest reports malformed lines and unknown categories") {
  auto dir = test_util::scratch_dir("manifest_bad");
  CHECK_THROWS_AS(parse_manifest(write_file(dir / "a.jsonl", "{not json\n")), ParseError);
  CHECK_THROWS_AS(
      parse_manifest(write_file(dir / "b.jsonl",
          R"({"id":"a","wav_path":"a.wav","speaker":"s","emotion":"joy"})" "\n")),
      UnknownCategory);
  CHECK_THROWS_AS(
      parse_manifest(write_file(dir / "c.jsonl", R"({"id":"a"})" "\n")), ParseError);
}

TEST_CASE("manifest and embedding files accept comment lines") {
  auto dir = test_util::scratch_dir("comments");
  auto records = parse_manifest(write_file(dir / "m.jsonl",
      "# a comment\n"
      R"({"id":"a","wav_path":"a.wav","speaker":"s","emotion":"disgust"})" "\n"
      "\n"));
  CHECK(records.size() == 1);
  auto embeddings = load_embeddings(write_file(dir / "e.jsonl",
      "# embeddings\n"
      R"({"id":"a","vector":[1,2,3]})" "\n"));
  CHECK(embeddings.size() == 1);
}

TEST_CASE("load_embeddings enforces uniform finite vectors") {
  auto dir = test_util::scratch_dir("embeddings");
  auto ok = write_file(dir / "ok.jsonl",
      R"({"id":"a","vector":[1,2,3,4,5,6,7,8]})" "\n"
      R"({"id":"b","vector":[8,7,6,5,4,3,2,1]})" "\n");
  auto map = load_embeddings(ok);
  REQUIRE(map.size() == 2);
  CHECK(map.at("a").vector.size() == 8);

  auto short_vec = write_file(dir / "short.jsonl", R"({"id":"a","vector":[1,2,3]})" "\n");
  CHECK_THROWS_AS(load_embeddings(short_vec, 8), DimensionMismatch);

  auto ragged = write_file(dir / "ragged.jsonl",
      R"({"id":"a","vector":[1,2]})" "\n"
      R"({"id":"b","vector":[1,2,3]})" "\n");
  CHECK_THROWS_AS(load_embeddings(ragged), DimensionMismatch);

  auto nan = write_file(dir / "nan.jsonl", R"({"id":"a","vector":[1,null,3]})" "\n");
  CHECK_THROWS_AS(load_embeddings(nan), ParseError);

  // overflow to infinity is rejected one way or the other
  auto inf = write_file(dir / "inf.jsonl", R"({"id":"a","vector":[1e999,2]})" "\n");
  CHECK_THROWS_AS(load_embeddings(inf), Error);
}

TEST_CASE("join_dataset keeps the id intersection and reports drops") {
  std::vector<UtteranceRecord> records;
  for (const char* id : {"a", "b", "c"})
    records.push_back({id, std::string(id) + ".wav", "s", Emotion::neutral, {}});
  std::map<std::string, Embedding> embeddings;
  embeddings["a"] = {"a", {1.0, 2.0}};
  embeddings["b"] = {"b", {3.0, 4.0}};

  JoinReport report;
  Dataset ds = join_dataset(records, embeddings, nullptr, &report);
  REQUIRE(ds.records.size() == 2);
  CHECK(ds.records[0].id == "a");
  CHECK(ds.records[1].id == "b");
  CHECK(report.dropped_ids == std::vector<std::string>{"c"});

  SECTION("identical id sets drop nothing") {
    records.pop_back();
    Dataset full = join_dataset(records, embeddings, nullptr, &report);
    CHECK(full.records.size() == 2);
    CHECK(report.dropped_ids.empty());
  }

  SECTION("disjoint id sets throw EmptyJoin") {
    std::map<std::string, Embedding> other;
    other["z"] = {"z", {0.0}};
    CHECK_THROWS_AS(join_dataset(records, other, nullptr), EmptyJoin);
  }

  SECTION("join is idempotent") {
    Dataset again = join_dataset(ds.records, ds.embeddings, nullptr);
    REQUIRE(again.records.size() == ds.records.size());
    for (std::size_t i = 0; i < again.records.size(); ++i)
      CHECK(again.records[i] == ds.records[i]);
  }
}

TEST_CASE("manifest and embeddings round-trip value-equal") {
  auto dir = test_util::scratch_dir("roundtrip");
  std::vector<UtteranceRecord> records = {
      {"u1", "u1.wav", "sam", Emotion::amusement, "hello there"},
      {"u2", "u2.wav", "bea", Emotion::sleepiness, {}},
  };
  std::map<std::string, Embedding> embeddings;
  embeddings["u1"] = {"u1", {0.25, -1.5, 3.0e-7, 42.0}};
  embeddings["u2"] = {"u2", {1.0, 2.0, 3.0, 4.0}};

  write_manifest(dir / "m.jsonl", records);
  write_embeddings(dir / "e.jsonl", embeddings);
  auto records2 = parse_manifest(dir / "m.jsonl");
  auto embeddings2 = load_embeddings(dir / "e.jsonl");

  REQUIRE(records2.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) CHECK(records2[i] == records[i]);
  REQUIRE(embeddings2.size() == embeddings.size());
  for (const auto& [id, emb] : embeddings) {
    REQUIRE(embeddings2.count(id));
    CHECK(embeddings2.at(id).vector == emb.vector);
  }
}

TEST_CASE("iteration order is deterministic across loads") {
  auto dir = test_util::scratch_dir("order");
  write_file(dir / "m.jsonl",
      R"({"id":"zz","wav_path":"z.wav","speaker":"s","emotion":"anger"})" "\n"
      R"({"id":"aa","wav_path":"a.wav","speaker":"s","emotion":"neutral"})" "\n");
  auto r1 = parse_manifest(dir / "m.jsonl");
  auto r2 = parse_manifest(dir / "m.jsonl");
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].id == r2[i].id);

  std::map<std::string, Embedding> embeddings;
  embeddings["zz"] = {"zz", {1.0}};
  embeddings["aa"] = {"aa", {2.0}};
  Dataset ds = join_dataset(r1, embeddings, nullptr);
  CHECK(ds.records[0].id == "aa");  // ascending lexicographic after join
  CHECK(ds.records[1].id == "zz");
}

TEST_CASE("scan_emov_tree builds records from a directory layout") {
  auto dir = test_util::scratch_dir("emov_tree");
  std::filesystem::create_directories(dir / "spk1");
  std::ofstream(dir / "spk1" / "anger_1-14_0003.wav") << "stub";
  std::ofstream(dir / "spk1" / "amused_1-14_0001.wav") << "stub";
  std::ofstream(dir / "spk1" / "notes.txt") << "ignore me";
  auto records = scan_emov_tree(dir);
  REQUIRE(records.size() == 2);
  CHECK(records[0].emotion == Emotion::amusement);
  CHECK(records[1].emotion == Emotion::anger);
  CHECK(records[0].speaker == "spk1");
  CHECK(records[0].id == "spk1_amused_1-14_0001");
}
