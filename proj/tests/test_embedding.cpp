#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "docsom/embedding.hpp"
#include "docsom/error.hpp"
#include "test_helpers.hpp"

using namespace docsom;

namespace {

EmbeddingTable small_table() {
  return parse_embeddings(
      "4 3\n"
      "diabetes 1 2 3\n"
      "mellitus 0.5 -1 2\n"
      "Stroke 0 0 1\n"
      "cancer 1e-1 0 -2.5 \n");
}

}  // namespace

TEST_CASE("word2vec text header and rows") {
  const auto t = parse_embeddings("2 3\nasthma 1 2 3\ngout 4 5 6\n");
  CHECK(t.dim() == 3);
  CHECK(t.size() == 2);
  CHECK(std::ranges::equal(*t.find("gout"), std::vector<double>{4, 5, 6}));
  CHECK(!t.find("stroke"));
}

TEST_CASE("short row names its line") {
  try {
    parse_embeddings("2 3\nasthma 1 2 3\ngout 4 5\n", "emb.txt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("emb.txt:3") != std::string::npos);
  }
}

TEST_CASE("non-numeric component and bad header are errors") {
  CHECK_THROWS_AS(parse_embeddings("1 2\nasthma 1 x\n"), Error);
  CHECK_THROWS_AS(parse_embeddings("1 2\nasthma 1 nan\n"), Error);
  CHECK_THROWS_AS(parse_embeddings("two 2\nasthma 1 2\n"), Error);
  CHECK_THROWS_AS(parse_embeddings("3 2\nasthma 1 2\n"), Error);
  CHECK_THROWS_AS(parse_embeddings(""), Error);
}

TEST_CASE("duplicate token keeps the first vector and warns") {
  const auto t = parse_embeddings("3 2\nasthma 1 2\ngout 0 0\nAsthma 9 9\n");
  CHECK(t.size() == 2);
  CHECK(std::ranges::equal(*t.find("asthma"), std::vector<double>{1, 2}));
  REQUIRE(t.warnings.size() == 1);
  CHECK(t.warnings[0].find("asthma") != std::string::npos);
}

TEST_CASE("tokens are lowercased on both sides") {
  const auto t = small_table();
  CHECK(t.find("stroke"));
  CHECK(t.find("STROKE"));
}

TEST_CASE("vocabulary filter keeps only requested tokens") {
  const std::unordered_set<std::string> vocab{"stroke", "absent"};
  const auto t = parse_embeddings("4 3\ndiabetes 1 2 3\nmellitus 0.5 -1 2\nStroke 0 0 1\ncancer 1 0 0\n",
                                  "x", &vocab);
  CHECK(t.size() == 1);
  CHECK(t.find("stroke"));
}

TEST_CASE("concept vector sums word vectors") {
  const auto t = small_table();
  const auto cv = concept_vector({"diabetes", "mellitus"}, t, 4);
  CHECK(cv.concept_index == 4);
  CHECK(cv.vector == std::vector<double>{1.5, 1.0, 5.0});
  CHECK(cv.covered_words == 2);
  CHECK(cv.total_words == 2);
  CHECK(!cv.uncovered());
}

TEST_CASE("single-token concept is that token's vector") {
  const auto t = small_table();
  CHECK(concept_vector({"cancer"}, t).vector == std::vector<double>{0.1, 0.0, -2.5});
}

TEST_CASE("out-of-vocabulary concept is zero and uncovered") {
  const auto t = small_table();
  const auto cv = concept_vector({"xerodermia", "pigmentosum"}, t);
  CHECK(cv.uncovered());
  CHECK(cv.vector == std::vector<double>(3, 0.0));
  CHECK(cv.total_words == 2);
  const auto partial = concept_vector({"kawasaki", "stroke"}, t);
  CHECK(partial.covered_words == 1);
  CHECK(partial.vector == std::vector<double>{0, 0, 1});
}

TEST_CASE("repeating a phrase doubles its vector") {
  std::mt19937_64 rng(1);
  EmbeddingTable t(50);
  std::vector<std::string> words;
  for (int i = 0; i < 6; ++i) {
    words.push_back("w" + std::to_string(i));
    t.add(words.back(), testing::random_vector(rng, 50));
  }
  const auto once = concept_vector(words, t);
  auto twice_tokens = words;
  twice_tokens.insert(twice_tokens.end(), words.begin(), words.end());
  const auto twice = concept_vector(twice_tokens, t);
  for (std::size_t k = 0; k < 50; ++k) {
    CHECK(twice.vector[k] == doctest::Approx(2 * once.vector[k]).epsilon(1e-12));
  }
  // Token order changes the summation order only.
  std::mt19937 shuffle_rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    auto shuffled = words;
    std::shuffle(shuffled.begin(), shuffled.end(), shuffle_rng);
    const auto v = concept_vector(shuffled, t);
    for (std::size_t k = 0; k < 50; ++k) {
      CHECK(std::fabs(v.vector[k] - once.vector[k]) <= 1e-9 * (std::fabs(once.vector[k]) + 1e-12) + 1e-15);
    }
  }
}

TEST_CASE("build_all_concept_vectors follows catalog order and summarizes coverage") {
  const auto t = small_table();
  const ConceptCatalog catalog({"diabetes mellitus", "stroke", "cancer"});
  const auto vectors = build_all_concept_vectors(catalog, t);
  REQUIRE(vectors.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(vectors[i].concept_index == i);
  CHECK(summarize_coverage(vectors).uncovered == 0);
  CHECK(summarize_coverage(vectors).full == 3);

  const ConceptCatalog with_oov({"diabetes mellitus", "xerodermia", "kawasaki stroke"});
  const auto v2 = build_all_concept_vectors(with_oov, t, 3);
  CHECK(v2[2].uncovered());  // "xerodermia" sorts last
  const auto cov = summarize_coverage(v2);
  CHECK(cov.full == 1);
  CHECK(cov.partial == 1);
  CHECK(cov.uncovered == 1);

  const auto again = build_all_concept_vectors(with_oov, t, 1);
  for (std::size_t i = 0; i < v2.size(); ++i) CHECK(again[i].vector == v2[i].vector);
  CHECK_THROWS_AS(build_all_concept_vectors(ConceptCatalog{}, t), Error);
}

TEST_CASE("embedding cache round-trips and invalidates on key change") {
  testing::TempDir dir("cache");
  const auto t = small_table();
  const auto path = dir / "emb.cache";
  CHECK(!read_embedding_cache(path, "k1"));
  write_embedding_cache(t, path, "k1");
  const auto back = read_embedding_cache(path, "k1");
  REQUIRE(back);
  CHECK(back->dim() == t.dim());
  CHECK(back->tokens() == t.tokens());
  for (const auto& tok : t.tokens()) CHECK(std::ranges::equal(*back->find(tok), *t.find(tok)));
  CHECK(!read_embedding_cache(path, "k2"));
  std::ofstream(path, std::ios::binary) << "garbage";
  CHECK(!read_embedding_cache(path, "k1"));
}

TEST_CASE("bundled sample embeddings load") {
  const auto t = load_embeddings(testing::source_dir() / "data/sample/embeddings.txt");
  CHECK(t.size() >= 50);
  CHECK(t.dim() == 16);
  CHECK(t.warnings.empty());
}
