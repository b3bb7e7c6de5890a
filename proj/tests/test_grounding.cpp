#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "folkrel/grounding.hpp"
#include "support/support.hpp"

namespace folkrel {
namespace {

using testing::make_folksonomy;

// A stub measure: every tag maps to the listed tags, scored by position.
RelatedTable stub_table(const Folksonomy& f, const std::map<std::string, std::vector<std::string>>& related,
                        MeasureId measure = MeasureId::freq) {
  RelatedTable t{measure, std::vector<RelatedList>(f.num_tags())};
  for (std::size_t i = 0; i < f.num_tags(); ++i) {
    t.lists[i].source = make_id<TagId>(i);
    if (auto it = related.find(f.tags()[i]); it != related.end()) {
      double score = static_cast<double>(it->second.size());
      for (const auto& name : it->second) t.lists[i].items.push_back({f.tag_id(name), score--});
    }
  }
  return t;
}

WordNetBundle t1_bundle() { return WordNetBundle::load(testing::t1_dir()); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(Measures, NamesRoundTrip) {
  for (auto m : kAllMeasures) EXPECT_EQ(parse_measure(to_string(m)), m);
  EXPECT_FALSE(parse_measure("pagerank"));
}

TEST(WordNetBundle, LoadsT1) {
  const auto wn = t1_bundle();
  ASSERT_TRUE(wn.noun);
  EXPECT_FALSE(wn.verb);
  EXPECT_TRUE(wn.has_hierarchy("dog"));
  EXPECT_FALSE(wn.covers("xyzzy"));
  EXPECT_THROW(WordNetBundle::load("/nonexistent"), std::runtime_error);
}

TEST(WordNetBundle, AdjectivesCountForCoverageOnly) {
  const auto dir = testing::scratch_dir("adj");
  testing::write_wndb(dir, {{{"dog"}, {}, {}}}, PartOfSpeech::noun);
  testing::write_wndb(dir, {{{"red"}, {}, {}}}, PartOfSpeech::adjective);
  const auto wn = WordNetBundle::load(dir);
  ASSERT_TRUE(wn.adjective);
  EXPECT_TRUE(wn.covers("red"));
  EXPECT_FALSE(wn.has_hierarchy("red"));
  const std::vector<std::string> tags{"dog", "red", "blue"};
  const auto c = coverage(tags, wn);
  EXPECT_EQ(c.any, 2u);
  EXPECT_EQ(c.adjective, 1u);
  EXPECT_EQ(c.noun, 1u);
  std::filesystem::remove_all(dir);
}

TEST(Coverage, Examples) {
  const auto wn = t1_bundle();
  const std::vector<std::string> some{"dog", "cat", "xyzzy"};
  const auto c = coverage(some, wn);
  EXPECT_TRUE(c.defined);
  EXPECT_NEAR(c.fraction, 2.0 / 3.0, 1e-12);
  const auto empty = coverage({}, wn);
  EXPECT_FALSE(empty.defined);
  EXPECT_EQ(empty.fraction, 0.0);
  const std::vector<std::string> all{"dog", "auto", "beast"};
  EXPECT_EQ(coverage(all, wn).fraction, 1.0);
}

TEST(Coverage, SeparatorNormalization) {
  const auto wn = WordNetBundle{testing::parse_wndb({{{"web_site"}, {}, {}}}), {}, {}, {}, {}, {}};
  const std::vector<std::string> tags{"web-site"};
  EXPECT_EQ(coverage(tags, wn).any, 0u);
  EXPECT_EQ(coverage(tags, wn, {true}).any, 1u);
}

TEST(Grounding, ToyFreqMeasure) {
  const auto f = make_folksonomy(testing::fixture_toy());
  auto wn = t1_bundle();
  wn.noun_ic = ic_from_lemma_counts({}, *wn.noun);
  const auto g = build_cooccurrence(f);
  const auto table = related_table(MeasureId::freq, g, nullptr, 10);
  const auto grounding = ground_top1(table, f.tags(), wn);
  EXPECT_EQ(grounding.evaluated, 3u);  // car, cat, dog; pets is not in WordNet
  ASSERT_EQ(grounding.pairs.size(), 2u);
  EXPECT_EQ(grounding.skipped_related_uncovered, 1u);  // cat -> pets

  const auto path = avg_semantic_distance(grounding, DistanceMetric::path);
  EXPECT_TRUE(path.defined);
  EXPECT_DOUBLE_EQ(path.mean, 3.0);
  EXPECT_EQ(path.pairs, 2u);
  EXPECT_EQ(path.skipped, 1u);
  const auto jcn = avg_semantic_distance(grounding, DistanceMetric::jiang_conrath);
  EXPECT_TRUE(jcn.defined);
  EXPECT_GT(jcn.mean, 0.0);
}

TEST(Grounding, SynonymStubHasZeroDistance) {
  const auto f = make_folksonomy({{"u", "r", {"car", "auto", "animal", "beast"}}});
  auto wn = t1_bundle();
  wn.noun_ic = ic_from_lemma_counts({}, *wn.noun);
  const auto table =
      stub_table(f, {{"car", {"auto"}}, {"auto", {"car"}}, {"animal", {"beast"}}, {"beast", {"animal"}}});
  const auto g = ground_top1(table, f.tags(), wn);
  EXPECT_EQ(avg_semantic_distance(g, DistanceMetric::path).mean, 0.0);
  EXPECT_EQ(avg_semantic_distance(g, DistanceMetric::jiang_conrath).mean, 0.0);
  const auto d = path_length_distribution(g);
  EXPECT_EQ(d.probability, (std::array<double, 4>{1, 0, 0, 0}));
}

TEST(Grounding, PathLengthDistributionAndComposition) {
  const auto f = make_folksonomy({{"u", "r", {"dog", "cat", "car", "animal"}}});
  const auto wn = t1_bundle();
  const auto g = ground_top1(stub_table(f, {{"dog", {"cat"}}, {"cat", {"car"}}}), f.tags(), wn);
  const auto d = path_length_distribution(g);
  EXPECT_EQ(d.probability, (std::array<double, 4>{0, 0, 0.5, 0.5}));
  const auto c2 = edge_composition(g, 2);
  EXPECT_EQ(c2.patterns, (std::vector<std::string>{"up-up", "up-down", "down-up", "down-down"}));
  EXPECT_EQ(c2.fraction, (std::vector<double>{0, 1, 0, 0}));
  const auto c1 = edge_composition(g, 1);
  EXPECT_FALSE(c1.defined);
  EXPECT_THROW(edge_composition(g, 3), ContractError);

  const auto single = ground_top1(stub_table(f, {{"dog", {"animal"}}}), f.tags(), wn);
  const auto s1 = edge_composition(single, 1);
  EXPECT_EQ(s1.patterns, (std::vector<std::string>{"up", "down"}));
  EXPECT_EQ(s1.fraction, (std::vector<double>{1, 0}));
}

TEST(Grounding, NoRelatedAndJcWithoutIc) {
  const auto f = make_folksonomy({{"u", "r", {"dog", "cat"}}});
  const auto wn = t1_bundle();
  const auto g = ground_top1(stub_table(f, {{"dog", {"cat"}}}), f.tags(), wn);
  EXPECT_EQ(g.evaluated, 2u);
  EXPECT_EQ(g.skipped_no_related, 1u);
  const auto jcn = avg_semantic_distance(g, DistanceMetric::jiang_conrath);
  EXPECT_FALSE(jcn.defined);
  EXPECT_EQ(jcn.skipped, 2u);
}

TEST(Grounding, MinimumOverPartsOfSpeech) {
  // "run" reaches "walk" in 2 steps as verbs and in 4 as nouns
  WordNetBundle wn;
  wn.noun = testing::parse_wndb({{{"act"}, {}, {}},
                                 {{"sprint"}, {0}, {}},
                                 {{"run"}, {1}, {}},
                                 {{"stroll"}, {0}, {}},
                                 {{"walk"}, {3}, {}}},
                                PartOfSpeech::noun);
  wn.verb = testing::parse_wndb({{{"move"}, {}, {}}, {{"run"}, {0}, {}}, {{"walk"}, {0}, {}}}, PartOfSpeech::verb);
  const auto f = make_folksonomy({{"u", "r", {"run", "walk"}}});
  const auto g = ground_top1(stub_table(f, {{"run", {"walk"}}}), f.tags(), wn);
  ASSERT_EQ(g.pairs.size(), 1u);
  EXPECT_EQ(g.pairs[0].path_length, 2u);
  EXPECT_EQ(g.pairs[0].pos, PartOfSpeech::verb);
}

TEST(Overlap, SelfAndDisjoint) {
  testing::Rng rng(2);
  const auto f = make_folksonomy(testing::random_posts(rng, 30, 25, 30, 300, 6));
  const auto g = build_cooccurrence(f);
  const auto freq = related_table(MeasureId::freq, g, nullptr, 3);
  bool all_full = true;
  for (const auto& l : freq.lists) all_full = all_full && l.items.size() >= 3;
  ASSERT_TRUE(all_full);
  EXPECT_DOUBLE_EQ(top_k_overlap(freq, freq, 3).mean, 3.0);

  const auto small = make_folksonomy({{"u", "r", {"a", "b", "c", "d"}}});
  const auto x = stub_table(small, {{"a", {"b"}}, {"b", {"a"}}});
  const auto y = stub_table(small, {{"a", {"c"}}, {"b", {"d"}}});
  EXPECT_EQ(top_k_overlap(x, y, 10).mean, 0.0);
}

TEST(RankCurve, ConstantTopTagsGiveFlatCurve) {
  // tags t00..t19 with strictly decreasing frequency, so rank = index + 1
  std::vector<testing::RawPost> posts;
  for (int t = 0; t < 20; ++t) {
    char name[8];
    std::snprintf(name, sizeof name, "t%02d", t);
    for (int i = 0; i < 40 - t; ++i) posts.push_back({"u" + std::to_string(i), "r" + std::to_string(t), {name}});
  }
  const auto f = make_folksonomy(posts);
  const auto stats = tag_stats(f);
  const std::size_t k = 3;
  std::map<std::string, std::vector<std::string>> constant, neighbors;
  for (std::size_t i = 0; i < f.num_tags(); ++i) {
    const auto& name = f.tags()[i];
    for (std::size_t j = 0; constant[name].size() < k; ++j)
      if (j != i) constant[name].push_back(f.tags()[j]);
    neighbors[name] = {f.tags()[i + 1 < f.num_tags() ? i + 1 : i - 1]};
  }
  const auto flat = avg_rank_curve(stub_table(f, constant), stats, k, 5);
  for (const auto& b : flat.buckets) {
    if (!b.defined) continue;
    EXPECT_NEAR(b.mean_related_rank, (k + 1) / 2.0, 1.0);
  }
  EXPECT_EQ(flat.buckets.size(), 5u);
  EXPECT_DOUBLE_EQ(flat.buckets.front().rank_lo, 1.0);
  EXPECT_NEAR(flat.buckets.back().rank_hi, 20.0, 1e-9);

  // related rank is always the original rank +-1, so the curve tracks the identity
  const auto diag = avg_rank_curve(stub_table(f, neighbors), stats, 1, 20);
  std::size_t tags = 0;
  for (const auto& b : diag.buckets) {
    if (!b.defined) continue;
    tags += b.tags;
    EXPECT_GE(b.mean_related_rank, b.rank_lo - 1.0);
    EXPECT_LE(b.mean_related_rank, b.rank_hi + 1.0);
  }
  EXPECT_EQ(tags, 20u);
}

TEST(Report, ToyEndToEndFiles) {
  const auto f = make_folksonomy(testing::fixture_toy());
  auto wn = t1_bundle();
  wn.noun_ic = ic_from_lemma_counts({}, *wn.noun);
  const auto g = build_cooccurrence(f);
  const auto fg = build_folkgraph(f);
  const FolkRank engine(fg);
  std::vector<RelatedTable> tables;
  for (auto m : kAllMeasures) tables.push_back(related_table(m, g, &engine, 10));
  const auto report = build_report(f, tables, wn);
  ASSERT_EQ(report.measures.size(), 3u);
  EXPECT_DOUBLE_EQ(report.measures[0].path.mean, 3.0);
  EXPECT_EQ(report.measures[0].path_lengths.probability, (std::array<double, 4>{0, 0, 0.5, 0.5}));
  EXPECT_EQ(report.overlaps.size(), 3u);
  EXPECT_EQ(report.overlaps[0].a, MeasureId::freq);
  EXPECT_EQ(report.overlaps[0].b, MeasureId::folkrank);

  const auto dir = testing::scratch_dir("report");
  write_report(report, dir);
  for (const char* name : {"report_overlap.tsv", "report_semdist.tsv", "report_pathlen.tsv", "report_edgecomp.tsv",
                           "report_rankcurve.tsv", "report_coverage.tsv", "report.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
  EXPECT_NE(slurp(dir / "report_semdist.tsv").find("freq\tshortest_path\t3.000000\t2\t1"), std::string::npos);
  EXPECT_NE(slurp(dir / "report_pathlen.tsv").find("freq\t0.000000\t0.000000\t0.500000\t0.500000\t2"),
            std::string::npos);
  const auto json = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(json["measures"][0]["distance"]["shortest_path"]["mean"], 3.0);
  EXPECT_EQ(json["measures"][0]["grounded_pairs"][0]["tag"], "car");
  std::filesystem::remove_all(dir);
}

TEST(Report, UndefinedFieldsAreFlagged) {
  const auto f = make_folksonomy({{"u", "r", {"xyzzy", "plugh"}}});
  const auto wn = t1_bundle();
  const auto g = build_cooccurrence(f);
  const auto fg = build_folkgraph(f);
  const FolkRank engine(fg);
  std::vector<RelatedTable> tables;
  for (auto m : kAllMeasures) tables.push_back(related_table(m, g, &engine, 10));
  const auto report = build_report(f, tables, wn);
  EXPECT_EQ(report.coverage.fraction, 0.0);
  EXPECT_FALSE(report.measures[0].path.defined);
  const auto dir = testing::scratch_dir("undefined");
  write_report(report, dir);
  EXPECT_NE(slurp(dir / "report_semdist.tsv").find("freq\tshortest_path\tNA\t0\t0"), std::string::npos);
  const auto json = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(json["measures"][1]["path_length"]["0"].is_null());
  std::filesystem::remove_all(dir);
}

TEST(Report, AtomicWriteLeavesNoTemporary) {
  const auto dir = testing::scratch_dir("atomic");
  write_file_atomic(dir / "a.txt", "first");
  write_file_atomic(dir / "a.txt", "second");
  EXPECT_EQ(slurp(dir / "a.txt"), "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  EXPECT_THROW(write_file_atomic(dir / "missing" / "b.txt", "x"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace folkrel
