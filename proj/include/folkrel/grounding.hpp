#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "folkrel/core.hpp"
#include "folkrel/distributional.hpp"
#include "folkrel/folkrank.hpp"
#include "folkrel/wordnet.hpp"

namespace folkrel {

enum class MeasureId : std::uint8_t { freq, cosine, folkrank };

inline constexpr std::array<MeasureId, 3> kAllMeasures{MeasureId::freq, MeasureId::cosine, MeasureId::folkrank};

std::string_view to_string(MeasureId measure) noexcept;
std::optional<MeasureId> parse_measure(std::string_view name) noexcept;

/// Related lists of one measure for every tag; lists[i].source == TagId{i}.
struct RelatedTable {
  MeasureId measure = MeasureId::freq;
  std::vector<RelatedList> lists;
};

/// Top-k lists of `measure` for all tags. `folkrank` may be null for the
/// other two measures.
RelatedTable related_table(MeasureId measure, const CoGraph& cograph, const FolkRank* folkrank, std::size_t k,
                           unsigned threads = 1);

/// The WordNet parts this pipeline uses. Only noun and verb carry an is-a
/// hierarchy; adjective and adverb indices count toward coverage only.
struct WordNetBundle {
  std::optional<Taxonomy> noun, verb;
  std::optional<LemmaIndex> adjective, adverb;
  std::optional<ICTable> noun_ic, verb_ic;

  /// Loads `index.<pos>`/`data.<pos>` for noun and verb and `index.adj`,
  /// `index.adv` when present. Throws std::runtime_error when neither noun
  /// nor verb files exist.
  static WordNetBundle load(const std::filesystem::path& dir);

  const Taxonomy* taxonomy(PartOfSpeech pos) const noexcept;
  const ICTable* ic(PartOfSpeech pos) const noexcept;
  bool has_hierarchy(std::string_view lemma) const;
  bool covers(std::string_view lemma) const;
};

struct LemmaOptions {
  bool normalize_separators = false;  // '-' -> '_'
};

std::string to_lemma(std::string_view tag, LemmaOptions options = {});

struct Coverage {
  std::size_t total = 0;
  std::size_t any = 0;
  std::size_t noun = 0, verb = 0, adjective = 0, adverb = 0;
  double fraction = 0.0;
  bool defined = false;  // false for an empty tag list
};

Coverage coverage(std::span<const std::string> tags, const WordNetBundle& wordnet, LemmaOptions options = {});

/// One (tag, most related tag) pair that could be placed in WordNet.
struct GroundedPair {
  TagId tag{};
  TagId related{};
  PartOfSpeech pos = PartOfSpeech::noun;  // taxonomy that gave the shortest path
  std::size_t path_length = 0;
  std::vector<Step> composition;
  std::optional<double> jiang_conrath;
};

/// Top-1 evaluation of one measure. Every evaluated tag is either a pair or
/// counted in exactly one skip bucket.
struct MeasureGrounding {
  MeasureId measure = MeasureId::freq;
  std::size_t evaluated = 0;  // tags present in a noun or verb taxonomy
  std::vector<GroundedPair> pairs;
  std::size_t skipped_no_related = 0;
  std::size_t skipped_related_uncovered = 0;
  std::size_t skipped_no_common_pos = 0;

  std::size_t skipped() const noexcept {
    return skipped_no_related + skipped_related_uncovered + skipped_no_common_pos;
  }
};

MeasureGrounding ground_top1(const RelatedTable& table, std::span<const std::string> tag_names,
                             const WordNetBundle& wordnet, LemmaOptions options = {}, unsigned threads = 1);

enum class DistanceMetric : std::uint8_t { path, jiang_conrath };
std::string_view to_string(DistanceMetric metric) noexcept;

struct DistanceSummary {
  double mean = 0.0;
  std::size_t pairs = 0;
  std::size_t skipped = 0;
  bool defined = false;
};

DistanceSummary avg_semantic_distance(const MeasureGrounding& grounding, DistanceMetric metric);

/// P(length = 0, 1, 2, ≥3) over grounded pairs.
struct PathLengthDistribution {
  std::array<double, 4> probability{};
  std::array<std::size_t, 4> count{};
  std::size_t pairs = 0;
  bool defined = false;
};

PathLengthDistribution path_length_distribution(const MeasureGrounding& grounding);

/// Composition patterns of the paths of one exact length. Patterns are listed
/// up before down, e.g. n=2: up-up, up-down, down-up, down-down.
struct EdgeComposition {
  std::size_t length = 0;
  std::vector<std::string> patterns;
  std::vector<std::size_t> count;
  std::vector<double> fraction;
  std::size_t pairs = 0;
  bool defined = false;
};

/// n must be 1 or 2.
EdgeComposition edge_composition(const MeasureGrounding& grounding, std::size_t n);

struct OverlapSummary {
  MeasureId a = MeasureId::freq, b = MeasureId::freq;
  std::size_t k = 10;
  double mean = 0.0;
  std::size_t tags = 0;
  bool defined = false;
};

/// Mean |top-k(a) ∩ top-k(b)| over all tags.
OverlapSummary top_k_overlap(const RelatedTable& a, const RelatedTable& b, std::size_t k = 10);

struct RankBucket {
  double rank_lo = 0.0;  // inclusive
  double rank_hi = 0.0;  // exclusive, except for the last bucket
  std::size_t tags = 0;
  double mean_related_rank = 0.0;
  bool defined = false;
};

struct RankCurve {
  MeasureId measure = MeasureId::freq;
  std::size_t k = 10;
  std::vector<RankBucket> buckets;
  std::size_t skipped = 0;  // tags with an empty related list
};

/// Mean global frequency rank of each tag's top-k related tags, averaged
/// within `bucket_count` logarithmic buckets of the original tag's rank.
RankCurve avg_rank_curve(const RelatedTable& table, std::span<const TagStats> stats, std::size_t k = 10,
                         std::size_t bucket_count = 50);

struct MeasureReport {
  MeasureId measure = MeasureId::freq;
  MeasureGrounding grounding;
  DistanceSummary path;
  DistanceSummary jiang_conrath;
  PathLengthDistribution path_lengths;
  EdgeComposition composition_1, composition_2;
  RankCurve rank_curve;
};

struct GroundingReport {
  std::size_t k = 10;
  std::vector<std::string> tags;  // names indexed by TagId
  Coverage coverage;
  std::vector<MeasureReport> measures;   // freq, cosine, folkrank
  std::vector<OverlapSummary> overlaps;  // freq-folkrank, cosine-freq, cosine-folkrank
};

struct GroundingOptions {
  std::size_t k = 10;
  std::size_t rank_buckets = 50;
  LemmaOptions lemma;
  unsigned threads = 1;
};

/// `tables` must hold one table per measure in kAllMeasures order.
GroundingReport build_report(const Folksonomy& folksonomy, std::span<const RelatedTable> tables,
                             const WordNetBundle& wordnet, const GroundingOptions& options = {});

/// Writes report_coverage.tsv, report_overlap.tsv, report_semdist.tsv,
/// report_pathlen.tsv, report_edgecomp.tsv, report_rankcurve.tsv and
/// report.json into `dir`; each file is replaced atomically.
void write_report(const GroundingReport& report, const std::filesystem::path& dir);

/// Writes `content` to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace folkrel
