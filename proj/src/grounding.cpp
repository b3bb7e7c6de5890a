#include "folkrel/grounding.hpp"

#include <algorithm>
#include <cmath>

#include "folkrel/parallel.hpp"
#include "folkrel/text.hpp"

namespace folkrel {

std::string_view to_string(MeasureId measure) noexcept {
  switch (measure) {
    case MeasureId::freq:
      return "freq";
    case MeasureId::cosine:
      return "cosine";
    case MeasureId::folkrank:
      return "folkrank";
  }
  return "unknown";
}

std::optional<MeasureId> parse_measure(std::string_view name) noexcept {
  for (auto m : kAllMeasures)
    if (to_string(m) == name) return m;
  return std::nullopt;
}

std::string_view to_string(DistanceMetric metric) noexcept {
  return metric == DistanceMetric::path ? "shortest_path" : "jiang_conrath";
}

RelatedTable related_table(MeasureId measure, const CoGraph& cograph, const FolkRank* folkrank, std::size_t k,
                           unsigned threads) {
  if (measure == MeasureId::folkrank && folkrank == nullptr) {
    throw ContractError("related_table: folkrank measure needs a FolkRank engine");
  }
  RelatedTable table{measure, std::vector<RelatedList>(cograph.num_tags())};
  parallel_for(cograph.num_tags(), threads, [&](std::size_t i) {
    const auto t = make_id<TagId>(i);
    switch (measure) {
      case MeasureId::freq:
        table.lists[i] = freq_relatedness(cograph, t);
        table.lists[i].truncate(k);
        break;
      case MeasureId::cosine:
        table.lists[i] = cosine_relatedness(cograph, t, k);
        break;
      case MeasureId::folkrank:
        table.lists[i] = folkrank->related(t, k);
        break;
    }
  });
  return table;
}

WordNetBundle WordNetBundle::load(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  WordNetBundle wn;
  auto load_pair = [&](PartOfSpeech pos) -> std::optional<Taxonomy> {
    const auto index = dir / ("index." + std::string(pos_file_suffix(pos)));
    const auto data = dir / ("data." + std::string(pos_file_suffix(pos)));
    const bool has_index = fs::exists(index), has_data = fs::exists(data);
    if (!has_index && !has_data) return std::nullopt;
    if (has_index != has_data) {
      throw std::runtime_error("incomplete WordNet files for " + std::string(pos_file_suffix(pos)) + " in '" +
                               dir.string() + "'");
    }
    return load_taxonomy(index, data, pos);
  };
  wn.noun = load_pair(PartOfSpeech::noun);
  wn.verb = load_pair(PartOfSpeech::verb);
  if (!wn.noun && !wn.verb) {
    throw std::runtime_error("no WordNet noun or verb database in '" + dir.string() + "'");
  }
  for (auto pos : {PartOfSpeech::adjective, PartOfSpeech::adverb}) {
    const auto index = dir / ("index." + std::string(pos_file_suffix(pos)));
    if (!fs::exists(index)) continue;
    (pos == PartOfSpeech::adjective ? wn.adjective : wn.adverb) = LemmaIndex::load(index, pos);
  }
  return wn;
}

const Taxonomy* WordNetBundle::taxonomy(PartOfSpeech pos) const noexcept {
  if (pos == PartOfSpeech::noun) return noun ? &*noun : nullptr;
  if (pos == PartOfSpeech::verb) return verb ? &*verb : nullptr;
  return nullptr;
}

const ICTable* WordNetBundle::ic(PartOfSpeech pos) const noexcept {
  if (pos == PartOfSpeech::noun) return noun_ic ? &*noun_ic : nullptr;
  if (pos == PartOfSpeech::verb) return verb_ic ? &*verb_ic : nullptr;
  return nullptr;
}

bool WordNetBundle::has_hierarchy(std::string_view lemma) const {
  return (noun && noun->contains(lemma)) || (verb && verb->contains(lemma));
}

bool WordNetBundle::covers(std::string_view lemma) const {
  return has_hierarchy(lemma) || (adjective && adjective->contains(lemma)) || (adverb && adverb->contains(lemma));
}

std::string to_lemma(std::string_view tag, LemmaOptions options) {
  std::string lemma = normalize_tag(tag);
  if (options.normalize_separators) lemma = normalize_separators(lemma);
  return lemma;
}

Coverage coverage(std::span<const std::string> tags, const WordNetBundle& wn, LemmaOptions options) {
  Coverage c;
  c.total = tags.size();
  for (const auto& tag : tags) {
    const auto lemma = to_lemma(tag, options);
    const bool n = wn.noun && wn.noun->contains(lemma);
    const bool v = wn.verb && wn.verb->contains(lemma);
    const bool a = wn.adjective && wn.adjective->contains(lemma);
    const bool r = wn.adverb && wn.adverb->contains(lemma);
    c.noun += n;
    c.verb += v;
    c.adjective += a;
    c.adverb += r;
    c.any += (n || v || a || r);
  }
  c.defined = c.total > 0;
  c.fraction = c.defined ? static_cast<double>(c.any) / static_cast<double>(c.total) : 0.0;
  return c;
}

namespace {

enum class Outcome : std::uint8_t { not_evaluated, grounded, no_related, related_uncovered, no_common_pos };

}  // namespace

MeasureGrounding ground_top1(const RelatedTable& table, std::span<const std::string> tag_names,
                             const WordNetBundle& wn, LemmaOptions options, unsigned threads) {
  if (table.lists.size() != tag_names.size()) throw ContractError("ground_top1: table does not match tag names");
  const std::size_t n = tag_names.size();
  std::vector<Outcome> outcome(n, Outcome::not_evaluated);
  std::vector<GroundedPair> pairs(n);

  parallel_for(n, threads, [&](std::size_t i) {
    const auto lemma = to_lemma(tag_names[i], options);
    if (!wn.has_hierarchy(lemma)) return;
    const auto& items = table.lists[i].items;
    if (items.empty()) {
      outcome[i] = Outcome::no_related;
      return;
    }
    const auto related = items.front().tag;
    const auto related_lemma = to_lemma(tag_names[index_of(related)], options);
    if (!wn.covers(related_lemma)) {
      outcome[i] = Outcome::related_uncovered;
      return;
    }
    GroundedPair pair{make_id<TagId>(i), related, PartOfSpeech::noun, 0, {}, std::nullopt};
    bool found = false;
    for (auto pos : {PartOfSpeech::noun, PartOfSpeech::verb}) {
      const Taxonomy* tax = wn.taxonomy(pos);
      if (!tax || !tax->contains(lemma) || !tax->contains(related_lemma)) continue;
      auto path = shortest_path(*tax, lemma, related_lemma);
      if (!found || path.length() < pair.path_length) {
        pair.pos = pos;
        pair.path_length = path.length();
        pair.composition = std::move(path.composition);
      }
      found = true;
      if (const ICTable* ic = wn.ic(pos)) {
        const double d = jiang_conrath(*tax, *ic, lemma, related_lemma);
        pair.jiang_conrath = pair.jiang_conrath ? std::min(*pair.jiang_conrath, d) : d;
      }
    }
    if (!found) {
      outcome[i] = Outcome::no_common_pos;
      return;
    }
    outcome[i] = Outcome::grounded;
    pairs[i] = std::move(pair);
  });

  MeasureGrounding g;
  g.measure = table.measure;
  for (std::size_t i = 0; i < n; ++i) {
    switch (outcome[i]) {
      case Outcome::not_evaluated:
        continue;
      case Outcome::grounded:
        g.pairs.push_back(std::move(pairs[i]));
        break;
      case Outcome::no_related:
        ++g.skipped_no_related;
        break;
      case Outcome::related_uncovered:
        ++g.skipped_related_uncovered;
        break;
      case Outcome::no_common_pos:
        ++g.skipped_no_common_pos;
        break;
    }
    ++g.evaluated;
  }
  return g;
}

DistanceSummary avg_semantic_distance(const MeasureGrounding& g, DistanceMetric metric) {
  DistanceSummary s;
  double sum = 0.0;
  for (const auto& pair : g.pairs) {
    if (metric == DistanceMetric::path) {
      sum += static_cast<double>(pair.path_length);
    } else if (pair.jiang_conrath) {
      sum += *pair.jiang_conrath;
    } else {
      continue;
    }
    ++s.pairs;
  }
  s.skipped = g.evaluated - s.pairs;
  s.defined = s.pairs > 0;
  s.mean = s.defined ? sum / static_cast<double>(s.pairs) : 0.0;
  return s;
}

PathLengthDistribution path_length_distribution(const MeasureGrounding& g) {
  PathLengthDistribution d;
  for (const auto& pair : g.pairs) ++d.count[std::min<std::size_t>(pair.path_length, 3)];
  d.pairs = g.pairs.size();
  d.defined = d.pairs > 0;
  if (d.defined) {
    for (std::size_t b = 0; b < 4; ++b) {
      d.probability[b] = static_cast<double>(d.count[b]) / static_cast<double>(d.pairs);
    }
  }
  return d;
}

EdgeComposition edge_composition(const MeasureGrounding& g, std::size_t n) {
  if (n != 1 && n != 2) throw ContractError("edge_composition: length must be 1 or 2");
  EdgeComposition c;
  c.length = n;
  // enumerate patterns in binary order with up = 0
  const std::size_t count = std::size_t{1} << n;
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<Step> steps;
    for (std::size_t bit = 0; bit < n; ++bit) {
      steps.push_back(((code >> (n - 1 - bit)) & 1u) ? Step::down : Step::up);
    }
    c.patterns.push_back(composition_pattern(steps));
  }
  c.count.assign(count, 0);
  for (const auto& pair : g.pairs) {
    if (pair.path_length != n) continue;
    std::size_t code = 0;
    for (auto step : pair.composition) code = (code << 1) | (step == Step::down ? 1u : 0u);
    ++c.count[code];
    ++c.pairs;
  }
  c.defined = c.pairs > 0;
  c.fraction.assign(count, 0.0);
  if (c.defined) {
    for (std::size_t i = 0; i < count; ++i) {
      c.fraction[i] = static_cast<double>(c.count[i]) / static_cast<double>(c.pairs);
    }
  }
  return c;
}

OverlapSummary top_k_overlap(const RelatedTable& a, const RelatedTable& b, std::size_t k) {
  if (a.lists.size() != b.lists.size()) throw ContractError("top_k_overlap: tables cover different tags");
  OverlapSummary s;
  s.a = a.measure;
  s.b = b.measure;
  s.k = k;
  s.tags = a.lists.size();
  std::size_t shared = 0;
  std::vector<TagId> left, right;
  for (std::size_t i = 0; i < a.lists.size(); ++i) {
    left.clear();
    right.clear();
    for (std::size_t j = 0; j < std::min(k, a.lists[i].items.size()); ++j) left.push_back(a.lists[i].items[j].tag);
    for (std::size_t j = 0; j < std::min(k, b.lists[i].items.size()); ++j) right.push_back(b.lists[i].items[j].tag);
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    std::vector<TagId> both;
    std::set_intersection(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(both));
    shared += both.size();
  }
  s.defined = s.tags > 0;
  s.mean = s.defined ? static_cast<double>(shared) / static_cast<double>(s.tags) : 0.0;
  return s;
}

RankCurve avg_rank_curve(const RelatedTable& table, std::span<const TagStats> stats, std::size_t k,
                         std::size_t bucket_count) {
  if (bucket_count == 0) throw ContractError("avg_rank_curve: bucket_count must be positive");
  if (stats.size() != table.lists.size()) throw ContractError("avg_rank_curve: stats do not match table");
  RankCurve curve;
  curve.measure = table.measure;
  curve.k = k;
  const std::size_t tags = stats.size();
  std::vector<std::size_t> rank_of(tags, 0);
  for (const auto& s : stats) rank_of[index_of(s.tag)] = s.rank;

  const double log_total = std::log(static_cast<double>(std::max<std::size_t>(tags, 1)));
  curve.buckets.resize(bucket_count);
  for (std::size_t b = 0; b < bucket_count; ++b) {
    const auto edge = [&](std::size_t i) {
      return std::exp(log_total * static_cast<double>(i) / static_cast<double>(bucket_count));
    };
    curve.buckets[b].rank_lo = edge(b);
    curve.buckets[b].rank_hi = edge(b + 1);
  }

  std::vector<double> sum(bucket_count, 0.0);
  for (const auto& s : stats) {
    const auto& items = table.lists[index_of(s.tag)].items;
    const std::size_t used = std::min(k, items.size());
    if (used == 0) {
      ++curve.skipped;
      continue;
    }
    double mean = 0.0;
    for (std::size_t j = 0; j < used; ++j) mean += static_cast<double>(rank_of[index_of(items[j].tag)]);
    mean /= static_cast<double>(used);

    std::size_t b = 0;
    if (log_total > 0.0) {
      const double pos = std::log(static_cast<double>(s.rank)) / log_total * static_cast<double>(bucket_count);
      b = std::min(bucket_count - 1, static_cast<std::size_t>(std::floor(pos + 1e-9)));
    }
    sum[b] += mean;
    ++curve.buckets[b].tags;
  }
  for (std::size_t b = 0; b < bucket_count; ++b) {
    auto& bucket = curve.buckets[b];
    bucket.defined = bucket.tags > 0;
    bucket.mean_related_rank = bucket.defined ? sum[b] / static_cast<double>(bucket.tags) : 0.0;
  }
  return curve;
}

GroundingReport build_report(const Folksonomy& f, std::span<const RelatedTable> tables, const WordNetBundle& wn,
                             const GroundingOptions& options) {
  if (tables.size() != kAllMeasures.size()) throw ContractError("build_report: need one table per measure");
  for (std::size_t m = 0; m < tables.size(); ++m) {
    if (tables[m].measure != kAllMeasures[m]) throw ContractError("build_report: tables out of order");
  }
  GroundingReport report;
  report.k = options.k;
  report.tags.assign(f.tags().begin(), f.tags().end());
  report.coverage = coverage(f.tags(), wn, options.lemma);
  const auto stats = tag_stats(f);
  for (const auto& table : tables) {
    MeasureReport m;
    m.measure = table.measure;
    m.grounding = ground_top1(table, f.tags(), wn, options.lemma, options.threads);
    m.path = avg_semantic_distance(m.grounding, DistanceMetric::path);
    m.jiang_conrath = avg_semantic_distance(m.grounding, DistanceMetric::jiang_conrath);
    m.path_lengths = path_length_distribution(m.grounding);
    m.composition_1 = edge_composition(m.grounding, 1);
    m.composition_2 = edge_composition(m.grounding, 2);
    m.rank_curve = avg_rank_curve(table, stats, options.k, options.rank_buckets);
    report.measures.push_back(std::move(m));
  }
  const auto& freq = tables[0];
  const auto& cosine = tables[1];
  const auto& folkrank = tables[2];
  report.overlaps.push_back(top_k_overlap(freq, folkrank, options.k));
  report.overlaps.push_back(top_k_overlap(cosine, freq, options.k));
  report.overlaps.push_back(top_k_overlap(cosine, folkrank, options.k));
  return report;
}

}  // namespace folkrel
