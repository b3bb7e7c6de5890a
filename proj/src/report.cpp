#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "folkrel/grounding.hpp"
#include "folkrel/text.hpp"

namespace folkrel {

namespace {

using nlohmann::ordered_json;

std::string score_or_na(bool defined, double value) { return defined ? format_score(value) : "NA"; }

// JSON numbers carry the same six-decimal rounding as the TSV cells.
ordered_json json_score(bool defined, double value) {
  if (!defined) return nullptr;
  return std::stod(format_score(value));
}

const char* pos_name(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::noun:
      return "noun";
    case PartOfSpeech::verb:
      return "verb";
    case PartOfSpeech::adjective:
      return "adjective";
    case PartOfSpeech::adverb:
      return "adverb";
  }
  return "unknown";
}

std::string coverage_tsv(const Coverage& c) {
  std::ostringstream out;
  out << "metric\tvalue\n";
  out << "tags\t" << c.total << '\n';
  out << "covered\t" << c.any << '\n';
  out << "fraction\t" << score_or_na(c.defined, c.fraction) << '\n';
  out << "noun\t" << c.noun << '\n';
  out << "verb\t" << c.verb << '\n';
  out << "adjective\t" << c.adjective << '\n';
  out << "adverb\t" << c.adverb << '\n';
  return out.str();
}

std::string overlap_tsv(const GroundingReport& r) {
  std::ostringstream out;
  out << "measure_a\tmeasure_b\tk\tmean_overlap\ttags\n";
  for (const auto& o : r.overlaps) {
    out << to_string(o.a) << '\t' << to_string(o.b) << '\t' << o.k << '\t' << score_or_na(o.defined, o.mean)
        << '\t' << o.tags << '\n';
  }
  return out.str();
}

std::string semdist_tsv(const GroundingReport& r) {
  std::ostringstream out;
  out << "measure\tmetric\tmean\tpairs\tskipped\tevaluated\tskipped_no_related\tskipped_related_uncovered"
         "\tskipped_no_common_pos\n";
  for (const auto& m : r.measures) {
    for (const auto* d : {&m.path, &m.jiang_conrath}) {
      out << to_string(m.measure) << '\t'
          << to_string(d == &m.path ? DistanceMetric::path : DistanceMetric::jiang_conrath) << '\t'
          << score_or_na(d->defined, d->mean) << '\t' << d->pairs << '\t' << d->skipped << '\t'
          << m.grounding.evaluated << '\t' << m.grounding.skipped_no_related << '\t'
          << m.grounding.skipped_related_uncovered << '\t' << m.grounding.skipped_no_common_pos << '\n';
    }
  }
  return out.str();
}

std::string pathlen_tsv(const GroundingReport& r) {
  std::ostringstream out;
  out << "measure\tp0\tp1\tp2\tp3plus\tpairs\n";
  for (const auto& m : r.measures) {
    const auto& d = m.path_lengths;
    out << to_string(m.measure);
    for (double p : d.probability) out << '\t' << score_or_na(d.defined, p);
    out << '\t' << d.pairs << '\n';
  }
  return out.str();
}

std::string edgecomp_tsv(const GroundingReport& r) {
  std::ostringstream out;
  out << "measure\tlength\tpattern\tcount\tfraction\n";
  for (const auto& m : r.measures) {
    for (const auto* c : {&m.composition_1, &m.composition_2}) {
      for (std::size_t i = 0; i < c->patterns.size(); ++i) {
        out << to_string(m.measure) << '\t' << c->length << '\t' << c->patterns[i] << '\t' << c->count[i] << '\t'
            << score_or_na(c->defined, c->fraction[i]) << '\n';
      }
    }
  }
  return out.str();
}

std::string rankcurve_tsv(const GroundingReport& r) {
  std::ostringstream out;
  out << "measure\tbucket\trank_lo\trank_hi\ttags\tmean_related_rank\n";
  for (const auto& m : r.measures) {
    const auto& buckets = m.rank_curve.buckets;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      const auto& bucket = buckets[b];
      out << to_string(m.measure) << '\t' << b << '\t' << format_score(bucket.rank_lo) << '\t'
          << format_score(bucket.rank_hi) << '\t' << bucket.tags << '\t'
          << score_or_na(bucket.defined, bucket.mean_related_rank) << '\n';
    }
  }
  return out.str();
}

ordered_json measure_json(const MeasureReport& m, const std::vector<std::string>& tags) {
  ordered_json j;
  j["measure"] = std::string(to_string(m.measure));
  const auto& g = m.grounding;
  j["evaluated"] = g.evaluated;
  j["pairs"] = g.pairs.size();
  j["skipped"] = {{"no_related", g.skipped_no_related},
                  {"related_uncovered", g.skipped_related_uncovered},
                  {"no_common_pos", g.skipped_no_common_pos}};
  for (const auto* d : {&m.path, &m.jiang_conrath}) {
    const auto key = std::string(to_string(d == &m.path ? DistanceMetric::path : DistanceMetric::jiang_conrath));
    j["distance"][key] = {{"mean", json_score(d->defined, d->mean)}, {"pairs", d->pairs}, {"skipped", d->skipped}};
  }
  const auto& pl = m.path_lengths;
  j["path_length"] = {{"0", json_score(pl.defined, pl.probability[0])},
                      {"1", json_score(pl.defined, pl.probability[1])},
                      {"2", json_score(pl.defined, pl.probability[2])},
                      {"3+", json_score(pl.defined, pl.probability[3])},
                      {"pairs", pl.pairs}};
  for (const auto* c : {&m.composition_1, &m.composition_2}) {
    ordered_json patterns = ordered_json::object();
    for (std::size_t i = 0; i < c->patterns.size(); ++i) {
      patterns[c->patterns[i]] = {{"count", c->count[i]}, {"fraction", json_score(c->defined, c->fraction[i])}};
    }
    j["edge_composition"][std::to_string(c->length)] = {{"pairs", c->pairs}, {"patterns", std::move(patterns)}};
  }
  ordered_json buckets = ordered_json::array();
  for (const auto& b : m.rank_curve.buckets) {
    buckets.push_back({{"rank_lo", json_score(true, b.rank_lo)},
                       {"rank_hi", json_score(true, b.rank_hi)},
                       {"tags", b.tags},
                       {"mean_related_rank", json_score(b.defined, b.mean_related_rank)}});
  }
  j["rank_curve"] = {{"k", m.rank_curve.k}, {"skipped", m.rank_curve.skipped}, {"buckets", std::move(buckets)}};

  ordered_json pairs = ordered_json::array();
  for (const auto& p : g.pairs) {
    ordered_json steps = ordered_json::array();
    for (auto s : p.composition) steps.push_back(s == Step::up ? "up" : "down");
    pairs.push_back({{"tag", tags.at(index_of(p.tag))},
                     {"related", tags.at(index_of(p.related))},
                     {"pos", pos_name(p.pos)},
                     {"path_length", p.path_length},
                     {"composition", std::move(steps)},
                     {"jiang_conrath", json_score(p.jiang_conrath.has_value(), p.jiang_conrath.value_or(0.0))}});
  }
  j["grounded_pairs"] = std::move(pairs);
  return j;
}

std::string report_json(const GroundingReport& r) {
  ordered_json j;
  j["k"] = r.k;
  const auto& c = r.coverage;
  j["coverage"] = {{"tags", c.total},     {"covered", c.any},         {"fraction", json_score(c.defined, c.fraction)},
                   {"noun", c.noun},      {"verb", c.verb},           {"adjective", c.adjective},
                   {"adverb", c.adverb}};
  ordered_json overlaps = ordered_json::array();
  for (const auto& o : r.overlaps) {
    overlaps.push_back({{"measure_a", std::string(to_string(o.a))},
                        {"measure_b", std::string(to_string(o.b))},
                        {"k", o.k},
                        {"mean", json_score(o.defined, o.mean)},
                        {"tags", o.tags}});
  }
  j["overlap"] = std::move(overlaps);
  ordered_json measures = ordered_json::array();
  for (const auto& m : r.measures) measures.push_back(measure_json(m, r.tags));
  j["measures"] = std::move(measures);
  return j.dump(2) + "\n";
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_report(const GroundingReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  // render everything first so a formatting failure leaves no file touched
  const std::pair<const char*, std::string> files[] = {
      {"report_coverage.tsv", coverage_tsv(report.coverage)},
      {"report_overlap.tsv", overlap_tsv(report)},
      {"report_semdist.tsv", semdist_tsv(report)},
      {"report_pathlen.tsv", pathlen_tsv(report)},
      {"report_edgecomp.tsv", edgecomp_tsv(report)},
      {"report_rankcurve.tsv", rankcurve_tsv(report)},
      {"report.json", report_json(report)},
  };
  for (const auto& [name, content] : files) write_file_atomic(dir / name, content);
}

}  // namespace folkrel
