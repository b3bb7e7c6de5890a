#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>

#include "folkrel/text.hpp"
#include "folkrel/wordnet.hpp"

namespace folkrel {

namespace {

// Visits `start` and each of its ancestors exactly once.
template <typename Fn>
void for_each_ancestor_or_self(const Taxonomy& tax, SynsetId start, std::vector<std::uint32_t>& mark,
                               std::uint32_t epoch, Fn&& fn) {
  std::vector<SynsetId> stack{start};
  mark[index_of(start)] = epoch;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    fn(v);
    for (auto p : tax.parents(v)) {
      if (mark[index_of(p)] != epoch) {
        mark[index_of(p)] = epoch;
        stack.push_back(p);
      }
    }
  }
}

}  // namespace

ICTable::ICTable(std::vector<double> own, const Taxonomy& tax, IcOptions options) {
  if (own.size() != tax.num_nodes()) throw ContractError("ICTable: count vector does not match taxonomy");
  if (!(options.smoothing >= 0.0)) throw ContractError("ICTable: smoothing must be non-negative");
  for (std::size_t i = 0; i + 1 < own.size(); ++i) own[i] += options.smoothing;

  cumulative_.assign(tax.num_nodes(), 0.0);
  std::vector<std::uint32_t> mark(tax.num_nodes(), 0);
  std::uint32_t epoch = 0;
  for (std::size_t i = 0; i < own.size(); ++i) {
    if (own[i] == 0.0) continue;
    const double count = own[i];
    for_each_ancestor_or_self(tax, make_id<SynsetId>(i), mark, ++epoch,
                              [&](SynsetId v) { cumulative_[index_of(v)] += count; });
  }
}

double ICTable::information_content(SynsetId id) const {
  const double n = total();
  const double c = cumulative(id);
  if (n <= 0.0 || c <= 0.0) return std::numeric_limits<double>::infinity();
  if (c >= n) return 0.0;
  return -std::log(c / n);
}

namespace {

void add_lemma_count(std::vector<double>& own, const Taxonomy& tax, std::string_view lemma, double count,
                     IcLoadStats& stats) {
  const auto synsets = tax.synsets(lemma);
  if (synsets.empty()) {
    ++stats.unknown_keys;
    return;
  }
  const double share = count / static_cast<double>(synsets.size());
  for (auto id : synsets) own[index_of(id)] += share;
}

}  // namespace

ICTable load_ic(std::istream& in, const Taxonomy& tax, IcOptions options, IcLoadStats* stats_out) {
  IcLoadStats stats;
  std::vector<double> own(tax.num_nodes(), 0.0);
  enum class Mode { unknown, lemma, offset } mode = Mode::unknown;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) throw ParseError("expected key<TAB>count", line_no);
    if (mode == Mode::unknown) {
      if (fields[0] == "lemma") {
        mode = Mode::lemma;
      } else if (fields[0] == "offset") {
        mode = Mode::offset;
      } else {
        throw ParseError("header must name the key column: 'lemma' or 'offset'", line_no);
      }
      continue;
    }
    ++stats.lines;

    double count = 0.0;
    const auto* first = fields[1].data();
    const auto* last = first + fields[1].size();
    const auto parsed = std::from_chars(first, last, count);
    if (fields[1].empty() || parsed.ec != std::errc{} || parsed.ptr != last || !std::isfinite(count)) {
      throw ParseError("malformed count '" + std::string(fields[1]) + "'", line_no);
    }
    if (count < 0.0) throw ParseError("negative count", line_no);

    if (mode == Mode::lemma) {
      add_lemma_count(own, tax, normalize_tag(fields[0]), count, stats);
      continue;
    }
    auto key = fields[0];
    if (key.size() > 1 && std::string_view("nvasr").find(key.back()) != std::string_view::npos) {
      if (key.back() != pos_char(tax.pos())) {
        ++stats.other_pos;
        continue;
      }
      key.remove_suffix(1);
    }
    std::uint32_t offset = 0;
    const auto r = std::from_chars(key.data(), key.data() + key.size(), offset);
    if (key.empty() || r.ec != std::errc{} || r.ptr != key.data() + key.size()) {
      throw ParseError("malformed synset offset '" + std::string(fields[0]) + "'", line_no);
    }
    if (const auto id = tax.find_offset(offset)) {
      own[index_of(*id)] += count;
    } else {
      ++stats.unknown_keys;
    }
  }
  if (stats_out) *stats_out = stats;
  return ICTable(std::move(own), tax, options);
}

ICTable ic_from_lemma_counts(const std::unordered_map<std::string, double>& counts, const Taxonomy& tax,
                             IcOptions options, IcLoadStats* stats_out) {
  IcLoadStats stats;
  std::vector<double> own(tax.num_nodes(), 0.0);
  // sorted so floating-point accumulation order is fixed
  std::vector<std::pair<std::string, double>> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [lemma, count] : sorted) {
    if (count < 0.0) throw ContractError("ic_from_lemma_counts: negative count for '" + lemma + "'");
    ++stats.lines;
    add_lemma_count(own, tax, lemma, count, stats);
  }
  if (stats_out) *stats_out = stats;
  return ICTable(std::move(own), tax, options);
}

SynsetId lowest_common_subsumer(const Taxonomy& tax, const ICTable& ic, SynsetId a, SynsetId b) {
  if (ic.size() != tax.num_nodes()) throw ContractError("lowest_common_subsumer: ICTable from another taxonomy");
  struct Marks {
    std::vector<std::uint32_t> of_a, of_b;
    std::uint32_t epoch = 0;
  };
  thread_local Marks marks;
  if (marks.of_a.size() < tax.num_nodes() || ++marks.epoch == 0) {
    marks.of_a.assign(std::max(marks.of_a.size(), tax.num_nodes()), 0);
    marks.of_b.assign(marks.of_a.size(), 0);
    marks.epoch = 1;
  }
  const auto epoch = marks.epoch;
  for_each_ancestor_or_self(tax, a, marks.of_a, epoch, [](SynsetId) {});
  std::vector<SynsetId> common;
  for_each_ancestor_or_self(tax, b, marks.of_b, epoch, [&](SynsetId v) {
    if (marks.of_a[index_of(v)] == epoch) common.push_back(v);
  });
  if (common.empty()) throw StructuralError("synsets share no ancestor");
  auto better = [&](SynsetId x, SynsetId y) {
    const double ix = ic.information_content(x), iy = ic.information_content(y);
    if (ix != iy) return ix > iy;
    if (ic.cumulative(x) != ic.cumulative(y)) return ic.cumulative(x) > ic.cumulative(y);
    return tax.offset(x) < tax.offset(y);
  };
  return *std::min_element(common.begin(), common.end(), better);
}

double jiang_conrath(const Taxonomy& tax, const ICTable& ic, SynsetId a, SynsetId b) {
  if (a == b) return 0.0;
  const auto lcs = lowest_common_subsumer(tax, ic, a, b);
  const double d = ic.information_content(a) + ic.information_content(b) - 2.0 * ic.information_content(lcs);
  return std::max(0.0, d);
}

double jiang_conrath(const Taxonomy& tax, const ICTable& ic, std::string_view lemma1, std::string_view lemma2) {
  const auto a = tax.synsets(lemma1);
  if (a.empty()) throw LookupError("lemma '" + std::string(lemma1) + "' not in taxonomy");
  const auto b = tax.synsets(lemma2);
  if (b.empty()) throw LookupError("lemma '" + std::string(lemma2) + "' not in taxonomy");
  double best = std::numeric_limits<double>::infinity();
  for (auto x : a)
    for (auto y : b) best = std::min(best, jiang_conrath(tax, ic, x, y));
  return best;
}

}  // namespace folkrel
