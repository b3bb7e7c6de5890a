#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "folkrel/types.hpp"

namespace folkrel {

enum class PartOfSpeech : std::uint8_t { noun, verb, adjective, adverb };

char pos_char(PartOfSpeech pos) noexcept;
/// "noun", "verb", "adj", "adv"
std::string_view pos_file_suffix(PartOfSpeech pos) noexcept;

/// Dense synset handle within one Taxonomy.
enum class SynsetId : std::uint32_t {};

/// lemma -> synset offsets, as read from an `index.<pos>` file. Used on its
/// own for parts of speech without an is-a hierarchy (coverage only).
class LemmaIndex {
 public:
  LemmaIndex() = default;

  /// Throws WndbParseError on malformed records.
  static LemmaIndex parse(std::istream& index, PartOfSpeech pos);
  static LemmaIndex load(const std::filesystem::path& index_file, PartOfSpeech pos);

  PartOfSpeech pos() const noexcept { return pos_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(std::string_view lemma) const;
  /// Empty when absent.
  std::span<const std::uint32_t> offsets(std::string_view lemma) const;

  const std::map<std::string, std::vector<std::uint32_t>, std::less<>>& entries() const noexcept {
    return entries_;
  }

 private:
  PartOfSpeech pos_ = PartOfSpeech::noun;
  std::map<std::string, std::vector<std::uint32_t>, std::less<>> entries_;
};

/// Is-a hierarchy of one part of speech. Hypernym edges point child -> parent;
/// a synthetic root parents every synset that has no hypernym.
class Taxonomy {
 public:
  static constexpr std::uint32_t kRootOffset = std::numeric_limits<std::uint32_t>::max();

  Taxonomy() = default;

  PartOfSpeech pos() const noexcept { return pos_; }
  /// Real synsets, synthetic root excluded.
  std::size_t num_synsets() const noexcept { return offsets_.size() - 1; }
  /// Real synsets plus the root.
  std::size_t num_nodes() const noexcept { return offsets_.size(); }
  std::size_t num_hypernym_edges() const noexcept { return edge_count_; }

  SynsetId root() const noexcept { return static_cast<SynsetId>(offsets_.size() - 1); }
  bool is_root(SynsetId id) const noexcept { return id == root(); }

  std::uint32_t offset(SynsetId id) const { return offsets_.at(index_of(id)); }
  std::optional<SynsetId> find_offset(std::uint32_t offset) const;
  std::span<const std::string> lemmas(SynsetId id) const { return lemmas_.at(index_of(id)); }
  std::span<const SynsetId> parents(SynsetId id) const { return parents_.at(index_of(id)); }
  std::span<const SynsetId> children(SynsetId id) const { return children_.at(index_of(id)); }

  bool contains(std::string_view lemma) const;
  /// Synsets containing the lemma, ascending offset; empty when absent.
  std::span<const SynsetId> synsets(std::string_view lemma) const;
  std::size_t num_lemmas() const noexcept { return lemma_index_.size(); }

  /// Parses WNdb 3.0 `index.<pos>` and `data.<pos>`. `@` and `@i` pointers
  /// are hypernyms. Throws WndbParseError or StructuralError.
  static Taxonomy parse(std::istream& index, std::istream& data, PartOfSpeech pos);

 private:
  PartOfSpeech pos_ = PartOfSpeech::noun;
  std::vector<std::uint32_t> offsets_;  // ascending; root last
  std::vector<std::vector<std::string>> lemmas_;
  std::vector<std::vector<SynsetId>> parents_;
  std::vector<std::vector<SynsetId>> children_;
  std::map<std::string, std::vector<SynsetId>, std::less<>> lemma_index_;
  std::size_t edge_count_ = 0;
};

Taxonomy load_taxonomy(const std::filesystem::path& index_file, const std::filesystem::path& data_file,
                       PartOfSpeech pos);

enum class Step : std::uint8_t { up, down };

std::string_view to_string(Step step) noexcept;

/// A shortest is-a path. `up` climbs to a hypernym, `down` descends to a hyponym.
struct TaxPath {
  SynsetId source{};
  SynsetId target{};
  std::vector<Step> composition;

  std::size_t length() const noexcept { return composition.size(); }
};

/// "up-down", "" for the empty path.
std::string composition_pattern(std::span<const Step> composition);

/// Minimum edge-count path over hypernym edges in either direction, taken
/// over all synset pairs drawn from `from` x `to`. Among equally short paths
/// the composition that goes up earliest wins, then the smallest target
/// offset, then smallest predecessors walking back to the source.
TaxPath shortest_path(const Taxonomy& taxonomy, std::span<const SynsetId> from, std::span<const SynsetId> to);

/// Throws LookupError when a lemma is absent.
TaxPath shortest_path(const Taxonomy& taxonomy, std::string_view lemma1, std::string_view lemma2);

struct IcOptions {
  /// Added to every synset's own count before propagation.
  double smoothing = 1.0;
};

struct IcLoadStats {
  std::size_t lines = 0;
  std::size_t unknown_keys = 0;  // skipped
  std::size_t other_pos = 0;     // synset keys for a different part of speech
};

/// Cumulative synset counts and information content IC(c) = −ln(count(c)/N).
class ICTable {
 public:
  ICTable() = default;
  ICTable(std::vector<double> own_counts, const Taxonomy& taxonomy, IcOptions options);

  double cumulative(SynsetId id) const { return cumulative_.at(index_of(id)); }
  double total() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  double information_content(SynsetId id) const;
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;  // indexed like the taxonomy nodes; root last
};

/// Reads `lemma<TAB>count` or `offset<TAB>count` lines; the first line is a
/// header naming the key column. Lemma counts are split evenly across the
/// lemma's synsets. Offsets may carry a POS letter suffix ("00001740n").
/// Throws ParseError for negative counts and malformed lines.
ICTable load_ic(std::istream& counts, const Taxonomy& taxonomy, IcOptions options = {},
                IcLoadStats* stats = nullptr);

/// Lemma-keyed counts from memory (e.g. tag frequencies).
ICTable ic_from_lemma_counts(const std::unordered_map<std::string, double>& counts, const Taxonomy& taxonomy,
                             IcOptions options = {}, IcLoadStats* stats = nullptr);

/// Ancestor (or self) shared by a and b with the highest IC; ties by larger
/// cumulative count, then smaller offset.
SynsetId lowest_common_subsumer(const Taxonomy& taxonomy, const ICTable& ic, SynsetId a, SynsetId b);

/// IC(a) + IC(b) − 2·IC(lcs(a,b)).
double jiang_conrath(const Taxonomy& taxonomy, const ICTable& ic, SynsetId a, SynsetId b);

/// Minimum over all synset pairs of the two lemmas. Throws LookupError.
double jiang_conrath(const Taxonomy& taxonomy, const ICTable& ic, std::string_view lemma1,
                     std::string_view lemma2);

}  // namespace folkrel
