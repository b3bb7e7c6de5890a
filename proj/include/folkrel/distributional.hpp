#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "folkrel/core.hpp"

namespace folkrel {

struct Related {
  TagId tag;
  double score;

  friend bool operator==(const Related&, const Related&) = default;
};

/// Tags related to `source`, by descending score; ties by tag name ascending.
/// The source never appears in its own list.
struct RelatedList {
  TagId source{};
  std::vector<Related> items;

  void truncate(std::size_t k) {
    if (items.size() > k) items.resize(k);
  }
};

/// Orders by descending score, then ascending tag id (== tag name).
inline bool ranks_before(const Related& a, const Related& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  return a.tag < b.tag;
}

/// Tag-tag co-occurrence graph. Row t of `weights()` is the co-occurrence
/// vector v_t; it is symmetric with an empty diagonal.
class CoGraph {
 public:
  using Matrix = Eigen::SparseMatrix<std::int64_t, Eigen::RowMajor>;
  using StorageIndex = Matrix::StorageIndex;

  CoGraph() = default;
  CoGraph(std::vector<std::string> tags, Matrix weights);

  std::size_t num_tags() const noexcept { return tags_.size(); }
  std::size_t num_edges() const noexcept { return static_cast<std::size_t>(weights_.nonZeros()) / 2; }
  const Matrix& weights() const noexcept { return weights_; }

  std::span<const std::string> tags() const noexcept { return tags_; }
  const std::string& tag(TagId id) const { return tags_.at(index_of(id)); }
  /// Throws LookupError.
  TagId tag_id(std::string_view name) const;

  /// w(a, b); 0 for absent pairs and for a == b.
  std::int64_t weight(TagId a, TagId b) const;

  /// Neighbor ids of `t`, ascending, with matching weights.
  std::span<const StorageIndex> neighbors(TagId t) const;
  std::span<const std::int64_t> neighbor_weights(TagId t) const;

  /// Σ_{t'≠t} w(t,t')², exact.
  long double squared_norm(TagId t) const { return squared_norms_[index_of(t)]; }

 private:
  std::vector<std::string> tags_;
  Matrix weights_;
  std::vector<long double> squared_norms_;
};

/// w(t1,t2) = number of posts containing both tags. Posts are split into
/// `threads` chunks whose integer counts are summed, so the result does not
/// depend on the thread count.
CoGraph build_cooccurrence(const Folksonomy& folksonomy, unsigned threads = 1);

/// All neighbors of t by descending co-occurrence weight.
RelatedList freq_relatedness(const CoGraph& graph, TagId t);
RelatedList freq_relatedness(const CoGraph& graph, std::string_view t);

/// Cosine of the angle between the co-occurrence vectors; 0 when either
/// vector is empty.
double cosine_similarity(const CoGraph& graph, TagId a, TagId b);
double cosine_similarity(const CoGraph& graph, std::string_view a, std::string_view b);

/// Top-k tags by cosine similarity. Only tags sharing a neighbor with t can
/// score above zero; those are found through the neighbor lists.
RelatedList cosine_relatedness(const CoGraph& graph, TagId t,
                               std::size_t k = std::numeric_limits<std::size_t>::max());
RelatedList cosine_relatedness(const CoGraph& graph, std::string_view t,
                               std::size_t k = std::numeric_limits<std::size_t>::max());

/// `tag1<TAB>tag2<TAB>weight` with tag1 < tag2, sorted.
void write_cooccurrence_tsv(std::ostream& output, const CoGraph& graph);

}  // namespace folkrel
