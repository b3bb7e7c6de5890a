#include "folkrel/distributional.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

namespace folkrel {

CoGraph::CoGraph(std::vector<std::string> tags, Matrix weights)
    : tags_(std::move(tags)), weights_(std::move(weights)), squared_norms_(tags_.size(), 0.0L) {
  weights_.makeCompressed();
  for (Eigen::Index row = 0; row < weights_.outerSize(); ++row) {
    long double sum = 0.0L;
    for (Matrix::InnerIterator it(weights_, row); it; ++it) {
      const auto w = static_cast<long double>(it.value());
      sum += w * w;
    }
    squared_norms_[static_cast<std::size_t>(row)] = sum;
  }
}

TagId CoGraph::tag_id(std::string_view name) const {
  const auto it = std::lower_bound(tags_.begin(), tags_.end(), name);
  if (it == tags_.end() || *it != name) throw LookupError("unknown tag '" + std::string(name) + "'");
  return make_id<TagId>(static_cast<std::size_t>(it - tags_.begin()));
}

std::span<const CoGraph::StorageIndex> CoGraph::neighbors(TagId t) const {
  const auto row = index_of(t);
  const auto begin = weights_.outerIndexPtr()[row];
  const auto end = weights_.outerIndexPtr()[row + 1];
  return {weights_.innerIndexPtr() + begin, static_cast<std::size_t>(end - begin)};
}

std::span<const std::int64_t> CoGraph::neighbor_weights(TagId t) const {
  const auto row = index_of(t);
  const auto begin = weights_.outerIndexPtr()[row];
  const auto end = weights_.outerIndexPtr()[row + 1];
  return {weights_.valuePtr() + begin, static_cast<std::size_t>(end - begin)};
}

std::int64_t CoGraph::weight(TagId a, TagId b) const {
  if (a == b) return 0;
  const auto cols = neighbors(a);
  const auto target = static_cast<StorageIndex>(index_of(b));
  const auto it = std::lower_bound(cols.begin(), cols.end(), target);
  if (it == cols.end() || *it != target) return 0;
  return neighbor_weights(a)[static_cast<std::size_t>(it - cols.begin())];
}

namespace {

using Triplet = Eigen::Triplet<std::int64_t, CoGraph::StorageIndex>;

CoGraph::Matrix count_pairs(std::span<const Post> posts, std::size_t num_tags) {
  constexpr std::size_t kFlushAt = std::size_t{1} << 23;
  const auto n = static_cast<Eigen::Index>(num_tags);
  CoGraph::Matrix total(n, n);
  std::vector<Triplet> triplets;
  auto flush = [&] {
    CoGraph::Matrix part(n, n);
    part.setFromTriplets(triplets.begin(), triplets.end());
    total = total + part;
    triplets.clear();
  };
  for (const auto& post : posts) {
    const auto& tags = post.tags;
    for (std::size_t i = 0; i < tags.size(); ++i) {
      for (std::size_t j = i + 1; j < tags.size(); ++j) {
        const auto a = static_cast<CoGraph::StorageIndex>(index_of(tags[i]));
        const auto b = static_cast<CoGraph::StorageIndex>(index_of(tags[j]));
        triplets.emplace_back(a, b, 1);
        triplets.emplace_back(b, a, 1);
      }
    }
    if (triplets.size() >= kFlushAt) flush();
  }
  if (!triplets.empty()) flush();
  return total;
}

// One shared formula so that pairwise and top-k queries agree bit for bit.
double cosine_from(long double dot, long double sq_a, long double sq_b) {
  if (dot <= 0.0L || sq_a <= 0.0L || sq_b <= 0.0L) return 0.0;
  const long double value = dot / std::sqrt(sq_a * sq_b);
  return static_cast<double>(std::min(value, 1.0L));
}

}  // namespace

CoGraph build_cooccurrence(const Folksonomy& f, unsigned threads) {
  const auto posts = f.posts();
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads, posts.size() / 4096 + 1));
  CoGraph::Matrix weights;
  if (chunks == 1) {
    weights = count_pairs(posts, f.num_tags());
  } else {
    std::vector<CoGraph::Matrix> parts(chunks);
    std::vector<std::jthread> workers;
    const std::size_t step = (posts.size() + chunks - 1) / chunks;
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = std::min(posts.size(), c * step);
      const std::size_t end = std::min(posts.size(), begin + step);
      workers.emplace_back([&, c, begin, end] { parts[c] = count_pairs(posts.subspan(begin, end - begin), f.num_tags()); });
    }
    workers.clear();
    weights = parts.front();
    for (std::size_t c = 1; c < chunks; ++c) weights = weights + parts[c];
  }
  weights.prune(std::int64_t{0});
  return CoGraph(std::vector<std::string>(f.tags().begin(), f.tags().end()), std::move(weights));
}

RelatedList freq_relatedness(const CoGraph& g, TagId t) {
  RelatedList list{t, {}};
  const auto cols = g.neighbors(t);
  const auto vals = g.neighbor_weights(t);
  list.items.reserve(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    list.items.push_back({make_id<TagId>(static_cast<std::size_t>(cols[i])), static_cast<double>(vals[i])});
  }
  std::sort(list.items.begin(), list.items.end(), ranks_before);
  return list;
}

RelatedList freq_relatedness(const CoGraph& g, std::string_view t) { return freq_relatedness(g, g.tag_id(t)); }

double cosine_similarity(const CoGraph& g, TagId a, TagId b) {
  const auto ca = g.neighbors(a), cb = g.neighbors(b);
  const auto va = g.neighbor_weights(a), vb = g.neighbor_weights(b);
  long double dot = 0.0L;
  std::size_t i = 0, j = 0;
  while (i < ca.size() && j < cb.size()) {
    if (ca[i] == cb[j]) {
      dot += static_cast<long double>(va[i]) * static_cast<long double>(vb[j]);
      ++i;
      ++j;
    } else if (ca[i] < cb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return cosine_from(dot, g.squared_norm(a), g.squared_norm(b));
}

double cosine_similarity(const CoGraph& g, std::string_view a, std::string_view b) {
  return cosine_similarity(g, g.tag_id(a), g.tag_id(b));
}

RelatedList cosine_relatedness(const CoGraph& g, TagId t, std::size_t k) {
  RelatedList list{t, {}};
  if (k == 0) return list;

  // Inverted-index join: dot(v_t, v_m) accumulates over shared neighbors n,
  // visited in ascending n just like the merge in cosine_similarity.
  std::vector<long double> dot(g.num_tags(), 0.0L);
  std::vector<CoGraph::StorageIndex> touched;
  const auto self = static_cast<CoGraph::StorageIndex>(index_of(t));
  const auto cols = g.neighbors(t);
  const auto vals = g.neighbor_weights(t);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto n = make_id<TagId>(static_cast<std::size_t>(cols[i]));
    const auto a = static_cast<long double>(vals[i]);
    const auto second = g.neighbors(n);
    const auto second_vals = g.neighbor_weights(n);
    for (std::size_t j = 0; j < second.size(); ++j) {
      const auto m = second[j];
      if (m == self) continue;
      auto& slot = dot[static_cast<std::size_t>(m)];
      if (slot == 0.0L) touched.push_back(m);
      slot += a * static_cast<long double>(second_vals[j]);
    }
  }

  const long double sq_t = g.squared_norm(t);
  list.items.reserve(touched.size());
  for (auto m : touched) {
    const auto id = make_id<TagId>(static_cast<std::size_t>(m));
    list.items.push_back({id, cosine_from(dot[static_cast<std::size_t>(m)], sq_t, g.squared_norm(id))});
  }
  if (k < list.items.size()) {
    std::partial_sort(list.items.begin(), list.items.begin() + static_cast<std::ptrdiff_t>(k), list.items.end(),
                      ranks_before);
    list.items.resize(k);
  } else {
    std::sort(list.items.begin(), list.items.end(), ranks_before);
  }
  return list;
}

RelatedList cosine_relatedness(const CoGraph& g, std::string_view t, std::size_t k) {
  return cosine_relatedness(g, g.tag_id(t), k);
}

void write_cooccurrence_tsv(std::ostream& out, const CoGraph& g) {
  for (std::size_t a = 0; a < g.num_tags(); ++a) {
    const auto id = make_id<TagId>(a);
    const auto cols = g.neighbors(id);
    const auto vals = g.neighbor_weights(id);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto b = static_cast<std::size_t>(cols[i]);
      if (b <= a) continue;
      out << g.tag(id) << '\t' << g.tags()[b] << '\t' << vals[i] << '\n';
    }
  }
}

}  // namespace folkrel
