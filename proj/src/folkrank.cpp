#include "folkrel/folkrank.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace folkrel {

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::user:
      return "user";
    case NodeKind::tag:
      return "tag";
    case NodeKind::resource:
      return "resource";
  }
  return "unknown";
}

FolkGraph::FolkGraph(const Folksonomy& f, Matrix adjacency)
    : users_(f.users().begin(), f.users().end()),
      tags_(f.tags().begin(), f.tags().end()),
      resources_(f.resources().begin(), f.resources().end()),
      adjacency_(std::move(adjacency)) {
  adjacency_.makeCompressed();
  // symmetric, so column sums equal row sums
  degrees_ = Eigen::VectorXd::Zero(adjacency_.cols());
  for (Eigen::Index col = 0; col < adjacency_.outerSize(); ++col) {
    for (Matrix::InnerIterator it(adjacency_, col); it; ++it) degrees_[col] += it.value();
  }
  inverse_degrees_ = degrees_.unaryExpr([](double d) { return d > 0.0 ? 1.0 / d : 0.0; });
}

NodeKind FolkGraph::kind(Eigen::Index node) const {
  const auto i = static_cast<std::size_t>(node);
  if (i < users_.size()) return NodeKind::user;
  if (i < users_.size() + tags_.size()) return NodeKind::tag;
  if (i < users_.size() + tags_.size() + resources_.size()) return NodeKind::resource;
  throw LookupError("node index out of range");
}

const std::string& FolkGraph::name(Eigen::Index node) const {
  auto i = static_cast<std::size_t>(node);
  if (i < users_.size()) return users_[i];
  i -= users_.size();
  if (i < tags_.size()) return tags_[i];
  i -= tags_.size();
  return resources_.at(i);
}

TagId FolkGraph::tag_id(std::string_view name) const {
  const auto it = std::lower_bound(tags_.begin(), tags_.end(), name);
  if (it == tags_.end() || *it != name) throw LookupError("unknown tag '" + std::string(name) + "'");
  return make_id<TagId>(static_cast<std::size_t>(it - tags_.begin()));
}

FolkGraph build_folkgraph(const Folksonomy& f) {
  if (f.num_assignments() == 0) throw ContractError("build_folkgraph: folksonomy has no tag assignments");
  const auto users = static_cast<Eigen::Index>(f.num_users());
  const auto tags = static_cast<Eigen::Index>(f.num_tags());
  const auto n = users + tags + static_cast<Eigen::Index>(f.num_resources());

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * f.num_assignments() + 2 * f.num_posts());
  for (const auto& post : f.posts()) {
    const auto u = static_cast<Eigen::Index>(index_of(post.user));
    const auto r = users + tags + static_cast<Eigen::Index>(index_of(post.resource));
    for (auto tag : post.tags) {
      const auto t = users + static_cast<Eigen::Index>(index_of(tag));
      triplets.emplace_back(u, t, 1.0);
      triplets.emplace_back(t, u, 1.0);
      triplets.emplace_back(t, r, 1.0);
      triplets.emplace_back(r, t, 1.0);
    }
    // w(u,r) counts the tags of the post
    const auto size = static_cast<double>(post.tags.size());
    triplets.emplace_back(u, r, size);
    triplets.emplace_back(r, u, size);
  }
  FolkGraph::Matrix adjacency(n, n);
  adjacency.setFromTriplets(triplets.begin(), triplets.end());
  return FolkGraph(f, std::move(adjacency));
}

namespace detail {

void check_rank_arguments(Eigen::Index nodes, Eigen::Index preference_size, double damping, double preference_sum,
                          double preference_min, double tol, int max_iter) {
  if (nodes == 0) throw ContractError("rank: empty graph");
  if (preference_size != nodes) throw ContractError("rank: preference size does not match the graph");
  if (!(damping >= 0.0 && damping <= 1.0)) throw ContractError("rank: damping must lie in [0,1]");
  if (!(tol > 0.0)) throw ContractError("rank: tol must be positive");
  if (max_iter < 1) throw ContractError("rank: max_iter must be positive");
  if (!(preference_min >= 0.0)) throw ContractError("rank: preference has negative entries");
  if (!(std::abs(preference_sum - 1.0) <= 1e-9)) throw ContractError("rank: preference does not sum to 1");
}

}  // namespace detail

Eigen::VectorXd uniform_preference(Eigen::Index nodes) {
  return Eigen::VectorXd::Constant(nodes, 1.0 / static_cast<double>(nodes));
}

Eigen::VectorXd tag_preference(const FolkGraph& g, TagId tag, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw ContractError("tag_preference: beta must lie in (0,1)");
  if (index_of(tag) >= g.num_tags()) throw LookupError("tag_preference: tag out of range");
  const Eigen::Index n = g.num_nodes();
  if (n == 1) return Eigen::VectorXd::Ones(1);
  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, (1.0 - beta) / static_cast<double>(n - 1));
  p[g.tag_node(tag)] = beta;
  return p;
}

FolkRank::FolkRank(const FolkGraph& graph, FolkRankParams params)
    : graph_(&graph),
      params_(params),
      baseline_(rank(graph, params.damping, uniform_preference(graph.num_nodes()), params.tol, params.max_iter)) {}

FolkRankQuery FolkRank::query(TagId tag) const {
  FolkRankQuery q;
  q.preferred = rank(*graph_, params_.damping, tag_preference(*graph_, tag, params_.beta), params_.tol,
                     params_.max_iter);
  q.differential = q.preferred.weights - baseline_.weights;
  return q;
}

RelatedList FolkRank::related_from(const FolkRankQuery& q, TagId tag, std::size_t k) const {
  struct Keyed {
    double key;
    Related item;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(graph_->num_tags());
  for (std::size_t i = 0; i < graph_->num_tags(); ++i) {
    const auto id = make_id<TagId>(i);
    if (id == tag) continue;
    const double diff = q.differential[graph_->tag_node(id)];
    keyed.push_back({std::round(diff / params_.tol), {id, diff}});
  }
  auto before = [](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.item.tag < b.item.tag;
  };
  if (k < keyed.size()) {
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k), keyed.end(), before);
    keyed.resize(k);
  } else {
    std::sort(keyed.begin(), keyed.end(), before);
  }
  RelatedList list{tag, {}};
  list.items.reserve(keyed.size());
  for (const auto& entry : keyed) list.items.push_back(entry.item);
  return list;
}

RelatedList FolkRank::related(TagId tag, std::size_t k) const { return related_from(query(tag), tag, k); }

RelatedList FolkRank::related(std::string_view tag, std::size_t k) const {
  return related(graph_->tag_id(tag), k);
}

RelatedList folkrank_relatedness(const FolkGraph& graph, TagId tag, const FolkRankParams& params) {
  return FolkRank(graph, params).related(tag);
}

void write_rank_tsv(std::ostream& out, const FolkGraph& g, const Eigen::VectorXd& weights) {
  char buffer[64];
  for (Eigen::Index i = 0; i < g.num_nodes(); ++i) {
    std::snprintf(buffer, sizeof buffer, "%.12g", weights[i]);
    out << to_string(g.kind(i)) << '\t' << g.name(i) << '\t' << buffer << '\n';
  }
}

}  // namespace folkrel
