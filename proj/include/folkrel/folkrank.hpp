#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "folkrel/core.hpp"
#include "folkrel/distributional.hpp"

namespace folkrel {

enum class NodeKind : std::uint8_t { user, tag, resource };

std::string_view to_string(NodeKind kind) noexcept;

/// The folksonomy hypergraph folded into an undirected weighted graph over
/// U ∪ T ∪ R. Node order: users, then tags, then resources, each block in id
/// order. Each triple (u,t,r) adds 1 to w(u,t), w(t,r) and w(u,r).
class FolkGraph {
 public:
  using Matrix = Eigen::SparseMatrix<double>;

  FolkGraph() = default;
  FolkGraph(const Folksonomy& folksonomy, Matrix adjacency);

  Eigen::Index num_nodes() const noexcept { return adjacency_.rows(); }
  std::size_t num_users() const noexcept { return users_.size(); }
  std::size_t num_tags() const noexcept { return tags_.size(); }
  std::size_t num_resources() const noexcept { return resources_.size(); }

  const Matrix& adjacency() const noexcept { return adjacency_; }
  const Eigen::VectorXd& degrees() const noexcept { return degrees_; }
  const Eigen::VectorXd& inverse_degrees() const noexcept { return inverse_degrees_; }

  double weight(Eigen::Index a, Eigen::Index b) const { return adjacency_.coeff(a, b); }

  Eigen::Index user_node(UserId u) const noexcept { return static_cast<Eigen::Index>(index_of(u)); }
  Eigen::Index tag_node(TagId t) const noexcept {
    return static_cast<Eigen::Index>(users_.size() + index_of(t));
  }
  Eigen::Index resource_node(ResourceId r) const noexcept {
    return static_cast<Eigen::Index>(users_.size() + tags_.size() + index_of(r));
  }

  NodeKind kind(Eigen::Index node) const;
  const std::string& name(Eigen::Index node) const;

  std::span<const std::string> tags() const noexcept { return tags_; }
  /// Throws LookupError.
  TagId tag_id(std::string_view name) const;

 private:
  std::vector<std::string> users_, tags_, resources_;
  Matrix adjacency_;
  Eigen::VectorXd degrees_;
  Eigen::VectorXd inverse_degrees_;
};

/// Throws ContractError on an empty folksonomy.
FolkGraph build_folkgraph(const Folksonomy& folksonomy);

template <typename Scalar>
using RankVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct RankResult {
  RankVector<Scalar> weights;
  bool converged = false;
  int iterations = 0;
  Scalar residual = std::numeric_limits<Scalar>::infinity();  // L1 norm of the last update
};

namespace detail {

template <typename Scalar>
decltype(auto) transition_operand(const FolkGraph::Matrix& adjacency) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return (adjacency);
  } else {
    return Eigen::SparseMatrix<Scalar>(adjacency.template cast<Scalar>());
  }
}

void check_rank_arguments(Eigen::Index nodes, Eigen::Index preference_size, double damping, double preference_sum,
                          double preference_min, double tol, int max_iter);

}  // namespace detail

/// Damped random surfer on the column-stochastic normalization A = W·D⁻¹:
///
///   w ← d·A·w + (1−d)·p,   w₀ uniform,
///
/// stopping once ‖w_{i+1} − w_i‖₁ ≤ tol or after max_iter updates. The
/// preference p must be non-negative and sum to 1 (±1e-9).
template <typename Derived>
RankResult<typename Derived::Scalar> rank(const FolkGraph& graph, typename Derived::Scalar damping,
                                          const Eigen::MatrixBase<Derived>& preference,
                                          typename Derived::Scalar tol, int max_iter) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = graph.num_nodes();
  detail::check_rank_arguments(n, preference.size(), static_cast<double>(damping),
                               static_cast<double>(preference.sum()),
                               preference.size() ? static_cast<double>(preference.minCoeff()) : 0.0,
                               static_cast<double>(tol), max_iter);

  const auto& adjacency = detail::transition_operand<Scalar>(graph.adjacency());
  const RankVector<Scalar> inverse_degrees = graph.inverse_degrees().template cast<Scalar>();
  const RankVector<Scalar> teleport = (Scalar(1) - damping) * preference;

  RankResult<Scalar> result;
  result.weights = RankVector<Scalar>::Constant(n, Scalar(1) / static_cast<Scalar>(n));
  RankVector<Scalar> next(n);
  for (int it = 1; it <= max_iter; ++it) {
    next.noalias() = damping * (adjacency * result.weights.cwiseProduct(inverse_degrees));
    next += teleport;
    result.residual = (next - result.weights).template lpNorm<1>();
    result.weights.swap(next);
    result.iterations = it;
    if (result.residual <= tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

struct FolkRankParams {
  double damping = 0.7;
  double beta = 0.5;  // preference mass on the query tag
  double tol = 1e-8;
  int max_iter = 200;
};

Eigen::VectorXd uniform_preference(Eigen::Index nodes);

/// beta on the query tag node, (1−beta) spread evenly over all other nodes.
Eigen::VectorXd tag_preference(const FolkGraph& graph, TagId tag, double beta);

struct FolkRankQuery {
  RankResult<double> preferred;
  Eigen::VectorXd differential;  // preferred − baseline, over all nodes
};

/// Differential FolkRank with a shared baseline: the uniform-preference rank
/// is computed once at construction and reused by every query.
class FolkRank {
 public:
  FolkRank(const FolkGraph& graph, FolkRankParams params = {});

  const FolkGraph& graph() const noexcept { return *graph_; }
  const FolkRankParams& params() const noexcept { return params_; }
  const RankResult<double>& baseline() const noexcept { return baseline_; }

  FolkRankQuery query(TagId tag) const;

  /// Tags other than `tag` by descending differential weight. Differences
  /// below the solver tolerance count as ties (broken by tag name).
  RelatedList related(TagId tag, std::size_t k = std::numeric_limits<std::size_t>::max()) const;
  RelatedList related(std::string_view tag, std::size_t k = std::numeric_limits<std::size_t>::max()) const;

  RelatedList related_from(const FolkRankQuery& query, TagId tag, std::size_t k) const;

 private:
  const FolkGraph* graph_;
  FolkRankParams params_;
  RankResult<double> baseline_;
};

RelatedList folkrank_relatedness(const FolkGraph& graph, TagId tag, const FolkRankParams& params = {});

/// `node_kind<TAB>node_id<TAB>weight`, one row per node in node order.
void write_rank_tsv(std::ostream& output, const FolkGraph& graph, const Eigen::VectorXd& weights);

}  // namespace folkrel
