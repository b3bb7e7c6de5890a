#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "folkrel/types.hpp"

namespace folkrel {

/// One user's tag-set on one resource. `tags` is sorted ascending and unique.
struct Post {
  UserId user;
  ResourceId resource;
  std::vector<TagId> tags;

  friend bool operator==(const Post&, const Post&) = default;
};

/// Folksonomy (U, T, R, Y). Immutable once built; posts are ordered by
/// (user, resource) and there is at most one post per pair.
class Folksonomy {
 public:
  Folksonomy() = default;

  std::size_t num_users() const noexcept { return users_.size(); }
  std::size_t num_tags() const noexcept { return tags_.size(); }
  std::size_t num_resources() const noexcept { return resources_.size(); }
  std::size_t num_posts() const noexcept { return posts_.size(); }
  /// |Y|
  std::size_t num_assignments() const noexcept { return assignments_; }

  std::span<const std::string> users() const noexcept { return users_; }
  std::span<const std::string> tags() const noexcept { return tags_; }
  std::span<const std::string> resources() const noexcept { return resources_; }
  std::span<const Post> posts() const noexcept { return posts_; }

  const std::string& user(UserId id) const { return users_.at(index_of(id)); }
  const std::string& tag(TagId id) const { return tags_.at(index_of(id)); }
  const std::string& resource(ResourceId id) const { return resources_.at(index_of(id)); }

  std::optional<TagId> find_tag(std::string_view name) const;
  /// Throws LookupError for unknown tags.
  TagId tag_id(std::string_view name) const;

  friend bool operator==(const Folksonomy& a, const Folksonomy& b) {
    return a.users_ == b.users_ && a.tags_ == b.tags_ && a.resources_ == b.resources_ &&
           a.posts_ == b.posts_;
  }

 private:
  friend class FolksonomyBuilder;

  std::vector<std::string> users_;
  std::vector<std::string> tags_;
  std::vector<std::string> resources_;
  std::vector<Post> posts_;
  std::size_t assignments_ = 0;
};

/// Accumulates (user, resource, tags) records in any order. Repeated
/// (user, resource) records merge; the result is independent of insertion order.
class FolksonomyBuilder {
 public:
  /// Tags are taken as given; callers normalize beforehand.
  void add(std::string_view user, std::string_view resource, std::span<const std::string> tags);
  void add(std::string_view user, std::string_view resource, std::initializer_list<std::string_view> tags);

  Folksonomy build() &&;

 private:
  std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& table, std::vector<std::string>& names,
                       std::string_view name);

  std::unordered_map<std::string, std::uint32_t> user_ids_, tag_ids_, resource_ids_;
  std::vector<std::string> users_, tags_, resources_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> posts_;
};

/// Parses `user<TAB>resource<TAB>tag1,tag2,...` lines. Blank lines and lines
/// starting with '#' are skipped. Tags are NFC-normalized and lowercased.
Folksonomy parse_posts(std::istream& input);
Folksonomy parse_posts_file(const std::filesystem::path& path);

/// Canonical text rendering; parse_posts(write_posts(f)) == f.
void write_posts(std::ostream& output, const Folksonomy& folksonomy);

struct TagStats {
  TagId tag;
  std::size_t frequency;  // number of posts containing the tag
  std::size_t rank;       // 1-based

  friend bool operator==(const TagStats&, const TagStats&) = default;
};

/// Descending frequency, ties by tag name ascending.
std::vector<TagStats> tag_stats(const Folksonomy& folksonomy);

/// Keeps the k most frequent tags, drops emptied posts and the users and
/// resources left without assignments.
Folksonomy restrict_to_top_tags(const Folksonomy& folksonomy, std::size_t k);

}  // namespace folkrel
