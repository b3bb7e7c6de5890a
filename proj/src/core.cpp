#include "folkrel/core.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "folkrel/text.hpp"

namespace folkrel {

std::optional<TagId> Folksonomy::find_tag(std::string_view name) const {
  const auto it = std::lower_bound(tags_.begin(), tags_.end(), name);
  if (it == tags_.end() || *it != name) return std::nullopt;
  return make_id<TagId>(static_cast<std::size_t>(it - tags_.begin()));
}

TagId Folksonomy::tag_id(std::string_view name) const {
  if (auto id = find_tag(name)) return *id;
  throw LookupError("unknown tag '" + std::string(name) + "'");
}

std::uint32_t FolksonomyBuilder::intern(std::unordered_map<std::string, std::uint32_t>& table,
                                        std::vector<std::string>& names, std::string_view name) {
  auto [it, inserted] = table.try_emplace(std::string(name), static_cast<std::uint32_t>(names.size()));
  if (inserted) names.emplace_back(name);
  return it->second;
}

void FolksonomyBuilder::add(std::string_view user, std::string_view resource, std::span<const std::string> tags) {
  if (tags.empty()) return;
  const std::uint64_t key = (std::uint64_t{intern(user_ids_, users_, user)} << 32) |
                            intern(resource_ids_, resources_, resource);
  auto& post = posts_[key];
  for (const auto& t : tags) post.push_back(intern(tag_ids_, tags_, t));
}

void FolksonomyBuilder::add(std::string_view user, std::string_view resource,
                            std::initializer_list<std::string_view> tags) {
  std::vector<std::string> owned(tags.begin(), tags.end());
  add(user, resource, owned);
}

namespace {

// Sorts names and returns old-index -> new-index.
std::vector<std::uint32_t> canonical_order(std::vector<std::string>& names) {
  std::vector<std::uint32_t> order(names.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return names[a] < names[b]; });
  std::vector<std::uint32_t> remap(names.size());
  std::vector<std::string> sorted(names.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    remap[order[pos]] = static_cast<std::uint32_t>(pos);
    sorted[pos] = std::move(names[order[pos]]);
  }
  names = std::move(sorted);
  return remap;
}

}  // namespace

Folksonomy FolksonomyBuilder::build() && {
  const auto user_map = canonical_order(users_);
  const auto tag_map = canonical_order(tags_);
  const auto resource_map = canonical_order(resources_);

  Folksonomy f;
  f.posts_.reserve(posts_.size());
  for (auto& [key, raw_tags] : posts_) {
    Post post{make_id<UserId>(user_map[key >> 32]), make_id<ResourceId>(resource_map[key & 0xffffffffu]), {}};
    post.tags.reserve(raw_tags.size());
    for (auto t : raw_tags) post.tags.push_back(make_id<TagId>(tag_map[t]));
    std::sort(post.tags.begin(), post.tags.end());
    post.tags.erase(std::unique(post.tags.begin(), post.tags.end()), post.tags.end());
    f.assignments_ += post.tags.size();
    f.posts_.push_back(std::move(post));
  }
  std::sort(f.posts_.begin(), f.posts_.end(), [](const Post& a, const Post& b) {
    return std::pair(a.user, a.resource) < std::pair(b.user, b.resource);
  });
  f.users_ = std::move(users_);
  f.tags_ = std::move(tags_);
  f.resources_ = std::move(resources_);
  return f;
}

Folksonomy parse_posts(std::istream& input) {
  FolksonomyBuilder builder;
  std::string line;
  std::vector<std::string> tags;
  std::size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError("expected 3 tab-separated fields, found " + std::to_string(fields.size()), line_no);
    }
    if (fields[0].empty()) throw ParseError("empty user field", line_no);
    if (fields[1].empty()) throw ParseError("empty resource field", line_no);

    tags.clear();
    for (auto token : split(fields[2], ',')) {
      if (token.empty()) throw ParseError("empty tag token", line_no);
      try {
        tags.push_back(normalize_tag(token));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no);
      }
    }
    builder.add(fields[0], fields[1], tags);
  }
  if (input.bad()) throw std::runtime_error("read error while parsing posts");
  return std::move(builder).build();
}

Folksonomy parse_posts_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open posts file '" + path.string() + "'");
  return parse_posts(in);
}

void write_posts(std::ostream& output, const Folksonomy& f) {
  for (const auto& post : f.posts()) {
    output << f.user(post.user) << '\t' << f.resource(post.resource) << '\t';
    for (std::size_t i = 0; i < post.tags.size(); ++i) {
      if (i) output << ',';
      output << f.tag(post.tags[i]);
    }
    output << '\n';
  }
}

std::vector<TagStats> tag_stats(const Folksonomy& f) {
  std::vector<std::size_t> frequency(f.num_tags(), 0);
  for (const auto& post : f.posts()) {
    for (auto t : post.tags) ++frequency[index_of(t)];
  }
  std::vector<TagStats> stats;
  stats.reserve(f.num_tags());
  for (std::size_t i = 0; i < f.num_tags(); ++i) stats.push_back({make_id<TagId>(i), frequency[i], 0});
  // ids are in lexicographic order, so the id breaks ties
  std::sort(stats.begin(), stats.end(), [](const TagStats& a, const TagStats& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.tag < b.tag;
  });
  for (std::size_t i = 0; i < stats.size(); ++i) stats[i].rank = i + 1;
  return stats;
}

Folksonomy restrict_to_top_tags(const Folksonomy& f, std::size_t k) {
  if (k == 0) throw ContractError("restrict_to_top_tags: k must be positive");
  if (k >= f.num_tags()) return f;

  std::vector<bool> keep(f.num_tags(), false);
  const auto stats = tag_stats(f);
  for (std::size_t i = 0; i < k; ++i) keep[index_of(stats[i].tag)] = true;

  FolksonomyBuilder builder;
  std::vector<std::string> tags;
  for (const auto& post : f.posts()) {
    tags.clear();
    for (auto t : post.tags) {
      if (keep[index_of(t)]) tags.push_back(f.tag(t));
    }
    builder.add(f.user(post.user), f.resource(post.resource), tags);
  }
  return std::move(builder).build();
}

}  // namespace folkrel
