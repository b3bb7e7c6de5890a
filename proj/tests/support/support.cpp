#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#ifndef FOLKREL_TEST_DATA_DIR
#error "FOLKREL_TEST_DATA_DIR must point at tests/data"
#endif

namespace folkrel::testing {

std::string posts_text(const std::vector<RawPost>& posts) {
  std::string out;
  for (const auto& p : posts) {
    out += p.user;
    out += '\t';
    out += p.resource;
    out += '\t';
    for (std::size_t i = 0; i < p.tags.size(); ++i) {
      if (i) out += ',';
      out += p.tags[i];
    }
    out += '\n';
  }
  return out;
}

Folksonomy make_folksonomy(const std::vector<RawPost>& posts) {
  FolksonomyBuilder builder;
  for (const auto& p : posts) builder.add(p.user, p.resource, p.tags);
  return std::move(builder).build();
}

std::filesystem::path data_dir() { return FOLKREL_TEST_DATA_DIR; }
std::filesystem::path t1_dir() { return data_dir() / "wordnet_t1"; }

std::filesystem::path scratch_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("folkrel_" + name + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<RawPost> fixture_f1() {
  return {{"u1", "r1", {"web", "ajax"}},
          {"u2", "r1", {"web", "ajax"}},
          {"u1", "r2", {"web", "design"}},
          {"u3", "r3", {"ajax", "design"}}};
}

std::vector<RawPost> fixture_toy() {
  return {{"u1", "r1", {"dog", "cat"}},  {"u2", "r2", {"dog", "cat"}},  {"u3", "r3", {"car", "dog"}},
          {"u4", "r4", {"cat", "pets"}}, {"u5", "r5", {"cat", "pets"}}, {"u6", "r6", {"cat", "pets"}}};
}

std::map<std::pair<std::string, std::string>, std::vector<std::string>> merged_posts(
    const std::vector<RawPost>& posts) {
  std::map<std::pair<std::string, std::string>, std::set<std::string>> sets;
  for (const auto& p : posts) sets[{p.user, p.resource}].insert(p.tags.begin(), p.tags.end());
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> out;
  for (auto& [key, tags] : sets) out[key] = {tags.begin(), tags.end()};
  return out;
}

std::map<std::pair<std::string, std::string>, long long> oracle_cooccurrence(const std::vector<RawPost>& posts) {
  std::map<std::pair<std::string, std::string>, long long> w;
  for (const auto& [key, tags] : merged_posts(posts)) {
    for (std::size_t i = 0; i < tags.size(); ++i)
      for (std::size_t j = i + 1; j < tags.size(); ++j) ++w[{tags[i], tags[j]}];
  }
  return w;
}

double oracle_cosine(const std::vector<RawPost>& posts, const std::string& a, const std::string& b) {
  const auto w = oracle_cooccurrence(posts);
  std::map<std::string, double> va, vb;
  for (const auto& [pair, count] : w) {
    const auto& [x, y] = pair;
    if (x == a) va[y] = static_cast<double>(count);
    if (y == a) va[x] = static_cast<double>(count);
    if (x == b) vb[y] = static_cast<double>(count);
    if (y == b) vb[x] = static_cast<double>(count);
  }
  double dot = 0, na = 0, nb = 0;
  for (const auto& [t, v] : va) {
    na += v * v;
    if (auto it = vb.find(t); it != vb.end()) dot += v * it->second;
  }
  for (const auto& [t, v] : vb) nb += v * v;
  if (na == 0 || nb == 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

std::size_t OracleGraph::tag_node(const std::string& tag) const {
  const auto it = std::lower_bound(tags.begin(), tags.end(), tag);
  if (it == tags.end() || *it != tag) throw std::out_of_range("oracle: unknown tag " + tag);
  return users.size() + static_cast<std::size_t>(it - tags.begin());
}

OracleGraph oracle_folkgraph(const std::vector<RawPost>& posts) {
  OracleGraph g;
  const auto merged = merged_posts(posts);
  std::set<std::string> us, ts, rs;
  for (const auto& [key, tags] : merged) {
    if (tags.empty()) continue;
    us.insert(key.first);
    rs.insert(key.second);
    ts.insert(tags.begin(), tags.end());
  }
  g.users.assign(us.begin(), us.end());
  g.tags.assign(ts.begin(), ts.end());
  g.resources.assign(rs.begin(), rs.end());
  const std::size_t n = us.size() + ts.size() + rs.size();
  g.adjacency.assign(n, std::vector<double>(n, 0.0));
  auto index = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), s) - v.begin());
  };
  for (const auto& [key, tags] : merged) {
    const std::size_t u = index(g.users, key.first);
    const std::size_t r = g.users.size() + g.tags.size() + index(g.resources, key.second);
    for (const auto& tag : tags) {
      const std::size_t t = g.users.size() + index(g.tags, tag);
      for (auto [a, b] : {std::pair{u, t}, std::pair{t, r}, std::pair{u, r}}) {
        g.adjacency[a][b] += 1;
        g.adjacency[b][a] += 1;
      }
    }
  }
  return g;
}

std::vector<double> oracle_rank(const OracleGraph& g, double damping, const std::vector<double>& p) {
  const std::size_t n = g.adjacency.size();
  std::vector<double> degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (double x : g.adjacency[i]) degree[i] += x;
  std::vector<double> w(n, 1.0 / static_cast<double>(n)), next(n);
  for (int iter = 0; iter < 100000; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (g.adjacency[i][j] != 0) s += g.adjacency[i][j] * w[j] / degree[j];
      }
      next[i] = damping * s + (1 - damping) * p[i];
    }
    double residual = 0;
    for (std::size_t i = 0; i < n; ++i) residual += std::abs(next[i] - w[i]);
    w.swap(next);
    if (residual < 1e-14) break;
  }
  return w;
}

std::vector<double> oracle_uniform(const OracleGraph& g) {
  const std::size_t n = g.adjacency.size();
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::vector<double> oracle_tag_preference(const OracleGraph& g, const std::string& tag, double beta) {
  const std::size_t n = g.adjacency.size();
  std::vector<double> p(n, (1 - beta) / static_cast<double>(n - 1));
  p[g.tag_node(tag)] = beta;
  return p;
}

namespace {

std::string data_record(const std::vector<SynsetSpec>& synsets, std::size_t i,
                        const std::vector<std::vector<std::size_t>>& children, const std::vector<std::uint32_t>& off,
                        char pos) {
  const auto& s = synsets[i];
  char buf[64];
  std::string line;
  std::snprintf(buf, sizeof buf, "%08u 03 %c %02zx", static_cast<unsigned>(off[i]), pos, s.lemmas.size());
  line += buf;
  for (const auto& lemma : s.lemmas) line += " " + lemma + " 0";
  const std::size_t ptrs = s.hypernyms.size() + s.instance_hypernyms.size() + children[i].size();
  std::snprintf(buf, sizeof buf, " %03zu", ptrs);
  line += buf;
  auto pointer = [&](const char* symbol, std::size_t target) {
    std::snprintf(buf, sizeof buf, " %s %08u %c 0000", symbol, static_cast<unsigned>(off[target]), pos);
    line += buf;
  };
  for (auto h : s.hypernyms) pointer("@", h);
  for (auto h : s.instance_hypernyms) pointer("@i", h);
  for (auto c : children[i]) pointer("~", c);
  line += " | synthetic synset " + std::to_string(i) + "  \n";
  return line;
}

}  // namespace

WndbFiles render_wndb(const std::vector<SynsetSpec>& synsets, PartOfSpeech pos) {
  const char pc = pos_char(pos);
  std::vector<std::vector<std::size_t>> children(synsets.size());
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    for (auto h : synsets[i].hypernyms) children.at(h).push_back(i);
    for (auto h : synsets[i].instance_hypernyms) children.at(h).push_back(i);
  }
  const std::string header = "  1 Synthetic WNdb file for tests.\n";
  // offsets are fixed width, so a record's length does not depend on them
  WndbFiles files;
  files.offsets.assign(synsets.size(), 0);
  std::uint32_t pos_bytes = static_cast<std::uint32_t>(header.size());
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    files.offsets[i] = pos_bytes;
    pos_bytes += static_cast<std::uint32_t>(data_record(synsets, i, children, files.offsets, pc).size());
  }
  files.data = header;
  for (std::size_t i = 0; i < synsets.size(); ++i) files.data += data_record(synsets, i, children, files.offsets, pc);

  std::map<std::string, std::vector<std::size_t>> lemma_synsets;
  for (std::size_t i = 0; i < synsets.size(); ++i)
    for (const auto& l : synsets[i].lemmas) lemma_synsets[l].push_back(i);
  files.index = header;
  for (const auto& [lemma, ids] : lemma_synsets) {
    std::set<std::string> symbols;
    for (auto i : ids) {
      if (!synsets[i].hypernyms.empty()) symbols.insert("@");
      if (!synsets[i].instance_hypernyms.empty()) symbols.insert("@i");
      if (!children[i].empty()) symbols.insert("~");
    }
    std::string line = lemma + " " + pc + " " + std::to_string(ids.size()) + " " + std::to_string(symbols.size());
    for (const auto& s : symbols) line += " " + s;
    line += " " + std::to_string(ids.size()) + " 0";
    for (auto i : ids) {
      char buf[16];
      std::snprintf(buf, sizeof buf, " %08u", static_cast<unsigned>(files.offsets[i]));
      line += buf;
    }
    files.index += line + "  \n";
  }
  return files;
}

void write_wndb(const std::filesystem::path& dir, const std::vector<SynsetSpec>& synsets, PartOfSpeech pos) {
  const auto files = render_wndb(synsets, pos);
  std::filesystem::create_directories(dir);
  const std::string suffix(pos_file_suffix(pos));
  std::ofstream(dir / ("index." + suffix), std::ios::binary) << files.index;
  std::ofstream(dir / ("data." + suffix), std::ios::binary) << files.data;
}

Taxonomy parse_wndb(const std::vector<SynsetSpec>& synsets, PartOfSpeech pos) {
  const auto files = render_wndb(synsets, pos);
  std::istringstream index(files.index), data(files.data);
  return Taxonomy::parse(index, data, pos);
}

std::vector<SynsetSpec> random_taxonomy(Rng& rng, std::size_t n, bool tree) {
  std::vector<SynsetSpec> out(n);
  std::bernoulli_distribution is_root(0.15), second_parent(0.3), polysemous(0.2);
  const std::size_t shared = std::max<std::size_t>(1, n / 4);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].lemmas.push_back("s" + std::to_string(i));
    if (polysemous(rng)) {
      out[i].lemmas.push_back("poly" + std::to_string(std::uniform_int_distribution<std::size_t>(0, shared - 1)(rng)));
    }
    if (i == 0 || is_root(rng)) continue;
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    out[i].hypernyms.push_back(pick(rng));
    if (!tree && second_parent(rng)) {
      const auto other = pick(rng);
      if (other != out[i].hypernyms.front()) out[i].hypernyms.push_back(other);
    }
  }
  return out;
}

std::vector<RawPost> random_posts(Rng& rng, std::size_t users, std::size_t tags, std::size_t resources,
                                  std::size_t posts, std::size_t max_tags_per_post) {
  std::uniform_int_distribution<std::size_t> pick_user(0, users - 1), pick_tag(0, tags - 1),
      pick_resource(0, resources - 1), pick_count(1, std::max<std::size_t>(1, max_tags_per_post));
  std::vector<RawPost> out;
  for (std::size_t i = 0; i < posts; ++i) {
    RawPost p{"u" + std::to_string(pick_user(rng)), "r" + std::to_string(pick_resource(rng)), {}};
    const auto count = pick_count(rng);
    std::set<std::string> chosen;
    while (chosen.size() < std::min(count, tags)) chosen.insert("t" + std::to_string(pick_tag(rng)));
    p.tags.assign(chosen.begin(), chosen.end());
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04zu", prefix, i);
  return buf;
}

}  // namespace

SynonymCorpus synonym_corpus(Rng& rng, std::size_t total_tags, std::size_t pairs) {
  constexpr std::size_t kContexts = 6;
  constexpr std::size_t kResources = 20;
  if (total_tags < pairs * (2 + kContexts) + 10) throw std::invalid_argument("synonym_corpus: too few tags");
  SynonymCorpus c;
  const std::size_t background = total_tags - pairs * (2 + kContexts);
  std::vector<std::string> bg(background);
  for (std::size_t i = 0; i < background; ++i) bg[i] = numbered("bg", i);

  // taxonomy: one group synset per pair holding the pair and its contexts,
  // one group for background tags
  c.taxonomy.push_back({{"entity"}, {}, {}});
  c.taxonomy.push_back({{"background"}, {0}, {}});
  for (const auto& b : bg) c.taxonomy.push_back({{b}, {1}, {}});

  std::uniform_int_distribution<std::size_t> pick_ctx(0, kContexts - 1);
  std::vector<std::string> all_contexts;
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto a = numbered("syna", p), b = numbered("synb", p);
    c.plants.emplace_back(a, b);
    std::vector<std::string> ctx(kContexts);
    for (std::size_t j = 0; j < kContexts; ++j) ctx[j] = numbered("ctx", p * kContexts + j);
    all_contexts.insert(all_contexts.end(), ctx.begin(), ctx.end());

    const std::size_t group = c.taxonomy.size();
    c.taxonomy.push_back({{numbered("group", p)}, {0}, {}});
    c.taxonomy.push_back({{a, b}, {group}, {}});
    for (const auto& t : ctx) c.taxonomy.push_back({{t}, {group}, {}});

    for (std::size_t r = 0; r < kResources; ++r) {
      const auto resource = numbered("res", p * kResources + r);
      for (const auto& [user, tag] : {std::pair{"ua", a}, std::pair{"ub", b}}) {
        std::set<std::string> tags{tag, ctx[pick_ctx(rng)], ctx[pick_ctx(rng)]};
        c.posts.push_back({numbered(user, p * kResources + r), resource, {tags.begin(), tags.end()}});
      }
    }
  }

  std::uniform_int_distribution<std::size_t> pick_bg(0, background - 1), pick_any_ctx(0, all_contexts.size() - 1),
      pick_size(2, 4), pick_user(0, 199);
  std::bernoulli_distribution with_context(0.3);
  for (std::size_t i = 0; i < background * 5; ++i) {
    std::set<std::string> tags;
    const auto size = pick_size(rng);
    while (tags.size() < size) tags.insert(bg[pick_bg(rng)]);
    if (with_context(rng)) tags.insert(all_contexts[pick_any_ctx(rng)]);
    c.posts.push_back({numbered("bguser", pick_user(rng)), numbered("bgres", i), {tags.begin(), tags.end()}});
  }
  return c;
}

std::vector<RawPost> scale_posts(Rng& rng, std::size_t triples, std::size_t users, std::size_t tags,
                                 std::size_t resources) {
  std::vector<double> weights(tags);
  for (std::size_t i = 0; i < tags; ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> pick_tag(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> pick_user(0, users - 1), pick_resource(0, resources - 1),
      pick_size(1, 5);
  std::vector<RawPost> out;
  std::size_t emitted = 0;
  while (emitted < triples) {
    const auto size = std::min(pick_size(rng), triples - emitted);
    std::set<std::size_t> chosen;
    while (chosen.size() < size) chosen.insert(pick_tag(rng));
    RawPost p{"u" + std::to_string(pick_user(rng)), "r" + std::to_string(pick_resource(rng)), {}};
    for (auto t : chosen) p.tags.push_back("t" + std::to_string(t));
    emitted += size;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace folkrel::testing
