#pragma once

// Shared test helpers: independent reference implementations, a WNdb writer
// and synthetic data generators. Oracles work on raw string posts and plain
// std containers so they share no code with the library under test.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "folkrel/core.hpp"
#include "folkrel/wordnet.hpp"

namespace folkrel::testing {

struct RawPost {
  std::string user;
  std::string resource;
  std::vector<std::string> tags;
};

using Rng = std::mt19937_64;

/// user<TAB>resource<TAB>tag,tag lines.
std::string posts_text(const std::vector<RawPost>& posts);
Folksonomy make_folksonomy(const std::vector<RawPost>& posts);

/// Directory with the hand-written T1 WordNet fixture.
std::filesystem::path t1_dir();
std::filesystem::path data_dir();

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::vector<RawPost> fixture_f1();
/// dog/cat/car/pets posts whose freq top-1 pairs over T1 are dog->cat and car->dog.
std::vector<RawPost> fixture_toy();

// ---- oracles -------------------------------------------------------------

/// Posts merged per (user, resource) with duplicate tags removed.
std::map<std::pair<std::string, std::string>, std::vector<std::string>> merged_posts(
    const std::vector<RawPost>& posts);

/// Unordered pair (a < b) -> number of posts containing both.
std::map<std::pair<std::string, std::string>, long long> oracle_cooccurrence(const std::vector<RawPost>& posts);

/// Dense cosine of the two tags' co-occurrence rows.
double oracle_cosine(const std::vector<RawPost>& posts, const std::string& a, const std::string& b);

struct OracleGraph {
  std::vector<std::string> users, tags, resources;  // sorted
  std::vector<std::vector<double>> adjacency;        // users, then tags, then resources
  std::size_t tag_node(const std::string& tag) const;
};

OracleGraph oracle_folkgraph(const std::vector<RawPost>& posts);

/// Dense power iteration of w <- d A D^-1 w + (1-d) p from uniform w, run to
/// an L1 residual of 1e-14.
std::vector<double> oracle_rank(const OracleGraph& g, double damping, const std::vector<double>& preference);

std::vector<double> oracle_uniform(const OracleGraph& g);
/// beta on the tag, (1-beta) spread over the remaining nodes.
std::vector<double> oracle_tag_preference(const OracleGraph& g, const std::string& tag, double beta);

// ---- WordNet -------------------------------------------------------------

struct SynsetSpec {
  std::vector<std::string> lemmas;
  std::vector<std::size_t> hypernyms;           // indices into the synset list
  std::vector<std::size_t> instance_hypernyms;  // written as @i
};

struct WndbFiles {
  std::string index;
  std::string data;
  std::vector<std::uint32_t> offsets;  // byte offset of each synset record
};

/// Renders WNdb 3.0 records with offsets equal to byte positions.
WndbFiles render_wndb(const std::vector<SynsetSpec>& synsets, PartOfSpeech pos = PartOfSpeech::noun);
void write_wndb(const std::filesystem::path& dir, const std::vector<SynsetSpec>& synsets,
                PartOfSpeech pos = PartOfSpeech::noun);
Taxonomy parse_wndb(const std::vector<SynsetSpec>& synsets, PartOfSpeech pos = PartOfSpeech::noun);

/// Random DAG over n synsets (parents drawn from lower indices). With
/// `tree` every synset has at most one hypernym. Some lemmas are shared
/// between synsets.
std::vector<SynsetSpec> random_taxonomy(Rng& rng, std::size_t n, bool tree);

// ---- generators ----------------------------------------------------------

/// Random folksonomy with up to the given entity counts.
std::vector<RawPost> random_posts(Rng& rng, std::size_t users, std::size_t tags, std::size_t resources,
                                  std::size_t posts, std::size_t max_tags_per_post);

/// Planted-synonym corpus: `pairs` tag pairs that share resources and
/// context tags but never appear in one post, padded with background tags
/// to `total_tags`. Also emits a taxonomy putting each pair in one synset.
struct SynonymCorpus {
  std::vector<RawPost> posts;
  std::vector<std::pair<std::string, std::string>> plants;
  std::vector<SynsetSpec> taxonomy;
};

SynonymCorpus synonym_corpus(Rng& rng, std::size_t total_tags = 1000, std::size_t pairs = 50);

/// Roughly `triples` tag assignments with Zipf-distributed tags.
std::vector<RawPost> scale_posts(Rng& rng, std::size_t triples, std::size_t users, std::size_t tags,
                                 std::size_t resources);

}  // namespace folkrel::testing
