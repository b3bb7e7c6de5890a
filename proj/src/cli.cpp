#include "folkrel/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <CLI11.hpp>

#include "folkrel/core.hpp"
#include "folkrel/distributional.hpp"
#include "folkrel/grounding.hpp"
#include "folkrel/text.hpp"

namespace folkrel {

namespace {

// Maps library exceptions onto the documented exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    err << "error: line " << e.line() << ": " << e.what() << '\n';
    return kExitIo;
  } catch (const WndbParseError& e) {
    err << "error: byte " << e.byte_offset() << ": " << e.what() << '\n';
    return kExitIo;
  } catch (const LookupError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

Folksonomy load_folksonomy(const RunConfig& config) {
  if (config.posts.empty()) throw ContractError("--posts is required");
  if (!std::filesystem::exists(config.posts)) {
    throw std::runtime_error("cannot open '" + config.posts.string() + "'");
  }
  return restrict_to_top_tags(parse_posts_file(config.posts), config.top_tags);
}

std::filesystem::path wordnet_dir(const RunConfig& config) {
  if (config.wordnet_dir) return *config.wordnet_dir;
  if (const char* env = std::getenv("FOLKREL_WORDNET_DIR"); env && *env) return env;
  throw ContractError("--wordnet-dir is required (or set FOLKREL_WORDNET_DIR)");
}

void write_folkgraph_tsv(std::ostream& out, const FolkGraph& g) {
  out << "kind_a\tnode_a\tkind_b\tnode_b\tweight\n";
  const auto& adjacency = g.adjacency();
  for (Eigen::Index col = 0; col < adjacency.outerSize(); ++col) {
    for (FolkGraph::Matrix::InnerIterator it(adjacency, col); it; ++it) {
      if (it.row() >= col) continue;
      out << to_string(g.kind(it.row())) << '\t' << g.name(it.row()) << '\t' << to_string(g.kind(col)) << '\t'
          << g.name(col) << '\t' << static_cast<long long>(it.value()) << '\n';
    }
  }
}

template <typename Writer>
std::string render(Writer&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

void attach_ic(WordNetBundle& wn, const RunConfig& config, const Folksonomy& f) {
  auto table_for = [&](const Taxonomy& tax) {
    if (config.ic_file) {
      std::ifstream in(*config.ic_file);
      if (!in) throw std::runtime_error("cannot open '" + config.ic_file->string() + "'");
      return load_ic(in, tax);
    }
    std::unordered_map<std::string, double> counts;
    if (config.ic_from_tags) {
      for (const auto& s : tag_stats(f)) {
        counts[to_lemma(f.tag(s.tag), {config.normalize_separators})] += static_cast<double>(s.frequency);
      }
    }
    return ic_from_lemma_counts(counts, tax);
  };
  if (wn.noun) wn.noun_ic = table_for(*wn.noun);
  if (wn.verb) wn.verb_ic = table_for(*wn.verb);
}

}  // namespace

int cmd_build(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto f = load_folksonomy(config);
    const auto cograph = build_cooccurrence(f, config.threads);
    // render everything before touching the output directory
    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("folksonomy.tsv", render([&](std::ostream& o) { write_posts(o, f); }));
    files.emplace_back("cooccurrence.tsv", render([&](std::ostream& o) { write_cooccurrence_tsv(o, cograph); }));
    if (f.num_assignments() > 0) {
      const auto graph = build_folkgraph(f);
      const FolkRank engine(graph, config.folkrank);
      files.emplace_back("folkgraph.tsv", render([&](std::ostream& o) { write_folkgraph_tsv(o, graph); }));
      files.emplace_back("folkrank_baseline.tsv",
                         render([&](std::ostream& o) { write_rank_tsv(o, graph, engine.baseline().weights); }));
    }
    std::filesystem::create_directories(config.out);
    for (const auto& [name, content] : files) write_file_atomic(config.out / name, content);
    out << "|U|=" << f.num_users() << " |T|=" << f.num_tags() << " |R|=" << f.num_resources()
        << " |Y|=" << f.num_assignments() << '\n';
    return kExitOk;
  });
}

int cmd_relate(const RunConfig& config, const std::string& measure_name, const std::string& tag_name,
               std::ostream& out, std::ostream& err) {
  const auto measure = parse_measure(measure_name);
  if (!measure) {
    err << "error: unknown measure '" << measure_name << "' (expected freq, cosine or folkrank)\n";
    return kExitUsage;
  }
  return guarded(err, [&] {
    const auto f = load_folksonomy(config);
    std::string normalized;
    try {
      normalized = normalize_tag(tag_name);
    } catch (const std::invalid_argument&) {
      normalized = tag_name;
    }
    const auto tag = f.find_tag(normalized);
    if (!tag) {
      err << "error: unknown tag '" << tag_name << "'\n";
      return kExitUsage;
    }
    RelatedList list;
    if (*measure == MeasureId::folkrank) {
      const auto graph = build_folkgraph(f);
      list = FolkRank(graph, config.folkrank).related(*tag, config.k);
    } else {
      const auto cograph = build_cooccurrence(f, config.threads);
      list = *measure == MeasureId::freq ? freq_relatedness(cograph, *tag) : cosine_relatedness(cograph, *tag);
      list.truncate(config.k);
    }
    for (std::size_t i = 0; i < list.items.size(); ++i) {
      const auto& item = list.items[i];
      out << (i + 1) << '\t' << f.tag(item.tag) << '\t';
      if (*measure == MeasureId::freq) {
        out << static_cast<long long>(item.score);
      } else {
        out << format_score(item.score);
      }
      out << '\n';
    }
    return kExitOk;
  });
}

int cmd_ground(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto f = load_folksonomy(config);
    auto wn = WordNetBundle::load(wordnet_dir(config));
    attach_ic(wn, config, f);

    const auto cograph = build_cooccurrence(f, config.threads);
    std::vector<RelatedTable> tables;
    tables.push_back(related_table(MeasureId::freq, cograph, nullptr, config.k, config.threads));
    tables.push_back(related_table(MeasureId::cosine, cograph, nullptr, config.k, config.threads));
    if (f.num_assignments() > 0) {
      const auto graph = build_folkgraph(f);
      const FolkRank engine(graph, config.folkrank);
      tables.push_back(related_table(MeasureId::folkrank, cograph, &engine, config.k, config.threads));
    } else {
      tables.push_back(RelatedTable{MeasureId::folkrank, {}});
    }

    GroundingOptions options;
    options.k = config.k;
    options.lemma.normalize_separators = config.normalize_separators;
    options.threads = config.threads;
    const auto report = build_report(f, tables, wn, options);
    write_report(report, config.out);

    const auto& c = report.coverage;
    out << "coverage\t" << c.any << '/' << c.total << '\t' << (c.defined ? format_score(c.fraction) : "NA")
        << '\n';
    for (const auto& o : report.overlaps) {
      out << "overlap\t" << to_string(o.a) << '-' << to_string(o.b) << '\t'
          << (o.defined ? format_score(o.mean) : "NA") << '\n';
    }
    return kExitOk;
  });
}

int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto f = load_folksonomy(config);
    out << "|U|=" << f.num_users() << " |T|=" << f.num_tags() << " |R|=" << f.num_resources()
        << " |Y|=" << f.num_assignments() << " posts=" << f.num_posts() << '\n';
    const auto stats = tag_stats(f);
    out << "rank\ttag\tfrequency\n";
    for (std::size_t i = 0; i < std::min(config.k, stats.size()); ++i) {
      out << stats[i].rank << '\t' << f.tag(stats[i].tag) << '\t' << stats[i].frequency << '\n';
    }
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tag relatedness measures on folksonomies, grounded in WordNet", "folkrel"};
  app.require_subcommand(1);

  RunConfig config;
  config.threads = std::max(1u, std::thread::hardware_concurrency());
  std::string measure = "cosine";
  std::string tag;
  std::string wordnet, ic_file;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--posts", config.posts, "Posts file: user<TAB>resource<TAB>tag,tag,...")->required();
    sub->add_option("--top-tags", config.top_tags, "Keep only the N most frequent tags")
        ->check(CLI::PositiveNumber);
    sub->add_option("-k", config.k, "Length of related-tag lists")->check(CLI::PositiveNumber);
    sub->add_option("--threads", config.threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto add_folkrank = [&](CLI::App* sub) {
    sub->add_option("--damping", config.folkrank.damping, "FolkRank damping d")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--beta", config.folkrank.beta, "Preference mass on the query tag")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--tol", config.folkrank.tol, "L1 convergence tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", config.folkrank.max_iter, "Power-iteration cap")->check(CLI::PositiveNumber);
  };

  auto* build = app.add_subcommand("build", "Build indices and print |U| |T| |R| |Y|");
  add_common(build);
  add_folkrank(build);
  build->add_option("--out", config.out, "Output directory");

  auto* relate = app.add_subcommand("relate", "Print the k most related tags");
  add_common(relate);
  add_folkrank(relate);
  relate->add_option("--measure", measure, "freq, cosine or folkrank");
  relate->add_option("--tag", tag, "Query tag")->required();

  auto* ground = app.add_subcommand("ground", "Ground all measures in WordNet and write reports");
  add_common(ground);
  add_folkrank(ground);
  ground->add_option("--wordnet-dir", wordnet, "Directory with WNdb index.* and data.* files");
  ground->add_option("--ic-file", ic_file, "Corpus counts: header 'lemma' or 'offset', then key<TAB>count");
  ground->add_flag("--ic-from-tags", config.ic_from_tags, "Derive IC counts from tag frequencies");
  ground->add_flag("--normalize-separators", config.normalize_separators, "Map '-' to '_' before lookup");
  ground->add_option("--out", config.out, "Report directory");

  auto* stats = app.add_subcommand("stats", "Print folksonomy size and the k most frequent tags");
  add_common(stats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (config.folkrank.beta <= 0.0 || config.folkrank.beta >= 1.0) {
    err << "error: --beta must lie strictly between 0 and 1\n";
    return kExitUsage;
  }
  if (!wordnet.empty()) config.wordnet_dir = wordnet;
  if (!ic_file.empty()) config.ic_file = ic_file;
  if (config.ic_file && config.ic_from_tags) {
    err << "error: --ic-file and --ic-from-tags are mutually exclusive\n";
    return kExitUsage;
  }

  if (build->parsed()) return cmd_build(config, out, err);
  if (relate->parsed()) return cmd_relate(config, measure, tag, out, err);
  if (ground->parsed()) return cmd_ground(config, out, err);
  return cmd_stats(config, out, err);
}

}  // namespace folkrel
