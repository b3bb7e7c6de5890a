#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "folkrel/folkrank.hpp"

namespace folkrel {

struct RunConfig {
  std::filesystem::path posts;
  std::optional<std::filesystem::path> wordnet_dir;  // falls back to $FOLKREL_WORDNET_DIR
  std::optional<std::filesystem::path> ic_file;
  std::size_t top_tags = 10000;
  FolkRankParams folkrank;
  std::size_t k = 10;
  std::filesystem::path out = ".";
  unsigned threads = 1;
  bool ic_from_tags = false;          // derive IC lemma counts from tag frequencies
  bool normalize_separators = false;  // '-' -> '_' before WordNet lookup
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

// Each command reports errors on `err` and returns an exit code.
int cmd_build(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_relate(const RunConfig& config, const std::string& measure, const std::string& tag, std::ostream& out,
               std::ostream& err);
int cmd_ground(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace folkrel
