#include "folkrel/wordnet.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <queue>

#include "folkrel/text.hpp"

namespace folkrel {

char pos_char(PartOfSpeech pos) noexcept {
  switch (pos) {
    case PartOfSpeech::noun:
      return 'n';
    case PartOfSpeech::verb:
      return 'v';
    case PartOfSpeech::adjective:
      return 'a';
    case PartOfSpeech::adverb:
      return 'r';
  }
  return '?';
}

std::string_view pos_file_suffix(PartOfSpeech pos) noexcept {
  switch (pos) {
    case PartOfSpeech::noun:
      return "noun";
    case PartOfSpeech::verb:
      return "verb";
    case PartOfSpeech::adjective:
      return "adj";
    case PartOfSpeech::adverb:
      return "adv";
  }
  return "";
}

std::string_view to_string(Step step) noexcept { return step == Step::up ? "up" : "down"; }

std::string composition_pattern(std::span<const Step> composition) {
  std::string out;
  for (std::size_t i = 0; i < composition.size(); ++i) {
    if (i) out += '-';
    out += to_string(composition[i]);
  }
  return out;
}

namespace {

struct Token {
  std::string_view text;
  std::uintmax_t byte;  // absolute file offset of the token
};

std::vector<Token> tokenize(std::string_view line, std::uintmax_t line_start) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    tokens.push_back({line.substr(start, i - start), line_start + start});
  }
  return tokens;
}

template <typename T>
T parse_number(const Token& token, int base, std::size_t exact_width, const char* what) {
  T value{};
  const char* first = token.text.data();
  const char* last = first + token.text.size();
  const auto result = std::from_chars(first, last, value, base);
  if (token.text.empty() || result.ec != std::errc{} || result.ptr != last ||
      (exact_width != 0 && token.text.size() != exact_width)) {
    throw WndbParseError(std::string("malformed ") + what + " '" + std::string(token.text) + "'", token.byte);
  }
  return value;
}

const Token& at(const std::vector<Token>& tokens, std::size_t i, std::uintmax_t line_start) {
  if (i >= tokens.size()) throw WndbParseError("truncated record", line_start);
  return tokens[i];
}

// Reads lines, skipping the license header (lines starting with a space).
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::uintmax_t offset = 0;
  while (std::getline(in, line)) {
    const std::uintmax_t line_start = offset;
    offset += line.size() + (in.eof() ? 0 : 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == ' ') continue;
    fn(std::string_view(line), line_start);
  }
  if (in.bad()) throw std::runtime_error("read error in WordNet file");
}

std::string normalize_lemma(std::string_view word) {
  // adjective markers: "(a)", "(p)", "(ip)"
  if (!word.empty() && word.back() == ')') {
    const auto open = word.rfind('(');
    if (open != std::string_view::npos && open > 0) word = word.substr(0, open);
  }
  return normalize_tag(word);
}

struct DataRecord {
  std::uint32_t offset;
  std::uintmax_t byte;
  std::vector<std::string> lemmas;
  std::vector<std::pair<std::uint32_t, std::uintmax_t>> hypernyms;  // target, byte of the pointer
};

DataRecord parse_data_record(std::string_view line, std::uintmax_t line_start, PartOfSpeech pos) {
  const auto bar = line.find(" | ");
  const auto body = bar == std::string_view::npos ? line : line.substr(0, bar);
  const auto tokens = tokenize(body, line_start);

  DataRecord rec;
  rec.byte = line_start;
  rec.offset = parse_number<std::uint32_t>(at(tokens, 0, line_start), 10, 8, "synset offset");
  if (rec.offset != line_start) {
    throw WndbParseError("synset offset " + std::string(tokens[0].text) + " does not match its byte position",
                         line_start);
  }
  parse_number<unsigned>(at(tokens, 1, line_start), 10, 2, "lex_filenum");
  const auto& ss_type = at(tokens, 2, line_start);
  if (ss_type.text.size() != 1 || std::string_view("nvasr").find(ss_type.text[0]) == std::string_view::npos) {
    throw WndbParseError("malformed ss_type '" + std::string(ss_type.text) + "'", ss_type.byte);
  }
  const auto words = parse_number<unsigned>(at(tokens, 3, line_start), 16, 2, "w_cnt");
  if (words == 0) throw WndbParseError("synset without words", tokens[3].byte);
  std::size_t i = 4;
  for (unsigned w = 0; w < words; ++w, i += 2) {
    rec.lemmas.push_back(normalize_lemma(at(tokens, i, line_start).text));
    parse_number<unsigned>(at(tokens, i + 1, line_start), 16, 0, "lex_id");
  }
  const auto pointers = parse_number<unsigned>(at(tokens, i, line_start), 10, 3, "p_cnt");
  ++i;
  for (unsigned p = 0; p < pointers; ++p, i += 4) {
    const auto& symbol = at(tokens, i, line_start);
    const auto& target = at(tokens, i + 1, line_start);
    const auto target_offset = parse_number<std::uint32_t>(target, 10, 8, "pointer offset");
    const auto& target_pos = at(tokens, i + 2, line_start);
    if (target_pos.text.size() != 1 || std::string_view("nvasr").find(target_pos.text[0]) == std::string_view::npos) {
      throw WndbParseError("malformed pointer pos '" + std::string(target_pos.text) + "'", target_pos.byte);
    }
    parse_number<unsigned>(at(tokens, i + 3, line_start), 16, 4, "pointer source/target");
    if ((symbol.text == "@" || symbol.text == "@i") && target_pos.text[0] == pos_char(pos)) {
      rec.hypernyms.emplace_back(target_offset, target.byte);
    }
  }
  std::sort(rec.lemmas.begin(), rec.lemmas.end());
  rec.lemmas.erase(std::unique(rec.lemmas.begin(), rec.lemmas.end()), rec.lemmas.end());
  return rec;
}

}  // namespace

LemmaIndex LemmaIndex::parse(std::istream& in, PartOfSpeech pos) {
  LemmaIndex index;
  index.pos_ = pos;
  for_each_record(in, [&](std::string_view line, std::uintmax_t line_start) {
    const auto tokens = tokenize(line, line_start);
    const auto& lemma = at(tokens, 0, line_start);
    const auto& p = at(tokens, 1, line_start);
    if (p.text.size() != 1 || p.text[0] != pos_char(pos)) {
      throw WndbParseError("index entry has pos '" + std::string(p.text) + "'", p.byte);
    }
    const auto synsets = parse_number<std::size_t>(at(tokens, 2, line_start), 10, 0, "synset_cnt");
    const auto pointers = parse_number<std::size_t>(at(tokens, 3, line_start), 10, 0, "p_cnt");
    std::size_t i = 4 + pointers;
    parse_number<std::size_t>(at(tokens, i, line_start), 10, 0, "sense_cnt");
    parse_number<std::size_t>(at(tokens, i + 1, line_start), 10, 0, "tagsense_cnt");
    i += 2;
    if (tokens.size() != i + synsets) {
      throw WndbParseError("index entry lists " + std::to_string(tokens.size() - std::min(tokens.size(), i)) +
                               " offsets, expected " + std::to_string(synsets),
                           line_start);
    }
    if (synsets == 0) throw WndbParseError("index entry without synsets", line_start);
    auto& offsets = index.entries_[normalize_tag(lemma.text)];
    for (std::size_t s = 0; s < synsets; ++s) {
      offsets.push_back(parse_number<std::uint32_t>(tokens[i + s], 10, 8, "synset offset"));
    }
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  });
  return index;
}

LemmaIndex LemmaIndex::load(const std::filesystem::path& index_file, PartOfSpeech pos) {
  std::ifstream in(index_file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + index_file.string() + "'");
  return parse(in, pos);
}

bool LemmaIndex::contains(std::string_view lemma) const { return entries_.find(lemma) != entries_.end(); }

std::span<const std::uint32_t> LemmaIndex::offsets(std::string_view lemma) const {
  const auto it = entries_.find(lemma);
  if (it == entries_.end()) return {};
  return it->second;
}

Taxonomy Taxonomy::parse(std::istream& index, std::istream& data, PartOfSpeech pos) {
  std::vector<DataRecord> records;
  for_each_record(data, [&](std::string_view line, std::uintmax_t line_start) {
    records.push_back(parse_data_record(line, line_start, pos));
  });
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.offset < b.offset; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].offset == records[i - 1].offset) {
      throw WndbParseError("duplicate synset offset", records[i].byte);
    }
  }

  Taxonomy tax;
  tax.pos_ = pos;
  const std::size_t n = records.size();
  tax.offsets_.reserve(n + 1);
  for (const auto& rec : records) tax.offsets_.push_back(rec.offset);
  tax.offsets_.push_back(kRootOffset);
  tax.lemmas_.resize(n + 1);
  tax.parents_.resize(n + 1);
  tax.children_.resize(n + 1);

  for (std::size_t id = 0; id < n; ++id) {
    auto& rec = records[id];
    for (const auto& [target, byte] : rec.hypernyms) {
      const auto parent = tax.find_offset(target);
      if (!parent) {
        throw StructuralError("hypernym pointer at byte " + std::to_string(byte) + " targets missing synset " +
                              std::to_string(target));
      }
      tax.parents_[id].push_back(*parent);
    }
    auto& parents = tax.parents_[id];
    std::sort(parents.begin(), parents.end());
    parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
    if (!parents.empty() && index_of(parents.front()) == id) {
      throw StructuralError("synset " + std::to_string(rec.offset) + " is its own hypernym");
    }
    for (const auto& lemma : rec.lemmas) tax.lemma_index_[lemma].push_back(make_id<SynsetId>(id));
    tax.lemmas_[id] = std::move(rec.lemmas);
  }

  // Acyclicity, by peeling synsets whose hyponyms are all gone.
  {
    std::vector<std::size_t> pending(n, 0);
    for (std::size_t id = 0; id < n; ++id)
      for (auto p : tax.parents_[id]) ++pending[index_of(p)];
    std::vector<std::size_t> ready;
    for (std::size_t id = 0; id < n; ++id)
      if (pending[id] == 0) ready.push_back(id);
    std::size_t peeled = 0;
    while (!ready.empty()) {
      const auto id = ready.back();
      ready.pop_back();
      ++peeled;
      for (auto p : tax.parents_[id])
        if (--pending[index_of(p)] == 0) ready.push_back(index_of(p));
    }
    if (peeled != n) throw StructuralError("hypernym relation contains a cycle");
  }

  const auto root = tax.root();
  for (std::size_t id = 0; id < n; ++id) {
    if (tax.parents_[id].empty()) tax.parents_[id].push_back(root);
    tax.edge_count_ += tax.parents_[id].size();
    for (auto p : tax.parents_[id]) tax.children_[index_of(p)].push_back(make_id<SynsetId>(id));
  }

  const auto lemma_index = LemmaIndex::parse(index, pos);
  for (const auto& [lemma, offsets] : lemma_index.entries()) {
    auto& ids = tax.lemma_index_[lemma];
    for (auto off : offsets) {
      const auto id = tax.find_offset(off);
      if (!id) {
        throw StructuralError("index entry '" + lemma + "' points to missing synset " + std::to_string(off));
      }
      ids.push_back(*id);
      auto& names = tax.lemmas_[index_of(*id)];
      if (std::find(names.begin(), names.end(), lemma) == names.end()) names.push_back(lemma);
    }
  }
  for (auto& [lemma, ids] : tax.lemma_index_) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return tax;
}

Taxonomy load_taxonomy(const std::filesystem::path& index_file, const std::filesystem::path& data_file,
                       PartOfSpeech pos) {
  std::ifstream index(index_file, std::ios::binary);
  if (!index) throw std::runtime_error("cannot open '" + index_file.string() + "'");
  std::ifstream data(data_file, std::ios::binary);
  if (!data) throw std::runtime_error("cannot open '" + data_file.string() + "'");
  return Taxonomy::parse(index, data, pos);
}

std::optional<SynsetId> Taxonomy::find_offset(std::uint32_t offset) const {
  const auto end = offsets_.end() - (offsets_.empty() ? 0 : 1);
  const auto it = std::lower_bound(offsets_.begin(), end, offset);
  if (it == end || *it != offset) return std::nullopt;
  return make_id<SynsetId>(static_cast<std::size_t>(it - offsets_.begin()));
}

bool Taxonomy::contains(std::string_view lemma) const { return lemma_index_.find(lemma) != lemma_index_.end(); }

std::span<const SynsetId> Taxonomy::synsets(std::string_view lemma) const {
  const auto it = lemma_index_.find(lemma);
  if (it == lemma_index_.end()) return {};
  return it->second;
}

namespace {

// Per-thread BFS scratch. A node's distance is valid iff stamp == epoch.
struct Scratch {
  std::vector<std::int32_t> dist;
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;

  void reset(std::size_t n) {
    if (dist.size() < n) {
      dist.assign(n, 0);
      stamp.assign(n, 0);
      epoch = 0;
    }
    if (++epoch == 0) {
      std::fill(stamp.begin(), stamp.end(), 0u);
      epoch = 1;
    }
  }
  bool seen(std::size_t i) const { return stamp[i] == epoch; }
  std::int32_t get(std::size_t i) const { return seen(i) ? dist[i] : -1; }
  void set(std::size_t i, std::int32_t d) {
    stamp[i] = epoch;
    dist[i] = d;
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

bool has(std::span<const SynsetId> ids, SynsetId id) { return std::find(ids.begin(), ids.end(), id) != ids.end(); }

}  // namespace

TaxPath shortest_path(const Taxonomy& tax, std::span<const SynsetId> from, std::span<const SynsetId> to) {
  if (from.empty() || to.empty()) throw ContractError("shortest_path: empty synset set");
  auto& s = scratch();
  s.reset(tax.num_nodes());

  // Multi-source BFS from the targets, stopping once the level that first
  // reaches a source has been fully labeled.
  std::vector<SynsetId> frontier;
  for (auto t : to) {
    if (!s.seen(index_of(t))) {
      s.set(index_of(t), 0);
      frontier.push_back(t);
    }
  }
  std::int32_t best = -1;
  for (auto f : from)
    if (s.get(index_of(f)) == 0) best = 0;
  std::int32_t level = 0;
  while (best < 0 && !frontier.empty()) {
    std::vector<SynsetId> next;
    for (auto v : frontier) {
      for (auto nbrs : {tax.parents(v), tax.children(v)}) {
        for (auto w : nbrs) {
          if (!s.seen(index_of(w))) {
            s.set(index_of(w), level + 1);
            next.push_back(w);
          }
        }
      }
    }
    ++level;
    for (auto f : from)
      if (s.get(index_of(f)) == level) best = level;
    frontier = std::move(next);
  }
  if (best < 0) throw StructuralError("taxonomy is disconnected");

  const auto D = static_cast<std::size_t>(best);
  std::vector<std::vector<SynsetId>> layers(D + 1);
  for (auto f : from)
    if (s.get(index_of(f)) == best) layers[0].push_back(f);
  std::vector<Step> steps;
  steps.reserve(D);
  for (std::size_t k = 1; k <= D; ++k) {
    const auto want = static_cast<std::int32_t>(D - k);
    std::vector<SynsetId> up, down;
    for (auto v : layers[k - 1]) {
      for (auto p : tax.parents(v))
        if (s.get(index_of(p)) == want) up.push_back(p);
    }
    if (up.empty()) {
      for (auto v : layers[k - 1]) {
        for (auto c : tax.children(v))
          if (s.get(index_of(c)) == want) down.push_back(c);
      }
    }
    auto& layer = up.empty() ? down : up;
    std::sort(layer.begin(), layer.end());
    layer.erase(std::unique(layer.begin(), layer.end()), layer.end());
    steps.push_back(up.empty() ? Step::down : Step::up);
    layers[k] = std::move(layer);
  }
  for (auto& layer : layers) std::sort(layer.begin(), layer.end());

  TaxPath path;
  path.composition = std::move(steps);
  // ids ascend with offsets, so front() is the smallest offset
  SynsetId current = layers[D].front();
  path.target = current;
  for (std::size_t k = D; k >= 1; --k) {
    const Step step = path.composition[k - 1];
    for (auto pred : layers[k - 1]) {
      const bool linked = step == Step::up ? has(tax.parents(pred), current) : has(tax.children(pred), current);
      if (linked) {
        current = pred;
        break;
      }
    }
  }
  path.source = current;
  return path;
}

TaxPath shortest_path(const Taxonomy& tax, std::string_view lemma1, std::string_view lemma2) {
  const auto a = tax.synsets(lemma1);
  if (a.empty()) throw LookupError("lemma '" + std::string(lemma1) + "' not in taxonomy");
  const auto b = tax.synsets(lemma2);
  if (b.empty()) throw LookupError("lemma '" + std::string(lemma2) + "' not in taxonomy");
  return shortest_path(tax, a, b);
}

}  // namespace folkrel
