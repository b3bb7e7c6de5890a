#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace folkrel {

// Dense interned identifiers. Ids are assigned in lexicographic order of the
// underlying strings, so comparing ids compares names.
enum class UserId : std::uint32_t {};
enum class TagId : std::uint32_t {};
enum class ResourceId : std::uint32_t {};

template <typename Id>
constexpr std::size_t index_of(Id id) noexcept {
  return static_cast<std::size_t>(id);
}

template <typename Id>
constexpr Id make_id(std::size_t index) noexcept {
  return static_cast<Id>(static_cast<std::uint32_t>(index));
}

/// Malformed input text. `line()` is 1-based, 0 when not line oriented.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Malformed WordNet database record; carries the byte offset of the fault.
class WndbParseError : public std::runtime_error {
 public:
  WndbParseError(const std::string& message, std::uintmax_t byte_offset)
      : std::runtime_error("byte " + std::to_string(byte_offset) + ": " + message),
        byte_offset_(byte_offset) {}
  std::uintmax_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::uintmax_t byte_offset_;
};

/// Input is well-formed but structurally inconsistent (dangling pointers, cycles).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown tag, lemma or node name.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A documented precondition was violated by the caller.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace folkrel
