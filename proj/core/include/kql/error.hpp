#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace kql {

// Error codes for every failure the library reports. Each maps 1:1 onto the
// textual code printed by the CLI (E_PARSE, E_SYNTAX, ...).
enum class Errc {
  // registry
  Parse,
  Schema,
  Ref,
  Dup,
  Unbound,
  // query parsing
  Syntax,
  Position,
  // rewriting
  NoTable,
  NoField,
  Heterogeneous,
  HeterogeneousTypes,
  // data loading
  Io,
  Row,
  Type,
  // execution
  UnknownTable,
  UnknownField,
  TypeMismatch,
  // mongo emission
  Unsupported,
  // benchmark harness
  Spec,
  Empty,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}
  Error(Errc code, const std::string& message, std::size_t offset)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message +
                           " (offset " + std::to_string(offset) + ")"),
        code_(code),
        offset_(offset) {}

  Errc code() const { return code_; }
  std::optional<std::size_t> offset() const { return offset_; }

 private:
  Errc code_;
  std::optional<std::size_t> offset_;
};

}  // namespace kql
