#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dml/core.hpp"

// Textual diagram language: `.dml` files, UTF-8, `#` line comments,
// whitespace-insensitive. parse() produces validated diagrams; serialize()
// is the canonical pretty-printer (fixpoint after one pass).

namespace dml {

struct SourceSpan {
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  int length = 0;  // characters
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, SourceSpan location, std::vector<std::string> expected)
      : Error("ParseError", msg), location_(location), expected_(std::move(expected)) {}
  const SourceSpan& location() const { return location_; }
  const std::vector<std::string>& expected() const { return expected_; }

private:
  SourceSpan location_;
  std::vector<std::string> expected_;
};

class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error("ValidationError", summary(violations)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

private:
  static std::string summary(const std::vector<Violation>& v);
  std::vector<Violation> violations_;
};

Diagram parse(std::string_view text);

std::string serialize(const Diagram& d);

/// Structural diagram equality (equations compared as multisets; everything
/// else is order-insensitive by construction).
bool diagram_equiv(const Diagram& a, const Diagram& b);

}  // namespace dml
