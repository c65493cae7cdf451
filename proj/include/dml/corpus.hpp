#pragma once

#include <optional>
#include <span>
#include <string_view>

// Bundled corpus: the demo diagrams compiled into the binary so that demo
// runs stay hermetic.

namespace dml::corpus {

struct Entry {
  std::string_view name;  // file stem, e.g. "virtual_inheritance"
  std::string_view text;
};

std::span<const Entry> entries();
std::optional<std::string_view> find(std::string_view name);

}  // namespace dml::corpus
