#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace actq::detail {

struct EmbeddedAsset {
  std::size_t order;
  std::string_view text;
};

// Defined in a source file generated at configure time from assets/hadamard.
std::span<const EmbeddedAsset> embedded_hadamard_assets();

}  // namespace actq::detail
