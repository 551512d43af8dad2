#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace semihilb {

enum class Errc {
  not_hermitian,
  not_positive,
  zero_operator,
  dimension_mismatch,
  not_in_ba,
  not_a_bounded,
  route_disagreement,
  gelfand_divergence,
  ragged_blocks,
  block_not_in_ba,
  bad_index,
  construction_failed,
  invalid_config,
  io,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::not_hermitian: return "NotHermitian";
    case Errc::not_positive: return "NotPositive";
    case Errc::zero_operator: return "ZeroOperator";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::not_in_ba: return "NotInBA";
    case Errc::not_a_bounded: return "NotABounded";
    case Errc::route_disagreement: return "RouteDisagreement";
    case Errc::gelfand_divergence: return "GelfandDivergence";
    case Errc::ragged_blocks: return "RaggedBlocks";
    case Errc::block_not_in_ba: return "BlockNotInBA";
    case Errc::bad_index: return "BadIndex";
    case Errc::construction_failed: return "ConstructionFailed";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::io: return "IOError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` says which contract broke.
/// Block-level failures also carry the offending (row, column) block index.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Error(Errc code, const std::string& what, int row, int col)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what + " at block (" +
                           std::to_string(row) + "," + std::to_string(col) + ")"),
        code_(code),
        block_(std::make_pair(row, col)) {}

  /// Same error with `prefix` prepended to the message.
  Error with_prefix(const std::string& prefix) const {
    return Error(code_, prefix + ": " + std::runtime_error::what(), block_);
  }

  Errc code() const noexcept { return code_; }
  const std::optional<std::pair<int, int>>& block() const noexcept { return block_; }

 private:
  Error(Errc code, const std::string& full, std::optional<std::pair<int, int>> block)
      : std::runtime_error(full), code_(code), block_(std::move(block)) {}

  Errc code_;
  std::optional<std::pair<int, int>> block_;
};

}  // namespace semihilb
