#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rtw {

enum class Errc {
  BadMagic,
  DimensionOverflow,
  NonFiniteSample,
  Truncated,
  UnsupportedChannels,
  IoFailure,
  WrongChannelCount,
  ThresholdOutOfRange,
  BadJson,
  EmptyCorpus,
  MalformedUtf8,
  NoUsableFonts,
  UnsupportedGlyph,
  BadFont,
  DegenerateRegion,
  NumericallySingular,
  EmptyDomain,
  MissingMap,
  CorruptInput,
  BadConfig,
  MissingFile,
};

std::string_view to_string(Errc code);

// Single exception type for the engine; `code()` carries the failure class
// and `offset()` the byte offset for binary-format failures.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what,
        std::optional<std::uint64_t> offset = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        offset_(offset) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::uint64_t> offset() const noexcept { return offset_; }

 private:
  Errc code_;
  std::optional<std::uint64_t> offset_;
};

}  // namespace rtw
