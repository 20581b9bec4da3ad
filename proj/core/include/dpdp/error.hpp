#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dpdp {

enum class Errc {
  UnsupportedLevel,
  InvalidArgument,
  BadKeyLength,
  BadEncoding,
  MalformedSignature,
  CorruptPadding,
  NotOrdered,
  SectorCountMismatch,
  EmptyRankSet,
  CountTooLarge,
  EmptyChallenge,
  UnknownRank,
  MalformedProof,
  RankNotFound,
  RankOccupied,
  DeletedRankChallenged,
  RankNotLive,
  RankCollision,
  EmptyLeafSet,
  IndexOutOfRange,
  RootMismatch,
  RankOutOfRange,
  DuplicateFileId,
  UnknownFileId,
  InvalidPosition,
  IoError,
  BadMagic,
  VersionMismatch,
  ChecksumMismatch,
};

std::string_view to_string(Errc code) noexcept;

/// The single exception type thrown by the library. `code()` is stable and
/// meant for programmatic handling; `what()` carries a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& detail = {});

}  // namespace dpdp
