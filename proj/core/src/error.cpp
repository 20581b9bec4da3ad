#include "dpdp/error.hpp"

namespace dpdp {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::UnsupportedLevel: return "UnsupportedLevel";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::BadKeyLength: return "BadKeyLength";
    case Errc::BadEncoding: return "BadEncoding";
    case Errc::MalformedSignature: return "MalformedSignature";
    case Errc::CorruptPadding: return "CorruptPadding";
    case Errc::NotOrdered: return "NotOrdered";
    case Errc::SectorCountMismatch: return "SectorCountMismatch";
    case Errc::EmptyRankSet: return "EmptyRankSet";
    case Errc::CountTooLarge: return "CountTooLarge";
    case Errc::EmptyChallenge: return "EmptyChallenge";
    case Errc::UnknownRank: return "UnknownRank";
    case Errc::MalformedProof: return "MalformedProof";
    case Errc::RankNotFound: return "RankNotFound";
    case Errc::RankOccupied: return "RankOccupied";
    case Errc::DeletedRankChallenged: return "DeletedRankChallenged";
    case Errc::RankNotLive: return "RankNotLive";
    case Errc::RankCollision: return "RankCollision";
    case Errc::EmptyLeafSet: return "EmptyLeafSet";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::RootMismatch: return "RootMismatch";
    case Errc::RankOutOfRange: return "RankOutOfRange";
    case Errc::DuplicateFileId: return "DuplicateFileId";
    case Errc::UnknownFileId: return "UnknownFileId";
    case Errc::InvalidPosition: return "InvalidPosition";
    case Errc::IoError: return "IoError";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(detail.empty() ? std::string(to_string(code))
                                        : std::string(to_string(code)) + ": " + detail),
      code_(code) {}

void fail(Errc code, const std::string& detail) { throw Error(code, detail); }

}  // namespace dpdp
