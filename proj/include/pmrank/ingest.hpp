#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pmrank/types.hpp"

namespace pmrank {

struct MalformedLine : Error {
  MalformedLine(std::size_t lineNo, const std::string& detail)
      : Error("line " + std::to_string(lineNo) + ": " + detail), lineNo(lineNo) {}
  std::size_t lineNo;
};

struct SchemaViolation : Error {
  SchemaViolation(std::size_t lineNo, const std::string& field, const std::string& detail)
      : Error("line " + std::to_string(lineNo) + ": field '" + field + "': " + detail),
        lineNo(lineNo),
        field(field) {}
  std::size_t lineNo;
  std::string field;
};

struct InconsistentLineup : Error {
  InconsistentLineup(std::size_t lineNo, const std::string& matchId, const std::string& detail)
      : Error("line " + std::to_string(lineNo) + ": match '" + matchId + "': " + detail),
        lineNo(lineNo),
        matchId(matchId) {}
  std::size_t lineNo;
  std::string matchId;
};

struct UnknownMatch : Error {
  UnknownMatch(std::size_t lineNo, const std::string& matchId)
      : Error("line " + std::to_string(lineNo) + ": unknown matchId '" + matchId + "'"),
        lineNo(lineNo),
        matchId(matchId) {}
  std::size_t lineNo;
  std::string matchId;
};

struct OutOfRangeCoordinate : Error {
  OutOfRangeCoordinate(std::size_t lineNo, const std::string& field, double value)
      : Error("line " + std::to_string(lineNo) + ": field '" + field + "' out of range: " +
              std::to_string(value)),
        lineNo(lineNo),
        field(field) {}
  std::size_t lineNo;
  std::string field;
};

struct EmptyLeague : Error {
  explicit EmptyLeague(const std::string& league)
      : Error("no completed matches for league '" + league + "'") {}
};

struct ParseIssue {
  std::size_t lineNo = 0;
  std::string message;
};

struct ParseOptions {
  // Strict mode throws on the first invalid line. Lenient mode skips invalid
  // lines and reports them in `errors`.
  bool strict = true;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<ParseIssue> errors;    // lenient mode only
  std::vector<ParseIssue> warnings;  // unknown fields etc., never fatal
};

ParseResult<MatchRecord> parseMatches(std::istream& stream, const ParseOptions& opts = {});

ParseResult<ShotRecord> parseShots(std::istream& stream,
                                   const std::vector<MatchRecord>& matches,
                                   const ParseOptions& opts = {});

// Canonical JSON line (no trailing newline). parse(serialize(r)) == r.
std::string serializeMatch(const MatchRecord& match);
std::string serializeShot(const ShotRecord& shot);

void writeMatchesJsonl(std::ostream& out, const std::vector<MatchRecord>& matches);
void writeShotsJsonl(std::ostream& out, const std::vector<ShotRecord>& shots);

// Final-result frequencies (pHW, pD, pAW) over a league's matches.
InitialFreqs empiricalInitialFreqs(const std::vector<MatchRecord>& matches,
                                   const std::string& league);

// Links shots to matches, enumerates leagues and computes their empirical
// initial outcome frequencies. Inputs must already be validated.
Dataset buildDataset(std::vector<MatchRecord> matches, std::vector<ShotRecord> shots);

}  // namespace pmrank
