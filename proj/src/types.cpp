#include "pmrank/types.hpp"

namespace pmrank {

const char* toString(EventKind k) {
  switch (k) {
    case EventKind::Goal: return "goal";
    case EventKind::Substitution: return "substitution";
    case EventKind::RedCard: return "redCard";
  }
  return "?";
}

const char* toString(ShotType t) {
  switch (t) {
    case ShotType::Penalty: return "penalty";
    case ShotType::Freekick: return "freekick";
    case ShotType::Header: return "header";
    case ShotType::Openplay: return "openplay";
  }
  return "?";
}

std::pair<int, int> MatchRecord::finalScore() const {
  int home = 0;
  int away = 0;
  for (const auto& e : events) {
    if (e.kind != EventKind::Goal) continue;
    (e.side == Side::Home ? home : away) += 1;
  }
  return {home, away};
}

const MatchRecord& Dataset::match(const std::string& matchId) const {
  auto it = matchIndex.find(matchId);
  if (it == matchIndex.end()) throw Error("no such match '" + matchId + "'");
  return matches[it->second];
}

int PlayerRegistry::add(const PlayerRef& p) {
  auto it = index_.find(p.playerId);
  if (it != index_.end()) {
    if (players_[it->second].displayName.empty() && !p.displayName.empty()) {
      players_[it->second].displayName = p.displayName;
    }
    return it->second;
  }
  const int idx = static_cast<int>(players_.size());
  players_.push_back(p);
  index_.emplace(p.playerId, idx);
  return idx;
}

int PlayerRegistry::indexOf(const std::string& playerId) const {
  auto it = index_.find(playerId);
  return it == index_.end() ? -1 : it->second;
}

int PlayerRegistry::require(const std::string& playerId) const {
  const int idx = indexOf(playerId);
  if (idx < 0) throw UnknownPlayer(playerId);
  return idx;
}

PlayerRegistry PlayerRegistry::fromDataset(const Dataset& data) {
  PlayerRegistry reg;
  for (const auto& m : data.matches) {
    for (const auto& p : m.homeLineup) reg.add(p);
    for (const auto& p : m.awayLineup) reg.add(p);
    for (const auto& e : m.events) {
      if (e.kind == EventKind::Substitution && e.playerOn) reg.add(*e.playerOn);
    }
  }
  return reg;
}

}  // namespace pmrank
