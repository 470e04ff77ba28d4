#include "pmrank/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace pmrank {

void atomicWriteFile(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string configHash(const std::map<std::string, std::string>& config) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [key, value] : config) {
    mix(key);
    mix("=");
    mix(value);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string formatDouble(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace {

ojson vectorToJson(const Eigen::VectorXd& v) {
  ojson arr = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vectorFromJson(const ojson& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

ojson xgModelToJson(const XgModel& m) {
  ojson j;
  j["shotType"] = toString(m.shotType);
  ojson mask = ojson::array();
  for (auto f : m.mask.features) mask.push_back(toString(f));
  j["featureMask"] = std::move(mask);
  j["coefficients"] = vectorToJson(m.coefficients);
  j["intercept"] = m.intercept;
  j["lambda"] = m.lambda;
  j["cvBrier"] = m.cvBrier;
  j["baselineBrier"] = m.baselineBrier;
  j["seed"] = m.seed;
  return j;
}

ShotType shotTypeFromString(const std::string& s) {
  for (int t = 0; t < kNumShotTypes; ++t) {
    if (s == toString(static_cast<ShotType>(t))) return static_cast<ShotType>(t);
  }
  throw Error("unknown shot type '" + s + "'");
}

XgModel xgModelFromJson(const ojson& j) {
  XgModel m;
  m.shotType = shotTypeFromString(j.at("shotType").get<std::string>());
  for (const auto& f : j.at("featureMask")) {
    m.mask.features.push_back(xgFeatureFromString(f.get<std::string>()));
  }
  m.coefficients = vectorFromJson(j.at("coefficients"));
  m.intercept = j.at("intercept").get<double>();
  m.lambda = j.at("lambda").get<double>();
  m.cvBrier = j.at("cvBrier").get<double>();
  m.baselineBrier = j.at("baselineBrier").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

}  // namespace

ojson xgModelSetToJson(const XgModelSet& set) {
  ojson j;
  j["pitch"] = {{"lengthM", set.pitch.lengthM},
                {"widthM", set.pitch.widthM},
                {"goalWidthM", set.pitch.goalWidthM}};
  ojson table = ojson::array();
  for (int gd = 0; gd < GoalValueTable::kGdLevels; ++gd) {
    ojson row = ojson::array();
    for (int b = 0; b < GoalValueTable::kBins; ++b) row.push_back(set.table.values(gd, b));
    table.push_back(std::move(row));
  }
  j["goalValueTable"] = std::move(table);
  j["seed"] = set.seed;
  ojson models = ojson::array();
  for (int t = 0; t < kNumShotTypes; ++t) {
    if (set.plain[t]) models.push_back(xgModelToJson(*set.plain[t]));
    if (set.withGk[t]) models.push_back(xgModelToJson(*set.withGk[t]));
  }
  j["models"] = std::move(models);
  return j;
}

XgModelSet xgModelSetFromJson(const ojson& j) {
  XgModelSet set;
  const auto& pitch = j.at("pitch");
  set.pitch.lengthM = pitch.at("lengthM").get<double>();
  set.pitch.widthM = pitch.at("widthM").get<double>();
  set.pitch.goalWidthM = pitch.at("goalWidthM").get<double>();
  const auto& table = j.at("goalValueTable");
  for (int gd = 0; gd < GoalValueTable::kGdLevels; ++gd) {
    for (int b = 0; b < GoalValueTable::kBins; ++b) {
      set.table.values(gd, b) = table.at(gd).at(b).get<double>();
    }
  }
  set.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& mj : j.at("models")) {
    XgModel m = xgModelFromJson(mj);
    const auto t = static_cast<std::size_t>(m.shotType);
    (m.mask.usesGkSkills() ? set.withGk[t] : set.plain[t]) = std::move(m);
  }
  return set;
}

namespace {

ojson hazardSideToJson(const HazardModel::SideParams& p) {
  ojson j;
  j["blockLog"] = vectorToJson(p.blockLog);
  j["gdLog"] = vectorToJson(p.gdLog);
  j["mpLog"] = vectorToJson(p.mpLog);
  return j;
}

HazardModel::SideParams hazardSideFromJson(const ojson& j) {
  HazardModel::SideParams p;
  p.blockLog = vectorFromJson(j.at("blockLog"));
  p.gdLog = vectorFromJson(j.at("gdLog"));
  p.mpLog = vectorFromJson(j.at("mpLog"));
  return p;
}

ojson diagnosticsToJson(const HazardModel::Diagnostics& d) {
  ojson j;
  j["iterations"] = d.iterations;
  j["gradientNorm"] = d.gradientNorm;
  j["warnings"] = d.warnings;
  return j;
}

HazardModel::Diagnostics diagnosticsFromJson(const ojson& j) {
  HazardModel::Diagnostics d;
  d.iterations = j.at("iterations").get<int>();
  d.gradientNorm = j.at("gradientNorm").get<double>();
  for (const auto& w : j.at("warnings")) d.warnings.push_back(w.get<std::string>());
  return d;
}

ojson hazardModelToJson(const HazardModel& m) {
  ojson j;
  j["blockEdges"] = m.blockEdges;
  j["home"] = hazardSideToJson(m.home);
  j["away"] = hazardSideToJson(m.away);
  j["homeDiagnostics"] = diagnosticsToJson(m.homeDiagnostics);
  j["awayDiagnostics"] = diagnosticsToJson(m.awayDiagnostics);
  return j;
}

HazardModel hazardModelFromJson(const ojson& j) {
  HazardModel m;
  for (const auto& e : j.at("blockEdges")) m.blockEdges.push_back(e.get<double>());
  m.home = hazardSideFromJson(j.at("home"));
  m.away = hazardSideFromJson(j.at("away"));
  m.homeDiagnostics = diagnosticsFromJson(j.at("homeDiagnostics"));
  m.awayDiagnostics = diagnosticsFromJson(j.at("awayDiagnostics"));
  return m;
}

}  // namespace

ojson hazardModelSetToJson(const HazardModelSet& set, double gridStep) {
  ojson j;
  j["horizon"] = set.pooled.horizon();
  j["gridStep"] = gridStep;
  j["minLeagueMatches"] = set.minLeagueMatches;
  j["pooled"] = hazardModelToJson(set.pooled);
  ojson leagues = ojson::object();
  for (const auto& [league, model] : set.perLeague) {
    leagues[league] = hazardModelToJson(model);
  }
  j["leagues"] = std::move(leagues);
  return j;
}

HazardModelSet hazardModelSetFromJson(const ojson& j) {
  HazardModelSet set;
  set.minLeagueMatches = j.at("minLeagueMatches").get<int>();
  set.pooled = hazardModelFromJson(j.at("pooled"));
  for (const auto& [league, model] : j.at("leagues").items()) {
    set.perLeague.emplace(league, hazardModelFromJson(model));
  }
  return set;
}

ojson ratingSolutionToJson(const RatingSolution& s) {
  ojson j;
  j["ratingDate"] = s.ratingDate.toIso();
  j["lambda"] = s.lambda;
  j["zeta"] = s.zeta;
  j["windowYears"] = s.windowYears;
  j["homeAdvantage"] = {{"pm", s.homeAdvantage[0]},
                        {"xgpm", s.homeAdvantage[1]},
                        {"xppm", s.homeAdvantage[2]}};
  ojson dismissal = ojson::array();
  for (int k = 0; k < 3; ++k) {
    dismissal.push_back({{"pm", s.dismissal(k, 0)},
                         {"xgpm", s.dismissal(k, 1)},
                         {"xppm", s.dismissal(k, 2)}});
  }
  j["dismissal"] = std::move(dismissal);
  ojson leagues = ojson::object();
  for (std::size_t l = 0; l < s.leagues.size(); ++l) {
    leagues[s.leagues[l]] = {{"pm", s.leagueEffects(l, 0)},
                             {"xgpm", s.leagueEffects(l, 1)},
                             {"xppm", s.leagueEffects(l, 2)}};
  }
  j["leagueEffects"] = std::move(leagues);
  ojson players = ojson::object();
  for (std::size_t i = 0; i < s.playerIds.size(); ++i) {
    ojson p = {{"pm", s.playerCoeffs(i, 0)},
               {"xgpm", s.playerCoeffs(i, 1)},
               {"xppm", s.playerCoeffs(i, 2)},
               {"active", static_cast<bool>(s.activePlayer[i])}};
    if (!s.playerNames[i].empty()) p["name"] = s.playerNames[i];
    players[s.playerIds[i]] = std::move(p);
  }
  j["players"] = std::move(players);
  return j;
}

RatingSolution ratingSolutionFromJson(const ojson& j) {
  RatingSolution s;
  s.ratingDate = Date::parse(j.at("ratingDate").get<std::string>());
  s.lambda = j.at("lambda").get<double>();
  s.zeta = j.at("zeta").get<double>();
  s.windowYears = j.at("windowYears").get<double>();
  const auto& ha = j.at("homeAdvantage");
  s.homeAdvantage << ha.at("pm").get<double>(), ha.at("xgpm").get<double>(),
      ha.at("xppm").get<double>();
  const auto& dis = j.at("dismissal");
  for (int k = 0; k < 3; ++k) {
    s.dismissal(k, 0) = dis.at(k).at("pm").get<double>();
    s.dismissal(k, 1) = dis.at(k).at("xgpm").get<double>();
    s.dismissal(k, 2) = dis.at(k).at("xppm").get<double>();
  }
  const auto& leagues = j.at("leagueEffects");
  s.leagueEffects.resize(static_cast<Eigen::Index>(leagues.size()), 3);
  Eigen::Index l = 0;
  for (const auto& [league, effects] : leagues.items()) {
    s.leagues.push_back(league);
    s.leagueEffects(l, 0) = effects.at("pm").get<double>();
    s.leagueEffects(l, 1) = effects.at("xgpm").get<double>();
    s.leagueEffects(l, 2) = effects.at("xppm").get<double>();
    ++l;
  }
  const auto& players = j.at("players");
  s.playerCoeffs.resize(static_cast<Eigen::Index>(players.size()), 3);
  Eigen::Index i = 0;
  for (const auto& [id, p] : players.items()) {
    s.playerIds.push_back(id);
    s.playerNames.push_back(p.contains("name") ? p.at("name").get<std::string>() : "");
    s.activePlayer.push_back(p.at("active").get<bool>());
    s.playerCoeffs(i, 0) = p.at("pm").get<double>();
    s.playerCoeffs(i, 1) = p.at("xgpm").get<double>();
    s.playerCoeffs(i, 2) = p.at("xppm").get<double>();
    ++i;
  }
  s.buildIndex();
  return s;
}

ojson cvReportToJson(const CvReport& report) {
  ojson j;
  j["folds"] = report.folds;
  j["repeats"] = report.repeats;
  j["seed"] = report.seed;
  ojson grid = ojson::array();
  for (const auto& g : report.grid) {
    grid.push_back({{"lambda", g.lambda},
                    {"zeta", g.zeta},
                    {"meanBrier", g.meanBrier},
                    {"sdBrier", g.sdBrier}});
  }
  j["grid"] = std::move(grid);
  const auto& sel = report.selected();
  j["selected"] = {{"lambda", sel.lambda},
                   {"zeta", sel.zeta},
                   {"meanBrier", sel.meanBrier},
                   {"sdBrier", sel.sdBrier}};
  return j;
}

CvReport cvReportFromJson(const ojson& j) {
  CvReport report;
  report.folds = j.at("folds").get<int>();
  report.repeats = j.at("repeats").get<int>();
  report.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& g : j.at("grid")) {
    report.grid.push_back({g.at("lambda").get<double>(), g.at("zeta").get<double>(),
                           g.at("meanBrier").get<double>(), g.at("sdBrier").get<double>()});
  }
  const auto& sel = j.at("selected");
  for (std::size_t g = 0; g < report.grid.size(); ++g) {
    if (report.grid[g].lambda == sel.at("lambda").get<double>() &&
        report.grid[g].zeta == sel.at("zeta").get<double>()) {
      report.selectedIndex = g;
      break;
    }
  }
  return report;
}

ojson segmentObservationToJson(const SegmentObservation& obs,
                               const std::vector<std::string>& leagues) {
  const Segment& seg = obs.segment;
  ojson j;
  j["matchId"] = seg.matchId;
  j["leagueId"] = seg.leagueId;
  j["date"] = seg.date.toIso();
  j["startMinute"] = seg.startMinute;
  j["endMinute"] = seg.endMinute;
  j["durationMin"] = seg.durationMin();
  j["homeOnPitch"] = seg.homeOnPitch;
  j["awayOnPitch"] = seg.awayOnPitch;
  j["goalsHome"] = seg.goalsHome;
  j["goalsAway"] = seg.goalsAway;
  j["dismissalDummies"] = {seg.dismissal[0], seg.dismissal[1], seg.dismissal[2]};
  j["scoreAtStart"] = {seg.scoreAtStart.first, seg.scoreAtStart.second};
  j["redsAtStart"] = {seg.redsAtStart.first, seg.redsAtStart.second};
  j["yGoals"] = obs.yGoals;
  j["yXg"] = obs.yXg ? ojson(*obs.yXg) : ojson(nullptr);
  j["yXp"] = obs.yXp ? ojson(*obs.yXp) : ojson(nullptr);
  j["weight"] = obs.weight;
  ojson m = ojson::object();
  for (std::size_t l = 0; l < leagues.size(); ++l) {
    if (obs.mLeague.size() > static_cast<Eigen::Index>(l) && obs.mLeague[l] != 0.0) {
      m[leagues[l]] = obs.mLeague[l];
    }
  }
  j["mLeague"] = std::move(m);
  return j;
}

}  // namespace pmrank
