#include "pmrank/xg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "pmrank/logistic.hpp"
#include "pmrank/numeric.hpp"

namespace pmrank {

double PitchGeometry::maxDistanceM() const {
  return std::hypot(lengthM, widthM / 2.0);
}

double GoalValueTable::lookup(int goalDiff, double minute) const {
  const int row = std::clamp(goalDiff, -2, 2) + 2;
  const int bin = std::min(static_cast<int>(std::max(minute, 0.0) / 15.0), kBins - 1);
  return values(row, bin);
}

const char* toString(XgFeature f) {
  switch (f) {
    case XgFeature::X: return "x";
    case XgFeature::YAdj: return "yAdj";
    case XgFeature::GoalViewAngle: return "goalViewAngle";
    case XgFeature::InvDistance: return "invDistance";
    case XgFeature::TimeOfPlay: return "timeOfPlay";
    case XgFeature::GoalValue: return "goalValue";
    case XgFeature::BigChance: return "bigChance";
    case XgFeature::GkSkills: return "gkSkills";
  }
  return "?";
}

XgFeature xgFeatureFromString(const std::string& name) {
  for (auto f : {XgFeature::X, XgFeature::YAdj, XgFeature::GoalViewAngle,
                 XgFeature::InvDistance, XgFeature::TimeOfPlay, XgFeature::GoalValue,
                 XgFeature::BigChance, XgFeature::GkSkills}) {
    if (name == toString(f)) return f;
  }
  throw Error("unknown xg feature '" + name + "'");
}

bool FeatureMask::usesGkSkills() const {
  return std::find(features.begin(), features.end(), XgFeature::GkSkills) != features.end();
}

int FeatureMask::dimension() const {
  int dim = 0;
  for (auto f : features) dim += (f == XgFeature::GkSkills) ? 5 : 1;
  return dim;
}

FeatureMask FeatureMask::forShotType(ShotType type, bool withGkSkills) {
  FeatureMask mask;
  if (type == ShotType::Penalty) {
    // All penalties share one spot, so location features carry no signal.
    mask.features = {XgFeature::TimeOfPlay, XgFeature::GoalValue, XgFeature::BigChance};
  } else {
    mask.features = {XgFeature::X,          XgFeature::YAdj,     XgFeature::GoalViewAngle,
                     XgFeature::InvDistance, XgFeature::TimeOfPlay, XgFeature::GoalValue,
                     XgFeature::BigChance};
  }
  if (withGkSkills) mask.features.push_back(XgFeature::GkSkills);
  return mask;
}

Eigen::VectorXd featureVector(const ShotFeatures& f, const FeatureMask& mask) {
  Eigen::VectorXd row(mask.dimension());
  Eigen::Index at = 0;
  for (auto feature : mask.features) {
    switch (feature) {
      case XgFeature::X: row[at++] = f.x; break;
      case XgFeature::YAdj: row[at++] = f.yAdj; break;
      case XgFeature::GoalViewAngle: row[at++] = f.goalViewAngle; break;
      case XgFeature::InvDistance: row[at++] = f.invDistance; break;
      case XgFeature::TimeOfPlay: row[at++] = f.timeOfPlay; break;
      case XgFeature::GoalValue: row[at++] = f.goalValue; break;
      case XgFeature::BigChance: row[at++] = f.bigChance; break;
      case XgFeature::GkSkills: {
        if (!f.gkSkills) throw MaskMismatch("goalkeeper skills required but absent");
        row.segment(at, 5) = *f.gkSkills;
        at += 5;
        break;
      }
    }
  }
  return row;
}

ShotFeatures extractFeatures(const ShotRecord& shot, const GoalValueTable& table,
                             const ShotContext& state, const PitchGeometry& pitch) {
  ShotFeatures f;
  f.x = shot.x;
  f.yAdj = 2.0 * std::abs(shot.y - 0.5);

  const double px = shot.x * pitch.lengthM;
  const double py = shot.y * pitch.widthM;
  const double gx = pitch.lengthM;
  const double gy = pitch.widthM / 2.0;
  const double half = pitch.goalWidthM / 2.0;

  const double d = std::hypot(gx - px, gy - py);
  f.invDistance = std::clamp(1.0 - d / pitch.maxDistanceM(), 0.0, 1.0);

  // Angle subtended at the shot point by the two posts.
  const double ax = gx - px;
  const double a1y = (gy - half) - py;
  const double a2y = (gy + half) - py;
  const double cross = std::abs(ax * a2y - ax * a1y);
  const double dot = ax * ax + a1y * a2y;
  f.goalViewAngle = std::atan2(cross, dot) / std::numbers::pi;

  f.timeOfPlay = std::clamp(shot.minute, 0.0, 90.0) / 90.0;
  f.goalValue = table.lookup(state.goalDiff, state.minute);
  f.bigChance = shot.bigChance ? 1.0 : 0.0;
  f.gkSkills = shot.gkSkills;
  return f;
}

GoalValueTable buildGoalValueTable(const std::vector<MatchRecord>& matches) {
  if (matches.empty()) throw EmptyCorpus();

  // Win frequencies over gd in [-3, 3] (clipped), sampled at bin starts,
  // from both teams' perspectives.
  constexpr int kFreqLevels = 7;
  Eigen::Matrix<double, kFreqLevels, GoalValueTable::kBins> wins =
      Eigen::Matrix<double, kFreqLevels, GoalValueTable::kBins>::Zero();
  Eigen::Matrix<double, kFreqLevels, GoalValueTable::kBins> totals = wins;

  for (const auto& match : matches) {
    const auto [homeGoals, awayGoals] = match.finalScore();
    const int homeWin = homeGoals > awayGoals ? 1 : 0;
    const int awayWin = awayGoals > homeGoals ? 1 : 0;
    for (int bin = 0; bin < GoalValueTable::kBins; ++bin) {
      const double t = 15.0 * bin;
      int gd = 0;
      for (const auto& e : match.events) {
        if (e.kind != EventKind::Goal || e.minute >= t) continue;
        gd += (e.side == Side::Home) ? 1 : -1;
      }
      const int rowHome = std::clamp(gd, -3, 3) + 3;
      const int rowAway = std::clamp(-gd, -3, 3) + 3;
      wins(rowHome, bin) += homeWin;
      totals(rowHome, bin) += 1.0;
      wins(rowAway, bin) += awayWin;
      totals(rowAway, bin) += 1.0;
    }
  }

  Eigen::Matrix<double, GoalValueTable::kGdLevels, GoalValueTable::kBins> swing;
  double definedSum = 0.0;
  int definedCount = 0;
  for (int gd = -2; gd <= 2; ++gd) {
    for (int bin = 0; bin < GoalValueTable::kBins; ++bin) {
      const int lo = gd + 3;
      const int hi = gd + 4;
      if (totals(lo, bin) > 0.0 && totals(hi, bin) > 0.0) {
        const double value =
            std::abs(wins(hi, bin) / totals(hi, bin) - wins(lo, bin) / totals(lo, bin));
        swing(gd + 2, bin) = value;
        definedSum += value;
        ++definedCount;
      } else {
        swing(gd + 2, bin) = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  if (definedCount == 0) throw EmptyCorpus();
  const double fallback = definedSum / definedCount;
  for (Eigen::Index i = 0; i < swing.size(); ++i) {
    if (std::isnan(swing(i))) swing(i) = fallback;
  }

  GoalValueTable table;
  const double lo = swing.minCoeff();
  const double hi = swing.maxCoeff();
  if (hi - lo > 0.0) {
    table.values = (swing.array() - lo) / (hi - lo);
  } else {
    table.values.setZero();
  }
  return table;
}

double baselineBrier(long goals, long shots) {
  if (shots <= 0) throw Error("baseline Brier requires at least one shot");
  const double p = static_cast<double>(goals) / static_cast<double>(shots);
  return p * (1.0 - p);
}

double baselineBrier(const Eigen::VectorXd& outcomes) {
  if (outcomes.size() == 0) throw Error("baseline Brier requires at least one shot");
  const double p = outcomes.mean();
  return p * (1.0 - p);
}

namespace {

std::vector<int> foldAssignment(std::size_t n, int folds, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[order[i]] = static_cast<int>(i % folds);
  return fold;
}

}  // namespace

XgModel fitXgModel(ShotType type, const FeatureMask& mask,
                   const std::vector<ShotFeatures>& features, const Eigen::VectorXd& outcomes,
                   int folds, std::uint64_t seed) {
  const std::size_t n = features.size();
  if (n < 50) throw InsufficientData(type, n);
  if (static_cast<Eigen::Index>(n) != outcomes.size()) {
    throw Error("features/outcomes length mismatch");
  }
  folds = std::clamp<int>(folds, 2, static_cast<int>(n));

  Eigen::MatrixXd X(n, mask.dimension());
  for (std::size_t i = 0; i < n; ++i) X.row(i) = featureVector(features[i], mask);

  const std::vector<int> fold = foldAssignment(n, folds, seed);

  // L2 grid, log-spaced. Ties go to the stronger penalty.
  std::vector<double> grid;
  for (int k = -4; k <= 2; ++k) grid.push_back(std::pow(10.0, k));

  double bestLambda = grid.back();
  double bestBrier = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    double sse = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<Eigen::Index> trainIdx;
      std::vector<Eigen::Index> testIdx;
      for (std::size_t i = 0; i < n; ++i) {
        (fold[i] == f ? testIdx : trainIdx).push_back(static_cast<Eigen::Index>(i));
      }
      if (trainIdx.empty() || testIdx.empty()) continue;
      Eigen::MatrixXd Xtr(trainIdx.size(), X.cols());
      Eigen::VectorXd ytr(trainIdx.size());
      for (std::size_t i = 0; i < trainIdx.size(); ++i) {
        Xtr.row(i) = X.row(trainIdx[i]);
        ytr[i] = outcomes[trainIdx[i]];
      }
      const LogisticFit fit = fitLogisticRidge(Xtr, ytr, lambda);
      for (Eigen::Index i : testIdx) {
        double eta = fit.intercept;
        if (X.cols() > 0) eta += X.row(i).dot(fit.beta);
        const double p = logistic(eta);
        sse += (p - outcomes[i]) * (p - outcomes[i]);
      }
    }
    const double brier = sse / static_cast<double>(n);
    if (brier < bestBrier - 1e-12 ||
        (std::abs(brier - bestBrier) <= 1e-12 && lambda > bestLambda)) {
      bestBrier = brier;
      bestLambda = lambda;
    }
  }

  const LogisticFit fit = fitLogisticRidge(X, outcomes, bestLambda);
  XgModel model;
  model.shotType = type;
  model.mask = mask;
  model.coefficients = fit.beta;
  model.intercept = fit.intercept;
  model.lambda = bestLambda;
  model.cvBrier = bestBrier;
  model.baselineBrier = baselineBrier(outcomes);
  model.seed = seed;
  return model;
}

double predictXg(const XgModel& model, const ShotFeatures& features) {
  const Eigen::VectorXd row = featureVector(features, model.mask);
  if (row.size() != model.coefficients.size()) {
    throw MaskMismatch("feature vector does not match model dimension");
  }
  return logistic(model.intercept + model.coefficients.dot(row));
}

double segmentXgDifferential(const Segment& segment, std::span<const ScoredShot> shots) {
  double home = 0.0;
  double away = 0.0;
  for (const auto& s : shots) {
    const bool inside = (s.minute > segment.startMinute && s.minute <= segment.endMinute) ||
                        (s.minute == 0.0 && segment.startMinute == 0.0);
    if (!inside) continue;
    (s.side == Side::Home ? home : away) += s.xg;
  }
  return (home - away) * 90.0 / segment.durationMin();
}

const XgModel& XgModelSet::modelFor(const ShotRecord& shot) const {
  const auto type = static_cast<std::size_t>(shot.shotType);
  if (shot.gkSkills && withGk[type]) return *withGk[type];
  if (plain[type]) return *plain[type];
  throw Error(std::string("no fitted xg model for shot type '") + toString(shot.shotType) + "'");
}

XgModelSet fitXgModels(const Dataset& data, const XgFitOptions& opts) {
  XgModelSet set;
  set.pitch = opts.pitch;
  set.seed = opts.seed;
  set.table = buildGoalValueTable(data.matches);

  struct TypeShots {
    std::vector<ShotFeatures> all;
    Eigen::Index nWithGk = 0;
    std::vector<double> outcomes;
  };
  std::array<TypeShots, kNumShotTypes> byType;

  for (const auto& shot : data.shots) {
    const MatchRecord& match = data.match(shot.matchId);
    int gd = 0;
    for (const auto& e : match.events) {
      if (e.kind != EventKind::Goal || e.minute >= shot.minute) continue;
      gd += (e.side == Side::Home) ? 1 : -1;
    }
    const int shooterGd = (shot.side == Side::Home) ? gd : -gd;
    TypeShots& bucket = byType[static_cast<std::size_t>(shot.shotType)];
    bucket.all.push_back(
        extractFeatures(shot, set.table, {shooterGd, shot.minute}, set.pitch));
    if (shot.gkSkills) bucket.nWithGk += 1;
    bucket.outcomes.push_back(shot.goal ? 1.0 : 0.0);
  }

  for (int t = 0; t < kNumShotTypes; ++t) {
    const auto type = static_cast<ShotType>(t);
    TypeShots& bucket = byType[t];
    if (bucket.all.size() >= opts.minShotsPerType) {
      Eigen::VectorXd y =
          Eigen::Map<Eigen::VectorXd>(bucket.outcomes.data(), bucket.outcomes.size());
      set.plain[t] = fitXgModel(type, FeatureMask::forShotType(type, false), bucket.all, y,
                                opts.folds, opts.seed + static_cast<std::uint64_t>(t));
      if (static_cast<std::size_t>(bucket.nWithGk) >= opts.minShotsPerType) {
        std::vector<ShotFeatures> gkFeatures;
        std::vector<double> gkOutcomes;
        for (std::size_t i = 0; i < bucket.all.size(); ++i) {
          if (!bucket.all[i].gkSkills) continue;
          gkFeatures.push_back(bucket.all[i]);
          gkOutcomes.push_back(bucket.outcomes[i]);
        }
        Eigen::VectorXd ygk =
            Eigen::Map<Eigen::VectorXd>(gkOutcomes.data(), gkOutcomes.size());
        set.withGk[t] =
            fitXgModel(type, FeatureMask::forShotType(type, true), gkFeatures, ygk, opts.folds,
                       opts.seed + 100 + static_cast<std::uint64_t>(t));
      }
    }
  }
  return set;
}

std::vector<ScoredShot> scoreMatchShots(const XgModelSet& set, const MatchRecord& match,
                                        std::span<const ShotRecord> shots) {
  std::vector<ScoredShot> scored;
  scored.reserve(shots.size());
  for (const auto& shot : shots) {
    int gd = 0;
    for (const auto& e : match.events) {
      if (e.kind != EventKind::Goal || e.minute >= shot.minute) continue;
      gd += (e.side == Side::Home) ? 1 : -1;
    }
    const int shooterGd = (shot.side == Side::Home) ? gd : -gd;
    const ShotFeatures f = extractFeatures(shot, set.table, {shooterGd, shot.minute}, set.pitch);
    scored.push_back({shot.minute, shot.side, predictXg(set.modelFor(shot), f)});
  }
  return scored;
}

void attachXgTargets(std::vector<SegmentObservation>& observations, const Dataset& data,
                     const XgModelSet& set) {
  std::map<std::string, std::vector<ShotRecord>> shotsByMatch;
  for (const auto& s : data.shots) shotsByMatch[s.matchId].push_back(s);

  std::map<std::string, std::vector<ScoredShot>> scoredByMatch;
  for (auto& [matchId, shots] : shotsByMatch) {
    scoredByMatch[matchId] = scoreMatchShots(set, data.match(matchId), shots);
  }

  static const std::vector<ScoredShot> kNone;
  for (auto& obs : observations) {
    auto it = scoredByMatch.find(obs.segment.matchId);
    const auto& scored = (it == scoredByMatch.end()) ? kNone : it->second;
    obs.yXg = segmentXgDifferential(obs.segment, scored);
  }
}

}  // namespace pmrank
