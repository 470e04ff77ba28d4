#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pmrank/segmentation.hpp"
#include "pmrank/types.hpp"

namespace pmrank {

struct InsufficientData : Error {
  InsufficientData(ShotType type, std::size_t n)
      : Error(std::string("too few shots of type '") + toString(type) +
              "' to fit a model: " + std::to_string(n)) {}
};

struct MaskMismatch : Error {
  explicit MaskMismatch(const std::string& detail) : Error("feature mask mismatch: " + detail) {}
};

struct EmptyCorpus : Error {
  EmptyCorpus() : Error("goal value table requires at least one match") {}
};

// Metres-based pitch model used to turn [0,1] feed coordinates into
// geometric features. The goal sits centered on the x = 1 goal line.
struct PitchGeometry {
  double lengthM = 105.0;
  double widthM = 68.0;
  double goalWidthM = 7.32;

  // Distance from the farthest pitch corner to the goal center.
  double maxDistanceM() const;
};

// Empirical win-probability swing of a goal, indexed by the scoring team's
// goal difference (clipped to [-2, 2]) and 15-minute time bin, min-max
// normalized to [0, 1].
struct GoalValueTable {
  static constexpr int kGdLevels = 5;  // -2 .. +2
  static constexpr int kBins = 6;      // [0,15) .. [75,90+]

  Eigen::Matrix<double, kGdLevels, kBins> values = Eigen::Matrix<double, 5, 6>::Zero();

  double lookup(int goalDiff, double minute) const;
};

enum class XgFeature : std::uint8_t {
  X,
  YAdj,
  GoalViewAngle,
  InvDistance,
  TimeOfPlay,
  GoalValue,
  BigChance,
  GkSkills,  // expands to the 5 goalkeeper skill columns
};

const char* toString(XgFeature f);
XgFeature xgFeatureFromString(const std::string& name);

struct ShotFeatures {
  double x = 0.0;
  double yAdj = 0.0;
  double goalViewAngle = 0.0;
  double invDistance = 0.0;
  double timeOfPlay = 0.0;
  double goalValue = 0.0;
  double bigChance = 0.0;
  std::optional<GkSkills> gkSkills;
};

// Ordered feature selection for one specialist model.
struct FeatureMask {
  std::vector<XgFeature> features;

  bool usesGkSkills() const;
  int dimension() const;  // expanded column count

  // Default masks: penalties exclude location features; the gk variant
  // appends the goalkeeper block.
  static FeatureMask forShotType(ShotType type, bool withGkSkills);
};

// Expands masked features into a model input row. Throws MaskMismatch when
// the mask needs goalkeeper skills and the features lack them.
Eigen::VectorXd featureVector(const ShotFeatures& features, const FeatureMask& mask);

struct XgModel {
  ShotType shotType = ShotType::Openplay;
  FeatureMask mask;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double lambda = 0.0;     // selected L2 strength
  double cvBrier = 0.0;    // mean out-of-fold Brier at the selected strength
  double baselineBrier = 0.0;
  std::uint64_t seed = 0;
};

// Shooter-perspective game state at the time of a shot.
struct ShotContext {
  int goalDiff = 0;
  double minute = 0.0;
};

ShotFeatures extractFeatures(const ShotRecord& shot, const GoalValueTable& table,
                             const ShotContext& state, const PitchGeometry& pitch = {});

GoalValueTable buildGoalValueTable(const std::vector<MatchRecord>& matches);

// Brier score of the constant empirical-rate forecast: p(1-p).
double baselineBrier(long goals, long shots);
double baselineBrier(const Eigen::VectorXd& outcomes);

// Logistic specialist trained with the L2 strength chosen by k-fold CV
// minimizing mean out-of-fold Brier (grid 1e-4..1e2, 7 log-spaced points).
XgModel fitXgModel(ShotType type, const FeatureMask& mask,
                   const std::vector<ShotFeatures>& features, const Eigen::VectorXd& outcomes,
                   int folds, std::uint64_t seed);

double predictXg(const XgModel& model, const ShotFeatures& features);

// A shot already scored by the model, placed on the match clock.
struct ScoredShot {
  double minute = 0.0;
  Side side = Side::Home;
  double xg = 0.0;
};

// (sum home xG - sum away xG) * 90 / duration over the shots that fall in
// the segment (boundary shots belong to the earlier segment, like goals).
double segmentXgDifferential(const Segment& segment, std::span<const ScoredShot> shots);

// The full expected-goals stage: goal value table plus one specialist per
// shot type and goalkeeper-skill variant.
struct XgModelSet {
  PitchGeometry pitch;
  GoalValueTable table;
  std::array<std::optional<XgModel>, kNumShotTypes> plain;    // without gk skills
  std::array<std::optional<XgModel>, kNumShotTypes> withGk;   // with gk skills
  std::uint64_t seed = 0;

  // Picks the gk variant when the shot carries skills and the variant
  // exists; falls back to the plain model.
  const XgModel& modelFor(const ShotRecord& shot) const;
};

struct XgFitOptions {
  int folds = 10;
  std::uint64_t seed = 0;
  std::size_t minShotsPerType = 50;
  PitchGeometry pitch;
};

XgModelSet fitXgModels(const Dataset& data, const XgFitOptions& opts = {});

// Scores every shot of a match against the set and the match timeline.
std::vector<ScoredShot> scoreMatchShots(const XgModelSet& set, const MatchRecord& match,
                                        std::span<const ShotRecord> shots);

// Fills yXg on every observation.
void attachXgTargets(std::vector<SegmentObservation>& observations, const Dataset& data,
                     const XgModelSet& set);

}  // namespace pmrank
