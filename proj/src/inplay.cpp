#include "pmrank/inplay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <tuple>

#include <Eigen/Dense>

namespace pmrank {

namespace {

constexpr int kSwing = 15;  // goal-difference swing capacity of the solver chain

int levelIndex(int value) { return std::clamp(value, -3, 3) + 3; }

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

int HazardModel::blockAt(double minute) const {
  const int n = numBlocks();
  for (int b = n - 1; b >= 0; --b) {
    if (minute >= blockEdges[b]) return b;
  }
  return 0;
}

double HazardModel::intensity(Side side, double minute, int goalDiff, int manPower) const {
  const SideParams& p = (side == Side::Home) ? home : away;
  return std::exp(p.blockLog[blockAt(minute)] + p.gdLog[levelIndex(goalDiff)] +
                  p.mpLog[levelIndex(manPower)]);
}

namespace {

// One exposure cell of the decomposition: constant (block, GD, MP).
struct Cell {
  int block;
  int gdLevel;
  int mpLevel;
  double exposure = 0.0;
  double goals = 0.0;
};

struct SideCells {
  // keyed by (block, gdLevel, mpLevel)
  std::map<std::tuple<int, int, int>, Cell> cells;

  void add(int block, int gd, int mp, double exposure, double goals) {
    auto key = std::make_tuple(block, levelIndex(gd), levelIndex(mp));
    auto& cell = cells[key];
    cell.block = block;
    cell.gdLevel = levelIndex(gd);
    cell.mpLevel = levelIndex(mp);
    cell.exposure += exposure;
    cell.goals += goals;
  }
};

HazardModel::SideParams fitSide(const SideCells& side, int numBlocks,
                                const HazardFitOptions& opts,
                                HazardModel::Diagnostics& diag, const char* label) {
  HazardModel::SideParams params;
  params.blockLog = Eigen::VectorXd::Zero(numBlocks);

  double totalExposure = 0.0;
  double totalGoals = 0.0;
  for (const auto& [key, cell] : side.cells) {
    totalExposure += cell.exposure;
    totalGoals += cell.goals;
  }
  if (totalExposure <= 0.0) {
    throw Error(std::string("no exposure for the ") + label + " side");
  }
  if (totalGoals <= 0.0) {
    diag.warnings.push_back(std::string(label) +
                            ": no goals in corpus, returning floor intensity");
    params.blockLog.setConstant(std::log(opts.floorIntensity));
    return params;
  }

  // Parameter layout: blocks with exposure, then observed non-reference
  // covariate levels. Unobserved levels keep a zero effect.
  std::vector<double> blockExposure(numBlocks, 0.0);
  std::array<double, HazardModel::kLevels> gdExposure{};
  std::array<double, HazardModel::kLevels> mpExposure{};
  for (const auto& [key, cell] : side.cells) {
    blockExposure[cell.block] += cell.exposure;
    gdExposure[cell.gdLevel] += cell.exposure;
    mpExposure[cell.mpLevel] += cell.exposure;
  }

  std::vector<int> blockParam(numBlocks, -1);
  std::array<int, HazardModel::kLevels> gdParam;
  std::array<int, HazardModel::kLevels> mpParam;
  gdParam.fill(-1);
  mpParam.fill(-1);
  int nParams = 0;
  for (int b = 0; b < numBlocks; ++b) {
    if (blockExposure[b] > 0.0) {
      blockParam[b] = nParams++;
    } else {
      diag.warnings.push_back(std::string(label) + ": time block " + std::to_string(b) +
                              " has no exposure");
    }
  }
  const int ref = levelIndex(0);
  for (int l = 0; l < HazardModel::kLevels; ++l) {
    if (l == ref) continue;
    if (gdExposure[l] > 0.0) {
      gdParam[l] = nParams++;
    } else {
      diag.warnings.push_back(std::string(label) + ": goal-difference level " +
                              std::to_string(l - 3) + " unobserved, effect fixed at 0");
    }
    if (mpExposure[l] > 0.0) {
      mpParam[l] = nParams++;
    } else {
      diag.warnings.push_back(std::string(label) + ": man-power level " +
                              std::to_string(l - 3) + " unobserved, effect fixed at 0");
    }
  }

  std::vector<Cell> cells;
  cells.reserve(side.cells.size());
  for (const auto& [key, cell] : side.cells) {
    if (cell.exposure > 0.0) cells.push_back(cell);
  }

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(nParams);
  const double meanLog = std::log(totalGoals / totalExposure);
  for (int b = 0; b < numBlocks; ++b) {
    if (blockParam[b] >= 0) theta[blockParam[b]] = meanLog;
  }

  auto linearPredictor = [&](const Eigen::VectorXd& t, const Cell& c) {
    double eta = (blockParam[c.block] >= 0) ? t[blockParam[c.block]] : meanLog;
    if (gdParam[c.gdLevel] >= 0) eta += t[gdParam[c.gdLevel]];
    if (mpParam[c.mpLevel] >= 0) eta += t[mpParam[c.mpLevel]];
    return eta;
  };
  auto loglik = [&](const Eigen::VectorXd& t) {
    double ll = 0.0;
    for (const auto& c : cells) {
      const double eta = linearPredictor(t, c);
      ll += c.goals * eta - c.exposure * std::exp(eta);
    }
    return ll;
  };

  double current = loglik(theta);
  int iterations = 0;
  double gradNorm = std::numeric_limits<double>::infinity();
  bool converged = false;
  while (iterations < opts.maxIter) {
    ++iterations;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(nParams);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(nParams, nParams);
    for (const auto& c : cells) {
      const double mu = c.exposure * std::exp(linearPredictor(theta, c));
      const double r = c.goals - mu;
      int idx[3];
      int nIdx = 0;
      if (blockParam[c.block] >= 0) idx[nIdx++] = blockParam[c.block];
      if (gdParam[c.gdLevel] >= 0) idx[nIdx++] = gdParam[c.gdLevel];
      if (mpParam[c.mpLevel] >= 0) idx[nIdx++] = mpParam[c.mpLevel];
      for (int a = 0; a < nIdx; ++a) {
        grad[idx[a]] += r;
        for (int b = 0; b < nIdx; ++b) hess(idx[a], idx[b]) += mu;
      }
    }
    gradNorm = grad.norm();
    if (gradNorm < opts.tol) {
      converged = true;
      break;
    }

    hess.diagonal().array() += 1e-10;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);

    if (gradNorm < 1e-4) {
      // Quadratic phase: objective changes are below floating-point noise,
      // so track the gradient norm instead of the log-likelihood.
      Eigen::VectorXd trial = (theta + step).cwiseMax(-20.0).cwiseMin(20.0);
      Eigen::VectorXd trialGrad = Eigen::VectorXd::Zero(nParams);
      for (const auto& c : cells) {
        const double mu = c.exposure * std::exp(linearPredictor(trial, c));
        const double r = c.goals - mu;
        if (blockParam[c.block] >= 0) trialGrad[blockParam[c.block]] += r;
        if (gdParam[c.gdLevel] >= 0) trialGrad[gdParam[c.gdLevel]] += r;
        if (mpParam[c.mpLevel] >= 0) trialGrad[mpParam[c.mpLevel]] += r;
      }
      if (trialGrad.norm() >= gradNorm) break;
      theta = std::move(trial);
      current = loglik(theta);
      continue;
    }

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd trial = (theta + t * step).cwiseMax(-20.0).cwiseMin(20.0);
      const double value = loglik(trial);
      if (value > current) {
        theta = std::move(trial);
        current = value;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // stalled at floating-point noise
  }
  if (!converged) {
    if (gradNorm > 1e-5) {
      throw NonConvergence(std::string("hazard fit (") + label + ")", iterations);
    }
    diag.warnings.push_back(std::string(label) + ": stopped at gradient norm " +
                            std::to_string(gradNorm));
  }
  diag.iterations = iterations;
  diag.gradientNorm = gradNorm;

  for (int b = 0; b < numBlocks; ++b) {
    params.blockLog[b] = (blockParam[b] >= 0) ? theta[blockParam[b]] : meanLog;
  }
  for (int l = 0; l < HazardModel::kLevels; ++l) {
    if (gdParam[l] >= 0) params.gdLog[l] = theta[gdParam[l]];
    if (mpParam[l] >= 0) params.mpLog[l] = theta[mpParam[l]];
  }
  return params;
}

}  // namespace

HazardModel fitHazards(const std::vector<MatchRecord>& matches, const HazardFitOptions& opts) {
  if (matches.empty()) throw Error("hazard fit requires at least one match");
  if (opts.blockEdges.size() < 2 || opts.blockEdges.front() != 0.0) {
    throw Error("block edges must start at 0 and contain at least one block");
  }

  HazardModel model;
  model.blockEdges = opts.blockEdges;
  const int numBlocks = model.numBlocks();

  SideCells homeCells;
  SideCells awayCells;

  for (const auto& match : matches) {
    // Breakpoints at every state change and block edge.
    std::set<double> cuts;
    for (double e : opts.blockEdges) {
      if (e > 0.0 && e < match.terminalMinute) cuts.insert(e);
    }
    for (const auto& e : match.events) {
      if (e.kind == EventKind::Substitution) continue;
      if (e.minute > 0.0 && e.minute < match.terminalMinute) cuts.insert(e.minute);
    }
    std::vector<double> edges;
    edges.push_back(0.0);
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(match.terminalMinute);

    int gd = 0;
    int mp = 0;
    std::size_t next = 0;
    std::vector<const EventRecord*> stateEvents;
    for (const auto& e : match.events) {
      if (e.kind != EventKind::Substitution) stateEvents.push_back(&e);
    }

    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double a = edges[k];
      const double b = edges[k + 1];
      // Goals at minute b were generated by the state over [a, b).
      int goalsHome = 0;
      int goalsAway = 0;
      std::size_t probe = next;
      while (probe < stateEvents.size() && stateEvents[probe]->minute <= b) {
        const EventRecord& e = *stateEvents[probe];
        if (e.kind == EventKind::Goal && e.minute > a) {
          (e.side == Side::Home ? goalsHome : goalsAway) += 1;
        }
        ++probe;
      }
      const int block = model.blockAt(a);
      homeCells.add(block, gd, mp, b - a, goalsHome);
      awayCells.add(block, gd, mp, b - a, goalsAway);

      // Apply the state changes at minute b.
      while (next < stateEvents.size() && stateEvents[next]->minute <= b) {
        const EventRecord& e = *stateEvents[next];
        if (e.kind == EventKind::Goal) {
          gd += (e.side == Side::Home) ? 1 : -1;
        } else if (e.kind == EventKind::RedCard) {
          mp += (e.side == Side::Home) ? -1 : 1;
        }
        ++next;
      }
    }
  }

  model.home = fitSide(homeCells, numBlocks, opts, model.homeDiagnostics, "home");
  model.away = fitSide(awayCells, numBlocks, opts, model.awayDiagnostics, "away");
  return model;
}

OutcomeDistribution outcomeProbabilities(const HazardModel& model, const GameState& state,
                                         double gridStep) {
  const double T = model.horizon();
  const int gd0 = std::clamp(state.goalDiff, -10, 10);
  const double t0 = std::min(state.minute, T);

  if (t0 >= T) {
    if (gd0 > 0) return {1.0, 0.0, 0.0};
    if (gd0 < 0) return {0.0, 0.0, 1.0};
    return {0.0, 1.0, 0.0};
  }

  const int n = 2 * kSwing + 1;  // states gd0-kSwing .. gd0+kSwing
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  p[kSwing] = 1.0;
  double absorbed = 0.0;

  Eigen::VectorXd lamH(n);
  Eigen::VectorXd lamA(n);
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);

  // dp = inflow - outflow; boundary outflow is suppressed and tallied.
  auto derivative = [&](const Eigen::VectorXd& q, Eigen::VectorXd& dq, double& dAbs) {
    for (int i = 0; i < n; ++i) {
      double out = 0.0;
      if (i < n - 1) out += lamH[i];
      if (i > 0) out += lamA[i];
      double in = 0.0;
      if (i > 0) in += lamH[i - 1] * q[i - 1];
      if (i < n - 1) in += lamA[i + 1] * q[i + 1];
      dq[i] = in - out * q[i];
    }
    dAbs = lamH[n - 1] * q[n - 1] + lamA[0] * q[0];
  };

  // Piecewise integration per block segment: rates are constant inside.
  double t = t0;
  while (t < T - 1e-12) {
    const int block = model.blockAt(t);
    const double blockEnd =
        (block + 1 < model.numBlocks()) ? model.blockEdges[block + 1] : T;
    const double segEnd = std::min(blockEnd, T);

    for (int i = 0; i < n; ++i) {
      const int gd = gd0 - kSwing + i;
      lamH[i] = model.intensity(Side::Home, t, gd, state.manPower);
      lamA[i] = model.intensity(Side::Away, t, gd, state.manPower);
    }

    const int steps = std::max(1, static_cast<int>(std::ceil((segEnd - t) / gridStep - 1e-12)));
    const double h = (segEnd - t) / steps;
    for (int s = 0; s < steps; ++s) {
      double a1, a2, a3, a4;
      derivative(p, k1, a1);
      tmp = p + 0.5 * h * k1;
      derivative(tmp, k2, a2);
      tmp = p + 0.5 * h * k2;
      derivative(tmp, k3, a3);
      tmp = p + h * k3;
      derivative(tmp, k4, a4);
      p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      absorbed += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    }
    t = segEnd;
  }

  if (absorbed >= 1e-8) {
    throw Error("outcome solver: probability mass at the goal-difference clip exceeds 1e-8 (" +
                std::to_string(absorbed) + ")");
  }

  OutcomeDistribution dist;
  for (int i = 0; i < n; ++i) {
    const int gd = gd0 - kSwing + i;
    if (gd > 0) {
      dist.pHW += p[i];
    } else if (gd < 0) {
      dist.pAW += p[i];
    } else {
      dist.pD += p[i];
    }
  }
  return dist;
}

OutcomeDistribution simulateOutcomes(const HazardModel& model, const GameState& state,
                                     long runs, std::uint64_t seed) {
  if (runs < 1) throw Error("simulation requires at least one run");
  const double T = model.horizon();
  const int gd0 = std::clamp(state.goalDiff, -10, 10);
  const double t0 = std::min(state.minute, T);

  std::mt19937_64 rng(seed);
  long homeWins = 0;
  long draws = 0;
  for (long run = 0; run < runs; ++run) {
    double t = t0;
    int gd = gd0;
    while (t < T) {
      const int block = model.blockAt(t);
      const double blockEnd =
          (block + 1 < model.numBlocks()) ? std::min(model.blockEdges[block + 1], T) : T;
      const double lamH = model.intensity(Side::Home, t, gd, state.manPower);
      const double lamA = model.intensity(Side::Away, t, gd, state.manPower);
      const double total = lamH + lamA;
      if (total <= 0.0) {
        t = blockEnd;
        continue;
      }
      const double wait = -std::log1p(-uniform01(rng)) / total;
      if (t + wait >= blockEnd) {
        t = blockEnd;
        continue;
      }
      t += wait;
      if (uniform01(rng) * total < lamH) {
        gd = std::min(gd + 1, gd0 + kSwing);
      } else {
        gd = std::max(gd - 1, gd0 - kSwing);
      }
    }
    if (gd > 0) {
      ++homeWins;
    } else if (gd == 0) {
      ++draws;
    }
  }
  OutcomeDistribution dist;
  dist.pHW = static_cast<double>(homeWins) / static_cast<double>(runs);
  dist.pD = static_cast<double>(draws) / static_cast<double>(runs);
  dist.pAW = 1.0 - dist.pHW - dist.pD;
  return dist;
}

double expectedPoints(const OutcomeDistribution& dist, Side side) {
  if (side == Side::Home) return 3.0 * dist.pHW + dist.pD;
  return 3.0 * dist.pAW + dist.pD;
}

double xpTarget(const HazardModel& model, const Segment& segment,
                const InitialFreqs& initialFreqs) {
  if (segment.durationMin() <= 0.0) return 0.0;

  const int gdStart = segment.scoreAtStart.first - segment.scoreAtStart.second;
  const int manPower = segment.redsAtStart.second - segment.redsAtStart.first;

  OutcomeDistribution start;
  if (segment.startMinute == 0.0) {
    start = {initialFreqs.pHW, initialFreqs.pD, initialFreqs.pAW};
  } else {
    start = outcomeProbabilities(model, {segment.startMinute, gdStart, manPower});
  }

  const int gdEnd = gdStart + segment.goalsHome - segment.goalsAway;
  const OutcomeDistribution end =
      outcomeProbabilities(model, {segment.endMinute, gdEnd, manPower});

  const double dHome = expectedPoints(end, Side::Home) - expectedPoints(start, Side::Home);
  const double dAway = expectedPoints(end, Side::Away) - expectedPoints(start, Side::Away);
  return dHome - dAway;
}

const HazardModel& HazardModelSet::forLeague(const std::string& league) const {
  auto it = perLeague.find(league);
  return it == perLeague.end() ? pooled : it->second;
}

HazardModelSet fitHazardModelSet(const std::vector<MatchRecord>& matches, int minLeagueMatches,
                                 const HazardFitOptions& opts) {
  HazardModelSet set;
  set.minLeagueMatches = minLeagueMatches;
  set.pooled = fitHazards(matches, opts);

  std::map<std::string, std::vector<MatchRecord>> byLeague;
  for (const auto& m : matches) byLeague[m.competitionId].push_back(m);
  for (const auto& [league, leagueMatches] : byLeague) {
    if (static_cast<int>(leagueMatches.size()) >= minLeagueMatches) {
      set.perLeague.emplace(league, fitHazards(leagueMatches, opts));
    }
  }
  return set;
}

void attachXpTargets(std::vector<SegmentObservation>& observations, const Dataset& data,
                     const HazardModelSet& set) {
  for (auto& obs : observations) {
    const HazardModel& model = set.forLeague(obs.segment.leagueId);
    const InitialFreqs& freqs = data.initialOutcomeFreqs.at(obs.segment.leagueId);
    obs.yXp = xpTarget(model, obs.segment, freqs);
  }
}

}  // namespace pmrank
