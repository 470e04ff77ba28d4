#include "pmrank/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "pmrank/numeric.hpp"

namespace pmrank {

double brierScore(const std::vector<OutcomeDistribution>& forecasts,
                  const std::vector<MatchOutcome>& outcomes) {
  if (forecasts.size() != outcomes.size()) {
    throw LengthMismatch(forecasts.size(), outcomes.size());
  }
  if (forecasts.empty()) throw Error("Brier score of an empty forecast set");
  double total = 0.0;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    const auto& f = forecasts[i];
    const double sum = f.pHW + f.pD + f.pAW;
    if (std::abs(sum - 1.0) > 1e-6 || f.pHW < -1e-12 || f.pD < -1e-12 || f.pAW < -1e-12) {
      throw InvalidDistribution(i);
    }
    const double oHW = outcomes[i] == MatchOutcome::HomeWin ? 1.0 : 0.0;
    const double oD = outcomes[i] == MatchOutcome::Draw ? 1.0 : 0.0;
    const double oAW = outcomes[i] == MatchOutcome::AwayWin ? 1.0 : 0.0;
    total += (f.pHW - oHW) * (f.pHW - oHW) + (f.pD - oD) * (f.pD - oD) +
             (f.pAW - oAW) * (f.pAW - oAW);
  }
  return total / static_cast<double>(forecasts.size());
}

MatchOutcome matchOutcome(const MatchRecord& match) {
  const auto [home, away] = match.finalScore();
  if (home > away) return MatchOutcome::HomeWin;
  if (home == away) return MatchOutcome::Draw;
  return MatchOutcome::AwayWin;
}

MatchCovariates matchCovariates(const MatchRecord& match, const RatingSolution& ratings) {
  MatchCovariates cov;
  cov.x = Eigen::VectorXd::Zero(6);
  auto sideMeans = [&](const std::vector<PlayerRef>& lineup, int offset) {
    for (int t = 0; t < kNumTargets; ++t) {
      double sum = 0.0;
      for (const auto& p : lineup) {
        const auto c = ratings.coefficientFor(p.playerId, static_cast<RatingTarget>(t));
        if (c) {
          sum += *c;
        } else if (t == 0) {
          cov.unratedPlayers += 1;
        }
      }
      cov.x[offset + t] = sum / static_cast<double>(lineup.size());
    }
  };
  sideMeans(match.homeLineup, 0);
  sideMeans(match.awayLineup, 3);
  return cov;
}

namespace {

// Runs jobs 0..count-1 across `jobs` threads; results land in
// caller-indexed slots so scheduling never changes the output.
void parallelFor(std::size_t count, int jobs, const std::function<void(std::size_t)>& work) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr firstError;
  std::mutex errorMutex;
  const int nThreads = std::min<std::size_t>(jobs, count);
  for (int t = 0; t < nThreads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(errorMutex);
          if (!firstError) firstError = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (firstError) std::rethrow_exception(firstError);
}

}  // namespace

CvReport tuneHyperparameters(const Dataset& data,
                             const std::vector<SegmentObservation>& observations,
                             const PlayerRegistry& registry,
                             const std::vector<std::pair<double, double>>& grid, int folds,
                             int repeats, std::uint64_t seed, int jobs) {
  if (grid.empty()) throw Error("hyperparameter grid is empty");
  if (folds < 2) throw Error("tuning needs at least 2 folds");
  const std::size_t nMatches = data.matches.size();
  if (nMatches < static_cast<std::size_t>(folds)) {
    throw Error("fewer matches than folds");
  }

  // All observations sit strictly before this date, so every segment is
  // admissible and the window spans the whole corpus.
  Date maxDate = data.matches.front().date;
  Date minDate = maxDate;
  for (const auto& m : data.matches) {
    maxDate = std::max(maxDate, m.date);
    minDate = std::min(minDate, m.date);
  }
  const Date ratingDate = maxDate.addDays(1);
  const double windowYears =
      static_cast<double>(daysBetween(minDate, ratingDate)) / 365.25 + 1.0;

  // Fold assignment per repeat, drawn once up front for determinism.
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> foldOf(repeats, std::vector<int>(nMatches));
  for (int r = 0; r < repeats; ++r) {
    std::vector<std::size_t> perm(nMatches);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < nMatches; ++i) {
      foldOf[r][perm[i]] = static_cast<int>(i % folds);
    }
  }

  struct Job {
    std::size_t gridIdx;
    int repeat;
    int fold;
  };
  std::vector<Job> jobsList;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (int r = 0; r < repeats; ++r) {
      for (int f = 0; f < folds; ++f) jobsList.push_back({g, r, f});
    }
  }
  std::vector<double> briers(jobsList.size());

  parallelFor(jobsList.size(), jobs, [&](std::size_t j) {
    const Job& job = jobsList[j];
    const auto [lambda, zeta] = grid[job.gridIdx];
    const std::vector<int>& fold = foldOf[job.repeat];

    std::set<std::string> testIds;
    for (std::size_t i = 0; i < nMatches; ++i) {
      if (fold[i] == job.fold) testIds.insert(data.matches[i].matchId);
    }
    std::vector<SegmentObservation> trainObs;
    trainObs.reserve(observations.size());
    for (const auto& obs : observations) {
      if (!testIds.contains(obs.segment.matchId)) trainObs.push_back(obs);
    }

    const RatingSolution ratings = ratingsAsOf(trainObs, registry, data.leagues, ratingDate,
                                               lambda, zeta, windowYears);

    std::vector<Eigen::VectorXd> trainX;
    std::vector<MatchOutcome> trainY;
    std::vector<Eigen::VectorXd> testX;
    std::vector<MatchOutcome> testY;
    for (std::size_t i = 0; i < nMatches; ++i) {
      const MatchRecord& match = data.matches[i];
      const MatchCovariates cov = matchCovariates(match, ratings);
      if (fold[i] == job.fold) {
        testX.push_back(cov.x);
        testY.push_back(matchOutcome(match));
      } else {
        trainX.push_back(cov.x);
        trainY.push_back(matchOutcome(match));
      }
    }
    Eigen::MatrixXd X(trainX.size(), 6);
    for (std::size_t i = 0; i < trainX.size(); ++i) X.row(i) = trainX[i];
    const OrderedProbitModel probit = fitOrderedProbit(X, trainY);

    std::vector<OutcomeDistribution> forecasts;
    forecasts.reserve(testX.size());
    for (const auto& x : testX) forecasts.push_back(orderedProbitProbs(probit, x));
    briers[j] = brierScore(forecasts, testY);
  });

  CvReport report;
  report.folds = folds;
  report.repeats = repeats;
  report.seed = seed;
  const int evalsPerPoint = folds * repeats;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t j = 0; j < jobsList.size(); ++j) {
      if (jobsList[j].gridIdx == g) sum += briers[j];
    }
    const double mean = sum / evalsPerPoint;
    double ss = 0.0;
    for (std::size_t j = 0; j < jobsList.size(); ++j) {
      if (jobsList[j].gridIdx == g) ss += (briers[j] - mean) * (briers[j] - mean);
    }
    const double sd = evalsPerPoint > 1 ? std::sqrt(ss / (evalsPerPoint - 1)) : 0.0;
    report.grid.push_back({grid[g].first, grid[g].second, mean, sd});
  }

  report.selectedIndex = 0;
  for (std::size_t g = 1; g < report.grid.size(); ++g) {
    const CvGridPoint& cand = report.grid[g];
    const CvGridPoint& best = report.grid[report.selectedIndex];
    if (cand.meanBrier < best.meanBrier ||
        (cand.meanBrier == best.meanBrier &&
         (cand.lambda > best.lambda ||
          (cand.lambda == best.lambda && cand.zeta > best.zeta)))) {
      report.selectedIndex = g;
    }
  }
  return report;
}

std::map<int, std::map<std::string, double>> minutesByCalendarYear(
    const std::vector<SegmentObservation>& observations) {
  std::map<int, std::map<std::string, double>> minutes;
  for (const auto& obs : observations) {
    auto& year = minutes[obs.segment.date.year()];
    for (const auto& id : obs.segment.homeOnPitch) year[id] += obs.segment.durationMin();
    for (const auto& id : obs.segment.awayOnPitch) year[id] += obs.segment.durationMin();
  }
  return minutes;
}

PlayerBoard topPlayers(const RatingSolution& solution,
                       const std::map<std::string, double>& minutesInYear, int year,
                       double minMinutes) {
  std::vector<int> eligible;
  for (std::size_t j = 0; j < solution.playerIds.size(); ++j) {
    if (!solution.activePlayer[j]) continue;
    auto it = minutesInYear.find(solution.playerIds[j]);
    if (it != minutesInYear.end() && it->second >= minMinutes) {
      eligible.push_back(static_cast<int>(j));
    }
  }
  if (eligible.empty()) throw NoEligiblePlayers(year);

  Eigen::MatrixXd scores(eligible.size(), kNumTargets);
  for (int t = 0; t < kNumTargets; ++t) {
    Eigen::VectorXd raw(eligible.size());
    for (std::size_t i = 0; i < eligible.size(); ++i) raw[i] = solution.playerCoeffs(eligible[i], t);
    // A single eligible player (or a constant column) scores 1.0.
    scores.col(t) = minMaxNormalize(raw, 1.0);
  }

  PlayerBoard board;
  board.year = year;
  board.minMinutes = minMinutes;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    PlayerBoardEntry entry;
    entry.playerId = solution.playerIds[eligible[i]];
    entry.name = solution.playerNames[eligible[i]];
    entry.score = scores.row(i).mean();
    board.entries.push_back(std::move(entry));
  }
  std::sort(board.entries.begin(), board.entries.end(),
            [](const PlayerBoardEntry& a, const PlayerBoardEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.playerId < b.playerId;
            });
  for (std::size_t i = 0; i < board.entries.size(); ++i) {
    board.entries[i].rank = static_cast<int>(i) + 1;
  }
  return board;
}

std::vector<LeagueTableRow> leagueStrengths(const RatingSolution& solution) {
  const std::size_t numLeagues = solution.leagues.size();
  if (numLeagues < 2) throw TooFewLeagues(numLeagues);

  Eigen::MatrixXd normalized(numLeagues, kNumTargets);
  for (int t = 0; t < kNumTargets; ++t) {
    normalized.col(t) = minMaxNormalize(solution.leagueEffects.col(t), 0.5);
  }

  std::vector<LeagueTableRow> rows;
  for (std::size_t l = 0; l < numLeagues; ++l) {
    LeagueTableRow row;
    row.league = solution.leagues[l];
    row.pm = normalized(l, 0);
    row.xgpm = normalized(l, 1);
    row.xppm = normalized(l, 2);
    row.mean = normalized.row(l).mean();
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const LeagueTableRow& a, const LeagueTableRow& b) {
    if (a.mean != b.mean) return a.mean > b.mean;
    return a.league < b.league;
  });
  return rows;
}

std::vector<SeriesPoint> ratingSeries(const std::string& playerId,
                                      const std::vector<Date>& dates,
                                      const std::vector<SegmentObservation>& observations,
                                      const PlayerRegistry& registry,
                                      const std::vector<std::string>& leagues, double lambda,
                                      double zeta, double windowYears) {
  registry.require(playerId);
  if (!std::is_sorted(dates.begin(), dates.end())) {
    throw Error("series dates must be ascending");
  }
  std::vector<SeriesPoint> series;
  for (const Date& date : dates) {
    SeriesPoint point;
    point.date = date;
    try {
      const RatingSolution solution =
          ratingsAsOf(observations, registry, leagues, date, lambda, zeta, windowYears);
      point.pm = solution.coefficientFor(playerId, RatingTarget::PM);
      point.xgpm = solution.coefficientFor(playerId, RatingTarget::XgPM);
      point.xppm = solution.coefficientFor(playerId, RatingTarget::XpPM);
    } catch (const EmptyWindow&) {
      // No data at all in this window: every entry stays null.
    }
    series.push_back(point);
  }
  return series;
}

}  // namespace pmrank
