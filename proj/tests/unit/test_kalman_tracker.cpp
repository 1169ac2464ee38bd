#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <random>

#include "arenatrack/hungarian.hpp"
#include "arenatrack/kalman.hpp"
#include "arenatrack/tracker.hpp"

using namespace arenatrack;

namespace {

DetectionRecord det_at(double x, double y, std::int64_t size = 200) {
  DetectionRecord d;
  d.centroid = {x, y};
  d.size = size;
  return d;
}

Track track_with(std::int64_t frame, Point2d pos, std::int64_t size, std::size_t length = 1) {
  Track t;
  for (std::size_t i = 0; i < length; ++i)
    t.points.push_back({frame - static_cast<std::int64_t>(length - 1 - i), pos, size});
  return t;
}

// Textbook filter written out element by element; Joseph-form covariance.
struct OracleFilter {
  double x[4], P[4][4];
  double A[4][4], Q[4][4], R;

  void predict() {
    double nx[4] = {}, AP[4][4] = {}, nP[4][4] = {};
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) nx[i] += A[i][k] * x[k];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) AP[i][j] += A[i][k] * P[k][j];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) nP[i][j] += AP[i][k] * A[j][k];
        nP[i][j] += Q[i][j];
      }
    std::copy(nx, nx + 4, x);
    std::copy(&nP[0][0], &nP[0][0] + 16, &P[0][0]);
  }

  void correct(double zx, double zy) {
    const double s00 = P[0][0] + R, s01 = P[0][1], s10 = P[1][0], s11 = P[1][1] + R;
    const double det = s00 * s11 - s01 * s10;
    const double i00 = s11 / det, i01 = -s01 / det, i10 = -s10 / det, i11 = s00 / det;
    double K[4][2];
    for (int i = 0; i < 4; ++i) {
      K[i][0] = P[i][0] * i00 + P[i][1] * i10;
      K[i][1] = P[i][0] * i01 + P[i][1] * i11;
    }
    const double r0 = zx - x[0], r1 = zy - x[1];
    for (int i = 0; i < 4; ++i) x[i] += K[i][0] * r0 + K[i][1] * r1;
    double IKH[4][4];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) IKH[i][j] = (i == j) - (j == 0 ? K[i][0] : j == 1 ? K[i][1] : 0);
    double T[4][4] = {}, nP[4][4] = {};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) T[i][j] += IKH[i][k] * P[k][j];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) nP[i][j] += T[i][k] * IKH[j][k];
        nP[i][j] += R * (K[i][0] * K[j][0] + K[i][1] * K[j][1]);
      }
    std::copy(&nP[0][0], &nP[0][0] + 16, &P[0][0]);
  }
};

double brute_force_min(const std::vector<double>& cost, int rows, int cols) {
  // Permute the longer side; unmatched rows or columns cost nothing.
  const int n = std::max(rows, cols);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0;
    for (int r = 0; r < rows; ++r)
      if (perm[r] < cols) s += cost[static_cast<std::size_t>(r) * cols + perm[r]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST(Kalman, PredictConstantVelocity) {
  KalmanParams p;
  p.time = 1;
  KalmanFilter kf(p);
  kf.set_state((KalmanFilter::Vec4() << 0, 0, 1, 0).finished());
  const Point2d a = kf.predict();
  EXPECT_DOUBLE_EQ(a.x, 1);
  EXPECT_DOUBLE_EQ(a.y, 0);
  kf.set_state((KalmanFilter::Vec4() << 0, 0, 2, -3).finished());
  for (int i = 0; i < 10; ++i) kf.predict();
  EXPECT_NEAR(kf.position().x, 20, 1e-12);
  EXPECT_NEAR(kf.position().y, -30, 1e-12);
}

TEST(Kalman, PredictAtRestGrowsCovarianceByQ) {
  KalmanFilter kf;
  kf.init({5, 5});
  const double before = kf.covariance().trace();
  const Point2d p = kf.predict();
  EXPECT_DOUBLE_EQ(p.x, 5);
  EXPECT_DOUBLE_EQ(p.y, 5);
  // trace(A P A^T) > trace(P) for P = cI, plus trace(Q).
  EXPECT_GT(kf.covariance().trace(), before + kf.Q().trace() - 1e-15);
}

TEST(Kalman, PerfectMeasurementLimit) {
  KalmanParams p;
  p.mean = 1e-12;
  KalmanFilter kf(p);
  kf.init({0, 0});
  kf.predict();
  kf.correct({7.5, -2.25});
  EXPECT_NEAR(kf.position().x, 7.5, 1e-6);
  EXPECT_NEAR(kf.position().y, -2.25, 1e-6);
}

TEST(Kalman, MatchesOracleFilter) {
  KalmanParams p;
  p.time = 0.4;
  p.pron = 0.3;
  p.mean = 0.2;
  p.errc = 0.7;
  KalmanFilter kf(p);
  kf.init({3, 4});
  OracleFilter o{};
  o.x[0] = 3;
  o.x[1] = 4;
  for (int i = 0; i < 4; ++i) {
    o.P[i][i] = p.errc;
    for (int j = 0; j < 4; ++j) o.A[i][j] = kf.A()(i, j), o.Q[i][j] = kf.Q()(i, j);
  }
  o.R = p.mean;
  std::mt19937 rng(1);
  std::normal_distribution<double> n(0, 1);
  for (int step = 0; step < 30; ++step) {
    const double zx = 3 + 1.5 * step + n(rng), zy = 4 - 0.5 * step + n(rng);
    kf.predict();
    o.predict();
    kf.correct({zx, zy});
    o.correct(zx, zy);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(kf.state()(i), o.x[i], 1e-9);
      for (int j = 0; j < 4; ++j) EXPECT_NEAR(kf.covariance()(i, j), o.P[i][j], 1e-9);
    }
  }
}

TEST(Kalman, NoiselessStreamConverges) {
  KalmanFilter kf;
  kf.init({10, 10});
  double last = 1e9;
  for (int i = 1; i <= 20; ++i) {
    kf.predict();
    last = kf.correct({10 + 2.0 * i, 10 - 1.0 * i}).norm();
  }
  EXPECT_LT(last, 1e-6);
}

TEST(Kalman, CovarianceStaysSymmetricPsd) {
  KalmanFilter kf;
  kf.init({0, 0});
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 200; ++i) {
    kf.predict();
    if (i % 3) kf.correct({u(rng), u(rng)});
    const auto& P = kf.covariance();
    EXPECT_LT((P - P.transpose()).norm(), 1e-12);
    Eigen::SelfAdjointEigenSolver<KalmanFilter::Mat4> es(P);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(Hungarian, SmallCases) {
  EXPECT_EQ(hungarian_assign({3}, 1, 1), std::vector<int>{0});
  const std::vector<double> c{4, 1, 2, 8};
  const auto a = hungarian_assign(c, 2, 2);
  EXPECT_EQ(a, (std::vector<int>{1, 0}));
  EXPECT_DOUBLE_EQ(assignment_cost(c, 2, a), 3);
}

TEST(Hungarian, MatchesBruteForce) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0, 100);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const int r = dim(rng), c = dim(rng);
    std::vector<double> cost(static_cast<std::size_t>(r) * c);
    for (auto& v : cost) v = trial % 4 == 0 ? std::floor(u(rng) / 20) : u(rng);  // ties included
    const auto a = hungarian_assign(cost, r, c);
    ASSERT_EQ(static_cast<int>(a.size()), r);
    std::vector<int> used(c, 0);
    int matched = 0;
    for (int x : a)
      if (x >= 0) ++used[x], ++matched;
    for (int u2 : used) EXPECT_LE(u2, 1);
    EXPECT_EQ(matched, std::min(r, c));
    EXPECT_NEAR(assignment_cost(cost, c, a), brute_force_min(cost, r, c), 1e-9);
  }
}

TEST(Acceptance, SizeAndDistanceGates) {
  const TrackerParams p;
  EXPECT_DOUBLE_EQ(size_change(150, 100), 0.5);
  const Track t = track_with(10, {0, 0}, 100);
  EXPECT_FALSE(acceptance_check(t, {0, 0}, det_at(0, 0, 150), 11, p));
  EXPECT_TRUE(acceptance_check(t, {0, 0}, det_at(0, 0, 100), 11, p));
  EXPECT_FALSE(acceptance_check(t, {0, 0}, det_at(60, 0, 100), 11, p));
  EXPECT_TRUE(acceptance_check(t, {0, 0}, det_at(60, 0, 100), 12, p));
}

TEST(Collision, MarginArithmetic) {
  const TrackerParams p;
  EXPECT_TRUE(collision_margin_conflicts(20, 20, p));
  EXPECT_FALSE(collision_margin_conflicts(5, 50, p));   // 45 >= 40 and >= 10
  EXPECT_TRUE(collision_margin_conflicts(12, 20, p));   // 8 < 10
  EXPECT_TRUE(collision_margin_conflicts(10, 45, p));   // 35 < 40
}

TEST(Collision, EquidistantTracksBothConflicted) {
  TrackerParams p;
  Tracker tr(p);
  tr.step(0, {{det_at(100, 100), {}}, {det_at(140, 100), {}}});
  const auto rep = tr.step(1, {{det_at(120, 100), {}}});
  EXPECT_EQ(rep.conflicted, 2);
  int conflicted = 0, active = 0;
  for (const auto& t : tr.tracks()) {
    conflicted += t.status == TrackStatus::Conflicted;
    active += t.status == TrackStatus::Active;
  }
  EXPECT_EQ(conflicted, 2);
  EXPECT_EQ(active, 1);  // fresh track at the shared detection
}

TEST(Lifecycle, UnassignedStreakAndMinimumLength) {
  TrackerParams p;
  Tracker tr(p);
  for (int f = 0; f < 5; ++f) tr.step(f, {{det_at(50, 50), {}}});
  ASSERT_EQ(tr.tracks().size(), 1u);
  tr.step(5, {});
  EXPECT_EQ(tr.tracks()[0].status, TrackStatus::Active);
  EXPECT_EQ(tr.tracks()[0].unassigned_streak, 1);
  tr.step(6, {});
  EXPECT_TRUE(tr.tracks().empty());  // inactive with 5 < 8 detections
}

TEST(Lifecycle, LongTrackNotShort) {
  TrackerParams p;
  Tracker tr(p);
  for (int f = 0; f < 60; ++f) tr.step(f, {{det_at(50 + f, 50), {}}});
  tr.finish(60);
  ASSERT_EQ(tr.tracks().size(), 1u);
  EXPECT_EQ(tr.tracks()[0].status, TrackStatus::Inactive);
  EXPECT_FALSE(tr.tracks()[0].is_short);
  EXPECT_EQ(tr.tracks()[0].length(), 60u);
}

TEST(Fusion, Thresholds) {
  TrackerParams p;
  auto sample = [](std::vector<std::uint32_t> h, std::int64_t frame) {
    BodyFeatures f;
    f.hist = std::move(h);
    f.size = 100;
    f.frame = frame;
    return f;
  };
  Track cand = track_with(20, {0, 0}, 100, 10);
  Track act = track_with(29, {0, 0}, 100, 7);  // starts at 23, gap 3
  cand.features.add(sample({1, 5, 9, 2}, 20));
  act.features.add(sample({1, 5, 9, 2}, 23));
  EXPECT_TRUE(fusion_allowed(act, cand, p));

  Track far = track_with(38, {0, 0}, 100, 7);  // starts at 32, gap 12
  far.features.add(sample({1, 5, 9, 2}, 32));
  EXPECT_FALSE(fusion_allowed(far, cand, p));

  // Correlations 1.0 and 0.0 against the candidate: mean 0.5 fails even with best 1.0.
  const std::vector<std::uint32_t> base{0, 10, 0, 10, 0, 10, 0, 10, 0, 10};
  std::vector<std::uint32_t> weak{10, 10, 0, 0, 10, 10, 0, 0, 10, 10};
  Track c2 = track_with(20, {0, 0}, 100, 10);
  c2.features.add(sample(base, 20));
  Track a2 = track_with(29, {0, 0}, 100, 7);
  a2.features.add(sample(base, 23));
  a2.features.add(sample(weak, 24));
  const FusionScore s = fusion_correlation(a2.features, c2.features);
  EXPECT_NEAR(s.best, 1.0, 1e-12);
  EXPECT_NEAR(s.mean, 0.5 * (1.0 + pearson(weak, base)), 1e-12);
  EXPECT_LT(s.mean, p.acor);
  EXPECT_FALSE(fusion_allowed(a2, c2, p));
}

TEST(TrackerStep, DetectionAtPredictionHasZeroInnovation) {
  TrackerParams p;
  Tracker tr(p);
  tr.step(0, {{det_at(30, 40), {}}});
  const auto rep = tr.step(1, {{det_at(30, 40), {}}});
  EXPECT_EQ(rep.assigned, 1);
  EXPECT_EQ(tr.tracks()[0].length(), 2u);
  EXPECT_NEAR(tr.tracks()[0].kf.position().x, 30, 1e-12);
}

TEST(TrackerStep, TwoSeparatedBlobsKeepTheirTracks) {
  TrackerParams p;
  Tracker tr(p);
  for (int f = 0; f < 200; ++f) {
    std::vector<TrackInput> in{{det_at(50 + 1.5 * f, 100), {}}, {det_at(400 - 1.2 * f, 300 + 0.5 * f), {}}};
    if (f % 2) std::swap(in[0], in[1]);
    tr.step(f, std::move(in));
  }
  tr.finish(200);
  ASSERT_EQ(tr.tracks().size(), 2u);
  for (const auto& t : tr.tracks()) {
    EXPECT_EQ(t.length(), 200u);
    const bool upper = t.points.front().pos.y < 200;
    for (const auto& pt : t.points) EXPECT_EQ(pt.pos.y < 200, upper);
  }
}
