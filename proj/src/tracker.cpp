#include "arenatrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arenatrack/errors.hpp"
#include "arenatrack/hungarian.hpp"

namespace arenatrack {

void TrackerParams::validate() const {
  if (!(sich > 0)) throw ConfigError("kal.sich must be positive");
  if (disf < 0 || advr < 0 || advm < 0 || dund < 0 || dage < 0 || dmax < 0 || cnft < 0 || tfmi < 0 || tfma < 0 ||
      tdma < 0 || mins < 0)
    throw ConfigError("tracking parameters must be nonnegative");
  if (ntra < 1) throw ConfigError("kal.ntra must be at least 1");
  if (!(kalman.mean > 0)) throw ConfigError("kal.mean must be positive");
}

namespace {

double dist(Point2d a, Point2d b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

double size_change(double new_size, double last_size) {
  return std::max((new_size - last_size) / last_size, (last_size - new_size) / new_size);
}

bool acceptance_check(const Track& t, Point2d predicted, const DetectionRecord& d, std::int64_t frame,
                      const TrackerParams& p) {
  const double c1 = dist(predicted, d.centroid);
  const double c2 = size_change(static_cast<double>(d.size), static_cast<double>(t.points.back().size));
  const double gap = static_cast<double>(frame - t.last_frame());
  return c2 < p.sich && c1 < p.disf * std::max(1.0, gap);
}

bool collision_margin_conflicts(double dist_i, double dist_k, const TrackerParams& p) {
  const double margin = std::abs(dist_k - dist_i);
  return margin < p.disf * p.advr || margin < p.advm;
}

FusionScore fusion_correlation(const FeatureStore& active, const FeatureStore& candidate) {
  FusionScore s;
  const auto& a = active.samples();
  const auto& c = candidate.samples();
  if (a.empty() || c.empty()) return s;
  const std::size_t c0 = c.size() > 10 ? c.size() - 10 : 0;
  double sum = 0.0;
  int n = 0;
  s.best = -1.0;
  for (const auto& x : a)
    for (std::size_t j = c0; j < c.size(); ++j) {
      const double r = pearson(x.hist, c[j].hist);
      sum += r;
      ++n;
      s.best = std::max(s.best, r);
    }
  s.mean = sum / n;
  s.any = true;
  return s;
}

bool fusion_allowed(const Track& active, const Track& cand, const TrackerParams& p) {
  const auto age = static_cast<int>(active.length());
  if (age < p.tfmi || age > p.tfma) return false;
  if (cand.last_frame() >= active.first_frame()) return false;
  if (active.first_frame() - cand.last_frame() > p.tdma) return false;
  if (size_change(static_cast<double>(active.points.front().size), static_cast<double>(cand.points.back().size)) >=
      p.sich)
    return false;
  const FusionScore s = fusion_correlation(active.features, cand.features);
  return s.any && s.mean >= p.acor && s.best >= p.bcor;
}

void Tracker::close(Track& t, std::int64_t frame) {
  t.status = TrackStatus::Inactive;
  t.closed_frame = frame;
  if (static_cast<int>(t.length()) < p_.dmax) t.status = TrackStatus::Deleted;
}

void Tracker::remove_deleted() {
  tracks_.erase(std::remove_if(tracks_.begin(), tracks_.end(),
                               [](const Track& t) { return t.status == TrackStatus::Deleted; }),
                tracks_.end());
}

StepReport Tracker::step(std::int64_t frame, std::vector<TrackInput> inputs) {
  StepReport rep;
  std::vector<int> active;
  for (std::size_t i = 0; i < tracks_.size(); ++i)
    if (tracks_[i].status == TrackStatus::Active) {
      tracks_[i].predicted = tracks_[i].kf.predict();
      active.push_back(static_cast<int>(i));
    }
  const int na = static_cast<int>(active.size());
  const int nd = static_cast<int>(inputs.size());

  std::vector<double> cost(static_cast<std::size_t>(na) * nd);
  for (int r = 0; r < na; ++r)
    for (int c = 0; c < nd; ++c)
      cost[static_cast<std::size_t>(r) * nd + c] = dist(tracks_[active[r]].predicted, inputs[c].det.centroid);
  std::vector<int> assign = (na > 0 && nd > 0) ? hungarian_assign(cost, na, nd) : std::vector<int>(na, -1);

  for (int r = 0; r < na; ++r) {
    if (assign[r] < 0) continue;
    const Track& t = tracks_[active[r]];
    if (!acceptance_check(t, t.predicted, inputs[assign[r]].det, frame, p_)) {
      assign[r] = -1;
      ++rep.rejected;
    }
  }

  // Two gated tracks sharing their closest detection with a small distance
  // margin are a collision; both are closed and the detection starts afresh.
  std::vector<char> conflicted(na, 0);
  if (nd > 0) {
    std::vector<int> closest(na, -1);
    std::vector<double> cdist(na, 0.0);
    for (int r = 0; r < na; ++r) {
      const Track& t = tracks_[active[r]];
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < nd; ++c) {
        const double d = cost[static_cast<std::size_t>(r) * nd + c];
        if (d < best) {
          best = d;
          closest[r] = c;
        }
      }
      const double gap = static_cast<double>(frame - t.last_frame());
      if (best >= p_.disf * std::max(1.0, gap)) closest[r] = -1;
      cdist[r] = best;
    }
    for (int i = 0; i < na; ++i)
      for (int k = i + 1; k < na; ++k)
        if (closest[i] >= 0 && closest[i] == closest[k] && collision_margin_conflicts(cdist[i], cdist[k], p_))
          conflicted[i] = conflicted[k] = 1;
  }

  std::vector<char> det_taken(nd, 0);
  for (int r = 0; r < na; ++r) {
    Track& t = tracks_[active[r]];
    if (conflicted[r]) {
      t.status = TrackStatus::Conflicted;
      t.closed_frame = frame;
      ++rep.conflicted;
      continue;
    }
    if (assign[r] < 0) {
      ++t.unassigned_streak;
      if (t.unassigned_streak > p_.dund) close(t, frame);
      continue;
    }
    TrackInput& in = inputs[assign[r]];
    t.kf.correct(in.det.centroid);
    t.points.push_back({frame, in.det.centroid, in.det.size});
    if (in.features) t.features.add(std::move(*in.features));
    t.unassigned_streak = 0;
    det_taken[assign[r]] = 1;
    ++rep.assigned;
  }

  for (Track& t : tracks_)
    if (t.status == TrackStatus::Conflicted && t.closed_frame >= 0 && frame - t.closed_frame >= p_.cnft)
      close(t, frame);

  // Fusion: a young active track continues a recently conflicted one.
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Track& a = tracks_[i];
    if (a.status != TrackStatus::Active) continue;
    int best = -1;
    double best_mean = -2.0;
    for (std::size_t j = 0; j < tracks_.size(); ++j) {
      const Track& c = tracks_[j];
      if (j == i || c.status != TrackStatus::Conflicted) continue;
      if (!fusion_allowed(a, c, p_)) continue;
      const double m = fusion_correlation(a.features, c.features).mean;
      if (m > best_mean) {
        best_mean = m;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) continue;
    Track& c = tracks_[best];
    c.points.insert(c.points.end(), a.points.begin(), a.points.end());
    c.features.merge(a.features);
    c.kf = a.kf;
    c.status = TrackStatus::Active;
    c.unassigned_streak = a.unassigned_streak;
    c.closed_frame = -1;
    c.predicted = a.predicted;
    a.status = TrackStatus::Deleted;
    ++rep.fused;
  }

  for (int c = 0; c < nd; ++c) {
    if (det_taken[c]) continue;
    Track t;
    t.id = next_id_++;
    t.kf = KalmanFilter(p_.kalman);
    t.kf.init(inputs[c].det.centroid);
    t.points.push_back({frame, inputs[c].det.centroid, inputs[c].det.size});
    t.features = FeatureStore(p_.feature_cap);
    if (inputs[c].features) t.features.add(std::move(*inputs[c].features));
    tracks_.push_back(std::move(t));
    ++rep.spawned;
  }

  remove_deleted();
  for (Track& t : tracks_) t.is_short = static_cast<int>(t.length()) < p_.mins;
  rep.active = static_cast<int>(
      std::count_if(tracks_.begin(), tracks_.end(), [](const Track& t) { return t.status == TrackStatus::Active; }));
  max_active_ = std::max(max_active_, rep.active);
  return rep;
}

void Tracker::finish(std::int64_t frame) {
  for (Track& t : tracks_)
    if (t.status == TrackStatus::Active || t.status == TrackStatus::Conflicted) close(t, frame);
  remove_deleted();
  for (Track& t : tracks_) t.is_short = static_cast<int>(t.length()) < p_.mins;
}

}  // namespace arenatrack
