#include "arenatrack/identity.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "arenatrack/hungarian.hpp"
#include "arenatrack/kernels.hpp"

namespace arenatrack {

namespace {

double dist(Point2d a, Point2d b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Interval {
  std::int64_t first, last;
  Point2d start, end;
};

bool covers(const Interval& i, std::int64_t t) { return i.first <= t && t <= i.last; }

}  // namespace

double pair_score(const BodyFeatures& a, const BodyFeatures& b, const IdentityParams& p, bool* eligible,
                  double* hist_corr) {
  *eligible = false;
  const double sa = static_cast<double>(a.size), sb = static_cast<double>(b.size);
  if (sa <= 0 || sb <= 0 || std::abs(sa - sb) / std::min(sa, sb) > p.cmsc) return 0.0;
  const double hc = pearson(a.hist, b.hist);
  *hist_corr = hc;
  if (hc < p.cmhc) return 0.0;
  *eligible = true;
  double s = hc;
  if (p.idal >= 2) s = (hc + map_ncc(a.icm, b.icm) + map_ncc(a.ccm, b.ccm)) / 3.0;
  return std::clamp(s, 0.0, 1.0);
}

double pair_similarity(const FeatureStore& a, const FeatureStore& b, const IdentityParams& p) {
  const auto& A = a.samples();
  const auto& B = b.samples();
  if (A.empty() || B.empty()) return 0.0;
  const std::size_t total = A.size() * B.size();
  const std::size_t n = p.mcmp > 0 ? std::min<std::size_t>(total, static_cast<std::size_t>(p.mcmp)) : total;
  double wsum = 0.0, wscore = 0.0, best = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t i, j;
    if (n == total) {
      i = k / B.size();
      j = k % B.size();
    } else {
      // Evenly strided over a, golden-ratio spread over b.
      i = k * A.size() / n;
      const double frac = std::fmod(static_cast<double>(k) * 0.6180339887498949, 1.0);
      j = std::min(B.size() - 1, static_cast<std::size_t>(frac * B.size()));
    }
    bool ok = false;
    double hc = 0.0;
    const double s = pair_score(A[i], B[j], p, &ok, &hc);
    if (!ok) continue;
    any = true;
    const double w = p.gstd > 0 ? std::exp(-(1.0 - hc) * (1.0 - hc) / (2.0 * p.gstd * p.gstd)) : 1.0;
    wsum += w;
    wscore += w * s;
    best = std::max(best, s);
  }
  if (!any) return 0.0;
  if (!p.mavg) return best;
  return wsum > 0 ? wscore / wsum : 0.0;
}

Fragment fragment_of(const Track& t) {
  Fragment f;
  f.track_id = t.id;
  f.first = t.first_frame();
  f.last = t.last_frame();
  f.length = t.length();
  f.start = t.points.front().pos;
  f.end = t.points.back().pos;
  f.store = &t.features;
  return f;
}

bool overlaps(const Fragment& a, const Fragment& b) { return a.first <= b.last && b.first <= a.last; }

SimilarityMatrix similarity_matrix(const std::vector<Fragment>& frags, const IdentityParams& p) {
  SimilarityMatrix m;
  const std::size_t n = frags.size();
  for (const auto& f : frags) m.ids.push_back(f.track_id);
  m.values.assign(n * n, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    m.values[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j)
      if (!overlaps(frags[i], frags[j])) pairs.emplace_back(i, j);
  }
  const std::int64_t np = static_cast<std::int64_t>(pairs.size());
  const int nt = kernels::threads();
#pragma omp parallel for num_threads(nt) schedule(dynamic, 4)
  for (std::int64_t k = 0; k < np; ++k) {
    const auto [i, j] = pairs[k];
    const double s = pair_similarity(*frags[i].store, *frags[j].store, p);
    m.values[i * n + j] = s;
    m.values[j * n + i] = s;
  }
  return m;
}

namespace {

// Working state of one identification batch.
class Batch {
 public:
  Batch(const IdentityParams& p, const std::vector<Fragment>& frags, int individuals,
        std::vector<std::vector<Interval>> fixed, std::vector<const FeatureStore*> evidence)
      : p_(p), frags_(frags), n_(individuals), intervals_(std::move(fixed)), evidence_(std::move(evidence)) {
    assign_.assign(frags.size(), -1);
    refs_.resize(n_);
    if (n_ > 1 && p_.idal > 0) {
      sim_ = similarity_matrix(frags_, p_);
      ev_sim_.assign(frags_.size() * n_, 0.0);
      for (std::size_t f = 0; f < frags_.size(); ++f)
        for (int k = 0; k < n_; ++k)
          if (evidence_[k] && !evidence_[k]->empty())
            ev_sim_[f * n_ + k] = pair_similarity(*frags_[f].store, *evidence_[k], p_);
    }
  }

  void assign(std::size_t f, int ind, bool as_reference) {
    assign_[f] = ind;
    intervals_[ind].push_back({frags_[f].first, frags_[f].last, frags_[f].start, frags_[f].end});
    if (as_reference) refs_[ind].push_back(f);
  }

  bool compatible(std::size_t f, int ind, bool check_motion) const {
    const Fragment& fr = frags_[f];
    const Interval* pred = nullptr;
    const Interval* succ = nullptr;
    for (const Interval& iv : intervals_[ind]) {
      if (iv.first <= fr.last && fr.first <= iv.last) return false;
      if (iv.last < fr.first && (!pred || iv.last > pred->last)) pred = &iv;
      if (iv.first > fr.last && (!succ || iv.first < succ->first)) succ = &iv;
    }
    if (!check_motion) return true;
    const double step = p_.fdis > 0 ? p_.fdis : p_.disf;
    if (pred && dist(pred->end, fr.start) > step * static_cast<double>(fr.first - pred->last)) return false;
    if (succ && dist(fr.end, succ->start) > step * static_cast<double>(succ->first - fr.last)) return false;
    return true;
  }

  // Mean and best similarity of a fragment to an individual's references.
  std::pair<double, double> score(std::size_t f, int ind) const {
    double sum = 0.0, best = 0.0;
    int n = 0;
    for (std::size_t r : refs_[ind]) {
      const double s = sim_.at(f, r);
      sum += s;
      best = std::max(best, s);
      ++n;
    }
    if (evidence_[ind] && !evidence_[ind]->empty()) {
      const double s = ev_sim_[f * n_ + ind];
      sum += s;
      best = std::max(best, s);
      ++n;
    }
    return {n ? sum / n : 0.0, best};
  }

  double key(std::size_t f, int ind) const {
    const auto [mean, best] = score(f, ind);
    return p_.mavg ? mean : best;
  }

  bool is_long(std::size_t f) const { return static_cast<int>(frags_[f].length) >= p_.mins; }

  bool occupied(int ind, std::int64_t t) const {
    for (const Interval& iv : intervals_[ind])
      if (covers(iv, t)) return true;
    return false;
  }

  void single_individual() {
    std::vector<std::size_t> order(frags_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return frags_[a].length != frags_[b].length ? frags_[a].length > frags_[b].length
                                                  : frags_[a].track_id < frags_[b].track_id;
    });
    for (std::size_t f : order)
      if (compatible(f, 0, false)) assign(f, 0, false);
  }

  bool seed() {
    std::int64_t best_t = 0;
    long long best_score = -1;
    std::vector<std::size_t> best_set;
    for (std::size_t s = 0; s < frags_.size(); ++s) {
      if (!is_long(s)) continue;
      const std::int64_t t = frags_[s].first;
      std::vector<std::size_t> alive;
      for (std::size_t f = 0; f < frags_.size(); ++f)
        if (is_long(f) && frags_[f].first <= t && t <= frags_[f].last) alive.push_back(f);
      if (static_cast<int>(alive.size()) < n_) continue;
      std::stable_sort(alive.begin(), alive.end(), [&](std::size_t a, std::size_t b) {
        return frags_[a].length != frags_[b].length ? frags_[a].length > frags_[b].length
                                                    : frags_[a].track_id < frags_[b].track_id;
      });
      alive.resize(n_);
      long long sc = 0;
      for (std::size_t f : alive) sc += static_cast<long long>(frags_[f].length);
      if (sc > best_score || (sc == best_score && t < best_t)) {
        best_score = sc;
        best_t = t;
        best_set = alive;
      }
    }
    if (best_score < 0) return false;
    std::sort(best_set.begin(), best_set.end(),
              [&](std::size_t a, std::size_t b) { return frags_[a].track_id < frags_[b].track_id; });
    for (int k = 0; k < n_; ++k) assign(best_set[k], k, true);
    return true;
  }

  void groups() {
    std::set<std::int64_t> tried;
    const int rounds = p_.rgrp == 2 ? 1 : static_cast<int>(frags_.size());
    for (int round = 0; round < rounds; ++round) {
      std::int64_t best_t = 0;
      long long best_score = -1;
      for (std::size_t s = 0; s < frags_.size(); ++s) {
        if (!is_long(s) || tried.count(frags_[s].first)) continue;
        const std::int64_t t = frags_[s].first;
        int unassigned = 0, occupied_count = 0;
        long long sc = 0;
        for (std::size_t f = 0; f < frags_.size(); ++f)
          if (is_long(f) && assign_[f] < 0 && frags_[f].first <= t && t <= frags_[f].last) {
            ++unassigned;
            sc += static_cast<long long>(frags_[f].length);
          }
        for (int k = 0; k < n_; ++k) occupied_count += occupied(k, t) ? 1 : 0;
        if (unassigned == 0 || unassigned + occupied_count != n_) continue;
        if (sc > best_score || (sc == best_score && t < best_t)) {
          best_score = sc;
          best_t = t;
        }
      }
      if (best_score < 0) return;
      tried.insert(best_t);
      std::vector<std::size_t> U;
      std::vector<int> F;
      for (std::size_t f = 0; f < frags_.size(); ++f)
        if (is_long(f) && assign_[f] < 0 && frags_[f].first <= best_t && best_t <= frags_[f].last) U.push_back(f);
      for (int k = 0; k < n_; ++k)
        if (!occupied(k, best_t)) F.push_back(k);
      const int nu = static_cast<int>(U.size()), nf = static_cast<int>(F.size());
      constexpr double kForbidden = 1e6;
      std::vector<double> cost(static_cast<std::size_t>(nu) * nf);
      for (int r = 0; r < nu; ++r)
        for (int c = 0; c < nf; ++c)
          cost[static_cast<std::size_t>(r) * nf + c] = compatible(U[r], F[c], true) ? -key(U[r], F[c]) : kForbidden;
      const auto a = hungarian_assign(cost, nu, nf);
      std::vector<std::pair<std::size_t, int>> ok, low;
      for (int r = 0; r < nu; ++r) {
        if (a[r] < 0 || cost[static_cast<std::size_t>(r) * nf + a[r]] >= kForbidden) continue;
        const double s = key(U[r], F[a[r]]);
        if (s >= p_.idgb && s > 0)
          ok.emplace_back(U[r], F[a[r]]);
        else
          low.emplace_back(U[r], F[a[r]]);
      }
      // A single weak pairing is still forced by elimination.
      if (low.size() == 1 && static_cast<int>(ok.size()) == n_ - 1) ok.push_back(low.front());
      for (const auto& [f, k] : ok) assign(f, k, p_.hord);
    }
  }

  void greedy(bool long_pass) {
    const double min_best = long_pass ? p_.idlb : p_.idsb;
    const double min_mean = long_pass ? p_.idla : p_.idsa;
    std::set<std::pair<std::size_t, int>> rejected;
    for (;;) {
      double best_key = 0.0;
      std::size_t bf = 0;
      int bk = -1;
      for (std::size_t f = 0; f < frags_.size(); ++f) {
        if (assign_[f] >= 0 || is_long(f) != long_pass) continue;
        for (int k = 0; k < n_; ++k) {
          if (rejected.count({f, k}) || !compatible(f, k, true)) continue;
          const double v = key(f, k);
          if (v > best_key) {
            best_key = v;
            bf = f;
            bk = k;
          }
        }
      }
      if (bk < 0) return;
      const auto [mean, best] = score(bf, bk);
      if (best >= min_best && mean >= min_mean)
        assign(bf, bk, p_.hord);
      else
        rejected.insert({bf, bk});
    }
  }

  const std::vector<int>& result() const { return assign_; }
  const std::vector<std::vector<Interval>>& intervals() const { return intervals_; }

 private:
  const IdentityParams& p_;
  const std::vector<Fragment>& frags_;
  int n_;
  std::vector<std::vector<Interval>> intervals_;
  std::vector<const FeatureStore*> evidence_;
  std::vector<int> assign_;
  std::vector<std::vector<std::size_t>> refs_;
  SimilarityMatrix sim_;
  std::vector<double> ev_sim_;
};

}  // namespace

IdentityOutcome IdentityEngine::identify(const std::vector<Fragment>& frags) {
  IdentityOutcome out;
  const int n = p_.ntra;
  if (individuals_.empty()) individuals_.resize(n);
  std::vector<std::vector<Interval>> fixed(n);
  std::vector<const FeatureStore*> evidence(n, nullptr);
  for (int k = 0; k < n; ++k) {
    for (const auto& c : individuals_[k].condensed) fixed[k].push_back({c.first, c.last, c.start, c.end});
    evidence[k] = &individuals_[k].evidence;
  }
  Batch b(p_, frags, n, std::move(fixed), std::move(evidence));
  if (n == 1) {
    b.single_individual();
    seeded_ = true;
  } else {
    if (!seeded_) {
      if (!b.seed()) {
        out.seeding_failed = true;
        out.diagnostics = "seeding failed: no instant with " + std::to_string(n) + " coexisting long tracks";
        for (const auto& f : frags) out.assignment[f.track_id] = 0;
        return out;
      }
      seeded_ = true;
    }
    if (p_.rgrp >= 1) b.groups();
    b.greedy(true);
    b.greedy(false);
  }
  for (std::size_t f = 0; f < frags.size(); ++f) out.assignment[frags[f].track_id] = b.result()[f] + 1;
  return out;
}

namespace {

std::vector<Fragment> closed_fragments(const std::vector<Track>& tracks, const std::set<int>& skip) {
  std::vector<Fragment> out;
  for (const Track& t : tracks)
    if (t.status == TrackStatus::Inactive && !skip.count(t.id)) out.push_back(fragment_of(t));
  return out;
}

}  // namespace

void IdentityEngine::flush(std::vector<Track>& tracks) {
  std::set<int> skip;
  for (const auto& [id, ind] : settled_) skip.insert(id);
  const auto frags = closed_fragments(tracks, skip);
  if (frags.empty()) return;
  ++flushes_;
  const IdentityOutcome r = identify(frags);
  if (r.seeding_failed) diag_ += r.diagnostics + " (flush " + std::to_string(flushes_) + ")\n";
  std::map<int, Track*> by_id;
  for (Track& t : tracks) by_id[t.id] = &t;
  for (const Fragment& f : frags) {
    const int ind = r.assignment.at(f.track_id);
    settled_[f.track_id] = ind;
    Track& t = *by_id.at(f.track_id);
    if (ind > 0) {
      Individual& I = individuals_[ind - 1];
      I.condensed.push_back({f.first, f.last, f.start, f.end, f.track_id});
      if (I.evidence.cap() != p_.hist) I.evidence = FeatureStore(p_.hist);
      I.evidence.merge(t.features);
    }
    t.features.clear();
  }
}

IdentityOutcome IdentityEngine::finalize(const std::vector<Track>& tracks) {
  std::set<int> skip;
  for (const auto& [id, ind] : settled_) skip.insert(id);
  const auto frags = closed_fragments(tracks, skip);
  IdentityOutcome out;
  if (!frags.empty()) out = identify(frags);
  for (const auto& [id, ind] : settled_) out.assignment[id] = ind;
  out.diagnostics = diag_ + out.diagnostics;

  // Relabel individuals by first appearance so labels do not depend on seeding order.
  std::map<int, std::int64_t> first_seen;
  std::map<int, std::int64_t> first_of;
  for (const Track& t : tracks) first_of[t.id] = t.first_frame();
  for (const auto& [id, ind] : out.assignment) {
    if (ind <= 0) continue;
    const std::int64_t f = first_of.count(id) ? first_of[id] : std::numeric_limits<std::int64_t>::max();
    auto it = first_seen.find(ind);
    if (it == first_seen.end() || f < it->second) first_seen[ind] = f;
  }
  std::vector<std::pair<std::int64_t, int>> order;
  for (const auto& [ind, f] : first_seen) order.emplace_back(f, ind);
  std::sort(order.begin(), order.end());
  std::map<int, int> relabel;
  for (std::size_t i = 0; i < order.size(); ++i) relabel[order[i].second] = static_cast<int>(i) + 1;
  for (auto& [id, ind] : out.assignment)
    if (ind > 0) ind = relabel[ind];
  return out;
}

IdentityOutcome identify_fragments(const std::vector<Track>& tracks, const IdentityParams& p) {
  IdentityEngine e(p);
  return e.finalize(tracks);
}

}  // namespace arenatrack
