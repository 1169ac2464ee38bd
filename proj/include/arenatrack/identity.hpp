#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "arenatrack/features.hpp"
#include "arenatrack/tracker.hpp"

namespace arenatrack {

struct IdentityParams {
  int ntra = 1;
  int idal = 2;       // 0 off, 1 histogram only, 2 histogram + center maps
  double fdis = 0;    // 0 = kal.disf per frame of gap
  double disf = 50;
  double cmsc = 0.2;
  double cmhc = 0.7;
  int mcmp = 500;
  bool mavg = true;
  double gstd = 0.05;
  int rgrp = 2;       // 0 all tracks, 1 all groups, 2 first group
  bool hord = true;
  int mins = 50;      // long-track length
  double idgb = 0, idla = 0, idlb = 0, idsa = 0, idsb = 0;
  int hist = 500;
};

double pair_score(const BodyFeatures& a, const BodyFeatures& b, const IdentityParams& p, bool* eligible,
                  double* hist_corr);
double pair_similarity(const FeatureStore& a, const FeatureStore& b, const IdentityParams& p);

// Minimal view of a closed track used by identification.
struct Fragment {
  int track_id = 0;
  std::int64_t first = 0;
  std::int64_t last = 0;
  std::size_t length = 0;
  Point2d start, end;
  const FeatureStore* store = nullptr;
};
Fragment fragment_of(const Track& t);
bool overlaps(const Fragment& a, const Fragment& b);

struct SimilarityMatrix {
  std::vector<int> ids;
  std::vector<double> values;  // row-major, ids.size()^2
  double at(std::size_t i, std::size_t j) const { return values[i * ids.size() + j]; }
};
SimilarityMatrix similarity_matrix(const std::vector<Fragment>& frags, const IdentityParams& p);

// Individual ids start at 1; 0 marks an unidentified track.
using FragmentAssignment = std::map<int, int>;

struct IdentityOutcome {
  FragmentAssignment assignment;
  bool seeding_failed = false;
  std::string diagnostics;
};

// Persistent individuals across memory flushes.
class IdentityEngine {
 public:
  explicit IdentityEngine(const IdentityParams& p) : p_(p) {}

  // Identify a batch of closed fragments against the individuals known so far.
  IdentityOutcome identify(const std::vector<Fragment>& frags);

  // Identify the closed tracks, condense identified evidence into the
  // individuals and free every processed track's features.
  void flush(std::vector<Track>& tracks);

  // Final pass over the remaining tracks; returns the full assignment with
  // individuals relabelled by first appearance.
  IdentityOutcome finalize(const std::vector<Track>& tracks);

  int flushes() const { return flushes_; }

 private:
  struct Condensed {
    std::int64_t first = 0, last = 0;
    Point2d start, end;
    int track_id = 0;
  };
  struct Individual {
    std::vector<Condensed> condensed;  // flushed members, one per track
    FeatureStore evidence{500};        // merged samples of flushed members
  };

  IdentityParams p_;
  std::vector<Individual> individuals_;
  FragmentAssignment settled_;
  int flushes_ = 0;
  bool seeded_ = false;
  std::string diag_;
};

// One-shot identification without flushes.
IdentityOutcome identify_fragments(const std::vector<Track>& tracks, const IdentityParams& p);

}  // namespace arenatrack
