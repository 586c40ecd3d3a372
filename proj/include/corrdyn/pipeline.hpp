#pragma once

// End-to-end similarity run at a Misiurewicz parameter: every magnification
// level is re-rendered on its own window, boundary clouds are extracted and
// both curves are computed.

#include <optional>

#include "corrdyn/similarity.hpp"

namespace corrdyn {

struct SimilarityJob {
  MisiurewiczReport report;
  int k_max = 4;                     // number of distances per curve
  int pixels = 1024;                 // per-level window is pixels x pixels
  double r = 0.0;                    // 0 selects default_similarity_radius about a
  int base_depth = 0;                // 0 selects similarity_base_depth
  std::optional<Complex> mu_override;
  RenderOptions render;
  HausdorffOptions hausdorff;
};

struct SimilarityResult {
  SimilarityCurve self_curve;
  SimilarityCurve julia_vs_multibrot;
  double r = 0.0;
  int base_depth = 0;
  Complex mu;
};

// Escape depth of the level-0 Julia render.  Sets at a Misiurewicz parameter
// have empty interior, so a finite depth is what gives them pixel width: the
// depth is chosen so the surviving neighbourhood is about one pixel wide.
// Level k uses base + k * period (one more step in the parameter plane).
int similarity_base_depth(const MisiurewiczReport& report, double r, int pixels);

SimilarityResult run_similarity(const SimilarityJob& job);

}  // namespace corrdyn
