#pragma once

#include <array>
#include <string>
#include <vector>

#include "torivec/contour.h"
#include "torivec/encoder.h"

namespace torivec {

struct ProjectedPoint {
  std::string song_id;
  double x = 0.0, y = 0.0;
};

struct Projection2D {
  std::vector<ProjectedPoint> points;
  std::string method = "pca";
  std::array<double, 2> explained_variance = {0.0, 0.0};  // sorted descending
};

// Mean-center, take the top-2 covariance eigenvectors by power iteration with
// deflation (tol 1e-10, <= 10k iterations), project. Sign convention: the
// largest-magnitude loading of each component is positive. Throws when all
// points coincide.
Projection2D pca_2d(const std::vector<Embedding>& embeddings);

// CSV `song_id,x,y,label`; label falls back to region, then "unlabeled".
void write_projection_csv(const Projection2D& projection,
                          const std::vector<SongRecord>& manifest, const std::string& path);

// One self-contained HTML file: inline JSON data, tori-label colors with
// region fallback, title/region tooltips and audio_url links. Byte-identical
// across reruns on identical inputs.
void export_report(const Projection2D& projection, const std::vector<SongRecord>& manifest,
                   const std::string& out_path);

}  // namespace torivec
