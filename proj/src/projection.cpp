#include "torivec/projection.h"

#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "torivec/ioutil.h"
#include "torivec/rng.h"

namespace torivec {

namespace {

constexpr double kPowerTolerance = 1e-10;
constexpr int kPowerMaxIters = 10000;

// Dominant eigenpair of `cov` by power iteration, re-orthogonalized against
// `previous` (Gram-Schmidt) each pass. A vanishing image means the remaining
// spectrum is zero; the caller decides whether that is an error.
std::pair<double, std::vector<double>> power_iteration(const std::vector<double>& cov, int dim,
                                                       const std::vector<double>* previous) {
  Rng rng(derive_seed(0x70726f6a, "pca-power"));  // fixed stream: deterministic output
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;

  std::vector<double> next(static_cast<std::size_t>(dim));
  for (int iter = 0; iter < kPowerMaxIters; ++iter) {
    for (int i = 0; i < dim; ++i) {
      double acc = 0.0;
      const double* row = cov.data() + static_cast<std::size_t>(i) * dim;
      for (int j = 0; j < dim; ++j) acc += row[j] * v[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(i)] = acc;
    }
    if (previous != nullptr) {
      double dot = 0.0;
      for (int j = 0; j < dim; ++j) dot += next[static_cast<std::size_t>(j)] * (*previous)[static_cast<std::size_t>(j)];
      for (int j = 0; j < dim; ++j) next[static_cast<std::size_t>(j)] -= dot * (*previous)[static_cast<std::size_t>(j)];
    }
    double image_norm = 0.0;
    for (double x : next) image_norm += x * x;
    image_norm = std::sqrt(image_norm);
    if (image_norm < 1e-300) return {0.0, v};

    double delta = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double nj = next[static_cast<std::size_t>(j)] / image_norm;
      delta += (nj - v[static_cast<std::size_t>(j)]) * (nj - v[static_cast<std::size_t>(j)]);
      v[static_cast<std::size_t>(j)] = nj;
    }
    if (std::sqrt(delta) < kPowerTolerance) break;
  }

  double lambda = 0.0;  // Rayleigh quotient with the unit-norm result
  for (int i = 0; i < dim; ++i) {
    double acc = 0.0;
    const double* row = cov.data() + static_cast<std::size_t>(i) * dim;
    for (int j = 0; j < dim; ++j) acc += row[j] * v[static_cast<std::size_t>(j)];
    lambda += v[static_cast<std::size_t>(i)] * acc;
  }
  return {lambda, v};
}

void apply_sign_convention(std::vector<double>& v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  }
  if (v[arg] < 0.0) {
    for (double& x : v) x = -x;
  }
}

}  // namespace

Projection2D pca_2d(const std::vector<Embedding>& embeddings) {
  const int n = static_cast<int>(embeddings.size());
  if (n < 3) throw std::invalid_argument("pca_2d: needs at least 3 embeddings");
  const int dim = static_cast<int>(embeddings.front().vector.size());
  if (dim < 2) throw std::invalid_argument("pca_2d: needs dimension >= 2");
  for (const Embedding& e : embeddings) {
    if (static_cast<int>(e.vector.size()) != dim) {
      throw std::invalid_argument("pca_2d: ragged embedding dimensions");
    }
  }

  std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
  for (const Embedding& e : embeddings) {
    for (int j = 0; j < dim; ++j) mean[static_cast<std::size_t>(j)] += e.vector[static_cast<std::size_t>(j)];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  std::vector<double> centered(static_cast<std::size_t>(n) * dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) {
      centered[static_cast<std::size_t>(i) * dim + j] =
          static_cast<double>(embeddings[static_cast<std::size_t>(i)].vector[static_cast<std::size_t>(j)]) -
          mean[static_cast<std::size_t>(j)];
    }
  }

  // Sample covariance, 1/(n-1).
  std::vector<double> cov(static_cast<std::size_t>(dim) * dim, 0.0);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += centered[static_cast<std::size_t>(i) * dim + a] *
               centered[static_cast<std::size_t>(i) * dim + b];
      }
      cov[static_cast<std::size_t>(a) * dim + b] = acc / static_cast<double>(n - 1);
    }
  }
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < a; ++b) {
      cov[static_cast<std::size_t>(a) * dim + b] = cov[static_cast<std::size_t>(b) * dim + a];
    }
  }

  auto [lambda1, v1] = power_iteration(cov, dim, nullptr);
  if (lambda1 <= 0.0) {
    throw std::runtime_error("pca_2d: degenerate input (all points identical)");
  }
  apply_sign_convention(v1);

  // Deflate and find the runner-up.
  std::vector<double> deflated = cov;
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      deflated[static_cast<std::size_t>(a) * dim + b] -=
          lambda1 * v1[static_cast<std::size_t>(a)] * v1[static_cast<std::size_t>(b)];
    }
  }
  auto [lambda2, v2] = power_iteration(deflated, dim, &v1);
  if (lambda2 < 0.0) lambda2 = 0.0;  // deflation round-off
  apply_sign_convention(v2);

  Projection2D out;
  out.explained_variance = {lambda1, lambda2};
  out.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ProjectedPoint p;
    p.song_id = embeddings[static_cast<std::size_t>(i)].song_id;
    for (int j = 0; j < dim; ++j) {
      p.x += centered[static_cast<std::size_t>(i) * dim + j] * v1[static_cast<std::size_t>(j)];
      p.y += centered[static_cast<std::size_t>(i) * dim + j] * v2[static_cast<std::size_t>(j)];
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

namespace {

const SongRecord& record_for(const std::map<std::string, const SongRecord*>& by_id,
                             const std::string& song_id) {
  auto it = by_id.find(song_id);
  if (it == by_id.end()) {
    throw std::runtime_error("projection: song " + song_id + " missing from manifest");
  }
  return *it->second;
}

std::string point_label(const SongRecord& rec) {
  if (rec.tori_label.has_value()) return *rec.tori_label;
  if (!rec.region.empty()) return rec.region;
  return "unlabeled";
}

std::map<std::string, const SongRecord*> index_manifest(const std::vector<SongRecord>& manifest) {
  std::map<std::string, const SongRecord*> by_id;
  for (const SongRecord& rec : manifest) by_id[rec.song_id] = &rec;
  return by_id;
}

// Stable palette: tori labels get fixed colors, anything else (regions,
// "unlabeled") cycles a categorical palette by first-appearance order.
std::string color_for(const std::string& label, std::map<std::string, std::string>& assigned) {
  static const std::map<std::string, std::string> tori_colors = {
      {"gyung", "#4477aa"}, {"menari", "#ee6677"}, {"yukja", "#228833"}, {"others", "#aa3377"}};
  static const char* fallback[] = {"#66ccee", "#ccbb44", "#aa4499", "#44aa99", "#999933",
                                   "#cc6677", "#332288", "#ddcc77", "#117733", "#888888"};
  if (auto it = tori_colors.find(label); it != tori_colors.end()) return it->second;
  auto [it, inserted] = assigned.emplace(label, "");
  if (inserted) it->second = fallback[(assigned.size() - 1) % 10];
  return it->second;
}

}  // namespace

void write_projection_csv(const Projection2D& projection,
                          const std::vector<SongRecord>& manifest, const std::string& path) {
  auto by_id = index_manifest(manifest);
  std::string out = "song_id,x,y,label\n";
  for (const ProjectedPoint& p : projection.points) {
    const SongRecord& rec = record_for(by_id, p.song_id);
    out += p.song_id + "," + format_double(p.x) + "," + format_double(p.y) + "," +
           point_label(rec) + "\n";
  }
  write_text_file(path, out);
}

void export_report(const Projection2D& projection, const std::vector<SongRecord>& manifest,
                   const std::string& out_path) {
  auto by_id = index_manifest(manifest);
  std::map<std::string, std::string> palette_state;

  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  nlohmann::ordered_json legend = nlohmann::ordered_json::array();
  std::map<std::string, bool> legend_seen;
  for (const ProjectedPoint& p : projection.points) {
    const SongRecord& rec = record_for(by_id, p.song_id);
    const std::string label = point_label(rec);
    const std::string color = color_for(label, palette_state);
    nlohmann::ordered_json entry;
    entry["song_id"] = p.song_id;
    entry["x"] = p.x;
    entry["y"] = p.y;
    entry["label"] = label;
    entry["color"] = color;
    entry["title"] = rec.title;
    entry["region"] = rec.region;
    if (rec.audio_url.has_value()) entry["audio_url"] = *rec.audio_url;
    points.push_back(std::move(entry));
    if (!legend_seen[label]) {
      legend_seen[label] = true;
      nlohmann::ordered_json item;
      item["label"] = label;
      item["color"] = color;
      legend.push_back(std::move(item));
    }
  }

  nlohmann::ordered_json meta;
  meta["method"] = projection.method;
  meta["explained_variance"] = {projection.explained_variance[0],
                                projection.explained_variance[1]};
  meta["count"] = projection.points.size();

  std::string html;
  html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  html += "<title>torivec embedding map</title>\n<style>\n";
  html += "body{font-family:sans-serif;margin:1.5em;background:#fafafa;color:#222}\n";
  html += "#plot{background:#fff;border:1px solid #ccc}\n";
  html += "circle{stroke:#333;stroke-width:.5;cursor:pointer}\n";
  html += "circle:hover{stroke-width:2}\n";
  html += ".legend span{display:inline-block;margin-right:1.2em}\n";
  html += ".swatch{display:inline-block;width:.8em;height:.8em;border-radius:50%;";
  html += "margin-right:.3em;vertical-align:-.05em}\n";
  html += "#detail{margin-top:.8em;min-height:2.5em;font-size:.9em}\n";
  html += "</style>\n</head>\n<body>\n<h1>torivec embedding map</h1>\n";
  html += "<p>2D projection (" + projection.method + "); explained variance " +
          format_double(projection.explained_variance[0]) + " / " +
          format_double(projection.explained_variance[1]) + ".</p>\n";
  html += "<svg id=\"plot\" width=\"720\" height=\"540\"></svg>\n";
  html += "<div class=\"legend\" id=\"legend\"></div>\n<div id=\"detail\">";
  html += "Hover a point for details; click to open its recording when linked.</div>\n";
  html += "<script type=\"application/json\" id=\"meta\">" + meta.dump() + "</script>\n";
  html += "<script type=\"application/json\" id=\"legend-data\">" + legend.dump() + "</script>\n";
  html += "<script type=\"application/json\" id=\"points\">" + points.dump() + "</script>\n";
  html += R"HTML(<script>
const pts = JSON.parse(document.getElementById("points").textContent);
const legendData = JSON.parse(document.getElementById("legend-data").textContent);
const svg = document.getElementById("plot");
const W = 720, H = 540, pad = 30;
const xs = pts.map(p => p.x), ys = pts.map(p => p.y);
const xmin = Math.min(...xs), xmax = Math.max(...xs);
const ymin = Math.min(...ys), ymax = Math.max(...ys);
const sx = v => pad + (xmax === xmin ? 0.5 : (v - xmin) / (xmax - xmin)) * (W - 2 * pad);
const sy = v => H - pad - (ymax === ymin ? 0.5 : (v - ymin) / (ymax - ymin)) * (H - 2 * pad);
const detail = document.getElementById("detail");
for (const p of pts) {
  const c = document.createElementNS("http://www.w3.org/2000/svg", "circle");
  c.setAttribute("cx", sx(p.x).toFixed(2));
  c.setAttribute("cy", sy(p.y).toFixed(2));
  c.setAttribute("r", 5);
  c.setAttribute("fill", p.color);
  c.addEventListener("mouseenter", () => {
    detail.textContent = p.song_id + " - " + (p.title || "untitled") + " [" + p.label +
      ", region: " + p.region + "]" + (p.audio_url ? " (click to play)" : "");
  });
  if (p.audio_url) c.addEventListener("click", () => window.open(p.audio_url, "_blank"));
  svg.appendChild(c);
}
const legend = document.getElementById("legend");
for (const item of legendData) {
  const s = document.createElement("span");
  const sw = document.createElement("i");
  sw.className = "swatch";
  sw.style.background = item.color;
  s.appendChild(sw);
  s.appendChild(document.createTextNode(item.label));
  legend.appendChild(s);
}
</script>
</body>
</html>
)HTML";
  write_text_file(out_path, html);
}

}  // namespace torivec
