#include "torivec/projection.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "test_util.h"
#include "torivec/ioutil.h"
#include "torivec/rng.h"

using namespace torivec;

namespace {

std::vector<Embedding> make_embeddings(const std::vector<std::vector<double>>& rows) {
  std::vector<Embedding> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Embedding e;
    e.song_id = "s" + std::to_string(i);
    for (double v : rows[i]) e.vector.push_back(static_cast<float>(v));
    out.push_back(e);
  }
  return out;
}

// Points on a fixed 2D plane inside a higher-dimensional space.
std::vector<std::vector<double>> planar_cloud(int n, int dim, Rng& rng,
                                              std::vector<std::vector<double>>* coords) {
  std::vector<double> u(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  // orthonormal pair spanning the plane
  u[0] = 0.6;
  u[3] = 0.8;
  v[1] = 1.0;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < n; ++i) {
    const double a = rng.uniform(-4.0, 4.0);
    const double b = rng.uniform(-1.5, 1.5);
    std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
    for (int d = 0; d < dim; ++d) {
      p[static_cast<std::size_t>(d)] =
          a * u[static_cast<std::size_t>(d)] + b * v[static_cast<std::size_t>(d)] + 0.25;
    }
    rows.push_back(p);
    if (coords != nullptr) coords->push_back({a, b});
  }
  return rows;
}

double dist2(const ProjectedPoint& a, const ProjectedPoint& b) {
  return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
}

SongRecord record(const std::string& id, const char* tori, const char* region = "jeju",
                  const char* audio = nullptr) {
  SongRecord r;
  r.song_id = id;
  r.contour_path = id + ".csv";
  r.title = "Title of " + id;
  r.region = region;
  if (tori != nullptr) r.tori_label = tori;
  if (audio != nullptr) r.audio_url = audio;
  return r;
}

}  // namespace

TEST_CASE("pca recovers an embedded plane exactly") {
  Rng rng(2);
  std::vector<std::vector<double>> rows = planar_cloud(40, 7, rng, nullptr);
  std::vector<Embedding> embeddings = make_embeddings(rows);
  Projection2D proj = pca_2d(embeddings);
  REQUIRE(proj.points.size() == 40);
  CHECK(proj.method == "pca");
  CHECK(proj.explained_variance[0] >= proj.explained_variance[1]);
  CHECK(proj.explained_variance[1] >= 0.0);

  // centered pairwise distances live entirely in the plane, so the projection
  // must preserve them
  for (std::size_t i = 0; i < rows.size(); i += 7) {
    for (std::size_t j = i + 1; j < rows.size(); j += 5) {
      double want = 0.0;
      for (std::size_t d = 0; d < rows[i].size(); ++d) {
        const double delta =
            static_cast<double>(embeddings[i].vector[d]) - embeddings[j].vector[d];
        want += delta * delta;
      }
      CHECK(std::sqrt(dist2(proj.points[i], proj.points[j])) ==
            doctest::Approx(std::sqrt(want)).epsilon(1e-6));
    }
  }
}

TEST_CASE("pca explained variance is near-isotropic for a round cloud") {
  Rng rng(5);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 4000; ++i) {
    rows.push_back({rng.normal(), rng.normal()});
  }
  Projection2D proj = pca_2d(make_embeddings(rows));
  const double ratio = proj.explained_variance[1] / proj.explained_variance[0];
  CHECK(ratio > 0.85);
  CHECK(ratio <= 1.0);
}

TEST_CASE("pca is invariant under dataset duplication") {
  Rng rng(7);
  std::vector<std::vector<double>> rows = planar_cloud(25, 5, rng, nullptr);
  std::vector<std::vector<double>> doubled = rows;
  doubled.insert(doubled.end(), rows.begin(), rows.end());

  Projection2D once = pca_2d(make_embeddings(rows));
  Projection2D twice = pca_2d(make_embeddings(doubled));
  for (std::size_t i = 0; i < once.points.size(); ++i) {
    CHECK(twice.points[i].x == doctest::Approx(once.points[i].x).epsilon(1e-6));
    CHECK(twice.points[i].y == doctest::Approx(once.points[i].y).epsilon(1e-6));
  }
}

TEST_CASE("pca is invariant under row permutation") {
  Rng rng(11);
  std::vector<std::vector<double>> rows = planar_cloud(30, 6, rng, nullptr);
  std::vector<Embedding> base = make_embeddings(rows);
  std::vector<Embedding> permuted = base;
  Rng perm_rng(3);
  perm_rng.shuffle(permuted);

  Projection2D a = pca_2d(base);
  Projection2D b = pca_2d(permuted);
  // match points by song_id
  for (const ProjectedPoint& p : b.points) {
    auto it = std::find_if(a.points.begin(), a.points.end(),
                           [&](const ProjectedPoint& q) { return q.song_id == p.song_id; });
    REQUIRE(it != a.points.end());
    CHECK(p.x == doctest::Approx(it->x).epsilon(1e-7));
    CHECK(p.y == doctest::Approx(it->y).epsilon(1e-7));
  }
}

TEST_CASE("pca preserves distances under rigid rotation of the input") {
  Rng rng(13);
  std::vector<std::vector<double>> rows = planar_cloud(30, 4, rng, nullptr);
  // rotate in the (0,1) plane and the (2,3) plane
  const double c1 = std::cos(0.7), s1 = std::sin(0.7);
  const double c2 = std::cos(-1.2), s2 = std::sin(-1.2);
  std::vector<std::vector<double>> rotated;
  for (const auto& r : rows) {
    rotated.push_back({c1 * r[0] - s1 * r[1], s1 * r[0] + c1 * r[1],
                       c2 * r[2] - s2 * r[3], s2 * r[2] + c2 * r[3]});
  }
  Projection2D a = pca_2d(make_embeddings(rows));
  Projection2D b = pca_2d(make_embeddings(rotated));
  for (std::size_t i = 0; i < a.points.size(); i += 3) {
    for (std::size_t j = i + 1; j < a.points.size(); j += 4) {
      CHECK(std::sqrt(dist2(a.points[i], a.points[j])) ==
            doctest::Approx(std::sqrt(dist2(b.points[i], b.points[j]))).epsilon(1e-6));
    }
  }
  // eigenvalues agree only up to the power-iteration stopping tolerance
  CHECK(b.explained_variance[0] == doctest::Approx(a.explained_variance[0]).epsilon(1e-7));
  CHECK(b.explained_variance[1] == doctest::Approx(a.explained_variance[1]).epsilon(1e-7));
}

TEST_CASE("pca sign convention fixes each component") {
  Rng rng(17);
  std::vector<std::vector<double>> rows = planar_cloud(30, 5, rng, nullptr);
  Projection2D a = pca_2d(make_embeddings(rows));
  // negating the input flips candidate eigenvectors; the convention must undo it
  std::vector<std::vector<double>> negated;
  for (const auto& r : rows) {
    std::vector<double> n;
    for (double v : r) n.push_back(-v);
    negated.push_back(n);
  }
  Projection2D b = pca_2d(make_embeddings(negated));
  // centered data of `negated` is the exact negation: projections flip sign
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(b.points[i].x == doctest::Approx(-a.points[i].x).epsilon(1e-7));
    CHECK(b.points[i].y == doctest::Approx(-a.points[i].y).epsilon(1e-7));
  }
}

TEST_CASE("pca rejects degenerate input") {
  std::vector<std::vector<double>> same(5, std::vector<double>{1.0, 2.0, 3.0});
  CHECK_THROWS(pca_2d(make_embeddings(same)));

  std::vector<std::vector<double>> two(2, std::vector<double>{1.0, 2.0});
  CHECK_THROWS(pca_2d(make_embeddings(two)));  // fewer than 3 points

  std::vector<std::vector<double>> thin(5, std::vector<double>{1.0});
  CHECK_THROWS(pca_2d(make_embeddings(thin)));  // dimension < 2
}

TEST_CASE("pca is deterministic") {
  Rng rng(23);
  std::vector<std::vector<double>> rows = planar_cloud(20, 8, rng, nullptr);
  Projection2D a = pca_2d(make_embeddings(rows));
  Projection2D b = pca_2d(make_embeddings(rows));
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
  }
}

TEST_CASE("projection csv uses tori label, then region, then unlabeled") {
  Projection2D proj;
  proj.points = {{"a", 1.0, 2.0}, {"b", -0.5, 0.25}, {"c", 0.0, 3.5}};
  std::vector<SongRecord> manifest = {record("a", "menari"), record("b", nullptr, "gangwon"),
                                      record("c", nullptr, "")};
  const std::string dir = testutil::make_temp_dir("projection_csv");
  const std::string path = dir + "/proj.csv";
  write_projection_csv(proj, manifest, path);
  CHECK(read_text_file(path) ==
        "song_id,x,y,label\n"
        "a,1,2,menari\n"
        "b,-0.5,0.25,gangwon\n"
        "c,0,3.5,unlabeled\n");

  Projection2D stray = proj;
  stray.points.push_back({"zz", 0.0, 0.0});
  CHECK_THROWS_WITH_AS(write_projection_csv(stray, manifest, dir + "/bad.csv"),
                       doctest::Contains("zz"), std::runtime_error);
}

TEST_CASE("html report embeds every point and stays byte-identical") {
  Rng rng(29);
  std::vector<std::vector<double>> rows = planar_cloud(12, 4, rng, nullptr);
  Projection2D proj = pca_2d(make_embeddings(rows));
  std::vector<SongRecord> manifest;
  for (int i = 0; i < 12; ++i) {
    const std::string id = "s" + std::to_string(i);
    const char* tori = i % 2 == 0 ? "gyung" : "yukja";
    const char* audio = i == 3 ? "https://example.org/a3.mp3" : nullptr;
    manifest.push_back(record(id, tori, "jeju", audio));
  }
  const std::string dir = testutil::make_temp_dir("projection_html");
  const std::string path = dir + "/report.html";
  export_report(proj, manifest, path);
  const std::string html = read_text_file(path);

  // self-contained: no external fetches
  CHECK(html.find("<html") != std::string::npos);
  CHECK(html.find("http-equiv") == std::string::npos);
  CHECK(html.find("src=\"http") == std::string::npos);
  CHECK(html.find("href=\"http") == std::string::npos);

  // the inline data block carries one entry per point
  const std::string marker = "id=\"points\"";
  const auto block_at = html.find(marker);
  REQUIRE(block_at != std::string::npos);
  const auto start = html.find('>', block_at) + 1;
  const auto end = html.find("</script>", start);
  auto data = nlohmann::json::parse(html.substr(start, end - start));
  REQUIRE(data.is_array());
  CHECK(data.size() == 12);
  bool saw_audio = false;
  for (const auto& p : data) {
    CHECK(p.contains("song_id"));
    CHECK(p.contains("x"));
    CHECK(p.contains("y"));
    CHECK(p.contains("label"));
    CHECK(p.contains("title"));
    CHECK(p.contains("region"));
    if (p["song_id"] == "s3") {
      CHECK(p["audio_url"] == "https://example.org/a3.mp3");
      saw_audio = true;
    } else {
      CHECK_FALSE(p.contains("audio_url"));
    }
  }
  CHECK(saw_audio);

  // rerun: byte-identical
  export_report(proj, manifest, dir + "/report2.html");
  CHECK(read_text_file(dir + "/report2.html") == html);
}
