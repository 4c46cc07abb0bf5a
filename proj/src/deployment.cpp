#include "wsn/deployment.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "wsn/errors.hpp"
#include "wsn/rng.hpp"

namespace wsn {

const char* to_string(DeploymentKind k) {
  return k == DeploymentKind::Random ? "random" : "grid";
}

DeploymentKind deployment_kind_from_string(const std::string& s) {
  if (s == "random") return DeploymentKind::Random;
  if (s == "grid") return DeploymentKind::Grid;
  throw ConfigError("unknown deployment kind: '" + s + "'");
}

const char* to_string(GatewayPlacement g) {
  return g == GatewayPlacement::Corner ? "corner" : "center";
}

GatewayPlacement gateway_placement_from_string(const std::string& s) {
  if (s == "corner") return GatewayPlacement::Corner;
  if (s == "center") return GatewayPlacement::Center;
  throw ConfigError("unknown gateway placement: '" + s + "'");
}

namespace {

void check_count_and_area(std::size_t count, const Area& area) {
  if (count < 2) throw ConfigError("deployment needs at least 2 nodes");
  if (!(area.width_cm > 0.0) || !(area.height_cm > 0.0))
    throw ConfigError("deployment area must have positive extent");
}

Position gateway_position(const Area& area, GatewayPlacement g) {
  if (g == GatewayPlacement::Center)
    return {area.width_cm / 2.0, area.height_cm / 2.0};
  return {0.0, 0.0};
}

}  // namespace

Deployment deploy_random(std::size_t count, const Area& area,
                         std::uint64_t seed, GatewayPlacement gateway) {
  check_count_and_area(count, area);
  Deployment d;
  d.kind = DeploymentKind::Random;
  d.area = area;
  d.seed = seed;
  d.positions.resize(count);
  d.positions[kGatewayId] = gateway_position(area, gateway);
  Rng rng(seed);
  for (std::size_t i = 1; i < count; ++i) {
    const double x = rng.unit() * area.width_cm;
    const double y = rng.unit() * area.height_cm;
    d.positions[i] = {x, y};
  }
  return d;
}

Deployment deploy_grid(std::size_t count, const Area& area,
                       GatewayPlacement gateway) {
  check_count_and_area(count, area);

  // Factor pair rows x cols = count whose cell comes closest to square.
  std::size_t best_rows = 1;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t rows = 1; rows <= count; ++rows) {
    if (count % rows != 0) continue;
    const std::size_t cols = count / rows;
    const double score =
        std::fabs(area.width_cm / cols - area.height_cm / rows);
    if (score < best_score) {
      best_score = score;
      best_rows = rows;
    }
  }
  const std::size_t rows = best_rows;
  const std::size_t cols = count / rows;
  const double sx = area.width_cm / cols;
  const double sy = area.height_cm / rows;

  Deployment d;
  d.kind = DeploymentKind::Grid;
  d.area = area;
  d.positions.reserve(count);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      d.positions.push_back({(c + 0.5) * sx, (r + 0.5) * sy});

  // The gateway id must be 0: swap the node nearest the anchor into slot 0.
  const Position anchor = gateway_position(area, gateway);
  std::size_t nearest = 0;
  double nearest_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const double dist = distance_cm(d.positions[i], anchor);
    if (dist < nearest_d) {
      nearest_d = dist;
      nearest = i;
    }
  }
  std::swap(d.positions[0], d.positions[nearest]);
  return d;
}

void write_placement(std::ostream& out, const Deployment& d) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "kind=%s area=%.17gx%.17g count=%zu seed=%llu",
                to_string(d.kind), d.area.width_cm, d.area.height_cm,
                d.positions.size(),
                static_cast<unsigned long long>(d.seed));
  out << buf << "\n";
  for (std::size_t i = 0; i < d.positions.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g", i, d.positions[i].x_cm,
                  d.positions[i].y_cm);
    out << buf << "\n";
  }
}

Deployment read_placement(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw IoError("placement file: empty input");

  Deployment d;
  double w = 0, h = 0;
  unsigned long long seed = 0, count = 0;
  char kind[32] = {0};
  if (std::sscanf(header.c_str(), "kind=%31s area=%lfx%lf count=%llu seed=%llu",
                  kind, &w, &h, &count, &seed) != 5)
    throw IoError("placement file: malformed header: " + header);
  d.kind = deployment_kind_from_string(kind);
  d.area = {w, h};
  d.seed = seed;

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t id = 0;
    double x = 0, y = 0;
    if (std::sscanf(line.c_str(), "%zu %lf %lf", &id, &x, &y) != 3)
      throw IoError("placement file: malformed node line: " + line);
    if (id != d.positions.size())
      throw IoError("placement file: node ids must be consecutive from 0");
    d.positions.push_back({x, y});
  }
  if (d.positions.size() != count)
    throw IoError("placement file: header count does not match node lines");
  return d;
}

}  // namespace wsn
