#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wsn/types.hpp"

namespace wsn {

enum class DeploymentKind { Random, Grid };

const char* to_string(DeploymentKind k);
DeploymentKind deployment_kind_from_string(const std::string& s);

enum class GatewayPlacement { Corner, Center };

const char* to_string(GatewayPlacement g);
GatewayPlacement gateway_placement_from_string(const std::string& s);

/// Node placement over a sensing area. positions[id] is the location of
/// node id; node 0 is the gateway.
struct Deployment {
  DeploymentKind kind = DeploymentKind::Random;
  std::vector<Position> positions;
  Area area;
  std::uint64_t seed = 0;  // meaningful for Random only

  std::size_t count() const { return positions.size(); }
};

/// Uniform placement from the pinned generator; the gateway sits at the
/// origin corner (or area center). Identical (count, area, seed,
/// placement) always reproduce the identical byte-for-byte positions.
Deployment deploy_random(std::size_t count, const Area& area, std::uint64_t seed,
                         GatewayPlacement gateway = GatewayPlacement::Corner);

/// rows x cols = count with the factor pair minimizing
/// |width/cols - height/rows|; nodes at cell centers, row by row. The
/// gateway is the node nearest the origin corner (or area center).
Deployment deploy_grid(std::size_t count, const Area& area,
                       GatewayPlacement gateway = GatewayPlacement::Corner);

/// Placement file: a header line `kind=<k> area=<w>x<h> count=<n> seed=<s>`
/// followed by one `id x_cm y_cm` line per node.
void write_placement(std::ostream& out, const Deployment& d);
Deployment read_placement(std::istream& in);

}  // namespace wsn
