#pragma once

#include "hyperot/dmk.hpp"
#include "hyperot/graph.hpp"
#include "hyperot/mesh.hpp"

namespace hyperot {

/// Support network of a conductivity field.
///
/// A triangle is active when mu_T >= threshold_ratio * max mu. The graph
/// keeps every mesh vertex and mesh edge belonging to an active triangle;
/// node ids are mesh vertex indices so graphs align across time steps.
/// Throws ConfigError when mu has no positive entry.
SpatialGraph graph_from_field(const Mesh& mesh, const ConductivityField& mu, double threshold_ratio);

/// All edges of `g` plus all of its 3-cliques.
Hypergraph hypergraph_from_graph(const SpatialGraph& g);

/// Clique expansion: every pair contained in some hyperedge.
SpatialGraph skeleton(const Hypergraph& h);

}  // namespace hyperot
