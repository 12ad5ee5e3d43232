#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyforge/apls.hpp"
#include "polyforge/geometry.hpp"
#include "polyforge/vertex.hpp"

namespace polyforge {

/// GeoJSON serialization. Coordinates are pixel values (y down, no CRS
/// member) written with three decimal places; keys come out sorted, so
/// write-read-write round-trips byte-identically. The grid size travels
/// in a top-level "grid_size" member.

/// One Polygon feature per polygon; rings are closed per RFC 7946.
/// When given, dropped_rings[i] is written as the feature's
/// "dropped_rings" property (polygonize output bookkeeping).
std::string polygonset_to_geojson(const PolygonSet& set,
                                  const std::vector<int>* dropped_rings = nullptr);

/// Accepts Polygon and MultiPolygon features; ring orientation is
/// normalized on read. Throws std::invalid_argument on malformed input.
PolygonSet polygonset_from_geojson(const std::string& text);

/// Point features with a "score" property.
std::string vertexset_to_geojson(const VertexSet& set);
VertexSet vertexset_from_geojson(const std::string& text);

/// LineString features with a "length" property; control nodes become
/// Point features with "control": true.
std::string roadgraph_to_geojson(const RoadGraph& graph);

/// Collects polygon vertices from a polygon or point GeoJSON file: point
/// features pass through, polygon features contribute their ring
/// vertices with score 1.
VertexSet vertices_from_geojson(const std::string& text);

/// Atomic text-file helpers (temp file + rename on write).
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace polyforge
