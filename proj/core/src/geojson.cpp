#include "polyforge/geojson.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace polyforge {

namespace {

using nlohmann::json;

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

json ring_to_coords(const Ring& ring) {
  json coords = json::array();
  for (const Point& p : ring.points()) {
    coords.push_back({round3(p.x), round3(p.y)});
  }
  const Point& first = ring.points().front();
  coords.push_back({round3(first.x), round3(first.y)});  // close per RFC 7946
  return coords;
}

Ring ring_from_coords(const json& coords) {
  if (!coords.is_array() || coords.size() < 3) {
    throw std::invalid_argument("GeoJSON ring needs at least 3 positions");
  }
  std::vector<Point> pts;
  pts.reserve(coords.size());
  for (const auto& c : coords) {
    if (!c.is_array() || c.size() < 2) {
      throw std::invalid_argument("GeoJSON position must be [x, y]");
    }
    pts.push_back(Point{c[0].get<double>(), c[1].get<double>()});
  }
  return Ring(std::move(pts));  // the closing duplicate is dropped by Ring
}

PolygonWithHoles polygon_from_rings(const json& rings) {
  if (!rings.is_array() || rings.empty()) {
    throw std::invalid_argument("GeoJSON Polygon needs at least one ring");
  }
  Ring exterior = ring_from_coords(rings[0]);
  std::vector<Ring> holes;
  for (std::size_t i = 1; i < rings.size(); ++i) {
    holes.push_back(ring_from_coords(rings[i]));
  }
  return PolygonWithHoles(std::move(exterior), std::move(holes));
}

const json& require(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw std::invalid_argument(std::string("GeoJSON missing \"") + key + "\"");
  }
  return *it;
}

json parse(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw std::invalid_argument("invalid JSON");
  if (!doc.is_object() || require(doc, "type") != "FeatureCollection") {
    throw std::invalid_argument("expected a GeoJSON FeatureCollection");
  }
  return doc;
}

}  // namespace

std::string polygonset_to_geojson(const PolygonSet& set, const std::vector<int>* dropped_rings) {
  json features = json::array();
  for (std::size_t i = 0; i < set.polygons.size(); ++i) {
    const PolygonWithHoles& poly = set.polygons[i];
    json rings = json::array();
    rings.push_back(ring_to_coords(poly.exterior));
    for (const Ring& hole : poly.holes) rings.push_back(ring_to_coords(hole));
    long vertices = static_cast<long>(poly.exterior.size());
    for (const Ring& hole : poly.holes) vertices += static_cast<long>(hole.size());
    json props = {{"num_vertices", vertices}};
    if (dropped_rings && i < dropped_rings->size()) {
      props["dropped_rings"] = (*dropped_rings)[i];
    }
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", rings}}},
                        {"properties", props}});
  }
  json doc = {{"type", "FeatureCollection"},
              {"features", features},
              {"grid_size", {set.width, set.height}}};
  return doc.dump(2) + "\n";
}

PolygonSet polygonset_from_geojson(const std::string& text) {
  const json doc = parse(text);
  PolygonSet set;
  if (doc.contains("grid_size") && doc["grid_size"].is_array() && doc["grid_size"].size() == 2) {
    set.width = doc["grid_size"][0].get<int>();
    set.height = doc["grid_size"][1].get<int>();
  }
  for (const auto& feature : require(doc, "features")) {
    const json& geom = require(feature, "geometry");
    const std::string type = require(geom, "type").get<std::string>();
    const json& coords = require(geom, "coordinates");
    if (type == "Polygon") {
      set.polygons.push_back(polygon_from_rings(coords));
    } else if (type == "MultiPolygon") {
      for (const auto& rings : coords) {
        set.polygons.push_back(polygon_from_rings(rings));
      }
    } else {
      throw std::invalid_argument("unsupported geometry type: " + type);
    }
  }
  return set;
}

std::string vertexset_to_geojson(const VertexSet& set) {
  json features = json::array();
  for (const ScoredVertex& v : set.vertices) {
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "Point"}, {"coordinates", {round3(v.position.x), round3(v.position.y)}}}},
         {"properties", {{"score", round3(v.score)}}}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(2) + "\n";
}

VertexSet vertexset_from_geojson(const std::string& text) {
  const json doc = parse(text);
  VertexSet set;
  for (const auto& feature : require(doc, "features")) {
    const json& geom = require(feature, "geometry");
    if (require(geom, "type") != "Point") {
      throw std::invalid_argument("expected Point features");
    }
    const json& c = require(geom, "coordinates");
    double score = 1.0;
    if (feature.contains("properties") && feature["properties"].is_object() &&
        feature["properties"].contains("score")) {
      score = feature["properties"]["score"].get<double>();
    }
    set.vertices.push_back({Point{c[0].get<double>(), c[1].get<double>()}, score});
  }
  return set;
}

std::string roadgraph_to_geojson(const RoadGraph& graph) {
  json features = json::array();
  for (const GraphEdge& e : graph.edges) {
    const Point& a = graph.nodes[e.a];
    const Point& b = graph.nodes[e.b];
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "LineString"},
           {"coordinates",
            {{round3(a.x), round3(a.y)}, {round3(b.x), round3(b.y)}}}}},
         {"properties", {{"length", round3(e.length)}}}});
  }
  for (int c : graph.control) {
    const Point& p = graph.nodes[c];
    features.push_back(
        {{"type", "Feature"},
         {"geometry", {{"type", "Point"}, {"coordinates", {round3(p.x), round3(p.y)}}}},
         {"properties", {{"control", true}}}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(2) + "\n";
}

VertexSet vertices_from_geojson(const std::string& text) {
  const json doc = parse(text);
  VertexSet set;
  for (const auto& feature : require(doc, "features")) {
    const json& geom = require(feature, "geometry");
    const std::string type = require(geom, "type").get<std::string>();
    if (type == "Point") {
      const json& c = require(geom, "coordinates");
      double score = 1.0;
      if (feature.contains("properties") && feature["properties"].is_object() &&
          feature["properties"].contains("score")) {
        score = feature["properties"]["score"].get<double>();
      }
      set.vertices.push_back({Point{c[0].get<double>(), c[1].get<double>()}, score});
    } else if (type == "Polygon" || type == "MultiPolygon") {
      const json& coords = require(geom, "coordinates");
      auto add_rings = [&set](const json& rings) {
        for (const auto& ring : rings) {
          const Ring parsed = ring_from_coords(ring);
          for (const Point& p : parsed.points()) set.vertices.push_back({p, 1.0});
        }
      };
      if (type == "Polygon") {
        add_rings(coords);
      } else {
        for (const auto& rings : coords) add_rings(rings);
      }
    } else {
      throw std::invalid_argument("unsupported geometry type: " + type);
    }
  }
  return set;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create file: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("failed to write: " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace polyforge
