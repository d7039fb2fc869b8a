#pragma once

// JSON documents: groups, polygons of groups, quotient maps and
// representation files. Parse errors are invalid_input and name the JSON
// path of the offending value.

#include <json.hpp>
#include <string>

#include "hypoly/group_core.hpp"
#include "hypoly/polygon_complex.hpp"
#include "hypoly/representation.hpp"

namespace hypoly {

using Json = nlohmann::ordered_json;

/// {"type":"table","order":m,"mult":[[...]]} or {"type":"cyclic","order":t}.
FiniteGroup group_from_json(const Json& j, const std::string& path = "");
Json group_to_json(const FiniteGroup& g);

/// {"type":"cyclic-graph-product","orders":[...]} or
/// {"type":"graph-product","factors":[group, ...]}.
GraphProductSpec graph_product_from_json(const Json& j, const std::string& path = "");

/// Graph-product shorthand, or the general form
/// {"n","vertexGroups","edgeGroups","faceGroup","maps":{"edgeToVertex","faceToEdge"}}.
PolygonOfGroups polygon_from_json(const Json& j, const std::string& path = "");
Json polygon_to_json(const PolygonOfGroups& poly);

/// {"target":group,"vertexImages":[[...]...]} or, for graph products,
/// {"target":group,"factorImages":[[...]...]}.
GroupHom quotient_from_json(const Json& j, const PolygonOfGroups& poly,
                            const std::string& path = "");
Json quotient_to_json(const GroupHom& vertex_hom);

Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j, Index rows, Index cols, const std::string& path);
Json vector_to_json(const Eigen::VectorXd& v);

/// Representation file. `extra` members (seed, config hash, tolerances)
/// are appended after the standard fields.
Json representation_to_json(const Representation& rep, const Json& extra = Json::object());
Representation representation_from_json(const Json& j);

Json read_json_file(const std::string& path);

}  // namespace hypoly
