#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qgraph/category.hpp"
#include "qgraph/channels.hpp"

namespace qgraph::io {

using Json = nlohmann::json;

// Malformed input; line and column are 1-based, 0 when unknown.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& source, Index line, Index column, const std::string& message);
    Index line() const { return line_; }
    Index column() const { return column_; }

private:
    Index line_;
    Index column_;
};

// Sorted keys, two-space indentation, doubles with 17 significant digits.
std::string to_canonical_json(const Json& j);
Json parse_json(const std::string& text, const std::string& source = "<input>");
std::string read_file(const std::string& path);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);
// {"shape": [r, c], "data": [[[re, im], ...], ...]}; plain nested rows are also read.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

Json algebra_to_json(const MultiMatrixAlgebra& m);
MultiMatrixAlgebra algebra_from_json(const Json& j);
// Canonical basis, so equal subspaces serialize identically.
Json subspace_to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j, double tol = kDefaultTol);
Json quantum_graph_to_json(const QuantumGraph& g);
QuantumGraph quantum_graph_from_json(const Json& j, double tol = kDefaultTol);
Json classical_graph_to_json(const ClassicalGraph& g);
ClassicalGraph classical_graph_from_json(const Json& j);
// Per block pair the projection Q Q^†; independent of the stored basis.
Json ideal_to_json(const AnnihilatorIdeal& ideal);
Json star_hom_to_json(const StarHom& h);
StarHom star_hom_from_json(const Json& j, double tol = kDefaultTol);
Json kraus_to_json(const KrausForm& k);

// "vertices: a b c" then one "v w" edge per line; '#' starts a comment.
ClassicalGraph parse_edge_list(const std::string& text, const std::string& source = "<input>");
std::string format_edge_list(const ClassicalGraph& g);

// Rows are outputs, columns inputs; '#' comments and blank lines are skipped.
ClassicalChannel parse_channel_csv(const std::string& text, const std::string& source = "<input>");
Json classical_channel_to_json(const ClassicalChannel& n);
ClassicalChannel classical_channel_from_json(const Json& j);
Json quantum_channel_to_json(const QuantumChannel& q);
QuantumChannel quantum_channel_from_json(const Json& j);

struct LoadedGraph {
    std::optional<ClassicalGraph> classical;
    QuantumGraph quantum;
};
// Edge list or JSON (classical or quantum).
LoadedGraph load_graph(const std::string& path, double tol = kDefaultTol);
LoadedGraph graph_from_json(const Json& j, double tol = kDefaultTol);

// A star hom, or a vertex map f : V_2 → V_1 given by images (indices or labels of g1).
struct LoadedHom {
    StarHom hom;
    std::optional<VertexMap> vertex_map;
};
LoadedHom hom_from_json(const Json& j, const LoadedGraph* g1, const LoadedGraph* g2,
                        double tol = kDefaultTol);
LoadedHom load_hom(const std::string& path, const LoadedGraph* g1, const LoadedGraph* g2,
                   double tol = kDefaultTol);

// Objects are inline graphs or paths relative to the diagram file.
struct LoadedDiagram {
    std::vector<LoadedGraph> objects;
    QGraphDiagram diagram;
    bool is_chain = false;
};
LoadedDiagram load_diagram(const std::string& path, double tol = kDefaultTol);

using LoadedChannel = std::variant<ClassicalChannel, QuantumChannel>;
struct ChannelFile {
    LoadedChannel channel;
    std::optional<MultiMatrixAlgebra> algebra;  // for quantum channels
};
// CSV or JSON.
ChannelFile load_channel(const std::string& path);

}  // namespace qgraph::io
