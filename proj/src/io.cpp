#include "qgraph/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qgraph/error.hpp"

namespace qgraph::io {

namespace {

std::string location(const std::string& source, Index line, Index column) {
    std::string s = source;
    if (line > 0) s += ":" + std::to_string(line);
    if (column > 0) s += ":" + std::to_string(column);
    return s;
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) throw ValidationError(std::string("expected an object with field '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(std::string("missing field '") + key + "'");
    return *it;
}

Index as_index(const Json& j, const char* what) {
    if (!j.is_number_integer()) throw ValidationError(std::string(what) + " must be an integer");
    return j.get<Index>();
}

double as_double(const Json& j, const char* what) {
    if (!j.is_number()) throw ValidationError(std::string(what) + " must be a number");
    return j.get<double>();
}

std::vector<Index> index_list(const Json& j, const char* what) {
    if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
    std::vector<Index> out;
    for (const auto& x : j) out.push_back(as_index(x, what));
    return out;
}

std::string kind_of(const Json& j) {
    if (!j.is_object()) throw ValidationError("expected a JSON object");
    auto it = j.find("kind");
    if (it == j.end() || !it->is_string()) throw ValidationError("missing field 'kind'");
    return it->get<std::string>();
}

// Unwraps CLI reports so that emitted files can be read back.
const Json& payload(const Json& j) {
    if (j.is_object() && j.contains("result") && !j.contains("kind")) return j["result"];
    return j;
}

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

bool inline_array(const Json& j) {
    for (const auto& x : j) {
        if (x.is_object()) return false;
        if (x.is_array())
            for (const auto& y : x)
                if (!is_scalar(y)) return false;
    }
    return true;
}

void write_scalar(std::string& out, const Json& j) {
    if (j.is_number_float()) {
        const double x = j.get<double>();
        if (!std::isfinite(x)) throw NumericalError("cannot serialize a non-finite number");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
        out += buf;
    } else {
        out += j.dump();
    }
}

void write(std::string& out, const Json& j, int indent) {
    const std::string pad(size_t(indent) * 2, ' ');
    const std::string inner(size_t(indent + 1) * 2, ' ');
    if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += inner + Json(it.key()).dump() + ": ";
            write(out, it.value(), indent + 1);
        }
        out += "\n" + pad + "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
        } else if (inline_array(j)) {
            out += "[";
            bool first = true;
            for (const auto& x : j) {
                if (!first) out += ", ";
                first = false;
                write(out, x, indent + 1);
            }
            out += "]";
        } else {
            out += "[\n";
            bool first = true;
            for (const auto& x : j) {
                if (!first) out += ",\n";
                first = false;
                out += inner;
                write(out, x, indent + 1);
            }
            out += "\n" + pad + "]";
        }
    } else {
        write_scalar(out, j);
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Token {
    std::string text;
    Index column;
};

std::vector<Token> tokens(const std::string& line, Index offset, const std::string& seps) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && seps.find(line[i]) != std::string::npos) ++i;
        if (i >= line.size()) break;
        const size_t start = i;
        while (i < line.size() && seps.find(line[i]) == std::string::npos) ++i;
        out.push_back({line.substr(start, i - start), Index(start) + offset + 1});
    }
    return out;
}

std::string strip_comment(const std::string& line) {
    const auto h = line.find('#');
    return h == std::string::npos ? line : line.substr(0, h);
}

bool looks_like_json(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        return t[0] == '{';
    }
    return false;
}

}  // namespace

ParseError::ParseError(const std::string& source, Index line, Index column, const std::string& message)
    : ValidationError(location(source, line, column) + ": " + message), line_(line), column_(column) {}

std::string to_canonical_json(const Json& j) {
    std::string out;
    write(out, j, 0);
    out += "\n";
    return out;
}

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        Index line = 1, col = 1;
        const size_t upto = std::min(text.size(), e.byte > 0 ? size_t(e.byte - 1) : size_t(0));
        for (size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = e.what();
        const auto pos = what.find("syntax error");
        throw ParseError(source, line, col, pos == std::string::npos ? what : what.substr(pos));
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Matrices and algebra objects

Json complex_to_json(Complex z) {
    auto clean = [](double x) { return std::abs(x) < 1e-15 ? 0.0 : x; };
    return Json::array({clean(z.real()), clean(z.imag())});
}

Complex complex_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ValidationError("complex entries are numbers or [re, im] pairs");
}

Json matrix_to_json(const CMatrix& m) {
    Json data = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        data.push_back(std::move(row));
    }
    return Json{{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const Json& j) {
    Index rows = -1, cols = -1;
    const Json* data = &j;
    if (j.is_object()) {
        const auto shape = index_list(field(j, "shape"), "shape");
        if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0)
            throw ValidationError("shape must be [rows, cols]");
        rows = shape[0];
        cols = shape[1];
        data = &field(j, "data");
    }
    if (!data->is_array()) throw ValidationError("matrix data must be an array of rows");
    if (rows < 0) rows = Index(data->size());
    if (Index(data->size()) != rows) throw ValidationError("matrix has the wrong number of rows");
    if (cols < 0) cols = rows == 0 ? 0 : Index((*data)[0].size());
    CMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = (*data)[size_t(r)];
        if (!row.is_array() || Index(row.size()) != cols)
            throw ValidationError("matrix row " + std::to_string(r) + " has the wrong length");
        for (Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[size_t(c)]);
    }
    if (!all_finite(m)) throw ValidationError("matrix has non-finite entries");
    return m;
}

Json algebra_to_json(const MultiMatrixAlgebra& m) {
    return Json{{"blocks", m.block_dims()}, {"multiplicities", m.multiplicities()}};
}

MultiMatrixAlgebra algebra_from_json(const Json& j) {
    const auto blocks = index_list(field(j, "blocks"), "blocks");
    std::vector<Index> mults(blocks.size(), 1);
    if (j.contains("multiplicities")) mults = index_list(j["multiplicities"], "multiplicities");
    return build_algebra(blocks, mults);
}

Json subspace_to_json(const Subspace& s) {
    const CMatrix q = canonical_basis(s.columns());
    Json basis = Json::array();
    for (Index k = 0; k < q.cols(); ++k) basis.push_back(matrix_to_json(unflatten(q.col(k), s.rows(), s.cols())));
    return Json{{"shape", {s.rows(), s.cols()}}, {"dim", s.dim()}, {"basis", std::move(basis)}};
}

Subspace subspace_from_json(const Json& j, double tol) {
    const auto shape = index_list(field(j, "shape"), "shape");
    if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0) throw ValidationError("shape must be [rows, cols]");
    const Json& basis = field(j, "basis");
    if (!basis.is_array()) throw ValidationError("basis must be an array of matrices");
    CMatrix cols(shape[0] * shape[1], Index(basis.size()));
    for (size_t k = 0; k < basis.size(); ++k) {
        const CMatrix b = matrix_from_json(basis[k]);
        if (b.rows() != shape[0] || b.cols() != shape[1])
            throw ValidationError("basis element " + std::to_string(k) + " does not match the shape");
        cols.col(Index(k)) = flatten(b);
    }
    return Subspace::from_columns(shape[0], shape[1], cols, tol);
}

Json quantum_graph_to_json(const QuantumGraph& g) {
    return Json{{"kind", "quantum_graph"},
                {"algebra", algebra_to_json(g.algebra())},
                {"space", subspace_to_json(g.space())}};
}

QuantumGraph quantum_graph_from_json(const Json& j, double tol) {
    const Json& p = payload(j);
    if (kind_of(p) != "quantum_graph") throw ValidationError("expected a quantum_graph");
    return QuantumGraph(algebra_from_json(field(p, "algebra")), subspace_from_json(field(p, "space"), tol));
}

Json classical_graph_to_json(const ClassicalGraph& g) {
    Json edges = Json::array();
    for (const auto& [v, w] : g.edges)
        edges.push_back({g.vertices[size_t(v)], g.vertices[size_t(w)]});
    return Json{{"kind", "classical_graph"}, {"vertices", g.vertices}, {"edges", std::move(edges)}};
}

ClassicalGraph classical_graph_from_json(const Json& j) {
    const Json& p = payload(j);
    if (kind_of(p) != "classical_graph") throw ValidationError("expected a classical_graph");
    const Json& vs = field(p, "vertices");
    std::vector<std::string> labels;
    if (vs.is_number_integer()) {
        for (Index v = 0; v < vs.get<Index>(); ++v) labels.push_back(std::to_string(v));
    } else if (vs.is_array()) {
        for (const auto& v : vs) labels.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    } else {
        throw ValidationError("vertices must be a count or a list of labels");
    }
    std::map<std::string, Index> index;
    for (size_t v = 0; v < labels.size(); ++v)
        if (!index.emplace(labels[v], Index(v)).second)
            throw ValidationError("duplicate vertex '" + labels[v] + "'");
    auto resolve = [&](const Json& x) -> Index {
        if (x.is_number_integer()) {
            const Index v = x.get<Index>();
            if (v < 0 || v >= Index(labels.size())) throw ValidationError("vertex index out of range");
            return v;
        }
        const std::string key = x.is_string() ? x.get<std::string>() : x.dump();
        auto it = index.find(key);
        if (it == index.end()) throw ValidationError("unknown vertex '" + key + "'");
        return it->second;
    };
    std::vector<std::pair<Index, Index>> edges;
    const Json& es = field(p, "edges");
    if (!es.is_array()) throw ValidationError("edges must be an array");
    for (const auto& e : es) {
        if (!e.is_array() || e.size() != 2) throw ValidationError("each edge is a pair");
        edges.emplace_back(resolve(e[0]), resolve(e[1]));
    }
    ClassicalGraph g = ClassicalGraph::make(Index(labels.size()), std::move(edges));
    g.vertices = std::move(labels);
    return g;
}

Json ideal_to_json(const AnnihilatorIdeal& ideal) {
    const MultiMatrixAlgebra& m = ideal.algebra();
    Json blocks = Json::array();
    for (Index i = 0; i < m.num_blocks(); ++i)
        for (Index j = 0; j < m.num_blocks(); ++j) {
            const CMatrix& q = ideal.support(i, j);
            if (q.cols() == 0) continue;
            blocks.push_back(Json{{"pair", {i, j}},
                                  {"rank", q.cols()},
                                  {"projection", matrix_to_json(q * q.adjoint())}});
        }
    return Json{{"kind", "annihilator"},
                {"algebra", algebra_to_json(m)},
                {"dim", ideal.dim()},
                {"supports", std::move(blocks)}};
}

Json star_hom_to_json(const StarHom& h) {
    Json us = Json::array();
    for (const auto& u : h.block_unitaries()) us.push_back(matrix_to_json(u));
    return Json{{"kind", "star_hom"},
                {"source", algebra_to_json(h.source())},
                {"target", algebra_to_json(h.target())},
                {"bratteli", h.bratteli()},
                {"unitaries", std::move(us)}};
}

StarHom star_hom_from_json(const Json& j, double tol) {
    const Json& p = payload(j);
    if (kind_of(p) != "star_hom") throw ValidationError("expected a star_hom");
    const MultiMatrixAlgebra src = algebra_from_json(field(p, "source"));
    const MultiMatrixAlgebra tgt = algebra_from_json(field(p, "target"));
    if (p.contains("action")) return StarHom::from_action(src, tgt, matrix_from_json(p["action"]), tol);
    const Json& b = field(p, "bratteli");
    if (!b.is_array()) throw ValidationError("bratteli must be a matrix of multiplicities");
    StarHom::Bratteli br;
    for (const auto& row : b) br.push_back(index_list(row, "bratteli entry"));
    std::vector<CMatrix> us;
    if (p.contains("unitaries"))
        for (const auto& u : p["unitaries"]) us.push_back(matrix_from_json(u));
    return star_hom(src, tgt, br, us, tol);
}

Json kraus_to_json(const KrausForm& k) {
    Json ops = Json::array();
    for (const auto& op : k.operators) ops.push_back(matrix_to_json(op));
    return Json{{"kind", "kraus"}, {"count", k.operators.size()}, {"operators", std::move(ops)}};
}

// ---------------------------------------------------------------------------
// Text formats

ClassicalGraph parse_edge_list(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string raw;
    Index lineno = 0;
    bool have_header = false;
    std::vector<std::string> labels;
    std::map<std::string, Index> index;
    std::vector<std::pair<Index, Index>> edges;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = strip_comment(raw);
        if (trim(line).empty()) continue;
        if (!have_header) {
            const auto start = line.find_first_not_of(" \t");
            if (line.compare(start, 9, "vertices:") != 0)
                throw ParseError(source, lineno, Index(start) + 1, "expected a 'vertices:' header");
            const Index off = Index(start) + 9;
            for (const auto& t : tokens(line.substr(size_t(off)), off, " \t\r,")) {
                if (!index.emplace(t.text, Index(labels.size())).second)
                    throw ParseError(source, lineno, t.column, "duplicate vertex '" + t.text + "'");
                labels.push_back(t.text);
            }
            have_header = true;
            continue;
        }
        const auto ts = tokens(line, 0, " \t\r");
        if (ts.size() != 2)
            throw ParseError(source, lineno, ts.empty() ? 1 : ts.front().column,
                             "an edge line holds exactly two vertices");
        Index ends[2];
        for (int k = 0; k < 2; ++k) {
            auto it = index.find(ts[size_t(k)].text);
            if (it == index.end())
                throw ParseError(source, lineno, ts[size_t(k)].column,
                                 "unknown vertex '" + ts[size_t(k)].text + "'");
            ends[k] = it->second;
        }
        edges.emplace_back(ends[0], ends[1]);
    }
    if (!have_header) throw ParseError(source, lineno + 1, 1, "missing 'vertices:' header");
    ClassicalGraph g = ClassicalGraph::make(Index(labels.size()), std::move(edges));
    g.vertices = std::move(labels);
    return g;
}

std::string format_edge_list(const ClassicalGraph& g) {
    std::string out = "vertices:";
    for (const auto& v : g.vertices) out += " " + v;
    out += "\n";
    for (const auto& [v, w] : g.edges) out += g.vertices[size_t(v)] + " " + g.vertices[size_t(w)] + "\n";
    return out;
}

ClassicalChannel parse_channel_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string raw;
    Index lineno = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = strip_comment(raw);
        if (trim(line).empty()) continue;
        std::vector<double> row;
        Index col = 1;
        size_t pos = 0;
        for (;;) {
            const size_t comma = line.find(',', pos);
            const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            const std::string t = trim(cell);
            const Index at = Index(pos) + 1 + Index(cell.find_first_not_of(" \t") == std::string::npos ? 0 : cell.find_first_not_of(" \t"));
            if (t.empty()) throw ParseError(source, lineno, at, "empty cell in column " + std::to_string(col));
            char* end = nullptr;
            const double x = std::strtod(t.c_str(), &end);
            if (end != t.c_str() + t.size() || !std::isfinite(x))
                throw ParseError(source, lineno, at, "'" + t + "' is not a number");
            row.push_back(x);
            if (comma == std::string::npos) break;
            pos = comma + 1;
            ++col;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(source, lineno, 1,
                             "row has " + std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(source, lineno + 1, 1, "no probability rows");
    RMatrix p(Index(rows.size()), Index(rows.front().size()));
    for (size_t b = 0; b < rows.size(); ++b)
        for (size_t a = 0; a < rows[b].size(); ++a) p(Index(b), Index(a)) = rows[b][a];
    return ClassicalChannel::make(std::move(p));
}

Json classical_channel_to_json(const ClassicalChannel& n) {
    Json probs = Json::array();
    for (Index b = 0; b < n.num_outputs(); ++b) {
        Json row = Json::array();
        for (Index a = 0; a < n.num_inputs(); ++a) row.push_back(n.probs(b, a));
        probs.push_back(std::move(row));
    }
    return Json{{"kind", "classical_channel"},
                {"inputs", n.inputs},
                {"outputs", n.outputs},
                {"probs", std::move(probs)}};
}

ClassicalChannel classical_channel_from_json(const Json& j) {
    const Json& p = payload(j);
    if (kind_of(p) != "classical_channel") throw ValidationError("expected a classical_channel");
    const Json& rows = field(p, "probs");
    if (!rows.is_array() || rows.empty()) throw ValidationError("probs must be a non-empty array of rows");
    const size_t na = rows[0].is_array() ? rows[0].size() : 0;
    RMatrix probs(Index(rows.size()), Index(na));
    for (size_t b = 0; b < rows.size(); ++b) {
        if (!rows[b].is_array() || rows[b].size() != na) throw ValidationError("probs rows differ in length");
        for (size_t a = 0; a < na; ++a) probs(Index(b), Index(a)) = as_double(rows[b][a], "probability");
    }
    auto labels = [&](const char* key) {
        std::vector<std::string> out;
        if (p.contains(key))
            for (const auto& x : p[key]) out.push_back(x.is_string() ? x.get<std::string>() : x.dump());
        return out;
    };
    return ClassicalChannel::make(std::move(probs), labels("inputs"), labels("outputs"));
}

Json quantum_channel_to_json(const QuantumChannel& q) {
    Json ops = Json::array();
    for (const auto& k : q.kraus) ops.push_back(matrix_to_json(k));
    return Json{{"kind", "quantum_channel"}, {"kraus", std::move(ops)}};
}

QuantumChannel quantum_channel_from_json(const Json& j) {
    const Json& p = payload(j);
    if (kind_of(p) != "quantum_channel") throw ValidationError("expected a quantum_channel");
    std::vector<CMatrix> ks;
    const Json& arr = field(p, "kraus");
    if (!arr.is_array()) throw ValidationError("kraus must be an array of matrices");
    for (const auto& k : arr) ks.push_back(matrix_from_json(k));
    return QuantumChannel::make(std::move(ks));
}

// ---------------------------------------------------------------------------
// Files

LoadedGraph graph_from_json(const Json& j, double tol) {
    const Json& p = payload(j);
    const std::string kind = kind_of(p);
    if (kind == "classical_graph") {
        ClassicalGraph g = classical_graph_from_json(p);
        QuantumGraph q = quantize_classical(g, tol);
        return {std::move(g), std::move(q)};
    }
    if (kind == "quantum_graph") return {std::nullopt, quantum_graph_from_json(p, tol)};
    throw ValidationError("expected a graph, found kind '" + kind + "'");
}

LoadedGraph load_graph(const std::string& path, double tol) {
    const std::string text = read_file(path);
    if (looks_like_json(text)) return graph_from_json(parse_json(text, path), tol);
    ClassicalGraph g = parse_edge_list(text, path);
    QuantumGraph q = quantize_classical(g, tol);
    return {std::move(g), std::move(q)};
}

LoadedHom hom_from_json(const Json& j, const LoadedGraph* g1, const LoadedGraph* g2, double tol) {
    const Json& p = payload(j);
    const std::string kind = kind_of(p);
    if (kind == "star_hom") return {star_hom_from_json(p, tol), std::nullopt};
    if (kind != "vertex_map") throw ValidationError("expected a star_hom or vertex_map, found '" + kind + "'");

    const Json& images = field(p, "images");
    if (!images.is_array()) throw ValidationError("images must be an array");
    const ClassicalGraph* c1 = g1 && g1->classical ? &*g1->classical : nullptr;
    Index n1 = -1;
    if (c1) n1 = c1->size();
    else if (p.contains("source_size")) n1 = as_index(p["source_size"], "source_size");
    else throw ValidationError("vertex map needs a classical first graph or 'source_size'");
    VertexMap f;
    for (const auto& x : images) {
        if (x.is_number_integer()) {
            f.push_back(x.get<Index>());
        } else if (x.is_string() && c1) {
            const std::string label = x.get<std::string>();
            auto it = std::find(c1->vertices.begin(), c1->vertices.end(), label);
            if (it == c1->vertices.end()) throw ValidationError("unknown vertex '" + label + "'");
            f.push_back(Index(it - c1->vertices.begin()));
        } else {
            throw ValidationError("images are vertex indices or labels of the first graph");
        }
    }
    if (g2 && g2->classical && g2->classical->size() != Index(f.size()))
        throw ValidationError("vertex map has " + std::to_string(f.size()) + " images for " +
                              std::to_string(g2->classical->size()) + " vertices");
    StarHom h = theta_from_vertex_map(f, n1, Index(f.size()));
    return {std::move(h), std::move(f)};
}

LoadedHom load_hom(const std::string& path, const LoadedGraph* g1, const LoadedGraph* g2, double tol) {
    return hom_from_json(parse_json(read_file(path), path), g1, g2, tol);
}

LoadedDiagram load_diagram(const std::string& path, double tol) {
    const Json j = parse_json(read_file(path), path);
    const Json& p = payload(j);
    const std::string kind = kind_of(p);
    if (kind != "diagram" && kind != "chain") throw ValidationError("expected a diagram or chain");
    const std::filesystem::path dir = std::filesystem::path(path).parent_path();

    LoadedDiagram out;
    const Json& objs = field(p, "objects");
    if (!objs.is_array() || objs.empty()) throw ValidationError("objects must be a non-empty array");
    for (const auto& o : objs) {
        if (o.is_string()) out.objects.push_back(load_graph((dir / o.get<std::string>()).string(), tol));
        else out.objects.push_back(graph_from_json(o, tol));
    }
    const Index n = Index(out.objects.size());
    for (const auto& o : out.objects) out.diagram.objects.push_back(o.quantum);

    auto add = [&](Index from, Index to, const Json& hom) {
        if (from < 0 || from >= n || to < 0 || to >= n)
            throw ValidationError("arrow (" + std::to_string(from) + ", " + std::to_string(to) +
                                  ") leaves the index set");
        LoadedHom h = hom_from_json(hom, &out.objects[size_t(from)], &out.objects[size_t(to)], tol);
        out.diagram.arrows.push_back({from, to, std::move(h.hom)});
    };
    if (kind == "chain") {
        const Json& links = field(p, "links");
        if (!links.is_array() || Index(links.size()) + 1 != n)
            throw ValidationError("a chain of " + std::to_string(n) + " objects needs " +
                                  std::to_string(n - 1) + " links");
        for (Index k = 0; k + 1 < n; ++k) add(k, k + 1, links[size_t(k)]);
    } else {
        const Json& arrows = field(p, "arrows");
        if (!arrows.is_array()) throw ValidationError("arrows must be an array");
        for (const auto& a : arrows)
            add(as_index(field(a, "from"), "from"), as_index(field(a, "to"), "to"), field(a, "hom"));
    }
    out.is_chain = Index(out.diagram.arrows.size()) + 1 == n;
    for (size_t k = 0; k < out.diagram.arrows.size() && out.is_chain; ++k)
        out.is_chain = out.diagram.arrows[k].from == Index(k) && out.diagram.arrows[k].to == Index(k + 1);
    return out;
}

ChannelFile load_channel(const std::string& path) {
    const std::string text = read_file(path);
    if (!looks_like_json(text)) return {parse_channel_csv(text, path), std::nullopt};
    const Json j = parse_json(text, path);
    const Json& p = payload(j);
    const std::string kind = kind_of(p);
    if (kind == "classical_channel") return {classical_channel_from_json(p), std::nullopt};
    if (kind == "quantum_channel") {
        std::optional<MultiMatrixAlgebra> m;
        if (p.contains("algebra")) m = algebra_from_json(p["algebra"]);
        return {quantum_channel_from_json(p), m};
    }
    throw ValidationError("expected a channel, found kind '" + kind + "'");
}

}  // namespace qgraph::io
