#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qgraph/adjacency.hpp"
#include "qgraph/io.hpp"

using namespace qgraph;
using io::Json;

namespace {

enum Exit { kOk = 0, kFalse = 1, kMalformed = 2, kNumerical = 3 };

struct Result {
    Json body;
    int code = kOk;
};

Json route_json(const RouteResult& r) {
    Json j = {{"holds", r.holds}};
    if (r.tensor_witness) j["witness"] = io::matrix_to_json(r.tensor_witness->coeffs);
    if (r.operator_witness) j["witness"] = io::matrix_to_json(*r.operator_witness);
    if (r.column_witness) j["witness_column"] = *r.column_witness;
    return j;
}

Result cmd_quantize(const std::string& path, double tol) {
    const io::LoadedGraph g = io::load_graph(path, tol);
    Json out = io::quantum_graph_to_json(g.quantum);
    out["dim"] = g.quantum.space().dim();
    return {out};
}

Result cmd_annihilator(const std::string& path, double tol) {
    return {io::ideal_to_json(annihilator(io::load_graph(path, tol).quantum))};
}

Result cmd_check(const std::string& path, double tol) {
    const QuantumGraph g = io::load_graph(path, tol).quantum;
    const RouteVerdicts r = reflexive_routes(g);
    const RouteVerdicts s = symmetric_routes(g);
    if (r.direct != r.annihilator || s.direct != s.annihilator)
        throw ConsistencyError("direct and annihilator property checks disagree");
    const Connectivity c = is_strongly_connected(g);
    Json out = {{"reflexive", r.direct},
                {"symmetric", s.direct},
                {"transitive", is_transitive(g)},
                {"connected", c.connected},
                {"generated_dim", c.generated_dim},
                {"space_dim", g.space().dim()}};
    if (c.witness) out["disconnecting_projection"] = io::matrix_to_json(*c.witness);
    return {out};
}

Result cmd_morphism(const std::string& hom, const std::string& p1, const std::string& p2, double tol) {
    const io::LoadedGraph g1 = io::load_graph(p1, tol);
    const io::LoadedGraph g2 = io::load_graph(p2, tol);
    const io::LoadedHom h = io::load_hom(hom, &g1, &g2, tol);
    const auto weights = std::make_pair(plancherel_weights(g1.quantum.algebra()),
                                        plancherel_weights(g2.quantum.algebra()));
    const MorphismReport rep = morphism_report(h.hom, g1.quantum, g2.quantum, weights, tol);
    Json out = {{"verdict", rep.verdict()},
                {"annihilator_route", route_json(rep.annihilator)},
                {"cp_route", route_json(rep.cp)}};
    if (rep.projector) out["projector_route"] = route_json(*rep.projector);
    else out["projector_route"] = {{"skipped", rep.projector_note}};
    if (h.vertex_map && g1.classical && g2.classical)
        out["classical_morphism"] = is_classical_morphism(*h.vertex_map, *g1.classical, *g2.classical);
    return {out, rep.verdict() ? kOk : kFalse};
}

Result cmd_kraus(const std::string& hom, const std::vector<std::string>& graphs, double tol) {
    std::optional<io::LoadedGraph> g1, g2;
    if (graphs.size() > 0) g1 = io::load_graph(graphs[0], tol);
    if (graphs.size() > 1) g2 = io::load_graph(graphs[1], tol);
    const io::LoadedHom h = io::load_hom(hom, g1 ? &*g1 : nullptr, g2 ? &*g2 : nullptr, tol);
    const KrausForm k = kraus_decompose(h.hom, tol);
    Json out = io::kraus_to_json(k);
    out["residual"] = kraus_residual(k, h.hom);
    return {out};
}

Result cmd_limit(const std::string& path, double tol) {
    const io::LoadedDiagram d = io::load_diagram(path, tol);
    const QGraphLimit lim = qgraph_limit(d.diagram, tol);
    Json legs = Json::array();
    for (const auto& leg : lim.legs) legs.push_back(io::star_hom_to_json(leg));
    Json out = {{"graph", io::quantum_graph_to_json(lim.graph)},
                {"ideal", io::ideal_to_json(lim.ideal)},
                {"top", lim.top},
                {"legs", std::move(legs)}};
    if (d.is_chain) {
        std::vector<StarHom> links;
        for (const auto& a : d.diagram.arrows) links.push_back(a.hom);
        Json stages = Json::array();
        for (const auto& s : truncation_report(d.diagram.objects, links, tol))
            stages.push_back({{"length", s.length},
                              {"algebra_dim", s.algebra_dim},
                              {"ideal_dim", s.ideal_dim},
                              {"graph_dim", s.graph_dim}});
        out["truncation"] = std::move(stages);
    }
    return {out};
}

Result cmd_confusability(const std::string& path, double tol) {
    const io::ChannelFile f = io::load_channel(path);
    if (const auto* n = std::get_if<ClassicalChannel>(&f.channel)) {
        const ClassicalGraph g = classical_confusability(*n, tol);
        const QuantumGraph lifted =
            confusability_graph(channel_from_classical(*n, tol), diagonal_algebra(n->num_inputs()), tol);
        if (!graphs_equal(quantize_classical(g, tol), lifted))
            throw ConsistencyError("classical and lifted confusability graphs differ");
        const IndependentSet alpha = independence_number(g);
        return {Json{{"classical", io::classical_graph_to_json(g)},
                     {"quantum", io::quantum_graph_to_json(lifted)},
                     {"independence_number", alpha.size},
                     {"independent_set", alpha.vertices}}};
    }
    const auto& q = std::get<QuantumChannel>(f.channel);
    const MultiMatrixAlgebra m = f.algebra ? *f.algebra : full_algebra(q.d_in);
    return {Json{{"quantum", io::quantum_graph_to_json(confusability_graph(q, m, tol))}}};
}

Result cmd_components(const std::string& path, double tol) {
    const QuantumGraph g = io::load_graph(path, tol).quantum;
    if (!is_symmetric(g))
        return {Json{{"symmetric", false}, {"components", Json::array()}}, kFalse};
    Json ps = Json::array();
    for (const auto& p : components(g)) ps.push_back(io::matrix_to_json(p));
    return {Json{{"symmetric", true}, {"count", ps.size()}, {"components", std::move(ps)}}};
}

double default_tol() {
    if (const char* env = std::getenv("QGRAPH_TOL")) {
        char* end = nullptr;
        const double t = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(t > 0.0)) throw ValidationError("QGRAPH_TOL must be a positive number");
        return t;
    }
    return kDefaultTol;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum graph toolkit"};
    app.require_subcommand(1);
    std::optional<double> tol_flag;
    std::string out_path;
    app.add_option("--tol", tol_flag, "rank and membership tolerance (default 1e-9 or QGRAPH_TOL)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "write the report here instead of stdout");

    std::string a, b, c;
    std::vector<std::string> extra;
    std::function<Result(double)> run;
    auto sub = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };
    auto* quantize = sub("quantize", "quantize a classical graph (edge list or JSON)");
    quantize->add_option("graph", a)->required();
    quantize->callback([&] { run = [&](double t) { return cmd_quantize(a, t); }; });
    auto* ann = sub("annihilator", "annihilator ideal of a graph");
    ann->add_option("graph", a)->required();
    ann->callback([&] { run = [&](double t) { return cmd_annihilator(a, t); }; });
    auto* check = sub("check", "reflexive, symmetric, transitive and connected");
    check->add_option("graph", a)->required();
    check->callback([&] { run = [&](double t) { return cmd_check(a, t); }; });
    auto* morph = sub("morphism", "is the hom a morphism from g1 to g2");
    morph->add_option("hom", a)->required();
    morph->add_option("g1", b)->required();
    morph->add_option("g2", c)->required();
    morph->callback([&] { run = [&](double t) { return cmd_morphism(a, b, c, t); }; });
    auto* kraus = sub("kraus", "Kraus operators of a hom");
    kraus->add_option("hom", a)->required();
    kraus->add_option("graphs", extra, "source (and target) graph for vertex maps")->expected(0, 2);
    kraus->callback([&] { run = [&](double t) { return cmd_kraus(a, extra, t); }; });
    auto* limit = sub("limit", "limit of a diagram of quantum graphs");
    limit->add_option("diagram", a)->required();
    limit->callback([&] { run = [&](double t) { return cmd_limit(a, t); }; });
    auto* conf = sub("confusability", "confusability graph of a channel (CSV or JSON)");
    conf->add_option("channel", a)->required();
    conf->callback([&] { run = [&](double t) { return cmd_confusability(a, t); }; });
    auto* comp = sub("components", "connected components of a symmetric graph");
    comp->add_option("graph", a)->required();
    comp->callback([&] { run = [&](double t) { return cmd_components(a, t); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kMalformed;
    }

    try {
        const double tol = tol_flag ? *tol_flag : default_tol();
        const Result r = run(tol);
        const Json report = {{"command", app.get_subcommands().front()->get_name()},
                             {"tol", tol},
                             {"result", r.body}};
        const std::string text = io::to_canonical_json(report);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw ValidationError("cannot write " + out_path);
            out << text;
        }
        return r.code;
    } catch (const ConsistencyError& e) {
        std::cerr << "qgraph: consistency failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "qgraph: numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const Error& e) {
        std::cerr << "qgraph: " << e.what() << "\n";
        return kMalformed;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "qgraph: malformed JSON: " << e.what() << "\n";
        return kMalformed;
    }
}
