#include "hbl/cli.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hbl/builder.hpp"
#include "hbl/error.hpp"
#include "hbl/io.hpp"
#include "hbl/numeric.hpp"
#include "hbl/polytope.hpp"

namespace hbl {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public Error {
public:
    using Error::Error;
};

Json rationals(const Vector& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(x.str());
    return out;
}

std::string tuple(const Vector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
    return s + ")";
}

Json rows_json(const Matrix& m) {
    Json out = Json::array();
    for (const auto& r : m.row_list()) out.push_back(rationals(r));
    return out;
}

Json slack_json(const SlackReport& r) {
    return Json{{"subspace", r.subspace.str()},
                {"dim", r.subspace.dim()},
                {"basis", rows_json(r.subspace.basis())},
                {"slack", r.slack.str()},
                {"classification", to_string(r.classification)}};
}

std::string chain_labels(const GraphDecomposition& g, const std::vector<std::size_t>& chain) {
    if (chain.empty()) return "";
    std::string s = g.label(g.edge(chain.front()).from);
    for (std::size_t e : chain) s += " -> " + g.label(g.edge(e).to);
    return s;
}

// Report text plus the fields that decide the exit status.
struct Report {
    Json json;
    std::vector<std::string> lines;
    int status = 0;

    void line(std::string s) { lines.push_back(std::move(s)); }
};

void require(const std::string& value, const char* flag, const std::string& command) {
    if (value.empty()) throw UsageError(command + " requires " + flag);
}

HblDatum load_datum(const CommandConfig& c) {
    require(c.data, "--data", c.command);
    return parse_datum(read_file(c.data));
}

Presentation load_presentation(const CommandConfig& c, const HblDatum& d) {
    require(c.presentation, "--presentation", c.command);
    return parse_presentation(read_file(c.presentation), d.dim(), d.size());
}

std::vector<Subspace> load_candidates(const CommandConfig& c, const HblDatum& d) {
    if (c.candidates.empty()) return {};
    return parse_candidates(read_file(c.candidates), d.dim()).subspaces;
}

Json bound_json(const HblDatum& d, const Presentation& p, const BoundCertificate& b) {
    Json factors = Json::array();
    for (const auto& f : b.factors)
        factors.push_back({{"map", d.maps()[f.map].name},
                           {"edge", p.graph.edge_name(f.edge)},
                           {"base", f.base.str()},
                           {"exponent", f.exponent.str()}});
    return Json{{"value", b.value}, {"log_value", b.log_value()}, {"exact_one", b.exact_one}, {"factors", factors}};
}

void bound_lines(Report& r, const HblDatum& d, const Presentation& p, const BoundCertificate& b) {
    for (const auto& f : b.factors)
        r.line("  factor " + d.maps()[f.map].name + " on " + p.graph.edge_name(f.edge) + ": " + f.base.str() + "^(" +
               f.exponent.str() + ")");
    std::ostringstream os;
    os.precision(17);
    os << "constant: " << b.value << (b.exact_one ? " (exactly 1)" : "");
    r.line(os.str());
}

Report cmd_verify(const CommandConfig& c) {
    const HblDatum d = load_datum(c);
    const Presentation p = load_presentation(c, d);
    const VerificationReport v = verify_presentation(d, p);
    Report r;
    Json broken = Json::array(), maps = Json::array(), violations = Json::array();
    for (auto b : v.broken) broken.push_back(to_string(b));
    for (const auto& g : v.graph_violations) violations.push_back(g.message);
    for (std::size_t i = 0; i < v.maps.size(); ++i)
        maps.push_back({{"name", d.maps()[i].name},
                        {"nonnegative", v.maps[i].nonnegative},
                        {"balanced", v.maps[i].balanced},
                        {"mass", v.maps[i].mass.str()},
                        {"exponent", d.exponent(i).str()},
                        {"mass_ok", v.maps[i].mass_ok}});
    r.json = Json{{"command", "verify"},
                  {"verdict", v.valid ? "valid" : "invalid"},
                  {"broken", broken},
                  {"messages", v.messages},
                  {"graph_violations", violations},
                  {"maps", maps},
                  {"sigma",
                   {{"values", rationals(v.sigma)},
                    {"balanced", v.sigma_balanced},
                    {"mass", v.sigma_mass.str()},
                    {"mass_ok", v.sigma_mass_ok}}},
                  {"bound", nullptr}};
    r.line(std::string("verdict: ") + (v.valid ? "valid" : "invalid"));
    for (const auto& m : v.messages) r.line("  " + m);
    if (v.valid) {
        const BoundCertificate b = bound_constant(d, p);
        r.json["bound"] = bound_json(d, p, b);
        bound_lines(r, d, p, b);
    }
    r.status = v.valid ? 0 : 1;
    return r;
}

Report cmd_check_data(const CommandConfig& c) {
    const HblDatum d = load_datum(c);
    const CandidateLattice lattice = generate_lattice(d, load_candidates(c, d), c.max_lattice);
    const ScalingCheck sc = check_scaling(d);
    Json violations = Json::array(), critical = Json::array();
    std::vector<SlackReport> bad;
    for (const auto& v : lattice.subspaces) {
        SlackReport s = subspace_slack(d, v);
        if (s.classification == SlackClass::violating) bad.push_back(std::move(s));
    }
    for (const auto& s : bad) violations.push_back(slack_json(s));
    const auto crit = find_critical(d, lattice);
    for (const auto& s : crit) critical.push_back(slack_json(s));
    const auto first = find_violation(d, lattice);

    Report r;
    r.status = first ? 1 : 0;
    r.json = Json{{"command", "check-data"},
                  {"verdict", first ? "infeasible" : "no violation found"},
                  {"scaling", {{"holds", sc.holds}, {"lhs", sc.lhs.str()}, {"rhs", sc.rhs.str()}}},
                  {"lattice", {{"size", lattice.subspaces.size()}, {"closed", lattice.closed}}},
                  {"violation", first ? slack_json(*first) : Json(nullptr)},
                  {"violations", violations},
                  {"critical", critical}};
    r.line("scaling: " + sc.lhs.str() + (sc.holds ? " = " : " != ") + sc.rhs.str());
    r.line("lattice: " + std::to_string(lattice.subspaces.size()) + " subspaces" +
           (lattice.closed ? ", closed" : ", truncated at --max-lattice"));
    if (first)
        r.line("violation at " + first->subspace.str() + ", slack " + first->slack.str());
    else
        r.line("no violation among the candidates");
    for (const auto& s : crit) r.line("critical: " + s.subspace.str());
    return r;
}

Report cmd_polytope(const CommandConfig& c) {
    const HblDatum d = load_datum(c);
    require(c.candidates, "--candidates", c.command);
    const CandidateLattice cands = explicit_candidates(d, load_candidates(c, d));
    const ExponentPolytope poly = polytope_from_candidates(d, cands);
    const ExtremeEnumeration ext = enumerate_extremes(poly, 1000000);
    const auto bad_row = poly.violated_row(d.exponents());

    Report r;
    Json rows = Json::array(), vertices = Json::array();
    for (const auto& k : poly.constraints)
        rows.push_back({{"coeffs", rationals(k.coeffs)},
                        {"relation", k.relation == Relation::eq ? "=" : ">="},
                        {"rhs", k.rhs.str()},
                        {"provenance", k.provenance}});
    for (const auto& v : ext.vertices) vertices.push_back(rationals(v));
    r.json = Json{{"command", "polytope"},
                  {"rows", rows},
                  {"vertices", vertices},
                  {"subsets_examined", ext.subsets_examined},
                  {"cap_hit", ext.cap_hit},
                  {"empty", ext.infeasible},
                  {"membership",
                   {{"tau", rationals(d.exponents())},
                    {"member", !bad_row},
                    {"violated_row", bad_row ? Json(*bad_row) : Json(nullptr)},
                    {"extreme", !bad_row && poly.is_extreme(d.exponents())}}}};
    for (const auto& k : poly.constraints) {
        std::string s;
        for (std::size_t i = 0; i < k.coeffs.size(); ++i)
            if (!k.coeffs[i].is_zero()) s += (s.empty() ? "" : " + ") + k.coeffs[i].str() + "*t" + std::to_string(i + 1);
        r.line("row: " + s + (k.relation == Relation::eq ? " = " : " >= ") + k.rhs.str() + "   [" + k.provenance + "]");
    }
    r.line(std::to_string(ext.vertices.size()) + " vertices" + (ext.cap_hit ? " (enumeration cap hit)" : ""));
    for (const auto& v : ext.vertices) r.line("vertex " + tuple(v));
    if (bad_row)
        r.line("tau " + tuple(d.exponents()) + " violates row " + std::to_string(*bad_row) + " (" +
               poly.constraints[*bad_row].provenance + ")");
    else
        r.line("tau " + tuple(d.exponents()) + " is a member" +
               (poly.is_extreme(d.exponents()) ? " and an extreme point" : ""));
    r.status = bad_row ? 1 : 0;
    return r;
}

Report cmd_build(const CommandConfig& c) {
    const HblDatum d = load_datum(c);
    const CandidateLattice lattice = generate_lattice(d, load_candidates(c, d), c.max_lattice);
    BuildOptions opts;
    opts.max_lattice = c.max_lattice;
    opts.trace = c.trace;
    Report r;
    const std::string bound = vertex_bound(d.size(), d.dim()).get_str();
    try {
        BuildResult b = build_presentation(d, lattice, opts);
        const std::string text = serialize_presentation(b.presentation);
        if (!c.out.empty()) write_file(c.out, text);
        r.json = Json{{"command", "build"},
                      {"verdict", "built"},
                      {"failure", nullptr},
                      {"message", ""},
                      {"witness", nullptr},
                      {"vertices", b.presentation.graph.vertex_count()},
                      {"edges", b.presentation.graph.edge_count()},
                      {"vertex_bound", bound},
                      {"lattice_size", lattice.subspaces.size()},
                      {"output", c.out.empty() ? Json(nullptr) : Json(c.out)},
                      {"trace", b.trace}};
        r.line("built a valid presentation: " + std::to_string(b.presentation.graph.vertex_count()) + " vertices (bound " +
               bound + "), " + std::to_string(b.presentation.graph.edge_count()) + " edges");
        for (const auto& t : b.trace) r.line("trace: " + t);
        if (c.out.empty())
            r.line(text);
        else
            r.line("written to " + c.out);
    } catch (const BuildError& e) {
        r.status = 1;
        r.json = Json{{"command", "build"},
                      {"verdict", "failed"},
                      {"failure", to_string(e.kind())},
                      {"message", e.what()},
                      {"witness", e.witness() ? slack_json(*e.witness()) : Json(nullptr)},
                      {"vertices", nullptr},
                      {"edges", nullptr},
                      {"vertex_bound", bound},
                      {"lattice_size", lattice.subspaces.size()},
                      {"output", nullptr},
                      {"trace", Json::array()}};
        r.line("build failed (" + to_string(e.kind()) + "): " + e.what());
    }
    return r;
}

Report cmd_bound(const CommandConfig& c) {
    const HblDatum d = load_datum(c);
    const Presentation p = load_presentation(c, d);
    const VerificationReport v = verify_presentation(d, p);
    Report r;
    if (!v.valid) {
        r.status = 1;
        r.json = Json{{"command", "bound"}, {"verdict", "invalid"}, {"messages", v.messages}, {"bound", nullptr}};
        r.line("presentation is invalid; no constant");
        for (const auto& m : v.messages) r.line("  " + m);
        return r;
    }
    const BoundCertificate b = bound_constant(d, p);
    r.json = Json{{"command", "bound"}, {"verdict", "valid"}, {"messages", Json::array()}, {"bound", bound_json(d, p, b)}};
    bound_lines(r, d, p, b);
    return r;
}

Report cmd_decompose_flow(const CommandConfig& c) {
    const HblDatum d = load_datum(c);
    const Presentation p = load_presentation(c, d);
    Report r;
    const auto bad = validate_graph(p.graph);
    WeightFunction phi;
    std::string name;
    if (c.component) {
        if (*c.component < 1 || *c.component > d.size()) throw UsageError("--component must be between 1 and the map count");
        phi = p.theta.component(*c.component - 1);
        name = "theta_" + std::to_string(*c.component);
    } else {
        phi = summary_weight(d, p);
        name = "sigma";
    }
    bool nonnegative = true;
    for (const auto& v : phi.values) nonnegative = nonnegative && v[0].sign() >= 0;
    const bool ok = bad.empty() && nonnegative && is_balanced(p.graph, phi);
    Json terms = Json::array();
    r.json = Json{{"command", "decompose-flow"}, {"weight", name}, {"decomposable", ok}};
    if (!ok) {
        r.status = 1;
        r.json["terms"] = terms;
        r.json["reconstructed"] = false;
        r.line(name + " is not a nonnegative balanced weight on a valid graph; no decomposition");
        for (const auto& g : bad) r.line("  " + g.message);
        return r;
    }
    const ChainDecomposition dec = decompose_flow(p.graph, phi);
    const bool rebuilt = dec.reconstruct(p.graph.edge_count(), 1).values == phi.values;
    for (const auto& t : dec.terms) {
        Json edges = Json::array();
        for (std::size_t e : t.chain) edges.push_back(p.graph.edge_name(e));
        terms.push_back({{"coefficient", t.coefficient.str()}, {"chain", edges}});
        r.line(t.coefficient.str() + " x [" + chain_labels(p.graph, t.chain) + "]");
    }
    r.json["terms"] = terms;
    r.json["reconstructed"] = rebuilt;
    r.line(std::to_string(dec.terms.size()) + " chains; reconstruction " + (rebuilt ? "exact" : "FAILED"));
    r.status = rebuilt ? 0 : 1;
    return r;
}

Report cmd_project(const CommandConfig& c) {
    const HblDatum d = load_datum(c);
    const Presentation p = load_presentation(c, d);
    if (!c.map || *c.map < 1 || *c.map > d.size()) throw UsageError("project requires --map between 1 and the map count");
    const std::size_t i = *c.map - 1;
    const ProjectedGraph pg = project_graph(p.graph, d.map(i));
    const WeightFunction w = project_weight(pg, p.theta);
    const bool balanced = is_balanced(pg.graph, w);
    const Vector before = total_mass(p.graph, p.theta), after = total_mass(pg.graph, w);
    const bool same_mass = before == after;

    Report r;
    Json verts = Json::array(), edges = Json::array();
    for (std::size_t v = 0; v < pg.graph.vertex_count(); ++v)
        verts.push_back({{"id", pg.graph.label(v)}, {"dim", pg.graph.vertex(v).dim()}, {"basis", rows_json(pg.graph.vertex(v).basis())}});
    for (std::size_t e = 0; e < pg.graph.edge_count(); ++e)
        edges.push_back({{"edge", pg.graph.edge_name(e)}, {"theta", rationals(w.values[e])}});
    r.json = Json{{"command", "project"},
                  {"map", d.maps()[i].name},
                  {"vertices", verts},
                  {"edges", edges},
                  {"balanced", balanced},
                  {"mass_before", rationals(before)},
                  {"mass_after", rationals(after)},
                  {"mass_preserved", same_mass}};
    r.line("projected by " + d.maps()[i].name + ": " + std::to_string(pg.graph.vertex_count()) + " vertices, " +
           std::to_string(pg.graph.edge_count()) + " edges");
    for (std::size_t e = 0; e < pg.graph.edge_count(); ++e) r.line("  " + pg.graph.edge_name(e) + " " + tuple(w.values[e]));
    r.line(std::string("balanced: ") + (balanced ? "yes" : "no") + "; mass " + tuple(before) + " -> " + tuple(after));
    r.status = balanced && same_mass ? 0 : 1;
    return r;
}

Report cmd_gaussian(const CommandConfig& c) {
    const HblDatum d = load_datum(c);
    Report r;
    const double at_identity = gaussian_ratio(d, GaussianInput::identity(d));
    AscentOptions opts;
    opts.iterations = c.iterations;
    opts.seed = c.seed;
    const AscentResult asc = gaussian_ascent(d, opts);
    r.json = Json{{"command", "gaussian"},
                  {"identity_ratio", std::isfinite(at_identity) ? Json(at_identity) : Json("inf")},
                  {"sup_estimate", asc.sup_estimate},
                  {"diverged", asc.diverged},
                  {"iterations", asc.iterations},
                  {"seed", c.seed},
                  {"domination", nullptr}};
    std::ostringstream os;
    os.precision(17);
    os << "ratio at identity: " << at_identity << "\nascent: sup estimate " << asc.sup_estimate << " after "
       << asc.iterations << " iterations" << (asc.diverged ? ", DIVERGED (constant likely infinite)" : ", bounded");
    r.line(os.str());
    r.status = asc.diverged ? 1 : 0;

    if (!c.presentation.empty()) {
        const Presentation p = load_presentation(c, d);
        if (verify_presentation(d, p).valid) {
            const double bound = bound_constant(d, p).value;
            std::mt19937_64 rng(c.seed);
            double worst = 0;
            std::size_t exceed = 0;
            for (std::size_t k = 0; k < c.samples; ++k) {
                const double q = gaussian_ratio(d, GaussianInput::random(d, rng));
                worst = std::max(worst, q);
                if (!(q <= bound * (1 + c.tol))) ++exceed;
            }
            r.json["domination"] = Json{{"constant", bound}, {"samples", c.samples}, {"max_ratio", worst}, {"exceeding", exceed}};
            std::ostringstream ds;
            ds.precision(17);
            ds << "domination: max ratio " << worst << " over " << c.samples << " samples vs constant " << bound << ", "
               << exceed << " exceeding";
            r.line(ds.str());
            if (exceed) r.status = 1;
        }
    }
    return r;
}

Report cmd_quadrature(const CommandConfig& c) {
    const HblDatum d = load_datum(c);
    if (c.grids.size() != d.size()) throw UsageError("quadrature requires one --grid file per map");
    std::vector<GridFunction> fs;
    for (const auto& path : c.grids) {
        std::istringstream in(read_file(path));
        fs.push_back(GridFunction::read(in));
    }
    double constant = 1.0;
    std::string source = "default";
    if (c.constant) {
        constant = *c.constant;
        source = "--constant";
    } else if (!c.presentation.empty()) {
        constant = bound_constant(d, load_presentation(c, d)).value;
        source = "presentation";
    }
    const QuadratureResult q = quadrature_check(d, constant, fs);
    Report r;
    const bool holds = q.ratio <= 1 + c.tol;
    r.json = Json{{"command", "quadrature"},
                  {"constant", constant},
                  {"constant_source", source},
                  {"lhs", q.lhs},
                  {"rhs", q.rhs},
                  {"ratio", q.ratio},
                  {"holds", holds}};
    std::ostringstream os;
    os.precision(17);
    os << "lhs " << q.lhs << "\nrhs " << q.rhs << " (C = " << constant << ", " << source << ")\nratio " << q.ratio
       << (holds ? " <= 1" : " > 1: inequality fails on this input");
    r.line(os.str());
    r.status = holds ? 0 : 1;
    return r;
}

std::string render(const Report& r, OutputFormat f) {
    if (f == OutputFormat::json) return r.json.dump(2) + "\n";
    std::string s;
    for (const auto& l : r.lines) s += l + (l.empty() || l.back() != '\n' ? "\n" : "");
    return s;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"verify",         "check-data", "polytope", "build",      "bound",
                                                "decompose-flow", "project",    "gaussian", "quadrature", "export-dot"};
    return names;
}

RunResult run(const CommandConfig& c) {
    try {
        if (!(c.tol > 0)) throw UsageError("--tol must be positive");
        if (c.command == "export-dot" || (c.format == OutputFormat::dot && c.command == "verify")) {
            const HblDatum d = load_datum(c);
            const Presentation p = load_presentation(c, d);
            return {0, export_dot(d, p)};
        }
        if (c.format == OutputFormat::dot) throw UsageError("--format dot is only available for verify and export-dot");
        Report r;
        if (c.command == "verify")
            r = cmd_verify(c);
        else if (c.command == "check-data")
            r = cmd_check_data(c);
        else if (c.command == "polytope")
            r = cmd_polytope(c);
        else if (c.command == "build")
            r = cmd_build(c);
        else if (c.command == "bound")
            r = cmd_bound(c);
        else if (c.command == "decompose-flow")
            r = cmd_decompose_flow(c);
        else if (c.command == "project")
            r = cmd_project(c);
        else if (c.command == "gaussian")
            r = cmd_gaussian(c);
        else if (c.command == "quadrature")
            r = cmd_quadrature(c);
        else
            throw UsageError("unknown command '" + c.command + "'");
        return {r.status, render(r, c.format)};
    } catch (const std::exception& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    }
}

}  // namespace hbl
