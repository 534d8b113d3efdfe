#include "hbl/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hbl/error.hpp"

namespace hbl {

namespace {

using nlohmann::json;

// Where things start in the raw text: top-level keys and the elements of top-level arrays.
class LineIndex {
public:
    explicit LineIndex(std::string_view text) {
        std::size_t line = 1, depth = 0;
        bool in_string = false, escaped = false, expect_element = false;
        std::string token, current_key, array_key;
        std::size_t token_line = 0;
        bool have_token = false;
        for (char ch : text) {
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (ch == '\\')
                    escaped = true;
                else if (ch == '"')
                    in_string = false;
                else
                    token += ch;
                if (ch == '\n') ++line;
                continue;
            }
            if (ch == '\n') {
                ++line;
                continue;
            }
            if (ch == ' ' || ch == '\t' || ch == '\r') continue;
            if (depth == 2 && expect_element && ch != ']') {
                elements_[array_key].push_back(line);
                expect_element = false;
            }
            switch (ch) {
                case '"':
                    in_string = true;
                    token.clear();
                    token_line = line;
                    have_token = true;
                    continue;
                case ':':
                    if (depth == 1 && have_token) {
                        current_key = token;
                        keys_.emplace(current_key, token_line);
                    }
                    break;
                case '[':
                case '{':
                    ++depth;
                    if (depth == 2 && ch == '[') {
                        array_key = current_key;
                        elements_[array_key];
                        expect_element = true;
                    }
                    break;
                case ']':
                case '}':
                    if (depth > 0) --depth;
                    break;
                case ',':
                    if (depth == 2) expect_element = true;
                    break;
                default:
                    break;
            }
            have_token = false;
        }
    }

    std::size_t element(const std::string& key, std::size_t k) const {
        auto it = elements_.find(key);
        if (it == elements_.end() || k >= it->second.size()) return key_line(key);
        return it->second[k];
    }

    std::size_t key_line(const std::string& key) const {
        auto it = keys_.find(key);
        return it == keys_.end() ? 0 : it->second;
    }

private:
    std::map<std::string, std::size_t> keys_;
    std::map<std::string, std::vector<std::size_t>> elements_;
};

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t k = 0; k < e.byte && k < text.size(); ++k)
            if (text[k] == '\n') ++line;
        throw ParseError(std::string("malformed JSON: ") + e.what(), line);
    }
}

const json& member(const json& obj, const char* key, std::size_t line, const char* where) {
    if (!obj.is_object()) throw ParseError(std::string(where) + " must be an object", line);
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string(where) + " lacks \"" + key + "\"", line);
    return *it;
}

const json& array_member(const json& obj, const char* key, std::size_t line, const char* where) {
    const json& a = member(obj, key, line, where);
    if (!a.is_array()) throw ParseError(std::string(where) + ": \"" + key + "\" must be a list", line);
    return a;
}

Rational rational_of(const json& v, std::size_t line) {
    if (v.is_string()) {
        try {
            return Rational::parse(v.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line);
        }
    }
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw ParseError("malformed rational " + v.dump(), line);
}

Vector vector_of(const json& v, std::size_t line, const std::string& what) {
    if (!v.is_array()) throw ParseError(what + " must be a list of rationals", line);
    Vector out;
    for (const auto& x : v) out.push_back(rational_of(x, line));
    return out;
}

std::vector<Vector> rows_of(const json& v, std::size_t line, const std::string& what,
                            std::optional<std::size_t> width) {
    if (!v.is_array()) throw ParseError(what + " must be a list of rows", line);
    std::vector<Vector> rows;
    for (const auto& r : v) {
        rows.push_back(vector_of(r, line, what + " row"));
        if (!width) width = rows.back().size();
        if (rows.back().size() != *width)
            throw ParseError(what + " is ragged: row " + std::to_string(rows.size()) + " has " +
                                 std::to_string(rows.back().size()) + " entries, expected " + std::to_string(*width),
                             line);
    }
    return rows;
}

std::string string_of(const json& v, std::size_t line, const std::string& what) {
    if (!v.is_string()) throw ParseError(what + " must be a string", line);
    return v.get<std::string>();
}

std::string quoted(const std::string& s) { return json(s).dump(); }

std::string rational_list(const Vector& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + quoted(v[i].str());
    return s + "]";
}

std::string row_list(const std::vector<Vector>& rows) {
    std::string s = "[";
    for (std::size_t i = 0; i < rows.size(); ++i) s += (i ? ", " : "") + rational_list(rows[i]);
    return s + "]";
}

}  // namespace

HblDatum parse_datum(std::string_view text) {
    const json doc = parse_json(text);
    const LineIndex lines(text);
    const json& dim_v = member(doc, "dim", 1, "datum");
    if (!dim_v.is_number_unsigned() || dim_v.get<long>() < 1)
        throw ParseError("\"dim\" must be a positive integer", lines.key_line("dim"));
    const auto dim = dim_v.get<std::size_t>();

    const json& maps_v = array_member(doc, "maps", lines.key_line("maps"), "datum");
    std::vector<NamedMap> maps;
    for (std::size_t k = 0; k < maps_v.size(); ++k) {
        const std::size_t line = lines.element("maps", k);
        const std::string name = string_of(member(maps_v[k], "name", line, "map"), line, "map name");
        const auto rows = rows_of(member(maps_v[k], "rows", line, "map"), line, "map " + name, dim);
        maps.push_back({name, Matrix::from_rows(rows, dim)});
    }
    const json& exps_v = array_member(doc, "exponents", lines.key_line("exponents"), "datum");
    std::vector<Rational> exps;
    for (std::size_t k = 0; k < exps_v.size(); ++k) exps.push_back(rational_of(exps_v[k], lines.element("exponents", k)));
    if (exps.size() != maps.size())
        throw ParseError("width mismatch: " + std::to_string(exps.size()) + " exponents for " +
                             std::to_string(maps.size()) + " maps",
                         lines.key_line("exponents"));
    try {
        return HblDatum(dim, std::move(maps), std::move(exps));
    } catch (const Error& e) {
        throw ParseError(e.what(), 0);
    }
}

Presentation parse_presentation(std::string_view text, std::optional<std::size_t> ambient,
                                std::optional<std::size_t> width) {
    const json doc = parse_json(text);
    const LineIndex lines(text);
    const json& verts = array_member(doc, "vertices", lines.key_line("vertices"), "presentation");
    const json& edges = array_member(doc, "edges", lines.key_line("edges"), "presentation");

    if (!ambient) {
        for (const auto& v : verts)
            if (v.is_object() && v.contains("basis") && v["basis"].is_array() && !v["basis"].empty() &&
                v["basis"][0].is_array()) {
                ambient = v["basis"][0].size();
                break;
            }
        if (!ambient) throw ParseError("cannot infer the ambient dimension: every basis is empty", lines.key_line("vertices"));
    }

    std::map<std::string, std::size_t> ids;
    std::vector<Subspace> subspaces;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < verts.size(); ++k) {
        const std::size_t line = lines.element("vertices", k);
        const std::string id = string_of(member(verts[k], "id", line, "vertex"), line, "vertex id");
        if (!ids.emplace(id, k).second) throw ParseError("duplicate vertex id '" + id + "'", line);
        const auto rows = rows_of(member(verts[k], "basis", line, "vertex"), line, "basis of '" + id + "'", *ambient);
        subspaces.push_back(Subspace::span(*ambient, rows));
        labels.push_back(id);
    }

    std::vector<Edge> edge_list;
    WeightFunction theta{width.value_or(0), {}};
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const std::size_t line = lines.element("edges", k);
        auto endpoint = [&](const char* key) {
            const std::string id = string_of(member(edges[k], key, line, "edge"), line, std::string("edge ") + key);
            auto it = ids.find(id);
            if (it == ids.end()) throw ParseError("edge refers to unknown vertex id '" + id + "'", line);
            return it->second;
        };
        const std::size_t from = endpoint("from");
        const std::size_t to = endpoint("to");
        Vector th = vector_of(member(edges[k], "theta", line, "edge"), line, "theta");
        if (!width && k == 0) theta.width = th.size();
        if (th.size() != theta.width)
            throw ParseError("width mismatch: theta has " + std::to_string(th.size()) + " entries, expected " +
                                 std::to_string(theta.width),
                             line);
        edge_list.push_back({from, to});
        theta.values.push_back(std::move(th));
    }
    return {GraphDecomposition(*ambient, std::move(subspaces), std::move(edge_list), std::move(labels)),
            std::move(theta)};
}

CandidateFile parse_candidates(std::string_view text, std::size_t ambient) {
    const json doc = parse_json(text);
    const LineIndex lines(text);
    const json& cands = array_member(doc, "candidates", lines.key_line("candidates"), "candidate file");
    CandidateFile out;
    for (std::size_t k = 0; k < cands.size(); ++k) {
        const std::size_t line = lines.element("candidates", k);
        const std::string id = string_of(member(cands[k], "id", line, "candidate"), line, "candidate id");
        const auto rows = rows_of(member(cands[k], "basis", line, "candidate"), line, "basis of '" + id + "'", ambient);
        out.ids.push_back(id);
        out.subspaces.push_back(Subspace::span(ambient, rows));
    }
    return out;
}

std::string serialize_datum(const HblDatum& datum) {
    std::ostringstream os;
    os << "{\n  \"dim\": " << datum.dim() << ",\n  \"maps\": [\n";
    for (std::size_t i = 0; i < datum.size(); ++i) {
        os << "    {\"name\": " << quoted(datum.maps()[i].name)
           << ", \"rows\": " << row_list(datum.map(i).row_list()) << "}" << (i + 1 < datum.size() ? "," : "") << "\n";
    }
    os << "  ],\n  \"exponents\": " << rational_list(datum.exponents()) << "\n}\n";
    return os.str();
}

std::string serialize_presentation(const Presentation& p) {
    const GraphDecomposition& g = p.graph;
    std::ostringstream os;
    os << "{\n  \"vertices\": [\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        os << "    {\"id\": " << quoted(g.label(v)) << ", \"basis\": " << row_list(g.vertex(v).basis().row_list())
           << "}" << (v + 1 < g.vertex_count() ? "," : "") << "\n";
    os << "  ],\n  \"edges\": [\n";
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        os << "    {\"from\": " << quoted(g.label(g.edge(e).from)) << ", \"to\": " << quoted(g.label(g.edge(e).to))
           << ", \"theta\": " << rational_list(p.theta.values[e]) << "}" << (e + 1 < g.edge_count() ? "," : "")
           << "\n";
    os << "  ]\n}\n";
    return os.str();
}

std::string serialize_candidates(const CandidateFile& c) {
    std::ostringstream os;
    os << "{\n  \"candidates\": [\n";
    for (std::size_t k = 0; k < c.subspaces.size(); ++k)
        os << "    {\"id\": " << quoted(c.ids[k]) << ", \"basis\": " << row_list(c.subspaces[k].basis().row_list())
           << "}" << (k + 1 < c.subspaces.size() ? "," : "") << "\n";
    os << "  ]\n}\n";
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace hbl
