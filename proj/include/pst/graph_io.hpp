// Graph JSON documents and JSON views of reductions and chains.
//
//   { "version": 1, "n": 6,
//     "edges": [ {"u":0,"v":1,"J":2}, {"u":1,"v":5,"param":"y"}, ... ],
//     "fields": [0,0,0,0,0,0],          (optional)
//     "params": { "y": 1.4142135623730951 } }   (optional)
//
// Numbers may also be given as expression strings ("sqrt(2)").  Edges that
// name a parameter missing from "params" are unknowns for the design solver.
#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pst/expression.hpp"
#include "pst/givens.hpp"
#include "pst/graph.hpp"

namespace pst {

using json = nlohmann::json;

class schema_error : public validation_error {
 public:
  using validation_error::validation_error;
};

inline constexpr int graph_format_version = 1;

namespace detail {

inline void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw schema_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw schema_error("unknown key '" + key + "' in " + where);
  }
}

inline double number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return evaluate(v.get<std::string>());
    } catch (const expression_error& e) {
      throw schema_error(where + ": " + e.what());
    }
  }
  throw schema_error(where + " must be a number or expression string");
}

inline std::size_t index(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw schema_error(where + " must be a nonnegative integer");
  return v.get<std::size_t>();
}

}  // namespace detail

/// Graph whose couplings may be named parameters.
struct GraphTemplate {
  struct TemplateEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    std::variant<double, std::string> value;
  };

  std::size_t n = 0;
  std::vector<TemplateEdge> edges;
  std::vector<double> fields;
  std::map<std::string, double> params;

  /// Parameter names used by edges but not bound in `params`, sorted.
  std::vector<std::string> unknowns() const {
    std::set<std::string> out;
    for (const auto& e : edges)
      if (const auto* name = std::get_if<std::string>(&e.value); name && !params.contains(*name)) out.insert(*name);
    return {out.begin(), out.end()};
  }

  /// Graph with `assignment` layered over the stored bindings.
  SpinGraph bind(const std::map<std::string, double>& assignment = {}) const {
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (const auto& e : edges) {
      double J = 0.0;
      if (const auto* name = std::get_if<std::string>(&e.value)) {
        if (auto a = assignment.find(*name); a != assignment.end()) J = a->second;
        else if (auto p = params.find(*name); p != params.end()) J = p->second;
        else throw validation_error("parameter '" + *name + "' is unbound");
      } else {
        J = std::get<double>(e.value);
      }
      out.push_back({e.u, e.v, J});
    }
    return SpinGraph(n, std::move(out), fields);
  }

  static GraphTemplate from_graph(const SpinGraph& g) {
    GraphTemplate t;
    t.n = g.size();
    for (const auto& e : g.edges()) t.edges.push_back({e.u, e.v, e.J});
    t.fields = g.fields();
    return t;
  }
};

inline GraphTemplate template_from_json(const json& doc) {
  detail::only_keys(doc, {"version", "n", "edges", "fields", "params"}, "graph document");
  if (!doc.contains("version")) throw schema_error("missing 'version'");
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != graph_format_version)
    throw schema_error("unsupported version " + doc["version"].dump() + " (expected 1)");
  if (!doc.contains("n")) throw schema_error("missing 'n'");
  GraphTemplate t;
  t.n = detail::index(doc["n"], "'n'");
  if (t.n == 0) throw schema_error("'n' must be at least 1");

  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw schema_error("'params' must be an object");
    for (const auto& [name, v] : doc["params"].items()) t.params[name] = detail::number(v, "params." + name);
  }
  if (!doc.contains("edges") || !doc["edges"].is_array()) throw schema_error("'edges' must be an array");
  std::size_t k = 0;
  for (const auto& e : doc["edges"]) {
    const std::string where = "edges[" + std::to_string(k++) + "]";
    detail::only_keys(e, {"u", "v", "J", "param"}, where);
    if (!e.contains("u") || !e.contains("v")) throw schema_error(where + " needs 'u' and 'v'");
    GraphTemplate::TemplateEdge te;
    te.u = detail::index(e["u"], where + ".u");
    te.v = detail::index(e["v"], where + ".v");
    if (te.u >= t.n || te.v >= t.n)
      throw schema_error(where + " site out of range for n=" + std::to_string(t.n));
    if (e.contains("J") == e.contains("param")) throw schema_error(where + " needs exactly one of 'J' or 'param'");
    if (e.contains("J")) {
      te.value = detail::number(e["J"], where + ".J");
    } else {
      if (!e["param"].is_string() || e["param"].get<std::string>().empty())
        throw schema_error(where + ".param must be a nonempty string");
      te.value = e["param"].get<std::string>();
    }
    t.edges.push_back(std::move(te));
  }
  if (doc.contains("fields")) {
    if (!doc["fields"].is_array() || doc["fields"].size() != t.n)
      throw schema_error("'fields' must be an array of n numbers");
    for (std::size_t i = 0; i < t.n; ++i)
      t.fields.push_back(detail::number(doc["fields"][i], "fields[" + std::to_string(i) + "]"));
  }
  // Structural checks (duplicates, self-loops) with placeholder couplings.
  std::vector<Edge> probe;
  for (const auto& e : t.edges) probe.push_back({e.u, e.v, 1.0});
  (void)SpinGraph(t.n, std::move(probe));
  return t;
}

inline json template_to_json(const GraphTemplate& t) {
  json doc;
  doc["version"] = graph_format_version;
  doc["n"] = t.n;
  doc["edges"] = json::array();
  for (const auto& e : t.edges) {
    json je{{"u", e.u}, {"v", e.v}};
    if (const auto* name = std::get_if<std::string>(&e.value)) je["param"] = *name;
    else je["J"] = std::get<double>(e.value);
    doc["edges"].push_back(std::move(je));
  }
  bool any_field = false;
  for (double b : t.fields) any_field = any_field || b != 0.0;
  if (any_field) doc["fields"] = t.fields;
  if (!t.params.empty()) doc["params"] = t.params;
  return doc;
}

inline SpinGraph graph_from_json(const json& doc) {
  const auto t = template_from_json(doc);
  const auto free = t.unknowns();
  if (!free.empty()) throw schema_error("parameter '" + free.front() + "' has no value");
  return t.bind();
}

inline json graph_to_json(const SpinGraph& g) { return template_to_json(GraphTemplate::from_graph(g)); }

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw schema_error("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_json_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

inline GraphTemplate load_template(const std::string& path) { return template_from_json(read_json_file(path)); }
inline SpinGraph load_graph(const std::string& path) { return graph_from_json(read_json_file(path)); }
inline void save_graph(const SpinGraph& g, const std::string& path) { write_json_file(graph_to_json(g), path); }
inline void save_template(const GraphTemplate& t, const std::string& path) {
  write_json_file(template_to_json(t), path);
}

inline json to_json(const ChainBlock& b) {
  return {{"offset", b.offset}, {"length", b.length}, {"diag", b.diag}, {"offdiag", b.offdiag},
          {"null_block", b.null_block}};
}

inline json to_json(const ReductionResult& r, bool emit_q = false) {
  const std::size_t n = r.T.size();
  std::vector<double> diag(n), off;
  for (std::size_t k = 0; k < n; ++k) diag[k] = r.T(k, k);
  for (std::size_t k = 0; k + 1 < n; ++k) off.push_back(r.T(k, k + 1));
  json doc;
  doc["T"] = {{"diag", diag}, {"offdiag", off}};
  doc["blocks"] = json::array();
  for (const auto& b : r.blocks) doc["blocks"].push_back(to_json(b));
  doc["rotations"] = json::array();
  for (const auto& g : r.rotations) doc["rotations"].push_back({{"i", g.i}, {"j", g.j}, {"c", g.c}, {"s", g.s}});
  doc["tol"] = r.tol;
  if (emit_q) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < r.Q.rows(); ++i) {
      std::vector<double> row(r.Q.cols());
      for (Eigen::Index j = 0; j < r.Q.cols(); ++j) row[std::size_t(j)] = r.Q(i, j);
      rows.push_back(row);
    }
    doc["Q"] = std::move(rows);
  }
  return doc;
}

}  // namespace pst
