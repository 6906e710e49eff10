#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbi/chernweil.hpp"
#include "orbi/parser.hpp"

namespace orbi {

// Everything a job can carry: the bundle (with its base atlas) plus optional
// sections, connection and partition of unity.
struct Document {
  std::string name;
  BundleCocycle bundle;
  std::vector<Section> sections;
  std::optional<ConnectionData> connection;
  std::optional<PartitionOfUnity> partition;
};

namespace io {

using json = nlohmann::ordered_json;

inline std::string number_text(double v) {
  Expr e = ExprMatrix::exact_or_real(v);
  if (e.is_rational()) return e.rational().str();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number_text(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline json complex_matrix_json(const CMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json::array({number_text(m(i, j).real()), number_text(m(i, j).imag())}));
    rows.push_back(row);
  }
  return rows;
}

inline json domain_json(const Domain& d) {
  json factors = json::array();
  for (const auto& f : d.factors) {
    if (f.kind == DomainFactor::Kind::Ball) {
      factors.push_back({{"ball", {{"dim", f.dim}, {"radius", number_text(f.radius)}}}});
    } else {
      json b = json::array();
      for (const auto& [lo, hi] : f.bounds) b.push_back(json::array({number_text(lo), number_text(hi)}));
      factors.push_back({{"box", b}});
    }
  }
  if (factors.size() == 1) return factors[0];
  return {{"product", factors}};
}

inline json to_json(const Document& doc) {
  const Atlas& a = doc.bundle.base;
  json j;
  j["name"] = doc.name;
  json groups = json::array();
  std::map<const FiniteGroup*, std::string> gname;
  for (const auto& c : a.charts) {
    if (gname.count(c.group.get())) continue;
    std::string name = c.group->name();
    for (const auto& [ptr, n] : gname)
      if (n == name) name += "_" + std::to_string(gname.size());
    gname[c.group.get()] = name;
    groups.push_back({{"name", name}, {"order", c.group->order()}, {"table", c.group->table()}, {"labels", c.group->labels()}});
  }
  j["groups"] = groups;
  json charts = json::array();
  for (const auto& c : a.charts) {
    json action = json::array();
    for (const auto& m : c.action.matrices) action.push_back(matrix_json(m));
    charts.push_back({{"id", c.id}, {"dim", c.dim()}, {"domain", domain_json(c.domain)}, {"group", gname[c.group.get()]}, {"action", action}});
  }
  j["charts"] = charts;
  json injections = json::array();
  for (const auto& i : a.injections) {
    json map = json::array();
    for (const auto& e : i.map) map.push_back(e.str());
    injections.push_back({{"id", i.id}, {"src", i.src}, {"dst", i.dst}, {"map", map}, {"lambda", i.lambda}});
  }
  j["injections"] = injections;
  json comps = json::array();
  for (const auto& c : a.compositions) comps.push_back({{"first", c.first}, {"second", c.second}, {"result", c.result}});
  j["compositions"] = comps;

  const BundleCocycle& b = doc.bundle;
  json fiber = json::object(), trans = json::object();
  for (std::size_t c = 0; c < a.charts.size(); ++c) {
    json ms = json::array();
    for (const auto& m : b.fiber_actions[c].matrices) ms.push_back(matrix_json(m));
    fiber[a.charts[c].id] = ms;
  }
  for (const auto& i : a.injections) {
    const ExprMatrix& g = b.transition(i.id);
    json rows = json::array();
    for (int r = 0; r < g.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < g.cols(); ++c) row.push_back(g(r, c).str());
      rows.push_back(row);
    }
    trans[i.id] = rows;
  }
  j["bundle"] = {{"rank", b.rank}, {"fiber_actions", fiber}, {"transitions", trans}};

  json sections = json::array();
  for (const auto& s : doc.sections) {
    json vals = json::object();
    for (std::size_t c = 0; c < a.charts.size(); ++c) {
      json v = json::array();
      for (const auto& e : s.values[c]) v.push_back(e.str());
      vals[a.charts[c].id] = v;
    }
    sections.push_back({{"name", s.name}, {"values", vals}});
  }
  j["sections"] = sections;
  if (doc.connection) {
    json forms = json::object();
    for (std::size_t c = 0; c < a.charts.size(); ++c) {
      const MatrixForm& w = doc.connection->forms[c];
      json rows = json::array();
      for (int r = 0; r < w.rows(); ++r) {
        json row = json::array();
        for (int k = 0; k < w.cols(); ++k) row.push_back(w.at(r, k).str());
        rows.push_back(row);
      }
      forms[a.charts[c].id] = rows;
    }
    j["connection"] = {{"metric", doc.connection->metric}, {"forms", forms}};
  }
  if (doc.partition) {
    json p = json::object();
    for (std::size_t c = 0; c < a.charts.size(); ++c) p[a.charts[c].id] = doc.partition->psi[c].str();
    j["partition"] = p;
  }
  bool any_complex = b.fiber_complex.has_value();
  for (const auto& c : a.charts) any_complex = any_complex || c.complex_action.has_value();
  if (any_complex) {
    json cs = json::object(), charts_c = json::object(), fib = json::object();
    for (std::size_t c = 0; c < a.charts.size(); ++c) {
      if (a.charts[c].complex_action) {
        json ms = json::array();
        for (const auto& m : a.charts[c].complex_action->matrices) ms.push_back(complex_matrix_json(m));
        charts_c[a.charts[c].id] = ms;
      }
      if (b.fiber_complex) {
        json ms = json::array();
        for (const auto& m : (*b.fiber_complex)[c].matrices) ms.push_back(complex_matrix_json(m));
        fib[a.charts[c].id] = ms;
      }
    }
    cs["charts"] = charts_c;
    if (b.fiber_complex) cs["fiber"] = fib;
    j["complex_structure"] = cs;
  }
  return j;
}

// ---- reading ----

class Reader {
 public:
  [[noreturn]] static void fail(const std::string& path, const std::string& what) { throw InputError(path + ": " + what); }

  static const json& need(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path, "missing field '" + key + "'");
    return j.at(key);
  }

  static std::string text(const json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) return j.dump();
    fail(path, "expected a number or expression string");
  }

  static double number(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    try {
      return parse_constant(text(j, path));
    } catch (const Error& e) {
      fail(path, e.what());
    }
  }

  static int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
  }

  static Expr expr(const json& j, const std::string& path) {
    try {
      return parse(text(j, path));
    } catch (const ParseError& e) {
      fail(path, std::string(e.what()) + " (byte " + std::to_string(e.offset()) + ")");
    }
  }

  static Mat matrix(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected a matrix (array of rows)");
    Eigen::Index rows = static_cast<Eigen::Index>(j.size()), cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      std::string rp = path + "[" + std::to_string(r) + "]";
      if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) fail(rp, "rows must have equal length");
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number(j[r][c], rp + "[" + std::to_string(c) + "]");
    }
    return m;
  }

  static CMat complex_matrix(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected a complex matrix");
    Eigen::Index rows = static_cast<Eigen::Index>(j.size()), cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    CMat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        std::string p = path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
        const json& e = j[r][c];
        if (!e.is_array() || e.size() != 2) fail(p, "complex entries are [re, im] pairs");
        m(r, c) = {number(e[0], p + "[0]"), number(e[1], p + "[1]")};
      }
    return m;
  }

  static DomainFactor factor(const json& j, const std::string& path) {
    try {
      if (j.contains("ball")) {
        const json& b = j["ball"];
        return DomainFactor::ball(integer(need(b, "dim", path + ".ball"), path + ".ball.dim"),
                                  b.contains("radius") ? number(b["radius"], path + ".ball.radius") : 1.0);
      }
      if (j.contains("box")) {
        std::vector<std::pair<double, double>> bounds;
        for (std::size_t i = 0; i < j["box"].size(); ++i) {
          std::string p = path + ".box[" + std::to_string(i) + "]";
          const json& pr = j["box"][i];
          if (!pr.is_array() || pr.size() != 2) fail(p, "bounds are [lo, hi] pairs");
          bounds.emplace_back(number(pr[0], p + "[0]"), number(pr[1], p + "[1]"));
        }
        return DomainFactor::box(bounds);
      }
    } catch (const InputError& e) {
      if (std::string(e.what()).rfind(path, 0) == 0) throw;
      fail(path, e.what());
    }
    fail(path, "domain must be 'ball', 'box' or 'product'");
  }

  static Domain domain(const json& j, const std::string& path) {
    Domain d;
    if (j.contains("product")) {
      for (std::size_t i = 0; i < j["product"].size(); ++i)
        d.factors.push_back(factor(j["product"][i], path + ".product[" + std::to_string(i) + "]"));
    } else {
      d.factors.push_back(factor(j, path));
    }
    return d;
  }

  template <class F>
  static void for_each_chart_entry(const json& obj, const Atlas& a, const std::string& path, F&& f) {
    if (!obj.is_object()) fail(path, "expected an object keyed by chart id");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      int ci = a.chart_index(it.key());
      if (ci < 0) fail(path + "." + it.key(), "unknown chart");
      f(static_cast<std::size_t>(ci), it.value(), path + "." + it.key());
    }
  }
};

inline Document from_json(const json& j) {
  using R = Reader;
  Document doc;
  doc.name = j.value("name", "");
  std::map<std::string, GroupPtr> groups;
  const json& gs = R::need(j, "groups", "$");
  for (std::size_t i = 0; i < gs.size(); ++i) {
    std::string p = "groups[" + std::to_string(i) + "]";
    const json& g = gs[i];
    std::string name = R::need(g, "name", p).get<std::string>();
    std::vector<std::vector<int>> table;
    try {
      table = R::need(g, "table", p).get<std::vector<std::vector<int>>>();
    } catch (const nlohmann::json::exception&) {
      R::fail(p + ".table", "expected rows of element indices");
    }
    if (g.contains("order") && R::integer(g["order"], p + ".order") != static_cast<int>(table.size()))
      R::fail(p + ".order", "does not match the table size");
    std::vector<std::string> labels = g.value("labels", std::vector<std::string>{});
    try {
      groups[name] = std::make_shared<const FiniteGroup>(name, table, labels);
    } catch (const InputError& e) {
      R::fail(p, e.what());
    }
  }
  Atlas& a = doc.bundle.base;
  const json& cs = R::need(j, "charts", "$");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    std::string p = "charts[" + std::to_string(i) + "]";
    const json& c = cs[i];
    Chart ch;
    ch.id = R::need(c, "id", p).get<std::string>();
    ch.domain = R::domain(R::need(c, "domain", p), p + ".domain");
    if (c.contains("dim") && R::integer(c["dim"], p + ".dim") != ch.domain.dim()) R::fail(p + ".dim", "does not match the domain");
    std::string gname = R::need(c, "group", p).get<std::string>();
    if (!groups.count(gname)) R::fail(p + ".group", "unknown group '" + gname + "'");
    ch.group = groups[gname];
    ch.action.group = ch.group;
    if (c.contains("action")) {
      for (std::size_t k = 0; k < c["action"].size(); ++k)
        ch.action.matrices.push_back(R::matrix(c["action"][k], p + ".action[" + std::to_string(k) + "]"));
    } else {
      ch.action = Representation::trivial(ch.group, ch.domain.dim());
    }
    a.charts.push_back(std::move(ch));
  }
  if (j.contains("injections"))
    for (std::size_t i = 0; i < j["injections"].size(); ++i) {
      std::string p = "injections[" + std::to_string(i) + "]";
      const json& ij = j["injections"][i];
      Injection inj;
      inj.src = R::need(ij, "src", p).get<std::string>();
      inj.dst = R::need(ij, "dst", p).get<std::string>();
      inj.id = ij.value("id", inj.src + "->" + inj.dst);
      if (ij.contains("map")) {
        for (std::size_t k = 0; k < ij["map"].size(); ++k) inj.map.push_back(R::expr(ij["map"][k], p + ".map[" + std::to_string(k) + "]"));
      } else {
        Mat m = R::matrix(R::need(ij, "matrix", p), p + ".matrix");
        Vec t = Vec::Zero(m.rows());
        if (ij.contains("translation"))
          for (std::size_t k = 0; k < ij["translation"].size() && static_cast<Eigen::Index>(k) < t.size(); ++k)
            t(static_cast<Eigen::Index>(k)) = R::number(ij["translation"][k], p + ".translation[" + std::to_string(k) + "]");
        inj.map = Injection::affine(m, t);
      }
      try {
        inj.lambda = R::need(ij, "lambda", p).get<std::vector<int>>();
      } catch (const nlohmann::json::exception&) {
        R::fail(p + ".lambda", "expected a list of element indices");
      }
      a.injections.push_back(std::move(inj));
    }
  if (j.contains("compositions"))
    for (std::size_t i = 0; i < j["compositions"].size(); ++i) {
      std::string p = "compositions[" + std::to_string(i) + "]";
      const json& c = j["compositions"][i];
      a.compositions.push_back({R::need(c, "first", p).get<std::string>(), R::need(c, "second", p).get<std::string>(),
                                R::need(c, "result", p).get<std::string>()});
    }

  BundleCocycle& b = doc.bundle;
  if (j.contains("bundle")) {
    const json& bj = j["bundle"];
    b.rank = R::integer(R::need(bj, "rank", "bundle"), "bundle.rank");
    for (const auto& c : a.charts) b.fiber_actions.push_back(Representation::trivial(c.group, b.rank));
    if (bj.contains("fiber_actions"))
      R::for_each_chart_entry(bj["fiber_actions"], a, "bundle.fiber_actions", [&](std::size_t ci, const json& v, const std::string& p) {
        Representation r{a.charts[ci].group, {}};
        for (std::size_t k = 0; k < v.size(); ++k) r.matrices.push_back(R::matrix(v[k], p + "[" + std::to_string(k) + "]"));
        if (b.rank == 0) r.matrices.assign(r.matrices.size(), Mat(0, 0));
        b.fiber_actions[ci] = r;
      });
    if (bj.contains("transitions")) {
      const json& t = bj["transitions"];
      for (auto it = t.begin(); it != t.end(); ++it) {
        std::string p = "bundle.transitions." + it.key();
        if (a.injection_index(it.key()) < 0) R::fail(p, "unknown injection");
        ExprMatrix m(b.rank, b.rank);
        if (static_cast<int>(it.value().size()) != b.rank) R::fail(p, "expected rank rows");
        for (int r = 0; r < b.rank; ++r) {
          if (static_cast<int>(it.value()[r].size()) != b.rank) R::fail(p + "[" + std::to_string(r) + "]", "expected rank entries");
          for (int c = 0; c < b.rank; ++c)
            m(r, c) = R::expr(it.value()[r][c], p + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
        b.transitions[it.key()] = m;
      }
    }
    for (const auto& inj : a.injections)
      if (!b.transitions.count(inj.id)) b.transitions[inj.id] = ExprMatrix::identity(b.rank);
  } else {
    for (const auto& c : a.charts) b.fiber_actions.push_back(Representation::trivial(c.group, 0));
    for (const auto& inj : a.injections) b.transitions[inj.id] = ExprMatrix(0, 0);
  }

  if (j.contains("complex_structure")) {
    const json& cx = j["complex_structure"];
    if (cx.contains("charts"))
      R::for_each_chart_entry(cx["charts"], a, "complex_structure.charts", [&](std::size_t ci, const json& v, const std::string& p) {
        ComplexRepresentation r{a.charts[ci].group, {}};
        for (std::size_t k = 0; k < v.size(); ++k) r.matrices.push_back(R::complex_matrix(v[k], p + "[" + std::to_string(k) + "]"));
        a.charts[ci].complex_action = r;
      });
    if (cx.contains("fiber")) {
      std::vector<ComplexRepresentation> fc;
      for (const auto& c : a.charts) fc.push_back(ComplexRepresentation::trivial(c.group, b.rank / 2));
      R::for_each_chart_entry(cx["fiber"], a, "complex_structure.fiber", [&](std::size_t ci, const json& v, const std::string& p) {
        ComplexRepresentation r{a.charts[ci].group, {}};
        for (std::size_t k = 0; k < v.size(); ++k) r.matrices.push_back(R::complex_matrix(v[k], p + "[" + std::to_string(k) + "]"));
        fc[ci] = r;
      });
      b.fiber_complex = fc;
    }
  }

  if (j.contains("sections"))
    for (std::size_t i = 0; i < j["sections"].size(); ++i) {
      std::string p = "sections[" + std::to_string(i) + "]";
      const json& sj = j["sections"][i];
      Section s = Section::zero(b);
      s.name = sj.value("name", "s" + std::to_string(i));
      R::for_each_chart_entry(R::need(sj, "values", p), a, p + ".values", [&](std::size_t ci, const json& v, const std::string& vp) {
        if (static_cast<int>(v.size()) != b.rank) R::fail(vp, "expected rank entries");
        for (int k = 0; k < b.rank; ++k) s.values[ci][static_cast<std::size_t>(k)] = R::expr(v[k], vp + "[" + std::to_string(k) + "]");
      });
      doc.sections.push_back(std::move(s));
    }
  if (j.contains("connection")) {
    const json& cj = j["connection"];
    ConnectionData c = ConnectionData::flat(b);
    c.metric = cj.value("metric", true);
    R::for_each_chart_entry(R::need(cj, "forms", "connection"), a, "connection.forms", [&](std::size_t ci, const json& v, const std::string& p) {
      int n = a.charts[ci].dim();
      MatrixForm w = MatrixForm::zero(b.rank, n, 1);
      if (static_cast<int>(v.size()) != b.rank) R::fail(p, "expected rank rows");
      for (int r = 0; r < b.rank; ++r)
        for (int k = 0; k < b.rank; ++k) {
          std::string ep = p + "[" + std::to_string(r) + "][" + std::to_string(k) + "]";
          try {
            FormExpr f = parse_form(R::text(v[r][k], ep), n);
            if (!f.is_zero() && f.degree() != 1) R::fail(ep, "connection entries must be 1-forms");
            w.set(r, k, f.is_zero() ? FormExpr(n, 1) : f);
          } catch (const ParseError& e) {
            R::fail(ep, std::string(e.what()) + " (byte " + std::to_string(e.offset()) + ")");
          }
        }
      c.forms[ci] = w;
    });
    doc.connection = c;
  }
  if (j.contains("partition")) {
    PartitionOfUnity p;
    p.psi.assign(a.charts.size(), Expr(0));
    R::for_each_chart_entry(j["partition"], a, "partition", [&](std::size_t ci, const json& v, const std::string& path) {
      p.psi[ci] = R::expr(v, path);
    });
    doc.partition = p;
  }
  return doc;
}

inline Document parse_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("malformed document at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return from_json(j);
}

inline Document load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

inline std::string dump(const Document& d) { return to_json(d).dump(2); }

}  // namespace io
}  // namespace orbi
