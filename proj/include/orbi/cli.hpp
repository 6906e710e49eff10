#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "orbi/chernweil.hpp"
#include "orbi/document.hpp"
#include "orbi/gallery.hpp"

namespace orbi::cli {

using json = nlohmann::ordered_json;

enum class Format { Text, Structured };

struct JobSpec {
  std::string subcommand;
  std::vector<std::string> inputs;  // document paths, or the example name for `example`
  std::string section;              // obstruct: section name (default: first)
  bool via_vertical = false;        // euler
  std::uint64_t seed = 0;
  int quad_order = 48;
  double tol = 1e-6;
  Format format = Format::Text;
};

enum Exit { kOk = 0, kValidationFailure = 1, kInputError = 2 };

struct Outcome {
  json report;
  int exit = kOk;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"validate", "classify", "vertical", "sectors", "euler", "obstruct", "example"};
  return s;
}

inline json problems_json(const ValidationReport& r) {
  json p = json::array();
  for (const auto& s : r.problems) p.push_back(s);
  return p;
}

inline json report_json(const ValidationReport& r) { return {{"ok", r.ok()}, {"max_residual", r.max_residual}, {"problems", problems_json(r)}}; }

inline json opt_rational(const std::optional<Rational>& q) { return q ? json(q->str()) : json(nullptr); }
inline json opt_double(const std::optional<double>& d) { return d ? json(*d) : json(nullptr); }

// `ok` covers atlas, bundle, connection and partition; `sections_ok` the sections.
inline json validate_doc(const Document& d, std::uint64_t seed, bool& ok, bool* sections_ok = nullptr) {
  json out;
  out["name"] = d.name;
  ValidationReport atlas = validate_atlas(d.bundle.base, seed);
  out["atlas"] = report_json(atlas);
  ok = atlas.ok();
  if (!atlas.ok()) return out;
  ValidationReport bundle = validate_bundle(d.bundle, seed);
  out["bundle"] = report_json(bundle);
  ok = ok && bundle.ok();
  if (!bundle.ok()) return out;
  if (d.connection) {
    ConnectionData c = *d.connection;
    ValidationReport r = validate_connection(d.bundle, c, seed);
    out["connection"] = report_json(r);
    ok = ok && r.ok();
  }
  if (d.partition) {
    ValidationReport r = validate_partition(d.bundle.base, *d.partition, seed);
    out["partition"] = report_json(r);
    ok = ok && r.ok();
  }
  json secs = json::array();
  for (const auto& s : d.sections) {
    SectionReport r = validate_section(d.bundle, s, seed);
    json j = report_json(r.report);
    j["name"] = s.name;
    j["min_norm"] = r.min_norm;
    j["nonvanishing"] = r.nonvanishing;
    if (sections_ok) *sections_ok = *sections_ok && r.ok();
    secs.push_back(j);
  }
  out["sections"] = secs;
  return out;
}

inline json verdict_json(const GoodBadVerdict& v) {
  return {{"verdict", to_string(v.verdict)},
          {"K_b", v.k_b_summary},
          {"K_f", v.k_f_summary},
          {"fiber_kernel_trivial_on_VE", v.fiber_kernel_trivial_on_ve}};
}

inline json census_json(const Atlas& a) {
  SectorCensus c = sector_census(a);
  json rows = json::array();
  for (std::size_t k = 0; k < c.classes.size(); ++k) {
    const auto& m = c.classes[k].front();
    SectorAtlas sa = sector_atlas(a, c, static_cast<int>(k));
    rows.push_back({{"sector", k},
                    {"twisted", static_cast<bool>(c.twisted[k])},
                    {"representative", a.charts[static_cast<std::size_t>(m.chart)].id + ":" +
                                           a.charts[static_cast<std::size_t>(m.chart)].group->labels()[static_cast<std::size_t>(m.element)]},
                    {"members", c.classes[k].size()},
                    {"dim", sa.atlas.charts.empty() ? 0 : sa.atlas.charts.front().dim()},
                    {"shift", opt_rational(sector_degree_shift(a, c, static_cast<int>(k)))}});
  }
  return rows;
}

inline json class_json(const OrbifoldClass& cls) {
  json comps = json::array();
  for (const auto& c : cls.components)
    comps.push_back({{"sector", c.sector},
                     {"twisted", c.twisted},
                     {"shift", opt_rational(c.shift)},
                     {"form_degree", c.form_degree},
                     {"degree", opt_rational(c.degree())},
                     {"zero", c.is_zero()},
                     {"constant_one", c.is_constant_one()},
                     {"integral", opt_double(c.integral)}});
  return {{"kind", cls.kind}, {"space", cls.space}, {"components", comps}};
}

inline Document load_input(const JobSpec& job) {
  if (job.inputs.empty()) throw InputError("no input document given");
  return io::load_document(job.inputs.front());
}

inline Outcome run(const JobSpec& job) {
  Outcome out;
  const std::string& cmd = job.subcommand;
  if (cmd == "example") {
    if (job.inputs.empty()) throw InputError("example needs a name; known: s2-z3-bad, teardrop-<p>, s2-tangent, s2-trivial, flat-torus");
    out.report = io::to_json(gallery::example(job.inputs.front()));
    return out;
  }
  if (std::find(subcommands().begin(), subcommands().end(), cmd) == subcommands().end())
    throw InputError("unknown subcommand '" + cmd + "'");
  Document d = load_input(job);
  bool ok = true, sections_ok = true;
  json v = validate_doc(d, job.seed, ok, &sections_ok);
  if (cmd == "validate") {
    out.report = v;
    out.exit = ok && sections_ok ? kOk : kValidationFailure;
    return out;
  }
  if (!ok) {
    out.report = {{"error", "input failed validation"}, {"validation", v}};
    out.exit = kValidationFailure;
    return out;
  }
  QuadratureOptions q{job.quad_order, job.tol, job.seed};
  if (cmd == "classify") {
    out.report = verdict_json(classify(d.bundle));
  } else if (cmd == "vertical") {
    BundleCocycle ve = vertical_bundle(d.bundle);
    ValidationReport r = validate_bundle(ve, job.seed);
    RestrictionResult rr = restrict_to_zero_section(ve, d.bundle, job.seed);
    Document vd{d.name + "-vertical", ve, {}, {}, {}};
    out.report = {{"bundle", verdict_json(classify(d.bundle))},
                  {"vertical", verdict_json(classify(ve))},
                  {"vertical_validation", report_json(r)},
                  {"restriction_certificate", rr.certificate},
                  {"restriction_atlas_matches", rr.atlas_matches},
                  {"document", io::to_json(vd)}};
    if (!r.ok()) out.exit = kValidationFailure;
  } else if (cmd == "sectors") {
    CoincidenceCertificate cc = census_coincidence(d.bundle);
    out.report = {{"base", census_json(d.bundle.base)},
                  {"total_space", census_json(total_space(d.bundle))},
                  {"coincidence", {{"match", cc.match}, {"detail", cc.detail}}}};
  } else if (cmd == "euler") {
    if (!d.connection || !d.partition) throw InputError("euler needs a connection and a partition of unity");
    ConnectionData c = *d.connection;
    validate_connection(d.bundle, c, job.seed);
    ClassOptions opt{q, job.via_vertical};
    OrbifoldClass cls = orbifold_characteristic_class(d.bundle, c, *d.partition, ClassKind::Euler, opt);
    double total = 0;
    for (const auto& comp : cls.components) total += comp.integral.value_or(0.0);
    out.report = {{"verdict", to_string(classify(d.bundle).verdict)},
                  {"convention", convention(ClassKind::Euler)},
                  {"class", class_json(cls)},
                  {"total_integral", total}};
    if (classify(d.bundle).verdict == Verdict::Bad || job.via_vertical)
      out.report["over_E"] = class_json(vertical_characteristic_class(d.bundle, c, ClassKind::Euler));
  } else if (cmd == "obstruct") {
    if (!d.partition) throw InputError("obstruct needs a partition of unity");
    if (d.sections.empty()) throw InputError("obstruct needs a section");
    const Section* s = &d.sections.front();
    if (!job.section.empty()) {
      s = nullptr;
      for (const auto& t : d.sections)
        if (t.name == job.section) s = &t;
      if (!s) throw InputError("no section named '" + job.section + "'");
    }
    ObstructionReport r = obstruction_verdict(d.bundle, *s, *d.partition, q);
    json comps = json::array();
    for (const auto& c : r.components)
      comps.push_back({{"sector", c.sector}, {"twisted", c.twisted}, {"shift", opt_rational(c.shift)},
                       {"max_node_value", c.max_node_value}, {"integral", opt_double(c.integral)}});
    out.report = {{"section", s->name},
                  {"refused", r.refused},
                  {"reason", r.reason},
                  {"route", r.bad_route ? "vertical" : "direct"},
                  {"components", comps},
                  {"max_node_value", r.max_node_value},
                  {"max_integral", r.max_integral},
                  {"adapted_max_node_value", r.adapted_max_node_value},
                  {"verdict", r.refused ? "REFUSED" : (r.pass ? "PASS" : "FAIL")}};
    if (!r.pass) out.exit = kValidationFailure;
  }
  return out;
}

// Exceptions become exit codes: input problems 2, failed certificates 1.
inline Outcome execute(const JobSpec& job) {
  try {
    return run(job);
  } catch (const InputError& e) {
    return {{{"error", e.what()}}, kInputError};
  } catch (const ParseError& e) {
    return {{{"error", e.what()}}, kInputError};
  } catch (const CertificateError& e) {
    return {{{"error", e.what()}}, kValidationFailure};
  } catch (const DomainError& e) {
    return {{{"error", e.what()}}, kValidationFailure};
  } catch (const Error& e) {
    return {{{"error", e.what()}}, kInputError};
  }
}

inline void render_text(const json& j, std::ostream& os, const std::string& prefix = "") {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const json& v = it.value();
      if (v.is_structured()) {
        os << prefix << it.key() << ":\n";
        render_text(v, os, prefix + "  ");
      } else {
        os << prefix << it.key() << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      }
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (j[i].is_structured()) {
        os << prefix << "- [" << i << "]\n";
        render_text(j[i], os, prefix + "  ");
      } else {
        os << prefix << "- " << (j[i].is_string() ? j[i].get<std::string>() : j[i].dump()) << "\n";
      }
    }
  } else {
    os << prefix << j.dump() << "\n";
  }
}

inline std::string render(const Outcome& o, Format f) {
  if (f == Format::Structured) return o.report.dump(2) + "\n";
  std::ostringstream os;
  render_text(o.report, os);
  return os.str();
}

}  // namespace orbi::cli
