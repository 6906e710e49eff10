#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "orbi/cli.hpp"

int main(int argc, char** argv) {
  using namespace orbi::cli;
  CLI::App app{"orbi: orbifold vector bundles, twisted sectors and Euler classes"};
  app.require_subcommand(1);
  JobSpec job;
  std::string format = "text", out_path;
  app.add_option("--seed", job.seed, "seed for sample points")->capture_default_str();
  app.add_option("--quad-order", job.quad_order, "Gauss-Legendre order per axis")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--tol", job.tol, "quadrature convergence tolerance")->capture_default_str();
  app.add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}))->capture_default_str();
  app.add_option("--out", out_path, "write the report here instead of stdout");

  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    if (name == "example")
      sub->add_option("name", job.inputs, "s2-z3-bad, teardrop-<p>, s2-tangent, s2-trivial (s2-tangentless), flat-torus")->required();
    else
      sub->add_option("document", job.inputs, "input document")->required();
    if (name == "obstruct") sub->add_option("--section", job.section, "section name (default: first)");
    if (name == "euler") sub->add_flag("--via-vertical", job.via_vertical, "compute through VE and pull back");
    sub->callback([&job, name]() { job.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }
  job.format = format == "structured" ? Format::Structured : Format::Text;

  Outcome outcome = execute(job);
  std::string text = render(outcome, job.format);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "cannot write '" << out_path << "'\n";
      return kInputError;
    }
    f << text;
  }
  return outcome.exit;
}
