// jetvar: command-line front end over a model file.
//
//   jetvar -m model.jv <command> [args...] [--format text|json|latex] [--verify]
//
// Exit codes: 0 success, 1 usage or parse error, 2 mathematical refusal.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "jetvar/io/commands.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw jetvar::io::UsageError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace jetvar::io;
  CLI::App app{"Exact variational calculus on jet spaces with even and odd fields"};
  std::string model_path, format;
  if (const char* env = std::getenv("JETVAR_FORMAT")) format = env;
  if (format.empty()) format = "text";
  bool timing = false;
  CommandOptions opt;
  std::vector<std::string> args;

  app.add_option("-m,--model", model_path, "model file (.jv)")->required();
  app.add_option("-f,--format", format, "output format: text, json or latex (default from JETVAR_FORMAT)");
  app.add_flag("--verify", opt.verify, "append residuals of the defining identities");
  app.add_flag("--timing", timing, "report wall-clock time");
  app.require_subcommand(1);
  app.fallthrough();

  auto command = [&](const char* name, const char* help, const char* arg_help) {
    CLI::App* c = app.add_subcommand(name, help);
    if (arg_help) c->add_option("args", args, arg_help);
    return c;
  };
  command("el", "Euler-Lagrange form of a Lagrangian", "<lagrangian>");
  command("lepagean", "boundary form and Lepagean equivalent", "<lagrangian>");
  command("fvf", "first variational formula residual", "<lagrangian> <symmetry>");
  command("noether", "divergence-symmetry test and Noether current", "<lagrangian> <symmetry>");
  command("trivialize", "write a null Lagrangian as d_H xi", "<lagrangian>");
  command("lie", "Lie derivative of a form", "<symmetry> <form>");
  command("prolong", "prolonged components of a symmetry", "<symmetry>")
      ->add_option("--order", opt.order, "highest multi-index order")->capture_default_str();
  command("brst", "BRST generator of a declared Lie algebra", nullptr)
      ->add_option("--algebra", opt.algebra, "algebra name")->required();
  command("nilpotent", "nilpotency of an odd symmetry", "<symmetry>");
  CLI::App* coh = command("cohomology", "truncated relative cohomology", "<symmetry>");
  coh->add_option("--charge", opt.charge, "ghost charge k")->capture_default_str();
  coh->add_option("--formdeg", opt.form_degree, "horizontal form degree m")->capture_default_str();
  coh->add_option("--max-jet", opt.max_jet, "jet order bound J")->capture_default_str();
  coh->add_option("--max-deg", opt.max_degree, "polynomial degree bound D")->capture_default_str();
  coh->add_option("--max-base", opt.max_base, "degree bound B in base coordinates")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    const Format fmt = parse_format(format);
    const ModelFile mf = parse_model(read_file(model_path));
    const std::string name = app.get_subcommands().front()->get_name();
    const Report r = run(mf, name, args, opt);
    std::cout << render(r, fmt, timing);
    return r.exit_code();
  } catch (const ParseError& e) {
    std::cerr << model_path << ":" << e.what() << "\n";
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
