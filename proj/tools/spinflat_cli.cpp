// spinflat: generate and verify flat surfaces in R^{1,3} and H^3.
//
//   spinflat gen-flat     --config run.json [--out DIR] [--tol-NAME=VALUE ...] [--dump-nodes]
//   spinflat gen-flat-psi ...
//   spinflat gen-h3       ...
//   spinflat analyze      ...
//   spinflat converge     ...
//
// Exit status: 0 when every check passes, 1 when a check fails (the first
// failing check is printed), 2 for configuration or usage errors.

#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <map>
#include <optional>

#include "spinflat/errors.hpp"
#include "spinflat/run.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  bool dump_nodes = false;
  bool escalate = false;
  std::map<std::string, std::optional<double>> tol;
};

void add_run_options(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON run configuration")->required();
  sub->add_option("--out", o.out, "output directory (overrides output.dir)");
  sub->add_flag("--dump-nodes", o.dump_nodes, "include per-node values in the report");
  sub->add_flag("--escalate-warnings", o.escalate, "turn warnings into failures");
  for (auto& [name, value] : o.tol) {
    sub->add_option_function<double>(
        "--tol-" + name, [&v = value](double x) { v = x; }, "override tolerance '" + name + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat surfaces in Minkowski space and hyperbolic space"};
  app.require_subcommand(1);

  Options opts;
  for (const auto& [name, v] : spinflat::Tolerances{}.as_map()) opts.tol[name] = std::nullopt;

  const char* names[] = {"gen-flat", "gen-flat-psi", "gen-h3", "analyze", "converge"};
  const char* help[] = {"flat surface from (f1, f2, h0, h1)", "flat surface from (psi, h0, h1)",
                        "flat surface in H^3 from (theta, omega)", "verify a given mesh",
                        "convergence study over a refinement ladder"};
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 5; ++i) {
    subs.push_back(app.add_subcommand(names[i], help[i]));
    add_run_options(subs.back(), opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string mode_str;
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) mode_str = names[i];
  const spinflat::Mode mode = *spinflat::parse_mode(mode_str);

  const auto t0 = std::chrono::steady_clock::now();
  spinflat::RunConfig config;
  try {
    config = spinflat::load_config(opts.config, mode);
    for (const auto& [name, v] : opts.tol)
      if (v) {
        if (!(*v > 0)) throw spinflat::ConfigError("--tol-" + name + " must be positive");
        config.tol.set(name, *v);
      }
    if (opts.escalate) config.tol.escalate_warnings = true;
    if (!opts.out.empty()) config.output.dir = opts.out;
    if (opts.dump_nodes) config.dump_nodes = true;
  } catch (const spinflat::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  spinflat::RunResult result;
  try {
    result = spinflat::run(config);
    spinflat::write_outputs(config, result);
  } catch (const spinflat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const spinflat::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return 2;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  for (const auto& c : result.report["checks"]) {
    std::cout << c["status"].get<std::string>() << "  " << c["name"].get<std::string>();
    if (c.contains("value") && c["value"].is_number())
      std::cout << "  " << c["value"].get<double>() << " " << c["relation"].get<std::string>()
                << " " << c["tolerance"].get<double>();
    if (c.contains("error")) std::cout << "  " << c["error"].get<std::string>();
    std::cout << "\n";
  }
  std::cerr << "elapsed " << secs << " s\n";
  if (result.status != 0) {
    std::cerr << "FAILED: " << result.first_failure << "\n";
    return 1;
  }
  std::cout << "all checks passed\n";
  return 0;
}
