// Command-line front end: simulate, certify, axioms, compare.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "tsdelay/config.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  unsigned jobs = 1;
  std::optional<double> real_step;
  std::optional<std::uint64_t> seed;
};

void write_file(const fs::path& path, const std::string& data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw tsdelay::Error(tsdelay::ErrorCode::Config, path.string() + ": cannot write");
  f << data;
  if (!f) throw tsdelay::Error(tsdelay::ErrorCode::Config, path.string() + ": write failed");
}

tsdelay::RunConfig load(const Options& o) {
  tsdelay::RunConfig cfg = tsdelay::load_config(o.config);
  if (o.real_step) cfg.real_step = *o.real_step;
  if (o.seed) cfg.seed = *o.seed;
  cfg.search.jobs = std::max(1u, o.jobs);
  return cfg;
}

int simulate(const Options& o) {
  const auto cfg = load(o);
  const auto problem = tsdelay::build_problem(cfg);
  const auto tr = tsdelay::solve(problem);
  const fs::path path = fs::path(o.out) / cfg.output.trajectory;
  write_file(path, tr.to_csv());
  std::cout << "trajectory: " << path.string() << " (" << tr.size() << " rows)\n";
  std::cout << "residual: " << tsdelay::residual(problem, tr) << '\n';
  return 0;
}

int certify(const Options& o) {
  const auto cfg = load(o);
  const auto problem = tsdelay::build_problem(cfg);
  const auto cert = tsdelay::certify(problem, cfg.search);
  const auto tr = tsdelay::solve(problem);
  const std::string text = cert.to_text();
  write_file(fs::path(o.out) / cfg.output.certificate, text);
  write_file(fs::path(o.out) / cfg.output.certificate_csv, tsdelay::certificate_csv(problem, tr, cert));
  std::cout << text;
  return cert.certified() ? 0 : 1;
}

int axioms(const Options& o) {
  const auto cfg = load(o);
  const auto sys = tsdelay::build_system(cfg);
  tsdelay::SampleSpec spec;
  spec.count = cfg.axiom_samples;
  spec.seed = cfg.seed;
  spec.delay_h = cfg.h;
  const auto report = tsdelay::verify_axioms(sys, spec);
  const std::string text = report.to_text();
  write_file(fs::path(o.out) / cfg.output.axioms, text);
  std::cout << text;
  return report.all_pass() ? 0 : 1;
}

int compare(const Options& o) {
  const auto cfg = load(o);
  const auto problem = tsdelay::build_problem(cfg);
  std::optional<double> lam;
  if (!cfg.search.lambdas.empty()) lam = cfg.search.lambdas.front();
  const auto report = tsdelay::check_literature_conditions(problem, cfg.compare_N, lam);
  const std::string text = report.to_text();
  write_file(fs::path(o.out) / cfg.output.compare, text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay dynamic equations on time scales: simulation and stability certificates"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Configuration file")->required();
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--jobs", o.jobs, "Parallel candidates in the certificate search");
    sub->add_option("--real-step", o.real_step, "Sampling step on dense stretches");
    sub->add_option("--seed", o.seed, "Seed for axiom sampling");
  };
  int (*handler)(const Options&) = nullptr;
  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Cmd cmds[] = {
      {"simulate", "Solve the delay equation and write the trajectory CSV", simulate},
      {"certify", "Search for a stability or instability certificate", certify},
      {"axioms", "Property-test the shift operators", axioms},
      {"compare", "Evaluate stability conditions from the literature", compare},
  };
  for (const Cmd& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    sub->callback([&handler, fn = c.fn] { handler = fn; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "tsdelay: " << e.what() << '\n';
    return 2;
  }
  try {
    return handler(o);
  } catch (const std::exception& e) {
    std::cerr << "tsdelay: " << e.what() << '\n';
    return 2;
  }
}
