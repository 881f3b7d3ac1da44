#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tightmean/tightmean.h"

namespace {

struct Flags {
  std::optional<std::string> estimator, dist, out, format, psi;
  std::optional<std::uint64_t> n, trials, seed;
  std::optional<double> delta, sigma, beta, L, xi, tau, eps, mean, dof, outlier_multiple, zeta;
  std::optional<int> dim;
  bool inject_broken_psi = false;
  std::string config;
};

template <class T>
void put(nlohmann::json& doc, const char* key, const std::optional<T>& v) {
  if (v) doc[key] = *v;
}

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its keys");
  cmd->add_option("--estimator", f.estimator, "catoni | mom | heavy2d | hd");
  cmd->add_option("--dist", f.dist, "gaussian | student-t | two-point | inlier-instance | point-mass | file:<path>");
  cmd->add_option("--n", f.n, "samples per trial");
  cmd->add_option("--delta", f.delta, "failure probability");
  cmd->add_option("--sigma", f.sigma, "standard deviation bound");
  cmd->add_option("--beta", f.beta, "lightness window parameter");
  cmd->add_option("--L", f.L, "lightness mass parameter");
  cmd->add_option("--xi", f.xi, "sample share for initial estimates");
  cmd->add_option("--tau", f.tau, "strip shrink; negative derives it");
  cmd->add_option("--trials", f.trials, "number of seeded trials");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--dim", f.dim, "dimension");
  cmd->add_option("--eps", f.eps, "corruption level for robust-verify");
  cmd->add_option("--out", f.out, "per-trial output file");
  cmd->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--psi", f.psi, "influence function");
  cmd->add_option("--mean", f.mean, "mean of gaussian / point-mass laws");
  cmd->add_option("--dof", f.dof, "student-t degrees of freedom");
  cmd->add_option("--outlier-multiple", f.outlier_multiple, "two-point outlier location in units of T");
  cmd->add_option("--zeta", f.zeta, "subspace net packing radius for hd");
  cmd->add_flag("--inject-broken-psi", f.inject_broken_psi, "add a psi that violates the constraint")
      ->group("");
}

nlohmann::json build_config(const Flags& f) {
  nlohmann::json doc = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::runtime_error("cannot open config file: " + f.config);
    in >> doc;
    if (!doc.is_object()) throw std::runtime_error("config file must hold a JSON object");
  }
  put(doc, "estimator", f.estimator);
  put(doc, "dist", f.dist);
  put(doc, "out", f.out);
  put(doc, "format", f.format);
  put(doc, "psi", f.psi);
  put(doc, "n", f.n);
  put(doc, "trials", f.trials);
  put(doc, "seed", f.seed);
  put(doc, "delta", f.delta);
  put(doc, "sigma", f.sigma);
  put(doc, "beta", f.beta);
  put(doc, "L", f.L);
  put(doc, "xi", f.xi);
  put(doc, "tau", f.tau);
  put(doc, "eps", f.eps);
  put(doc, "mean", f.mean);
  put(doc, "dof", f.dof);
  put(doc, "outlier_multiple", f.outlier_multiple);
  put(doc, "zeta", f.zeta);
  put(doc, "dim", f.dim);
  if (f.inject_broken_psi) doc["inject_broken_psi"] = true;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded experiments and verification suites for heavy-tailed mean estimation"};
  app.require_subcommand(1);
  Flags flags;
  const char* commands[] = {"psi-check", "coverage", "tester-eval", "robust-verify", "geometry-verify"};
  const char* help[] = {"check the influence-function constraints",
                        "Monte Carlo coverage of an estimator",
                        "statistical soundness of the lightness tester",
                        "corruption lower and upper bound checks",
                        "enclosing-ball and Jung inequality checks"};
  for (int k = 0; k < 5; ++k) add_flags(app.add_subcommand(commands[k], help[k]), flags);
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  nlohmann::json config;
  try {
    config = build_config(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  char* report = nullptr;
  int exit_code = 0;
  const tm_status st = tm_run_command(command.c_str(), config.dump().c_str(), &report, &exit_code);
  if (report) {
    std::cout << report << "\n";
    tm_string_free(report);
  }
  if (st != TM_OK) std::cerr << "error: " << tm_status_string(st) << ": " << tm_last_error() << "\n";
  return exit_code;
}
