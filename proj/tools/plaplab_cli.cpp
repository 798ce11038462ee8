// Command-line front end for the plaplab shared library. Each subcommand
// forwards a JSON experiment config to the library and reports the manifest;
// the exit status is nonzero when any asserted invariant failed.

#include <array>
#include <cstdio>
#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "plaplab.h"

namespace {

int run_kind(const std::string& kind, const std::string& config_path, const std::string& out_dir,
             uint64_t seed, int threads, bool quiet) {
  char* manifest = nullptr;
  int all_passed = 0;
  const plap_status st =
      plap_run_experiment_file(config_path.c_str(), kind.c_str(), out_dir.c_str(), seed, threads,
                               &manifest, &all_passed);
  if (st != PLAP_OK) {
    std::fprintf(stderr, "plaplab %s: %s\n", kind.c_str(), plap_last_error());
    return 2;
  }
  if (!quiet && manifest) std::printf("%s\n", manifest);
  plap_free_string(manifest);
  if (!all_passed) {
    std::fprintf(stderr, "plaplab %s: one or more verdicts failed (see manifest)\n", kind.c_str());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plaplab: weighted anisotropic p-Laplace laboratory"};
  app.set_version_flag("--version", std::string(plap_version()));
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::string out = "out";
    uint64_t seed = 0;
    int threads = 1;
    bool quiet = false;
  };

  static const char* kinds[] = {"solve", "dn", "mono", "detect", "perturb", "ucp", "calibrate-eps"};
  static const char* descriptions[] = {
      "solve one Dirichlet problem and store the solution field",
      "assemble a Dirichlet-to-Neumann pairing table over a boundary dictionary",
      "evaluate the monotonicity triple (lower, middle, upper) per dictionary entry",
      "estimate the region where a hidden conductivity exceeds the reference",
      "run a coefficient-perturbation gradient stability study",
      "run the 2-D diagnostics: Beltrami residual, dual stream function, plateau scan",
      "calibrate the perturbation size keeping min |grad u| >= 1/2"};

  std::array<Common, 7> options;
  for (size_t i = 0; i < 7; ++i) {
    CLI::App* sub = app.add_subcommand(kinds[i], descriptions[i]);
    sub->add_option("--config", options[i].config, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", options[i].out, "output directory");
    sub->add_option("--seed", options[i].seed, "seed for randomized suites");
    sub->add_option("--threads", options[i].threads, "worker threads for independent entries");
    sub->add_flag("--quiet", options[i].quiet, "suppress the manifest on stdout");
  }

  CLI11_PARSE(app, argc, argv);

  for (size_t i = 0; i < 7; ++i) {
    if (app.get_subcommand(kinds[i])->parsed()) {
      return run_kind(kinds[i], options[i].config, options[i].out, options[i].seed,
                      options[i].threads, options[i].quiet);
    }
  }
  return 2;
}
