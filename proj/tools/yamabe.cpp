// yamabe: verify, construct or sweep gradient Yamabe solitons from a JSON config.

#include <CLI11.hpp>

#include <iostream>

#include "yamabe/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gradient Yamabe soliton verifier and constructor"};
  yamabe::cli::RunOptions opt;
  std::string out = ".";
  double tol = 0.0;
  std::string backend;
  unsigned threads = 0;
  app.add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory");
  auto* tol_opt = app.add_option("--tol", tol, "override the residual tolerance");
  auto* backend_opt = app.add_option("--backend", backend, "derivative backend")
                          ->check(CLI::IsMember({"dual", "fd", "analytic"}));
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (0: automatic)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : yamabe::cli::kConfigError;
  }
  opt.out_dir = out;
  if (*tol_opt) opt.tol = tol;
  if (*backend_opt) opt.backend = yamabe::cli::parse_backend(backend);
  if (*threads_opt && threads > 0) opt.threads = threads;
  return yamabe::cli::run(opt);
}
