#include <cstdio>
#include <map>

#include "CLI11.hpp"
#include "sepalg/job.hpp"

int main(int argc, char** argv) {
  CLI::App app{"finite-model workbench for local functions on separation algebras"};
  app.set_version_flag("--version",
                       std::string(sepalg::kToolName) + " " + std::string(sepalg::kToolVersion));

  std::string job_path;
  sepalg::RunOptions opts;

  app.add_option("--job", job_path, "job file (JSON)")->required();
  app.add_option("--format", opts.format, "report format")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, sepalg::RunOptions::Format>{
              {"text", sepalg::RunOptions::Format::text},
              {"json", sepalg::RunOptions::Format::json}},
          CLI::ignore_case));
  app.add_flag("--canonical", opts.canonical, "omit timing so repeated runs are byte-identical");
  app.add_option("--max-elements", opts.max_elements, "carrier size guard")
      ->check(CLI::PositiveNumber);
  app.add_option("--verify-locality", opts.verify, "when combinators re-check locality")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, sepalg::VerifyMode>{
              {"off", sepalg::VerifyMode::off},
              {"debug", sepalg::VerifyMode::debug_only},
              {"always", sepalg::VerifyMode::always}},
          CLI::ignore_case));

  CLI11_PARSE(app, argc, argv);

  const sepalg::RunResult result = sepalg::run_job_file(job_path, opts);
  std::fputs(result.output.c_str(), stdout);
  std::fputs(result.diagnostics.c_str(), stderr);
  return result.exit_code;
}
