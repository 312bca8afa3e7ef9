#pragma once

#include <filesystem>

#include "sepalg/io.hpp"

namespace sepalg {

inline constexpr std::string_view kToolName = "sepwb";
inline constexpr std::string_view kToolVersion = "0.1.0";

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
        position(position) {}

  std::size_t position;
};

/// Program grammar: skip | primitive | seq(A,B) | choice(A,B) | star(A).
/// Primitives: new(x), dispose(x), dispose_loc(1), mutate(x,7),
/// lookup(x,y), adder(1), multiplier(2).
struct ProgramExpr {
  enum class Kind { Primitive, Skip, Seq, Choice, Star };

  Kind kind = Kind::Skip;
  std::optional<CommandDescriptor> command;  // Primitive only
  std::vector<ProgramExpr> children;

  std::string text() const;
};

ProgramExpr parse_program(std::string_view text);

/// Seals the whole expression; throws NonLocalError if any primitive in it
/// is not local.
LocalFunction elaborate(const ProgramExpr& expr, const BuiltModel& model);

/// Unsealed outcome table. For a bare primitive this skips the locality
/// check so a verdict can be reported instead of an error; composites are
/// built from sealed children.
RawAction elaborate_action(const ProgramExpr& expr, const BuiltModel& model);

struct RunOptions {
  enum class Format { text, json };

  Format format = Format::text;
  bool canonical = false;  // omit timing so output is byte-stable
  std::size_t max_elements = kDefaultMaxElements;
  VerifyMode verify = VerifyMode::debug_only;
};

struct RunResult {
  int exit_code = 0;        // 0 ok, 1 validation/config, 2 parse, 3 size guard
  std::string output;       // report (stdout)
  std::string diagnostics;  // errors (stderr)
};

RunResult run_job(const nlohmann::json& job, const std::filesystem::path& base_dir,
                  const RunOptions& opts);
RunResult run_job_file(const std::filesystem::path& path, const RunOptions& opts);

}  // namespace sepalg
