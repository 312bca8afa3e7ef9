#include "sepalg/job.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

namespace sepalg {

namespace {

using nlohmann::json;

struct Token {
  enum class Type { Ident, Int, LParen, RParen, Comma, End };
  Type type;
  std::string text;
  std::size_t position;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) {
      current_ = {Token::Type::End, "", start};
      return;
    }
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      current_ = {Token::Type::LParen, "(", start};
      return;
    }
    if (c == ')') {
      ++pos_;
      current_ = {Token::Type::RParen, ")", start};
      return;
    }
    if (c == ',') {
      ++pos_;
      current_ = {Token::Type::Comma, ",", start};
      return;
    }
    if (c == '-' || (c >= '0' && c <= '9')) {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      current_ = {Token::Type::Int, std::string(text_.substr(start, pos_ - start)), start};
      return;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      ++pos_;
      while (pos_ < text_.size() &&
             ((text_[pos_] >= 'a' && text_[pos_] <= 'z') ||
              (text_[pos_] >= 'A' && text_[pos_] <= 'Z') ||
              (text_[pos_] >= '0' && text_[pos_] <= '9') || text_[pos_] == '_'))
        ++pos_;
      current_ = {Token::Type::Ident, std::string(text_.substr(start, pos_ - start)), start};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_{Token::Type::End, "", 0};
};

Token expect(Lexer& lex, Token::Type type, const char* what) {
  if (lex.peek().type != type)
    throw ParseError(std::string("expected ") + what, lex.peek().position);
  return lex.take();
}

int expect_int(Lexer& lex) {
  const Token t = expect(lex, Token::Type::Int, "an integer");
  return std::stoi(t.text);
}

std::string expect_name(Lexer& lex) {
  return expect(lex, Token::Type::Ident, "a name").text;
}

ProgramExpr parse_expr(Lexer& lex) {
  const Token head = expect(lex, Token::Type::Ident, "a program construct");
  const std::string& name = head.text;

  if (name == "skip") return ProgramExpr{ProgramExpr::Kind::Skip, {}, {}};

  if (name == "seq" || name == "choice") {
    expect(lex, Token::Type::LParen, "'('");
    ProgramExpr left = parse_expr(lex);
    expect(lex, Token::Type::Comma, "','");
    ProgramExpr right = parse_expr(lex);
    expect(lex, Token::Type::RParen, "')'");
    ProgramExpr out{name == "seq" ? ProgramExpr::Kind::Seq : ProgramExpr::Kind::Choice, {}, {}};
    out.children.push_back(std::move(left));
    out.children.push_back(std::move(right));
    return out;
  }

  if (name == "star") {
    expect(lex, Token::Type::LParen, "'('");
    ProgramExpr inner = parse_expr(lex);
    expect(lex, Token::Type::RParen, "')'");
    ProgramExpr out{ProgramExpr::Kind::Star, {}, {}};
    out.children.push_back(std::move(inner));
    return out;
  }

  CommandDescriptor cmd{};
  if (name == "new") {
    cmd.kind = CommandDescriptor::Kind::alloc;
    expect(lex, Token::Type::LParen, "'('");
    cmd.var = expect_name(lex);
    expect(lex, Token::Type::RParen, "')'");
  } else if (name == "dispose") {
    cmd.kind = CommandDescriptor::Kind::dispose_var;
    expect(lex, Token::Type::LParen, "'('");
    cmd.var = expect_name(lex);
    expect(lex, Token::Type::RParen, "')'");
  } else if (name == "dispose_loc") {
    cmd.kind = CommandDescriptor::Kind::dispose_loc;
    expect(lex, Token::Type::LParen, "'('");
    cmd.location = expect_int(lex);
    expect(lex, Token::Type::RParen, "')'");
  } else if (name == "mutate") {
    cmd.kind = CommandDescriptor::Kind::mutate;
    expect(lex, Token::Type::LParen, "'('");
    cmd.var = expect_name(lex);
    expect(lex, Token::Type::Comma, "','");
    cmd.value = expect_int(lex);
    expect(lex, Token::Type::RParen, "')'");
  } else if (name == "lookup") {
    cmd.kind = CommandDescriptor::Kind::lookup;
    expect(lex, Token::Type::LParen, "'('");
    cmd.var = expect_name(lex);
    expect(lex, Token::Type::Comma, "','");
    cmd.var2 = expect_name(lex);
    expect(lex, Token::Type::RParen, "')'");
  } else if (name == "adder") {
    cmd.kind = CommandDescriptor::Kind::adder;
    expect(lex, Token::Type::LParen, "'('");
    cmd.constant = expect_int(lex);
    expect(lex, Token::Type::RParen, "')'");
  } else if (name == "multiplier") {
    cmd.kind = CommandDescriptor::Kind::multiplier;
    expect(lex, Token::Type::LParen, "'('");
    cmd.constant = expect_int(lex);
    expect(lex, Token::Type::RParen, "')'");
  } else {
    throw ParseError("unknown primitive '" + name + "'", head.position);
  }
  return ProgramExpr{ProgramExpr::Kind::Primitive, std::move(cmd), {}};
}

}  // namespace

std::string ProgramExpr::text() const {
  switch (kind) {
    case Kind::Skip:
      return "skip";
    case Kind::Seq:
      return "seq(" + children[0].text() + "," + children[1].text() + ")";
    case Kind::Choice:
      return "choice(" + children[0].text() + "," + children[1].text() + ")";
    case Kind::Star:
      return "star(" + children[0].text() + ")";
    case Kind::Primitive: {
      const CommandDescriptor& c = *command;
      switch (c.kind) {
        case CommandDescriptor::Kind::dispose_loc:
          return "dispose_loc(" + std::to_string(c.location) + ")";
        case CommandDescriptor::Kind::alloc:
          return "new(" + c.var + ")";
        case CommandDescriptor::Kind::dispose_var:
          return "dispose(" + c.var + ")";
        case CommandDescriptor::Kind::mutate:
          return "mutate(" + c.var + "," + std::to_string(c.value) + ")";
        case CommandDescriptor::Kind::lookup:
          return "lookup(" + c.var + "," + c.var2 + ")";
        case CommandDescriptor::Kind::adder:
          return "adder(" + std::to_string(c.constant) + ")";
        case CommandDescriptor::Kind::multiplier:
          return "multiplier(" + std::to_string(c.constant) + ")";
      }
      return "?";
    }
  }
  return "?";
}

ProgramExpr parse_program(std::string_view text) {
  Lexer lex(text);
  ProgramExpr expr = parse_expr(lex);
  if (lex.peek().type != Token::Type::End)
    throw ParseError("trailing input after program", lex.peek().position);
  return expr;
}

LocalFunction elaborate(const ProgramExpr& expr, const BuiltModel& model) {
  switch (expr.kind) {
    case ProgramExpr::Kind::Primitive:
      return primitive(model, *expr.command);
    case ProgramExpr::Kind::Skip:
      return skip(model.algebra);
    case ProgramExpr::Kind::Seq:
      return seq(elaborate(expr.children[0], model), elaborate(expr.children[1], model));
    case ProgramExpr::Kind::Choice:
      return choice(elaborate(expr.children[0], model), elaborate(expr.children[1], model));
    case ProgramExpr::Kind::Star:
      return kstar(elaborate(expr.children[0], model));
  }
  throw std::logic_error("unknown program construct");
}

RawAction elaborate_action(const ProgramExpr& expr, const BuiltModel& model) {
  if (expr.kind == ProgramExpr::Kind::Primitive) return primitive_action(model, *expr.command);
  const LocalFunction f = elaborate(expr, model);
  return RawAction{f.algebra(), {f.outcomes().begin(), f.outcomes().end()}, expr.text()};
}

namespace {

std::string predicate_text(const Predicate& p) {
  std::string out = "{";
  bool first = true;
  const SeparationAlgebra& alg = *p.algebra();
  p.for_each_index([&](std::uint32_t i) {
    if (!first) out += ", ";
    first = false;
    out += alg.label_at(i);
  });
  return out + "}";
}

std::string outcome_text(const Outcome& o) {
  if (o.is_fault()) return "Fault";
  return predicate_text(o.states());
}

std::string statement_text(const Statement& s) {
  return predicate_text(s.pre) + " => " + predicate_text(s.post);
}

/// Accumulates both renderings; one is picked at the end.
struct Report {
  json root = json::object();
  std::vector<std::string> lines;

  void line(std::string s) { lines.push_back(std::move(s)); }

  std::string text() const {
    std::string out;
    for (const auto& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }
};

class JobError : public std::runtime_error {
 public:
  JobError(int exit_code, const std::string& message)
      : std::runtime_error(message), exit_code(exit_code) {}

  int exit_code;
};

const json& field(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end())
    throw JobError(2, std::string(what) + " is missing the '" + key + "' field");
  return *it;
}

std::string str_field(const json& j, const char* key, const char* what) {
  const json& v = field(j, key, what);
  if (!v.is_string()) throw JobError(2, std::string(what) + "." + key + " must be a string");
  return v.get<std::string>();
}

struct JobContext {
  BuiltModel model;
  std::map<std::string, ProgramExpr> programs;
  std::map<std::string, Specification> specs;
  std::filesystem::path base_dir;
  std::map<std::string, LocalFunction> sealed;

  const ProgramExpr& program(const std::string& name) {
    auto it = programs.find(name);
    if (it == programs.end()) throw JobError(2, "unknown program '" + name + "'");
    return it->second;
  }

  const Specification& spec(const std::string& name) {
    auto it = specs.find(name);
    if (it == specs.end()) throw JobError(2, "unknown spec '" + name + "'");
    return it->second;
  }

  const LocalFunction& sealed_program(const std::string& name) {
    auto it = sealed.find(name);
    if (it != sealed.end()) return it->second;
    const LocalFunction f = elaborate(program(name), model);
    return sealed.emplace(name, f).first->second;
  }
};

json counterexample_to_json(const LocalityCounterexample& c, const SeparationAlgebra& alg) {
  json out{{"frame", alg.label(c.frame)}, {"state", alg.label(c.state)}};
  if (c.lhs_fault) {
    out["kind"] = "fault";
  } else {
    out["kind"] = "missing";
    out["offending"] = alg.label(*c.offending);
  }
  return out;
}

void run_query(JobContext& ctx, const json& q, Report& report) {
  const std::string kind = str_field(q, "query", "a query");
  const SeparationAlgebra& alg = *ctx.model.algebra;
  json result{{"query", kind}};

  if (kind == "footprints" || kind == "min_safe") {
    const std::string name = str_field(q, "program", "the query");
    const LocalFunction& f = ctx.sealed_program(name);
    const Predicate p = kind == "footprints" ? footprints(f) : min_safe_states(f);
    result["program"] = name;
    result["elements"] = predicate_to_json(p);
    report.line(kind + " " + name + " = " + predicate_text(p));
  } else if (kind == "locality") {
    const std::string name = str_field(q, "program", "the query");
    const RawAction action = elaborate_action(ctx.program(name), ctx.model);
    const LocalityVerdict verdict = check_locality(action);
    result["program"] = name;
    result["local"] = verdict.local;
    if (verdict.local) {
      report.line("locality " + name + " = local");
    } else {
      const LocalityCounterexample& c = *verdict.counterexample;
      result["counterexample"] = counterexample_to_json(c, alg);
      std::string text = "locality " + name + " = NOT LOCAL: frame " + alg.label(c.frame) +
                         ", state " + alg.label(c.state);
      text += c.lhs_fault ? ", framed application faults"
                          : ", unreachable result " + alg.label(*c.offending);
      report.line(std::move(text));
    }
  } else if (kind == "detconst") {
    const std::string name = str_field(q, "program", "the query");
    const DetConstVerdict verdict = determinism_constancy(ctx.sealed_program(name));
    result["program"] = name;
    result["holds"] = verdict.holds;
    if (verdict.holds) {
      report.line("detconst " + name + " = holds");
    } else {
      const DetConstCounterexample& c = *verdict.counterexample;
      result["counterexample"] = json{{"frame", alg.label(c.frame)},
                                      {"state", alg.label(c.state)},
                                      {"lhs", outcome_to_json(c.lhs)},
                                      {"rhs", outcome_to_json(c.rhs)}};
      report.line("detconst " + name + " = FAILS: frame " + alg.label(c.frame) + ", state " +
                  alg.label(c.state) + ", lifted " + outcome_text(c.lhs) + ", framed " +
                  outcome_text(c.rhs));
    }
  } else if (kind == "big_spec" || kind == "small_spec") {
    const std::string name = str_field(q, "program", "the query");
    const LocalFunction& f = ctx.sealed_program(name);
    result["program"] = name;
    if (kind == "small_spec") {
      const SmallSpecResult r = small_spec(f);
      if (!r.has_spec()) {
        result["no_footprint_basis"] = json{{"witness", alg.label(*r.no_basis_witness)}};
        report.line("small_spec " + name + " = no footprint basis (witness " +
                    alg.label(*r.no_basis_witness) + ")");
      } else {
        result["statements"] = spec_to_json(*r.spec);
        report.line("small_spec " + name + ":");
        for (const Statement& s : r.spec->statements())
          report.line("  " + statement_text(s));
      }
    } else {
      const Specification spec = big_spec(f);
      result["statements"] = spec_to_json(spec);
      report.line("big_spec " + name + ":");
      for (const Statement& s : spec.statements()) report.line("  " + statement_text(s));
    }
  } else if (kind == "is_basis") {
    const std::string name = str_field(q, "program", "the query");
    const Predicate from = predicate_from_json(field(q, "from", "the query"), ctx.model);
    const BasisVerdict verdict = is_basis(from, ctx.sealed_program(name));
    result["program"] = name;
    result["from"] = predicate_to_json(from);
    result["basis"] = verdict.basis;
    std::string text =
        "is_basis " + name + " from " + predicate_text(from) + " = " +
        (verdict.basis ? "true" : "false");
    if (!verdict.basis) {
      result["witness"] = alg.label(*verdict.witness);
      text += " (witness " + alg.label(*verdict.witness) + ")";
    }
    report.line(std::move(text));
  } else if (kind == "is_complete") {
    const std::string name = str_field(q, "program", "the query");
    const std::string spec_name = str_field(q, "spec", "the query");
    const CompletenessVerdict verdict =
        is_complete(ctx.spec(spec_name), ctx.sealed_program(name));
    result["program"] = name;
    result["spec"] = spec_name;
    result["complete"] = verdict.complete;
    std::string text = "is_complete " + spec_name + " vs " + name + " = " +
                       (verdict.complete ? "true" : "false");
    if (!verdict.complete) {
      result["witness"] = alg.label(*verdict.witness);
      text += " (differs at " + alg.label(*verdict.witness) + ")";
    }
    report.line(std::move(text));
  } else if (kind == "entails") {
    const std::string spec_name = str_field(q, "spec", "the query");
    const Statement s = statement_from_json(field(q, "statement", "the query"), ctx.model);
    const bool holds = entails(ctx.spec(spec_name), s);
    result["spec"] = spec_name;
    result["statement"] = statement_to_json(s);
    result["entails"] = holds;
    report.line("entails " + spec_name + " |- " + statement_text(s) + " = " +
                (holds ? "true" : "false"));
  } else if (kind == "check_derivation") {
    const std::string spec_name = str_field(q, "spec", "the query");
    const std::string file = str_field(q, "file", "the query");
    std::ifstream in(ctx.base_dir / file);
    if (!in) throw JobError(2, "cannot open derivation file '" + file + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw JobError(2, "derivation file '" + file + "': " + e.what());
    }
    const Derivation d = derivation_from_json(doc, ctx.model);
    const DerivationCheck check = check_derivation(d, ctx.spec(spec_name));
    result["spec"] = spec_name;
    result["file"] = file;
    result["valid"] = check.valid;
    if (check.valid) {
      result["conclusion"] = statement_to_json(*check.conclusion);
      report.line("check_derivation " + spec_name + " " + file + " = valid, concludes " +
                  statement_text(*check.conclusion));
    } else {
      std::string path;
      for (std::size_t i : check.failing_path) {
        if (!path.empty()) path += '.';
        path += std::to_string(i);
      }
      if (path.empty()) path = "root";
      result["failing_path"] = check.failing_path;
      result["error"] = check.error;
      report.line("check_derivation " + spec_name + " " + file + " = invalid at " + path + ": " +
                  check.error);
    }
  } else {
    throw JobError(2, "unknown query '" + kind + "'");
  }

  report.root["results"].push_back(std::move(result));
}

}  // namespace

RunResult run_job(const nlohmann::json& job, const std::filesystem::path& base_dir,
                  const RunOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  set_combinator_verification(opts.verify);
  Report report;
  report.root["tool"] = std::string(kToolName);
  report.root["version"] = std::string(kToolVersion);
  report.line(std::string(kToolName) + " " + std::string(kToolVersion));

  RunResult out;
  try {
    if (!job.is_object()) throw JobError(2, "the job document must be an object");
    ModelLoad load = model_from_json(field(job, "algebra", "the job"), opts.max_elements);
    if (load.table_failed) {
      report.root["algebra"] =
          json{{"validation", validation_report_to_json(load.report)}};
      report.line("algebra: validation failed");
      for (const LawViolation& v : load.report.violations) {
        std::string w;
        for (const auto& item : v.witness) {
          if (!w.empty()) w += ", ";
          w += item;
        }
        report.line("  " + v.law + ": " + w);
      }
      out.exit_code = 1;
      out.output = opts.format == RunOptions::Format::json ? report.root.dump(2) + "\n"
                                                           : report.text();
      out.diagnostics = "error: the algebra table failed validation\n";
      return out;
    }

    JobContext ctx{std::move(*load.model), {}, {}, base_dir, {}};
    const SeparationAlgebra& alg = *ctx.model.algebra;

    const auto negativity = negativity_witness(alg);
    const WellFoundedness wf = check_well_founded(alg);
    json alg_info{{"origin", alg.origin()},
                  {"size", alg.size()},
                  {"unit", alg.label(alg.unit())},
                  {"well_founded", wf.well_founded},
                  {"validation", validation_report_to_json(load.report)}};
    if (negativity)
      alg_info["negativity"] = json::array(
          {alg.label(negativity->first), alg.label(negativity->second)});
    else
      alg_info["negativity"] = nullptr;
    report.root["algebra"] = std::move(alg_info);
    std::string alg_line = "algebra " + alg.origin() + ": " + std::to_string(alg.size()) +
                           " elements, unit " + alg.label(alg.unit());
    alg_line += wf.well_founded ? ", well-founded" : ", not well-founded";
    if (negativity)
      alg_line += " (negativity witness " + alg.label(negativity->first) + " * " +
                  alg.label(negativity->second) + " = " + alg.label(alg.unit()) + ")";
    report.line(std::move(alg_line));

    if (auto it = job.find("programs"); it != job.end()) {
      if (!it->is_object()) throw JobError(2, "'programs' must be an object");
      for (const auto& [name, text] : it->items()) {
        if (!text.is_string()) throw JobError(2, "program '" + name + "' must be a string");
        ctx.programs.emplace(name, parse_program(text.get<std::string>()));
      }
    }
    if (auto it = job.find("specs"); it != job.end()) {
      if (!it->is_object()) throw JobError(2, "'specs' must be an object");
      for (const auto& [name, doc] : it->items())
        ctx.specs.emplace(name, spec_from_json(doc, ctx.model));
    }

    report.root["results"] = json::array();
    if (auto it = job.find("queries"); it != job.end()) {
      if (!it->is_array()) throw JobError(2, "'queries' must be an array");
      for (const auto& q : *it) run_query(ctx, q, report);
    }
  } catch (const JobError& e) {
    out.exit_code = e.exit_code;
    out.diagnostics = std::string("error: ") + e.what() + "\n";
    return out;
  } catch (const SizeGuardError& e) {
    out.exit_code = 3;
    out.diagnostics = std::string("error: ") + e.what() + "\n";
    return out;
  } catch (const ModelError& e) {
    out.exit_code = 1;
    out.diagnostics = std::string("error: ") + e.what() + "\n";
    return out;
  } catch (const json::exception& e) {
    out.exit_code = 2;
    out.diagnostics = std::string("error: ") + e.what() + "\n";
    return out;
  } catch (const std::exception& e) {
    // ParseError, FormatError, NonLocalError, RuleError, AlgebraError
    out.exit_code = 2;
    out.diagnostics = std::string("error: ") + e.what() + "\n";
    return out;
  }

  if (!opts.canonical) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    report.root["elapsed_ms"] = elapsed;
    report.line("elapsed_ms " + std::to_string(elapsed));
  }

  out.output = opts.format == RunOptions::Format::json ? report.root.dump(2) + "\n"
                                                       : report.text();
  return out;
}

RunResult run_job_file(const std::filesystem::path& path, const RunOptions& opts) {
  std::ifstream in(path);
  if (!in) {
    RunResult out;
    out.exit_code = 2;
    out.diagnostics = "error: cannot open job file '" + path.string() + "'\n";
    return out;
  }
  nlohmann::json job;
  try {
    job = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    RunResult out;
    out.exit_code = 2;
    out.diagnostics = std::string("error: ") + e.what() + "\n";
    return out;
  }
  return run_job(job, path.parent_path(), opts);
}

}  // namespace sepalg
