#include "galign/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "galign/advisor.hpp"
#include "galign/dsl.hpp"
#include "galign/error.hpp"
#include "galign/eval.hpp"
#include "galign/export.hpp"
#include "galign/json.hpp"
#include "galign/library.hpp"
#include "galign/scenario.hpp"
#include "galign/service.hpp"

namespace galign::cli {

namespace {

// Raised for usage problems found after flag parsing (missing file, bad KEY=VALUE).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised after model problems have been reported on stderr.
struct ModelError {};

struct EvalFlags {
  bool no_confidence = false;
  bool no_calibration = false;
  std::string or_policy = "explicit";
  std::vector<std::string> select;

  void add_to(CLI::App& cmd) {
    cmd.add_flag("--no-confidence", no_confidence, "Ignore link confidence levels");
    cmd.add_flag("--no-calibration", no_calibration, "Ignore author calibration");
    cmd.add_option("--or-policy", or_policy, "Or-group policy")
        ->check(CLI::IsMember({"explicit", "best", "pessimistic"}));
    cmd.add_option("--select", select, "Choose an Or-group member, GROUP=LINK");
  }
};

std::pair<std::string, std::string> split_pair(const std::string& text, const char* flag) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw UsageError(std::string(flag) + " expects KEY=VALUE, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

EvalOptions make_options(const EvalFlags& flags) {
  EvalOptions options;
  options.use_confidence = !flags.no_confidence;
  options.use_calibration = !flags.no_calibration;
  options.or_policy = *or_policy_from_string(flags.or_policy);
  for (const auto& item : flags.select) {
    auto [group, link] = split_pair(item, "--select");
    options.or_selection[group] = link;
  }
  return options;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void print_diagnostic(std::ostream& os, const std::string& file, const Diagnostic& d) {
  os << file << ": " << to_string(d.severity) << "[" << d.code << "]";
  if (!d.subject.empty()) os << " " << d.subject;
  os << ": " << d.message << "\n";
}

// Loads a model, reporting syntax errors and invariant violations on `err`.
GoalGraph load(const std::string& file, std::ostream& err) {
  std::string text = read_file(file);
  ParseResult parsed = parse_model(text);
  for (const auto& e : parsed.errors) err << format_parse_error(file, e) << "\n";
  if (!parsed.ok()) {
    for (const auto& d : parsed.diagnostics) print_diagnostic(err, file, d);
    throw ModelError{};
  }
  return std::move(*parsed.graph);
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write '" + path + "'");
  file << text;
}

std::string today() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%d");
  return os.str();
}

Quantity quantity_arg(const std::string& text, const char* flag) {
  auto q = parse_quantity(text);
  if (!q) throw UsageError(std::string(flag) + " expects a quantity such as 80% or '3 months', got '" + text + "'");
  return *q;
}

Number number_arg(const std::string& text, const char* flag) {
  auto n = parse_decimal(text);
  if (!n) throw UsageError(std::string(flag) + " expects a decimal number, got '" + text + "'");
  return *n;
}

// Commands ------------------------------------------------------------------

int cmd_validate(const std::string& file, bool json, std::ostream& out, std::ostream& err) {
  std::string text = read_file(file);
  ParseResult parsed = parse_model(text);
  if (json) {
    Json errors = Json::array();
    for (const auto& e : parsed.errors) {
      errors.push_back({{"line", e.span.line}, {"column", e.span.column}, {"message", e.message}});
    }
    bool valid = parsed.ok();
    out << Json{{"valid", valid}, {"parse_errors", errors}, {"diagnostics", diagnostics_json(parsed.diagnostics)}}.dump(2)
        << "\n";
    return valid ? kExitOk : kExitModelError;
  }
  for (const auto& e : parsed.errors) out << format_parse_error(file, e) << "\n";
  for (const auto& d : parsed.diagnostics) print_diagnostic(out, file, d);
  if (!parsed.ok()) {
    err << file << ": invalid model\n";
    return kExitModelError;
  }
  if (parsed.diagnostics.empty()) out << file << ": ok\n";
  return kExitOk;
}

void print_eval_table(const GoalGraph& graph, const EvaluationResult& eval, std::ostream& out) {
  out << "model: " << graph.name() << "\n";
  out << std::left << std::setw(10) << "ID" << std::right << std::setw(12) << "MAGNITUDE" << std::setw(10) << "RAW"
      << std::setw(10) << "ADJUSTED" << "  " << std::left << std::setw(14) << "STATUS" << "LABEL\n";
  for (const auto& [id, outcome] : eval.outcomes) {
    const Objective* o = graph.find_objective(id);
    out << std::left << std::setw(10) << id << std::right << std::setw(12) << format_quantity(o->magnitude)
        << std::setw(10) << format_fixed(outcome.raw_sum, 2) << std::setw(10)
        << format_fixed(outcome.adjusted_sum, 2) << "  " << std::left << std::setw(14) << to_display(outcome.status)
        << render_label(*o) << "\n";
  }
  for (const auto& w : eval.warnings) out << "warning[" << w.code << "] " << w.subject << ": " << w.message << "\n";
}

std::string amount_text(const Number& value, const Objective& target) {
  std::string text = format_decimal(value, 6);
  return target.magnitude.is_percent() ? text + "%" : text + " " + target.magnitude.unit_name;
}

void print_attribution(const GoalGraph& graph, const Attribution& a, std::ostream& out) {
  const Objective& target = *graph.find_objective(a.objective);
  out << a.requirement << " -> " << a.objective << "\n";
  out << "  raw:        " << amount_text(a.raw_amount, target) << "\n";
  out << "  adjusted:   " << amount_text(a.adjusted_amount, target) << "\n";
  out << "  confidence: " << format_decimal(a.compound_confidence, 6) << "\n";
  if (a.paths.empty()) out << "  no contribution chain reaches " << a.objective << "\n";
  for (const auto& p : a.paths) {
    out << "  chain";
    for (const auto& link : p.links) out << " " << link;
    out << ": delivers " << amount_text(p.delivered_amount, target) << " @ conf "
        << format_decimal(p.compound_confidence, 6) << "\n";
  }
  for (const auto& w : a.warnings) out << "  warning[" << w.code << "] " << w.message << "\n";
}

void print_priorities(const std::vector<PriorityEntry>& ranked, std::ostream& out) {
  out << std::left << std::setw(6) << "RANK" << std::setw(12) << "REQUIREMENT" << std::right << std::setw(12)
      << "SCORE" << std::setw(16) << "VALUE/HOUR" << "\n";
  int rank = 1;
  for (const auto& entry : ranked) {
    out << std::left << std::setw(6) << rank++ << std::setw(12) << entry.requirement << std::right << std::setw(12)
        << format_fixed(entry.score, 6) << std::setw(16)
        << (entry.value_density ? format_fixed(*entry.value_density, 8) : std::string("-")) << "\n";
  }
}

void print_diff(const DiffReport& report, std::ostream& out) {
  out << std::left << std::setw(10) << "ID" << std::setw(28) << "STATUS" << std::right << std::setw(12) << "RAW"
      << std::setw(12) << "dRAW" << std::setw(12) << "ADJUSTED" << std::setw(12) << "dADJ" << "\n";
  for (const auto& d : report.objectives) {
    std::string status = to_display(d.baseline.status);
    if (d.status_changed) status += std::string(" -> ") + to_display(d.scenario.status);
    out << std::left << std::setw(10) << d.objective << std::setw(28) << status << std::right << std::setw(12)
        << format_fixed(d.scenario.raw_sum, 2) << std::setw(12) << format_fixed(d.delta_raw, 2) << std::setw(12)
        << format_fixed(d.scenario.adjusted_sum, 2) << std::setw(12) << format_fixed(d.delta_adjusted, 2) << "\n";
  }
  out << report.changed << " status change(s), " << report.unchanged << " unchanged\n";
}

void print_prompts(const std::vector<Prompt>& prompts, std::ostream& out) {
  for (const auto& p : prompts) out << p.subject << " [" << to_string(p.kind) << "] " << p.question << "\n";
  if (prompts.empty()) out << "no prompts\n";
}

std::vector<std::string> argv_of(const std::vector<std::string>& args) {
  std::vector<std::string> full{"galign"};
  full.insert(full.end(), args.begin(), args.end());
  return full;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantified goal-graph analysis for requirements alignment", "galign"};
  app.require_subcommand(1);

  std::string file;
  bool json = false;
  EvalFlags eval_flags;

  auto* validate_cmd = app.add_subcommand("validate", "Check a model and list diagnostics");
  validate_cmd->add_option("FILE", file, "Model file")->required();
  validate_cmd->add_flag("--json", json, "JSON output");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate objective satisfaction");
  eval_cmd->add_option("FILE", file, "Model file")->required();
  eval_flags.add_to(*eval_cmd);
  eval_cmd->add_flag("--json", json, "JSON report");

  std::string from, to;
  auto* attribute_cmd = app.add_subcommand("attribute", "Attribute a requirement's value to an objective");
  attribute_cmd->add_option("FILE", file, "Model file")->required();
  attribute_cmd->add_option("--from", from, "Requirement id")->required();
  attribute_cmd->add_option("--to", to, "Objective id")->required();
  eval_flags.add_to(*attribute_cmd);
  attribute_cmd->add_flag("--json", json, "JSON output");

  std::string objective_list;
  auto* prioritize_cmd = app.add_subcommand("prioritize", "Rank requirements by attributed value");
  prioritize_cmd->add_option("FILE", file, "Model file")->required();
  prioritize_cmd->add_option("--objectives", objective_list, "Comma-separated target objectives");
  eval_flags.add_to(*prioritize_cmd);
  prioritize_cmd->add_flag("--json", json, "JSON output");

  std::vector<std::string> set_confidence, set_amount, exclude, include, whatif_select;
  bool whatif_no_confidence = false, whatif_no_calibration = false;
  auto* whatif_cmd = app.add_subcommand("whatif", "Compare a scenario against the baseline");
  whatif_cmd->add_option("FILE", file, "Model file")->required();
  whatif_cmd->add_option("--set-confidence", set_confidence, "LINK=VALUE");
  whatif_cmd->add_option("--set-amount", set_amount, "LINK=QUANTITY");
  whatif_cmd->add_option("--exclude", exclude, "Requirement assumed not delivered");
  whatif_cmd->add_option("--include", include, "Requirement assumed delivered");
  whatif_cmd->add_option("--select", whatif_select, "GROUP=LINK");
  whatif_cmd->add_flag("--no-confidence", whatif_no_confidence, "Ignore link confidence levels");
  whatif_cmd->add_flag("--no-calibration", whatif_no_calibration, "Ignore author calibration");
  whatif_cmd->add_flag("--json", json, "JSON output");

  auto* prompts_cmd = app.add_subcommand("prompts", "Generate abstraction prompt questions");
  prompts_cmd->add_option("FILE", file, "Model file")->required();
  prompts_cmd->add_flag("--json", json, "JSON output");

  std::string output;
  bool with_eval = false;
  auto* dot_cmd = app.add_subcommand("export-dot", "Write a Graphviz diagram");
  dot_cmd->add_option("FILE", file, "Model file")->required();
  dot_cmd->add_option("-o,--output", output, "Output file (default stdout)");
  dot_cmd->add_flag("--with-eval", with_eval, "Colour objectives by status");

  auto* json_cmd = app.add_subcommand("export-json", "Write the JSON evaluation report");
  json_cmd->add_option("FILE", file, "Model file")->required();
  json_cmd->add_option("-o,--output", output, "Output file (default stdout)");

  std::string library_path;
  auto* library_cmd = app.add_subcommand("library", "Project library of past estimates");
  library_cmd->add_option("--library", library_path, "Library file (default $GALIGN_LIBRARY)");
  library_cmd->require_subcommand(1);

  LibraryEntry entry;
  std::string estimated, actual, confidence = "1";
  auto* add_cmd = library_cmd->add_subcommand("add", "Record an estimate");
  add_cmd->add_option("--id", entry.id, "Entry id")->required();
  add_cmd->add_option("--project", entry.project, "Project name");
  add_cmd->add_option("--activity", entry.activity, "Activity, e.g. Reduction");
  add_cmd->add_option("--focus", entry.focus, "Measured attribute")->required();
  add_cmd->add_option("--scale", entry.scale, "Metric definition");
  add_cmd->add_option("--estimated", estimated, "Estimated contribution, e.g. 80%")->required();
  add_cmd->add_option("--confidence", confidence, "Confidence in (0, 1]");
  add_cmd->add_option("--author", entry.author, "Who made the estimate");
  add_cmd->add_option("--actual", actual, "Observed outcome");
  add_cmd->add_option("--recorded-at", entry.recorded_at, "ISO-8601 date (default today)");
  add_cmd->add_option("--library", library_path, "Library file (default $GALIGN_LIBRARY)");

  std::string query_text;
  auto* query_cmd = library_cmd->add_subcommand("query", "Search estimates by focus or scale");
  query_cmd->add_option("TEXT", query_text, "Case-insensitive substring");
  query_cmd->add_option("--library", library_path, "Library file (default $GALIGN_LIBRARY)");
  query_cmd->add_flag("--json", json, "JSON output");

  std::string author_name;
  auto* calibration_cmd = library_cmd->add_subcommand("calibration", "Suggest an author calibration");
  calibration_cmd->add_option("AUTHOR", author_name, "Author as recorded in entries")->required();
  calibration_cmd->add_option("--library", library_path, "Library file (default $GALIGN_LIBRARY)");

  int port = 0;
  std::string bind = "127.0.0.1";
  auto* serve_cmd = app.add_subcommand("serve", "Serve the model over HTTP");
  serve_cmd->add_option("FILE", file, "Model file (default: empty model)");
  serve_cmd->add_option("--port", port, "Port (default $GALIGN_PORT or 7414)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--bind", bind, "Address to bind");
  serve_cmd->add_option("--library", library_path, "Library file (default $GALIGN_LIBRARY)");

  auto argv_strings = argv_of(args);
  std::vector<const char*> argv;
  for (const auto& a : argv_strings) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "galign: " << e.what() << "\n";
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) {
      failing = sub;
      for (auto* nested : sub->get_subcommands()) failing = nested;
    }
    err << failing->help();
    return kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(file, json, out, err);

    if (eval_cmd->parsed()) {
      GoalGraph graph = load(file, err);
      EvaluationResult eval = evaluate(graph, make_options(eval_flags));
      if (json) {
        out << export_json_report(graph, eval, validate(graph));
      } else {
        print_eval_table(graph, eval, out);
      }
      return kExitOk;
    }

    if (attribute_cmd->parsed()) {
      GoalGraph graph = load(file, err);
      Attribution a = attribute(graph, from, to, make_options(eval_flags));
      if (json) {
        out << attribution_json(graph, a).dump(2) << "\n";
      } else {
        print_attribution(graph, a, out);
      }
      return kExitOk;
    }

    if (prioritize_cmd->parsed()) {
      GoalGraph graph = load(file, err);
      std::optional<std::vector<std::string>> targets;
      if (!objective_list.empty()) targets = split_list(objective_list);
      auto ranked = prioritize(graph, targets, make_options(eval_flags));
      if (json) {
        out << priorities_json(ranked).dump(2) << "\n";
      } else {
        print_priorities(ranked, out);
      }
      return kExitOk;
    }

    if (whatif_cmd->parsed()) {
      GoalGraph graph = load(file, err);
      Scenario scenario;
      scenario.name = "cli";
      for (const auto& item : set_confidence) {
        auto [link, value] = split_pair(item, "--set-confidence");
        scenario.overrides.push_back(SetConfidence{link, number_arg(value, "--set-confidence")});
      }
      for (const auto& item : set_amount) {
        auto [link, value] = split_pair(item, "--set-amount");
        scenario.overrides.push_back(SetAmount{link, quantity_arg(value, "--set-amount")});
      }
      for (const auto& id : exclude) scenario.overrides.push_back(IncludeRequirement{id, false});
      for (const auto& id : include) scenario.overrides.push_back(IncludeRequirement{id, true});
      for (const auto& item : whatif_select) {
        auto [group, link] = split_pair(item, "--select");
        scenario.overrides.push_back(SelectOr{group, link});
      }
      EvalOptions options;
      options.use_confidence = !whatif_no_confidence;
      options.use_calibration = !whatif_no_calibration;
      DiffReport report = run_whatif(graph, scenario, options);
      if (json) {
        out << diff_json(report).dump(2) << "\n";
      } else {
        print_diff(report, out);
      }
      return kExitOk;
    }

    if (prompts_cmd->parsed()) {
      GoalGraph graph = load(file, err);
      auto prompts = generate_prompts(graph);
      if (json) {
        out << prompts_json(prompts).dump(2) << "\n";
      } else {
        print_prompts(prompts, out);
      }
      return kExitOk;
    }

    if (dot_cmd->parsed()) {
      GoalGraph graph = load(file, err);
      if (with_eval) {
        EvaluationResult eval = evaluate(graph);
        write_output(output, export_dot(graph, &eval), out);
      } else {
        write_output(output, export_dot(graph), out);
      }
      return kExitOk;
    }

    if (json_cmd->parsed()) {
      GoalGraph graph = load(file, err);
      EvaluationResult eval = evaluate(graph);
      write_output(output, export_json_report(graph, eval, validate(graph)), out);
      return kExitOk;
    }

    if (library_cmd->parsed()) {
      LibraryStore store(library_path.empty() ? LibraryStore::default_path() : std::filesystem::path(library_path));
      if (add_cmd->parsed()) {
        entry.estimated = quantity_arg(estimated, "--estimated");
        entry.confidence = number_arg(confidence, "--confidence");
        if (!actual.empty()) entry.actual = quantity_arg(actual, "--actual");
        if (entry.recorded_at.empty()) entry.recorded_at = today();
        store.add(entry);
        out << "added " << entry.id << " (" << store.size() << " entries)\n";
        return kExitOk;
      }
      if (query_cmd->parsed()) {
        auto hits = store.query(query_text);
        if (json) {
          Json list = Json::array();
          for (const auto& hit : hits) list.push_back(library_entry_json(hit));
          out << Json{{"entries", list}}.dump(2) << "\n";
        } else {
          for (const auto& hit : hits) {
            out << hit.recorded_at << "  " << hit.id << "  " << hit.project << "  " << format_quantity(hit.estimated)
                << " " << hit.activity << " in " << hit.focus << " [conf " << format_decimal(hit.confidence) << "]";
            if (hit.actual) out << " actual " << format_quantity(*hit.actual);
            out << "\n";
          }
          out << hits.size() << " entr" << (hits.size() == 1 ? "y" : "ies") << "\n";
        }
        return kExitOk;
      }
      auto suggestion = suggest_calibration(store, author_name);
      for (const auto& w : suggestion.warnings) err << "warning[" << w.code << "] " << w.message << "\n";
      if (!suggestion.value) {
        out << "no recorded outcomes for '" << author_name << "'\n";
      } else {
        out << format_decimal(*suggestion.value, 6) << " (from " << suggestion.entries_used << " outcome(s))\n";
      }
      return kExitOk;
    }

    if (serve_cmd->parsed()) {
      std::optional<GoalGraph> graph;
      if (!file.empty()) graph = load(file, err);
      Service::Config config;
      config.bind = bind;
      config.library = library_path;
      if (serve_cmd->count("--port")) {
        config.port = port;
      } else if (const char* env = std::getenv("GALIGN_PORT"); env && *env) {
        config.port = std::atoi(env);
      }
      Service service(std::move(graph), config);
      err << "serving on " << config.bind << ":" << config.port << "\n";
      if (!service.run()) {
        err << "galign: cannot bind " << config.bind << ":" << config.port << "\n";
        return kExitModelError;
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "galign: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ModelError&) {
    return kExitModelError;
  } catch (const Error& e) {
    err << "galign: " << e.what() << "\n";
    return kExitModelError;
  }
  return kExitUsage;
}

}  // namespace galign::cli
