#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "rcir/analyze.hpp"
#include "rcir/check.hpp"
#include "rcir/differential.hpp"
#include "rcir/generate.hpp"
#include "rcir/interp.hpp"
#include "rcir/parse.hpp"
#include "rcir/pipeline.hpp"
#include "rcir/print.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheck = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitDiff = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

rcir::Program parse_file(const std::string& path, bool allow_internal) {
  rcir::ParseOptions opts;
  opts.allow_internal_names = allow_internal;
  return rcir::parse_program(read_file(path), opts);
}

int report_violations(const std::vector<rcir::Violation>& vs) {
  for (const auto& v : vs) std::cerr << rcir::violation_to_string(v) << "\n";
  return kExitCheck;
}

struct PassSelection {
  rcir::PipelineConfig cfg;
  bool valid = true;
};

PassSelection parse_passes(const std::string& spec) {
  PassSelection out;
  out.cfg.reuse = out.cfg.borrow = out.cfg.rc = false;
  int last = -1;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int idx;
    if (item == "reuse") {
      idx = 0;
      out.cfg.reuse = true;
    } else if (item == "borrow") {
      idx = 1;
      out.cfg.borrow = true;
    } else if (item == "rc") {
      idx = 2;
      out.cfg.rc = true;
    } else {
      out.valid = false;
      return out;
    }
    if (idx <= last) {
      out.valid = false;
      return out;
    }
    last = idx;
  }
  if (last < 0) out.valid = false;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reference-counted IR laboratory"};
  app.require_subcommand(1);

  // check
  std::string check_file, check_dialect = "pure";
  auto* check_cmd = app.add_subcommand("check", "well-formedness check");
  check_cmd->add_option("file", check_file)->required();
  check_cmd->add_option("--dialect", check_dialect)->check(CLI::IsMember({"pure", "rc"}));

  // compile
  std::string compile_file, compile_passes = "reuse,borrow,rc", compile_emit = "ir";
  bool no_tail_refine = false;
  auto* compile_cmd = app.add_subcommand("compile", "run the pass pipeline");
  compile_cmd->add_option("file", compile_file)->required();
  compile_cmd->add_option("--passes", compile_passes);
  compile_cmd->add_option("--emit", compile_emit)->check(CLI::IsMember({"ir", "beta"}));
  compile_cmd->add_flag("--no-tail-refine", no_tail_refine);

  // run
  std::string run_file, run_entry = "main";
  bool run_stats = false, run_oracle = false;
  auto* run_cmd = app.add_subcommand("run", "evaluate a program");
  run_cmd->add_option("file", run_file)->required();
  run_cmd->add_option("--entry", run_entry);
  run_cmd->add_flag("--stats", run_stats);
  run_cmd->add_flag("--oracle,--pure-oracle", run_oracle);

  // analyze
  std::string analyze_file;
  auto* analyze_cmd = app.add_subcommand("analyze", "report unguarded constructors");
  analyze_cmd->add_option("file", analyze_file)->required();

  // fuzz
  std::uint64_t fuzz_seeds = 100, fuzz_seed0 = 0;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "differential testing over generated programs");
  fuzz_cmd->add_option("--seeds", fuzz_seeds);
  fuzz_cmd->add_option("--seed0", fuzz_seed0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (check_cmd->parsed()) {
      bool rc_dialect = check_dialect == "rc";
      rcir::Program p = parse_file(check_file, rc_dialect);
      auto vs = rcir::check_wellformed(p, rc_dialect ? rcir::Dialect::RC : rcir::Dialect::Pure);
      if (!vs.empty()) return report_violations(vs);
      return kExitOk;
    }

    if (compile_cmd->parsed()) {
      PassSelection sel = parse_passes(compile_passes);
      if (!sel.valid) {
        std::cerr << "invalid --passes (expected an ordered subset of reuse,borrow,rc)\n";
        return kExitUsage;
      }
      sel.cfg.tail_refine = !no_tail_refine;
      rcir::Program p = parse_file(compile_file, /*allow_internal=*/!sel.cfg.reuse);
      rcir::PipelineResult result = rcir::run_pipeline(p, sel.cfg);
      if (compile_emit == "beta") {
        for (const auto& [name, fn] : result.program.defs) {
          std::string sig;
          auto it = result.beta.find(name);
          if (it != result.beta.end()) {
            for (auto o : it->second) sig += o == rcir::Ownership::Owned ? 'O' : 'B';
          }
          std::cout << name << ":" << (sig.empty() ? "" : " " + sig) << "\n";
        }
      } else {
        std::cout << rcir::print_program(result.program);
      }
      return kExitOk;
    }

    if (run_cmd->parsed()) {
      rcir::Program p = parse_file(run_file, /*allow_internal=*/!run_oracle);
      auto vs = rcir::check_wellformed(p, run_oracle ? rcir::Dialect::Pure : rcir::Dialect::RC);
      if (!vs.empty()) return report_violations(vs);
      if (run_oracle) {
        rcir::PureValue v = rcir::eval_pure(p, run_entry);
        std::cout << rcir::print_value(v) << "\n";
      } else {
        rcir::EvalResult r = rcir::eval_rc(p, run_entry);
        std::cout << rcir::print_value(r.value) << "\n";
        if (run_stats) std::cout << r.stats.to_text();
      }
      return kExitOk;
    }

    if (analyze_cmd->parsed()) {
      rcir::Program p = parse_file(analyze_file, /*allow_internal=*/true);
      auto vs = rcir::check_wellformed(p, rcir::Dialect::RC);
      if (!vs.empty()) return report_violations(vs);
      auto report = rcir::analyze_reuse_guards(p);
      std::cout << rcir::report_to_text(report, p);
      return kExitOk;
    }

    if (fuzz_cmd->parsed()) {
      bool failed = false;
      for (std::uint64_t s = fuzz_seed0; s < fuzz_seed0 + fuzz_seeds; ++s) {
        rcir::GenConfig cfg;
        cfg.seed = s;
        rcir::Program p = rcir::gen_program(cfg);
        rcir::DiffVerdict v = rcir::differential_check(p);
        if (v.pass) {
          std::cout << "seed " << s << ": PASS\n";
        } else {
          failed = true;
          std::cout << "seed " << s << ": FAIL (" << rcir::fail_class_name(v.cls) << ") "
                    << v.detail << "\n";
          if (v.minimized) {
            std::cout << "--- minimized program ---\n"
                      << rcir::print_program(*v.minimized) << "--- end ---\n";
          }
        }
      }
      return failed ? kExitDiff : kExitOk;
    }
  } catch (const rcir::ParseError& e) {
    std::cerr << "parse error at " << e.line << ":" << e.col << ": " << e.what() << "\n";
    return kExitCheck;
  } catch (const rcir::CompileError& e) {
    std::cerr << "compile error: " << e.what() << "\n";
    for (const auto& v : e.violations) std::cerr << "  " << rcir::violation_to_string(v) << "\n";
    return kExitCheck;
  } catch (const rcir::BorrowError& e) {
    std::cerr << "compile error: " << e.what() << "\n";
    return kExitCheck;
  } catch (const rcir::RunError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
