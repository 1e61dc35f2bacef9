// hamform: derive Hamiltonian field equations from a problem file.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hamform/cli/problem.hpp"

namespace {

using namespace hamform;

enum Exit { kOk = 0, kInput = 1, kIncompatible = 2, kPipeline = 3, kNumeric = 4 };

struct Options {
  std::string file;
  std::string out;
  int max_iter = 16;
  std::string format = "both";
};

std::string stem_of(const std::string& out) {
  for (const char* ext : {".json", ".txt", ".csv"}) {
    const std::string e(ext);
    if (out.size() > e.size() && out.compare(out.size() - e.size(), e.size(), e) == 0) {
      return out.substr(0, out.size() - e.size());
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw cli::IoError("cannot write " + path);
  os << content;
  if (!os) throw cli::IoError("cannot write " + path);
}

void emit_reports(const cli::Derivation& d, const Options& o) {
  const bool json = o.format != "text";
  const bool text = o.format != "json";
  if (o.out.empty()) {
    if (text) std::cout << cli::render_text(d);
    if (text && json) std::cout << "\n";
    if (json) std::cout << cli::render_json(d);
    return;
  }
  if (json && text) {
    const auto stem = stem_of(o.out);
    write_file(stem + ".json", cli::render_json(d));
    write_file(stem + ".txt", cli::render_text(d));
  } else {
    write_file(o.out, json ? cli::render_json(d) : cli::render_text(d));
  }
}

void print_violations(const cli::Derivation& d) {
  for (const auto& v : d.compatibility.violations) {
    if (v.y.empty()) {
      std::cerr << "incompatible: d/d" << v.z << " _| Theta = " << v.form << "\n";
    } else {
      std::cerr << "incompatible: d/d" << v.y << " _| L_{d/d" << v.z << "} Theta = " << v.form << "\n";
    }
  }
}

std::string with_level(const Error& e) {
  if (e.level() < 0) return e.what();
  return "level " + std::to_string(e.level()) + ": " + e.what();
}

int run_check(const Options& o) {
  const auto pf = cli::load_problem(o.file);
  const auto space = cli::instantiate(pf);
  const auto report = unified::check_compatibility(space);
  if (report.compatible) {
    std::cout << "compatible\n";
    return kOk;
  }
  cli::Derivation d{pf, space, report, std::nullopt, std::nullopt};
  print_violations(d);
  return kIncompatible;
}

int run_derive(const Options& o, bool numeric) {
  const auto pf = cli::load_problem(o.file);
  std::optional<cli::Derivation> derived;
  try {
    derived = cli::derive(pf, o.max_iter);
  } catch (const NonAffine& e) {
    std::cerr << "error at " << with_level(e) << "\n";
    return kPipeline;
  } catch (const NotBasic& e) {
    std::cerr << "error at " << with_level(e) << "\n";
    return kPipeline;
  } catch (const Inconsistent& e) {
    std::cerr << "error at " << with_level(e) << "\n";
    return kPipeline;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error at " << with_level(e) << "\n";
    return kPipeline;
  } catch (const ChartMismatch& e) {
    std::cerr << "error at " << with_level(e) << "\n";
    return kPipeline;
  }
  auto& d = *derived;
  if (!d.compatibility.compatible) {
    print_violations(d);
    if (!numeric) emit_reports(d, o);
    return kIncompatible;
  }
  if (!d.report->terminated) {
    std::cerr << "error: no termination within " << o.max_iter << " iterations\n";
    if (!numeric) emit_reports(d, o);
    return kPipeline;
  }
  if (!numeric) {
    emit_reports(d, o);
    return kOk;
  }

  try {
    const auto [sys, traj] = cli::integrate(d);
    if (o.out.empty()) {
      dynamo::write_csv(std::cout, traj, sys);
      std::cerr << "constraint drift: " << d.numeric->constraint_drift << "\n"
                << "energy drift: " << d.numeric->energy_drift << "\n";
    } else {
      const auto stem = stem_of(o.out);
      std::ofstream csv(stem + ".csv", std::ios::binary);
      if (!csv) throw cli::IoError("cannot write " + stem + ".csv");
      dynamo::write_csv(csv, traj, sys);
      Options reports = o;
      reports.out = stem + ".json";
      emit_reports(d, reports);
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const DimensionMismatch& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unified-formalism derivation of Hamiltonian field equations"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--max-iter", o.max_iter, "Iteration limit of the constraint algorithm")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "text", "both"}));

  auto* derive = app.add_subcommand("derive", "Run the constraint algorithm and write the report");
  derive->add_option("file", o.file, "Problem file")->required();
  derive->add_option("-o,--output", o.out, "Output path; json and text reports get .json and .txt");
  auto* integrate = app.add_subcommand("integrate", "Derive and integrate the numeric block");
  integrate->add_option("file", o.file, "Problem file")->required();
  integrate->add_option("-o,--output", o.out, "Output stem for .csv, .json and .txt");
  auto* check = app.add_subcommand("check", "Check compatibility of the projection only");
  check->add_option("file", o.file, "Problem file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (check->parsed()) return run_check(o);
    return run_derive(o, integrate->parsed());
  } catch (const cli::SchemaError& e) {
    std::cerr << "error: " << o.file << ":" << e.what() << "\n";
  } catch (const cli::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const UnknownIdentifier& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << with_level(e) << "\n";
    return kPipeline;
  }
  return kInput;
}
