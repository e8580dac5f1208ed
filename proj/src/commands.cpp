#include "actq/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "actq/error.hpp"
#include "actq/ingest.hpp"
#include "actq/report_io.hpp"
#include "actq/rng.hpp"
#include "actq/suites.hpp"

namespace actq::cli {

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void validate(const AnalyzeOptions& o) {
  if (o.input.has_value() == o.suite.has_value()) {
    throw InvalidArgument("exactly one of --input or --suite is required");
  }
  QuantConfig::activations(o.bits_act).grid_max();
  QuantConfig::weights(o.bits_wt).grid_max();
  if (o.transforms.empty()) throw InvalidArgument("at least one transform is required");
  TransformSpec{TransformKind::Smooth, o.alpha, kDefaultEpsilonClamp}.validate();
  for (const auto& a : o.alpha_for) {
    TransformSpec{TransformKind::Smooth, a.alpha, kDefaultEpsilonClamp}.validate();
  }
  if (o.report.empty()) throw InvalidArgument("--report is required");
}

void write_charts(const LayerPair& pair, std::span<const TransformSpec> specs,
                  const std::filesystem::path& dir) {
  std::vector<MagnitudeSeries> series;
  for (const auto& spec : specs) {
    const auto t = apply_transform(pair.activation, pair.weight, spec);
    series.push_back({std::string(to_string(spec.kind)), channel_magnitudes(t.x)});
  }
  std::ofstream out(dir / (pair.name + ".svg"));
  if (!out) throw InvalidArgument("cannot write chart for " + pair.name + " in " + dir.string());
  write_magnitude_chart_svg(pair.name + ": sorted activation channel magnitudes", series, out);
}

}  // namespace

std::vector<TransformKind> parse_transform_list(const std::string& list) {
  std::vector<TransformKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_transform_kind(item));
  }
  return out;
}

AlphaOverride parse_alpha_override(const std::string& text) {
  const auto eq = text.rfind('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw InvalidArgument("expected PATTERN=ALPHA, got '" + text + "'");
  }
  std::size_t used = 0;
  double alpha = 0.0;
  try {
    alpha = std::stod(text.substr(eq + 1), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() - eq - 1) throw InvalidArgument("bad alpha in '" + text + "'");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1), got '" + text + "'");
  return {text.substr(0, eq), alpha};
}

int run_synth(const std::string& suite, std::uint64_t seed, const std::filesystem::path& out,
              std::ostream& log, std::ostream& err) {
  try {
    const auto records = synth_suite(suite, seed);
    write_actd_file(records, out);
    log << "wrote " << records.size() << " records of suite '" << suite << "' to " << out.string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "synth: " << e.what() << '\n';
    return kExitConfig;
  }
}

int run_analyze(const AnalyzeOptions& options, std::ostream& log, std::ostream& err) {
  std::vector<LayerPair> pairs;
  std::vector<TransformSpec> specs;
  try {
    validate(options);
    const auto records = options.input ? read_actd_file(*options.input) : synth_suite(*options.suite, options.seed);
    for (auto& p : pair_records(records)) {
      bool excluded = false;
      for (const auto& pat : options.exclude) excluded = excluded || name_matches(pat, p.name);
      if (!excluded) pairs.push_back(std::move(p));
    }
    if (pairs.empty()) throw InvalidArgument("no records left to analyze");
    for (auto kind : options.transforms) specs.push_back({kind, options.alpha, kDefaultEpsilonClamp});
    if (options.charts) std::filesystem::create_directories(*options.charts);
  } catch (const Error& e) {
    err << "analyze: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "analyze: " << e.what() << '\n';
    return kExitConfig;
  }

  ReportOptions ropts;
  ropts.act = QuantConfig::activations(options.bits_act);
  ropts.wt = QuantConfig::weights(options.bits_wt);
  ropts.alpha_overrides = options.alpha_for;
  ropts.threads = options.threads;

  std::vector<DifficultyReport> rows;
  bool failed = false;
  for (const auto& pair : pairs) {
    try {
      auto part = build_report(std::span(&pair, 1), specs, ropts);
      rows.insert(rows.end(), part.begin(), part.end());
      if (options.charts) {
        std::vector<TransformSpec> record_specs = specs;
        for (auto& s : record_specs) s.alpha = resolve_alpha(pair.name, s.alpha, options.alpha_for);
        write_charts(pair, record_specs, *options.charts);
      }
    } catch (const Error& e) {
      err << "analyze: record '" << pair.name << "': " << e.what() << '\n';
      failed = true;
    }
  }
  sort_report(rows);

  std::ofstream csv(options.report);
  if (!csv) {
    err << "analyze: cannot write " << options.report.string() << '\n';
    return kExitConfig;
  }
  write_report_csv(rows, csv);
  log << "wrote " << rows.size() << " rows to " << options.report.string() << '\n';

  for (auto kind : options.transforms) {
    std::vector<double> errors, difficulty_sq;
    for (const auto& r : rows) {
      if (r.transform != kind) continue;
      errors.push_back(r.layer_error);
      difficulty_sq.push_back(r.act_difficulty * r.act_difficulty);
    }
    log << "correlation[" << to_string(kind) << "] layer_error vs act_difficulty^2: ";
    try {
      log << fmt(pearson(errors, difficulty_sq), "%.4f") << " (n=" << errors.size() << ")\n";
    } catch (const Error&) {
      log << "undefined (n=" << errors.size() << ")\n";
    }
  }
  return failed ? kExitCompute : kExitOk;
}

int run_verify(VerifyLevel level, const std::optional<std::filesystem::path>& hadamard_dir, std::ostream& log) {
  const auto results = run_verification(level, hadamard_dir);
  std::size_t failures = 0;
  for (const auto& r : results) {
    log << (r.passed ? "PASS " : "FAIL ") << r.name << "  measured=" << fmt(r.measured)
        << " tol=" << fmt(r.tolerance);
    if (!r.detail.empty()) log << "  (" << r.detail << ")";
    log << '\n';
    if (!r.passed) ++failures;
  }
  log << results.size() - failures << "/" << results.size() << " checks passed\n";
  return failures == 0 ? kExitOk : kExitCompute;
}

int run_hadamard(std::size_t size, bool check, bool print,
                 const std::optional<std::filesystem::path>& hadamard_dir, std::ostream& log,
                 std::ostream& err) {
  std::optional<HadamardLibrary> lib;
  HadamardPlan plan;
  try {
    lib = hadamard_dir ? HadamardLibrary::from_directory(*hadamard_dir) : HadamardLibrary::builtin();
    plan = lib->plan(size);
  } catch (const UnsupportedSize& e) {
    err << "hadamard: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "hadamard: " << e.what() << '\n';
    return kExitCompute;
  }

  log << "size " << size << ": factors [";
  for (std::size_t i = 0; i < plan.factors.size(); ++i) log << (i ? ", " : "") << plan.factors[i];
  log << "]\n";

  if (print) {
    for (std::size_t r = 0; r < size; ++r) {
      for (std::size_t c = 0; c < size; ++c) log << (c ? " " : "") << (lib->sign(plan, r, c) > 0 ? "+1" : "-1");
      log << '\n';
    }
  }
  if (check) {
    double residual = 0.0;
    std::string method;
    if (size <= 512) {
      residual = orthogonality_residual(*lib->matrix(size));
      method = "||R R^T - I||_F";
    } else {
      // Norm preservation on random rows, through the factored multiply.
      Rng rng(1);
      std::vector<double> d(8 * size);
      for (double& v : d) v = rng.normal();
      const Matrix x(8, size, std::move(d));
      const Matrix y = lib->multiply_rows(x);
      for (std::size_t i = 0; i < 8; ++i) {
        double nx = 0.0, ny = 0.0;
        for (double v : x.row(i)) nx += v * v;
        for (double v : y.row(i)) ny += v * v;
        residual = std::max(residual, std::abs(std::sqrt(ny / nx) - 1.0));
      }
      method = "max relative norm change over 8 random rows";
    }
    const bool ok = residual <= 1e-10;
    log << (ok ? "PASS " : "FAIL ") << method << " = " << fmt(residual) << " (tol 1e-10)\n";
    if (!ok) return kExitCompute;
  }
  return kExitOk;
}

int main(int argc, char** argv) {
  CLI::App app{"actq: activation quantization workbench"};
  app.require_subcommand(1);

  std::string suite;
  std::uint64_t seed = 0;
  std::string out_path;
  auto* synth = app.add_subcommand("synth", "Write a synthetic suite as an ACTD file");
  synth->add_option("--suite", suite, "Suite name (massive-basic, systematic, graded)")->required();
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--out", out_path, "Output ACTD path")->required();

  AnalyzeOptions an;
  std::string input, transforms = "none", analyze_suite, report, charts;
  std::vector<std::string> alpha_for;
  auto* analyze = app.add_subcommand("analyze", "Quantize, transform and report every record");
  auto* in_opt = analyze->add_option("--input", input, "ACTD input file");
  auto* suite_opt = analyze->add_option("--suite", analyze_suite, "Analyze a synthetic suite instead of a file");
  in_opt->excludes(suite_opt);
  analyze->add_option("--seed", an.seed, "Seed for --suite");
  analyze->add_option("--bits-act", an.bits_act, "Activation bit width")->check(CLI::Range(2, 32));
  analyze->add_option("--bits-wt", an.bits_wt, "Weight bit width")->check(CLI::Range(2, 32));
  analyze->add_option("--transform", transforms, "Comma-separated transforms");
  analyze->add_option("--alpha", an.alpha, "Default migration strength");
  analyze->add_option("--alpha-for", alpha_for, "PATTERN=ALPHA override (repeatable)");
  analyze->add_option("--exclude", an.exclude, "Record name pattern to drop (repeatable)");
  analyze->add_option("--report", report, "CSV output path")->required();
  analyze->add_option("--charts", charts, "Directory for SVG charts");
  analyze->add_option("--threads", an.threads, "Worker threads (0 = hardware)");

  std::string level = "fast", hadamard_dir;
  auto* verify = app.add_subcommand("verify", "Run the built-in invariant checks");
  verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--hadamard-dir", hadamard_dir, "Load base tables from this directory");

  std::size_t size = 0;
  bool check = false, print = false;
  std::string had_dir2;
  auto* had = app.add_subcommand("hadamard", "Show the construction plan of a Hadamard matrix");
  had->add_option("--size", size, "Matrix order")->required();
  had->add_flag("--check", check, "Verify orthogonality");
  had->add_flag("--print", print, "Print the unnormalized sign matrix");
  had->add_option("--hadamard-dir", had_dir2, "Load base tables from this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  auto dir_or_none = [](const std::string& s) {
    return s.empty() ? std::optional<std::filesystem::path>{} : std::optional<std::filesystem::path>{s};
  };

  if (*synth) return run_synth(suite, seed, out_path, std::cout, std::cerr);
  if (*verify) {
    return run_verify(level == "full" ? VerifyLevel::Full : VerifyLevel::Fast, dir_or_none(hadamard_dir), std::cout);
  }
  if (*had) return run_hadamard(size, check, print, dir_or_none(had_dir2), std::cout, std::cerr);

  try {
    if (!input.empty()) an.input = input;
    if (!analyze_suite.empty()) an.suite = analyze_suite;
    an.transforms = parse_transform_list(transforms);
    for (const auto& a : alpha_for) an.alpha_for.push_back(parse_alpha_override(a));
  } catch (const Error& e) {
    std::cerr << "analyze: " << e.what() << '\n';
    return kExitConfig;
  }
  an.report = report;
  an.charts = dir_or_none(charts);
  return run_analyze(an, std::cout, std::cerr);
}

}  // namespace actq::cli
