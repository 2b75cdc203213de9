#include "colsel/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "colsel/baselines.hpp"
#include "colsel/error.hpp"
#include "colsel/generators.hpp"
#include "colsel/matrix_io.hpp"
#include "colsel/report_json.hpp"
#include "colsel/selector.hpp"

namespace colsel::cli {

namespace {

struct MatrixSource {
  std::string input;
  std::string family;
  std::size_t n = 0;
  std::size_t p = 0;
  std::uint64_t seed = 0;
  double theta = 0.0;
  double spike = 1.0;
  std::size_t distinct = 1;

  void add_options(CLI::App& app) {
    app.add_option("--input", input, "Matrix file (CSV or MatrixMarket array)");
    app.add_option("--generate", family,
                   "Generator family: identity, random_sphere, union_orthobases, "
                   "duplicated_columns, near_parallel_pair, spiked");
    app.add_option("--n", n, "Rows of the generated matrix");
    app.add_option("--p", p, "Columns of the generated matrix");
    app.add_option("--seed", seed, "Generator seed");
    app.add_option("--theta", theta, "near_parallel_pair angle (radians)");
    app.add_option("--spike", spike, "spiked: shared-direction weight");
    app.add_option("--distinct", distinct, "duplicated_columns: number of distinct columns");
  }

  DenseMatrix load() const {
    if (!input.empty() && !family.empty()) {
      throw Error(ErrorCode::BadArguments, "--input and --generate are mutually exclusive");
    }
    if (!input.empty()) return read_matrix(input);
    if (family.empty()) {
      throw Error(ErrorCode::BadArguments, "one of --input or --generate is required");
    }
    if (n == 0 || p == 0) {
      throw Error(ErrorCode::BadArguments, "--generate needs positive --n and --p");
    }
    GeneratorSpec spec;
    spec.family = parse_family(family);
    spec.n = n;
    spec.p = p;
    spec.seed = seed;
    spec.theta = theta;
    spec.spike = spike;
    spec.distinct = distinct;
    return generate(spec);
  }
};

// Writes to the file at `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::string& text) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  file << text;
  if (!file) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

void validate_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::BadArguments, "epsilon must be in (0,1)");
  }
}

void validate_cert_tol(double tol) {
  if (!(tol > 0.0 && tol <= 1e-3)) {
    throw Error(ErrorCode::BadArguments, "cert-tol must be in (0, 1e-3]");
  }
}

struct SelectArgs {
  MatrixSource source;
  double epsilon = 0.0;
  bool auto_normalize = false;
  bool fast_path = false;
  double cert_tol = 1e-8;
  std::string output;
  std::string format = "json";
};

int cmd_select(const SelectArgs& args, std::ostream& out, std::ostream& err) {
  validate_epsilon(args.epsilon);
  validate_cert_tol(args.cert_tol);
  const DenseMatrix x = args.source.load();

  SelectorConfig config;
  config.auto_normalize = args.auto_normalize;
  config.path = args.fast_path ? SpectralPath::secular : SpectralPath::dense;
  config.cert_tol = args.cert_tol;
  const SelectionReport report = run_selection(x, args.epsilon, config);

  if (args.format == "csv") {
    std::ostringstream csv;
    write_report_csv(csv, report);
    emit(args.output, out, csv.str());
  } else {
    emit(args.output, out, dump_json(report_to_json(report)));
  }

  if (!report.certified) {
    err << "not certified: lambda range [" << format_double(report.lambda_min) << ", "
        << format_double(report.lambda_max) << "] for epsilon " << args.epsilon << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

struct VerifyArgs {
  MatrixSource source;
  std::string report;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  std::ifstream in(args.report, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open report '" + args.report + "'");
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("report is not valid JSON: ") + e.what());
  }
  const SelectionReport claimed = report_from_json(parsed);

  DenseMatrix x = args.source.load();
  if (claimed.auto_normalized) x = normalize_columns(x);

  if (x.cols() != claimed.params.p || x.rows() != claimed.n) {
    throw Error(ErrorCode::Mismatch, "report is for a " + std::to_string(claimed.n) + "x" +
                                         std::to_string(claimed.params.p) + " matrix, input is " +
                                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
  if (claimed.selected.empty()) throw Error(ErrorCode::Mismatch, "report selects no columns");
  for (std::size_t idx : claimed.selected) {
    if (idx >= x.cols()) {
      throw Error(ErrorCode::Mismatch, "selected index " + std::to_string(idx) + " out of range", idx);
    }
  }

  // Everything below is recomputed from the matrix; the report only
  // supplies epsilon, the tolerance and the selected list.
  SelectionReport fresh = claimed;
  fresh.params = compute_budget(claimed.params.epsilon, x.cols(), operator_norm_sq(x));
  fresh.trajectory.clear();
  for (std::size_t r = 1; r <= claimed.selected.size(); ++r) {
    const std::span<const std::size_t> prefix(claimed.selected.data(), r);
    fresh.trajectory.push_back(sym_eig(gram(select_columns(x, prefix))).values);
  }

  std::vector<std::string> failures;
  if (claimed.selected.size() != fresh.params.R) {
    failures.push_back("selection has " + std::to_string(claimed.selected.size()) +
                       " columns, budget R is " + std::to_string(fresh.params.R));
  }
  if (std::set<std::size_t>(claimed.selected.begin(), claimed.selected.end()).size() !=
      claimed.selected.size()) {
    failures.push_back("selected list repeats a column");
  }
  for (const auto& v : verify_envelopes(fresh)) {
    failures.push_back("envelope violated at (k=" + std::to_string(v.k) + ", r=" +
                       std::to_string(v.r) + "): lambda " + format_double(v.lambda) + " not in [" +
                       format_double(v.lower) + ", " + format_double(v.upper) + "]");
  }
  for (std::size_t idx = 0; idx < fresh.trajectory.size(); ++idx) {
    const auto& mine = fresh.trajectory[idx];
    const auto* theirs = idx < claimed.trajectory.size() ? &claimed.trajectory[idx] : nullptr;
    if (!theirs || theirs->size() != mine.size()) {
      failures.push_back("trajectory missing step r=" + std::to_string(idx + 1));
      continue;
    }
    for (std::size_t k = 0; k < mine.size(); ++k) {
      if (std::abs(mine[k] - (*theirs)[k]) > 1e-8 * std::max(1.0, std::abs(mine[k]))) {
        failures.push_back("trajectory differs at (k=" + std::to_string(k + 1) + ", r=" +
                           std::to_string(idx + 1) + "): report " + format_double((*theirs)[k]) +
                           ", recomputed " + format_double(mine[k]));
      }
    }
  }
  for (const auto& v : verify_average_bound(fresh, x)) {
    failures.push_back("average-score bound violated at r=" + std::to_string(v.r) + ": score " +
                       format_double(v.score) + " > " + format_double(v.bound));
  }
  const auto& last = fresh.trajectory.back();
  const double eps = claimed.params.epsilon;
  if (last.back() < 1.0 - eps - claimed.cert_tol || last.front() > 1.0 + eps + claimed.cert_tol) {
    failures.push_back("final spectrum [" + format_double(last.back()) + ", " +
                       format_double(last.front()) + "] leaves [1-eps, 1+eps]");
  }

  if (!failures.empty()) {
    err << "verification failed: " << failures.front() << "\n";
    for (std::size_t i = 1; i < failures.size(); ++i) err << "  also: " << failures[i] << "\n";
    return kExitFailed;
  }
  out << "verified: R=" << fresh.params.R << " delta=" << format_double(fresh.params.delta)
      << " lambda in [" << format_double(last.back()) << ", " << format_double(last.front())
      << "]\n";
  return kExitOk;
}

struct BenchArgs {
  MatrixSource source;
  double epsilon = 0.0;
  bool auto_normalize = false;
  std::size_t trials = 100;
  std::uint64_t baseline_seed = 1;
  std::string output;
  std::string format = "json";
};

struct BenchRow {
  std::string method;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double condition = 0.0;
  ConditionSummary spread;
  double wall_ms = 0.0;
};

int cmd_bench(const BenchArgs& args, std::ostream& out) {
  validate_epsilon(args.epsilon);
  if (args.trials < 1) throw Error(ErrorCode::BadArguments, "--trials must be >= 1");
  DenseMatrix x = args.source.load();
  if (args.auto_normalize) x = normalize_columns(x);

  using clock = std::chrono::steady_clock;
  auto elapsed_ms = [](clock::time_point start) {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
  };

  std::vector<BenchRow> rows;
  auto t0 = clock::now();
  const SelectionReport greedy = run_selection(x, args.epsilon);
  const double greedy_ms = elapsed_ms(t0);
  const double greedy_cond = greedy.lambda_min > 0.0 ? greedy.lambda_max / greedy.lambda_min
                                                     : std::numeric_limits<double>::infinity();
  rows.push_back({"greedy", greedy.lambda_min, greedy.lambda_max, greedy_cond,
                  {greedy_cond, greedy_cond, greedy_cond}, greedy_ms});

  const std::size_t budget = greedy.params.R;
  t0 = clock::now();
  const auto random = random_subset_select(x, budget, args.baseline_seed, args.trials);
  const double random_ms = elapsed_ms(t0);
  const ConditionSummary spread = summarize_condition(random);
  double worst_min = random.front().lambda_min;
  double worst_max = random.front().lambda_max;
  for (const auto& r : random) {
    worst_min = std::min(worst_min, r.lambda_min);
    worst_max = std::max(worst_max, r.lambda_max);
  }
  rows.push_back({"uniform_random", worst_min, worst_max, spread.median, spread, random_ms});

  t0 = clock::now();
  const BaselineResult first = first_r_select(x, budget);
  const double first_ms = elapsed_ms(t0);
  rows.push_back({"first_R", first.lambda_min, first.lambda_max, first.condition_number,
                  {first.condition_number, first.condition_number, first.condition_number},
                  first_ms});

  std::ostringstream text;
  if (args.format == "csv") {
    text << "method,R,delta,lambda_min,lambda_max,condition_number,condition_min,"
            "condition_median,condition_max,wall_ms\n";
    auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("inf"); };
    for (const auto& row : rows) {
      text << row.method << ',' << budget << ',' << num(greedy.params.delta) << ','
           << num(row.lambda_min) << ',' << num(row.lambda_max) << ',' << num(row.condition) << ','
           << num(row.spread.min) << ',' << num(row.spread.median) << ',' << num(row.spread.max)
           << ',' << num(row.wall_ms) << '\n';
    }
  } else {
    nlohmann::json j;
    j["params"] = {{"epsilon", args.epsilon},
                   {"n", x.rows()},
                   {"p", x.cols()},
                   {"R", budget},
                   {"delta", greedy.params.delta},
                   {"opnorm_sq", greedy.params.opnorm_sq},
                   {"trials", args.trials},
                   {"baseline_seed", args.baseline_seed}};
    j["greedy_certified"] = greedy.certified;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
      j["rows"].push_back({{"method", row.method},
                           {"lambda_min", row.lambda_min},
                           {"lambda_max", row.lambda_max},
                           {"condition_number", row.condition},
                           {"condition_min", row.spread.min},
                           {"condition_median", row.spread.median},
                           {"condition_max", row.spread.max},
                           {"wall_ms", row.wall_ms}});
    }
    text << dump_json(j);
  }
  emit(args.output, out, text.str());
  return kExitOk;
}

struct GenerateArgs {
  MatrixSource source;
  std::string output;
  std::string format = "csv";
};

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
  if (args.source.family.empty()) {
    throw Error(ErrorCode::BadArguments, "generate needs --generate FAMILY");
  }
  const DenseMatrix x = args.source.load();
  std::ostringstream text;
  if (args.format == "mm") {
    write_matrix_market(text, x);
  } else {
    write_csv_matrix(text, x);
  }
  emit(args.output, out, text.str());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"colsel: extract a well-conditioned column subset with a certificate", "colsel"};
  app.require_subcommand(1);

  SelectArgs select_args;
  auto* select = app.add_subcommand("select", "Greedy selection with per-step certification");
  select_args.source.add_options(*select);
  select->add_option("--epsilon", select_args.epsilon, "Target: singular values in [1-eps, 1+eps]")
      ->required();
  select->add_flag("--auto-normalize", select_args.auto_normalize, "Rescale columns to unit norm");
  select->add_flag("--fast-path", select_args.fast_path,
                   "Update eigenvectors through the secular equation");
  select->add_option("--cert-tol", select_args.cert_tol, "Certification tolerance");
  select->add_option("--output", select_args.output, "Report path (default stdout)");
  select->add_option("--format", select_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Recheck a report against its matrix");
  verify_args.source.add_options(*verify);
  verify->add_option("--report", verify_args.report, "JSON report from select")->required();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Compare greedy selection with naive baselines");
  bench_args.source.add_options(*bench);
  bench->add_option("--epsilon", bench_args.epsilon, "Target epsilon")->required();
  bench->add_flag("--auto-normalize", bench_args.auto_normalize, "Rescale columns to unit norm");
  bench->add_option("--trials", bench_args.trials, "Random-subset trials");
  bench->add_option("--baseline-seed", bench_args.baseline_seed, "Seed for the random baseline");
  bench->add_option("--output", bench_args.output, "Table path (default stdout)");
  bench->add_option("--format", bench_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  GenerateArgs generate_args;
  auto* gen = app.add_subcommand("generate", "Write a synthetic matrix");
  generate_args.source.add_options(*gen);
  gen->add_option("--output", generate_args.output, "Matrix path (default stdout)");
  gen->add_option("--format", generate_args.format, "csv or mm (MatrixMarket)")
      ->check(CLI::IsMember({"csv", "mm"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*select) return cmd_select(select_args, out, err);
    if (*verify) return cmd_verify(verify_args, out, err);
    if (*bench) return cmd_bench(bench_args, out);
    if (*gen) return cmd_generate(generate_args, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace colsel::cli
