// Copyright 2026 The coflow-dag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// coflowsched: schedule, bench, verify, gen and tightness subcommands.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 infeasible schedule.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "coflow/coflow.hpp"

namespace {

using namespace coflow;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitInfeasible = 2;

/// "2", "3/2" or "1.25".
Rational parse_rational(const std::string& text) {
  const auto dot = text.find('.');
  try {
    if (dot == std::string::npos) return Rational(text);
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    if (digits.empty() || digits == "-") throw std::invalid_argument("empty");
    boost::multiprecision::cpp_int den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    return Rational(boost::multiprecision::cpp_int(digits)) / Rational(den);
  } catch (const std::exception&) {
    throw InvalidInput("not a number: '" + text + "'");
  }
}

std::string format_rational(const Rational& r) {
  std::ostringstream os;
  os << r.str();
  if (boost::multiprecision::denominator(r) != 1)
    os << " (" << r.convert_to<double>() << ")";
  return os.str();
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SCHED_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidInput("SCHED_SEED is not an unsigned integer");
    }
  }
  return 0;
}

Algorithm require_algorithm(const std::string& name) {
  auto a = parse_algorithm(name);
  if (!a) throw InvalidInput("unknown algorithm '" + name +
                             "' (expected dma, dma-rt, gdm, gdm-rt or baseline)");
  return *a;
}

Instance load_valid_instance(const std::string& path) {
  Instance inst = instance_from_json(read_json_file(path));
  require_valid(inst);
  return inst;
}

double mean_coflows_per_job(const Instance& inst) {
  if (inst.jobs.empty()) return 0;
  double total = 0;
  for (const auto& job : inst.jobs) total += static_cast<double>(job.coflows.size());
  return total / static_cast<double>(inst.jobs.size());
}

// ---------------------------------------------------------------------------
// schedule

struct ScheduleArgs {
  std::string instance;
  std::string algo;
  std::string beta = "2";
  std::optional<std::uint64_t> seed;
  bool backfill = false;
  bool online = false;
  std::string a;
  std::string out;
  std::string metrics_out;
};

struct RunOutcome {
  Schedule schedule;
  Metrics metrics;
};

RunOutcome execute(const Instance& inst, Algorithm algo, const RunOptions& opts,
                   bool online) {
  if (needs_rooted_trees(algo)) require_rooted_trees(inst);
  RunOutcome out;
  if (online) {
    auto r = simulate_online(inst, algo, opts);
    out.schedule = std::move(r.schedule);
    out.metrics = r.metrics;
  } else {
    out.schedule = run_algorithm(inst, algo, opts);
    auto violations = verify_schedule(inst, out.schedule);
    if (!violations.empty()) throw InfeasibleSchedule(describe(violations));
    out.metrics = metrics(inst, out.schedule);
  }
  return out;
}

int cmd_schedule(const ScheduleArgs& args) {
  Instance inst = load_valid_instance(args.instance);
  const Algorithm algo = require_algorithm(args.algo);
  const RunOptions opts{parse_rational(args.beta), args.seed.value_or(default_seed()),
                        args.backfill};
  require_beta(opts.beta);
  if (!args.a.empty()) {
    if (!args.online) throw InvalidInput("--a requires --online");
    const auto rho = gen_arrivals(inst.jobs, parse_rational(args.a).convert_to<double>(),
                                  opts.seed);
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) inst.jobs[j].release = rho[j];
  }
  const RunOutcome run = execute(inst, algo, opts, args.online);

  Json metrics_doc = to_json(run.metrics);
  metrics_doc["algorithm"] = to_string(algo);
  if (algo == Algorithm::kBaseline) metrics_doc["note"] = kBaselineLabel;
  metrics_doc["beta"] = opts.beta.str();
  metrics_doc["seed"] = opts.seed;
  metrics_doc["backfill"] = opts.backfill;
  metrics_doc["online"] = args.online;
  const auto lb = lower_bounds(inst);
  metrics_doc["lower_bound"] = lb.max();

  if (!args.out.empty()) write_json_file(args.out, to_json(run.schedule));
  std::string metrics_path = args.metrics_out;
  if (metrics_path.empty() && !args.out.empty()) {
    metrics_path = args.out;
    const auto ext = metrics_path.rfind(".json");
    if (ext != std::string::npos && ext + 5 == metrics_path.size()) metrics_path.resize(ext);
    metrics_path += ".metrics.json";
  }
  if (!metrics_path.empty()) write_json_file(metrics_path, metrics_doc);
  if (args.out.empty()) std::cout << to_json(run.schedule).dump(2) << "\n";
  std::cout << metrics_doc.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  GenSpec spec;
  std::string shape = "dag";
  std::string weights = "equal";
  std::string a;
  std::string trace;
  std::optional<std::uint64_t> seed;
  std::string out;
};

GenSpec resolve_gen(GenArgs args) {
  if (args.shape == "dag") {
    args.spec.shape = JobShape::kDag;
  } else if (args.shape == "tree") {
    args.spec.shape = JobShape::kTree;
  } else {
    throw InvalidInput("--shape must be dag or tree");
  }
  if (args.weights == "equal") {
    args.spec.weights = WeightMode::kEqual;
  } else if (args.weights == "uniform01") {
    args.spec.weights = WeightMode::kUniform01;
  } else {
    throw InvalidInput("--weights must be equal or uniform01");
  }
  args.spec.arrival_a = args.a.empty() ? 0 : parse_rational(args.a).convert_to<double>();
  args.spec.seed = args.seed.value_or(default_seed());
  return args.spec;
}

Instance generate(const GenArgs& args) {
  const GenSpec spec = resolve_gen(args);
  Instance inst;
  if (!args.trace.empty()) {
    inst.m = spec.m;
    inst.jobs = partition_into_jobs(load_flow_trace(args.trace, spec.m), spec.mean_mu,
                                    spec.shape, spec.seed);
    const auto w = gen_weights(inst.jobs.size(), spec.weights, spec.seed);
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) inst.jobs[j].weight = w[j];
    if (spec.arrival_a > 0) {
      const auto rho = gen_arrivals(inst.jobs, spec.arrival_a, spec.seed);
      for (std::size_t j = 0; j < inst.jobs.size(); ++j) inst.jobs[j].release = rho[j];
    }
  } else {
    inst = generate_instance(spec);
  }
  require_valid(inst);
  return inst;
}

int cmd_gen(const GenArgs& args) {
  const Instance inst = generate(args);
  if (args.out.empty()) {
    std::cout << to_json(inst).dump(2) << "\n";
  } else {
    write_json_file(args.out, to_json(inst));
    std::cerr << "wrote " << inst.jobs.size() << " jobs to " << args.out << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string instance;
  GenArgs gen;
  bool use_gen = false;
  std::vector<std::string> algos;
  std::vector<std::string> betas{"2"};
  std::vector<std::uint64_t> seeds;
  int repeats = 1;
  bool backfill = false;
  bool online = false;
  unsigned threads = 1;
  std::string out;
};

struct BenchRow {
  Algorithm algo;
  Rational beta;
  std::string beta_text;
  std::uint64_t seed = 0;
  Slot makespan = 0;
  Rational twct = 0;
  double runtime_ms = 0;
};

/// Seed of repeat r: the given seed itself for r = 0, else a split stream.
std::uint64_t repeat_seed(std::uint64_t seed, int r) {
  return r == 0 ? seed : Stream(seed).child({0x726570, static_cast<std::uint64_t>(r)}).next();
}

std::pair<double, double> mean_and_rsd(const std::vector<double>& xs) {
  if (xs.empty()) return {0, 0};
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); }))
    return {xs.front(), 0};
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return {mean, mean == 0 ? 0 : std::sqrt(var) / mean};
}

int cmd_bench(BenchArgs args) {
  if (args.algos.empty()) throw InvalidInput("bench: --algos must list at least one algorithm");
  if (args.betas.empty()) throw InvalidInput("bench: --betas must list at least one value");
  if (args.repeats < 1) throw InvalidInput("bench: --repeats must be at least 1");
  if (args.seeds.empty()) args.seeds.push_back(default_seed());
  if (args.instance.empty() == !args.use_gen)
    throw InvalidInput("bench: give exactly one of --instance or --gen");

  const Instance inst = args.use_gen ? generate(args.gen) : load_valid_instance(args.instance);
  std::vector<Algorithm> algos;
  for (const auto& name : args.algos) {
    algos.push_back(require_algorithm(name));
    if (needs_rooted_trees(algos.back())) require_rooted_trees(inst);
  }

  std::vector<BenchRow> rows;
  for (auto algo : algos)
    for (const auto& b : args.betas) {
      const Rational beta = parse_rational(b);
      require_beta(beta);
      for (auto seed : args.seeds)
        for (int r = 0; r < args.repeats; ++r)
          rows.push_back({algo, beta, b, repeat_seed(seed, r)});
    }

  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(rows.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      auto& row = rows[i];
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const RunOutcome run =
            execute(inst, row.algo, {row.beta, row.seed, args.backfill}, args.online);
        row.runtime_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        row.makespan = run.metrics.makespan;
        row.twct = run.metrics.total_weighted_completion;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned n_threads = std::max(1u, args.threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!errors[i].empty()) throw InfeasibleSchedule(errors[i]);

  std::ofstream file;
  if (!args.out.empty()) {
    file.open(args.out);
    if (!file) throw InvalidInput("cannot write " + args.out);
  }
  std::ostream& os = args.out.empty() ? std::cout : file;
  os << "algo,beta,seed,m,mean_mu,makespan,total_weighted_ct,runtime_ms\n";
  const double mean_mu = mean_coflows_per_job(inst);
  for (const auto& row : rows) {
    os << to_string(row.algo) << ',' << row.beta_text << ',' << row.seed << ',' << inst.m
       << ',' << mean_mu << ',' << row.makespan << ','
       << row.twct.convert_to<double>() << ',' << row.runtime_ms << '\n';
  }
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    std::vector<double> twct, span;
    while (j < rows.size() && rows[j].algo == rows[i].algo && rows[j].beta_text == rows[i].beta_text) {
      twct.push_back(rows[j].twct.convert_to<double>());
      span.push_back(static_cast<double>(rows[j].makespan));
      ++j;
    }
    const auto [mt, rt] = mean_and_rsd(twct);
    const auto [ms, rs] = mean_and_rsd(span);
    os << "# rsd algo=" << to_string(rows[i].algo) << " beta=" << rows[i].beta_text
       << " runs=" << (j - i) << " mean_total_weighted_ct=" << mt
       << " rsd_total_weighted_ct=" << rt << " mean_makespan=" << ms
       << " rsd_makespan=" << rs << '\n';
    i = j;
  }
  if (std::find(algos.begin(), algos.end(), Algorithm::kBaseline) != algos.end())
    os << "# baseline: " << kBaselineLabel << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const std::string& instance_path, const std::string& schedule_path,
               bool ignore_release) {
  const Instance inst = load_valid_instance(instance_path);
  const Schedule sched = schedule_from_json(read_json_file(schedule_path));
  const auto violations = verify_schedule(inst, sched, !ignore_release);
  if (!violations.empty()) {
    std::cout << "infeasible: " << violations.size() << " violation(s)\n"
              << describe(violations);
    return kExitInfeasible;
  }
  const Metrics m = metrics(inst, sched);
  std::cout << "feasible\n" << to_json(m).dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// tightness

int cmd_tightness(int K, std::int64_t d, const std::string& instance_out,
                  const std::string& schedule_out) {
  const Instance inst = tightness_instance_as_instance(K, d);
  const Schedule witness = tightness_witness(K, d);
  const auto violations = verify_schedule(inst, witness);
  if (!violations.empty()) throw InfeasibleSchedule(describe(violations));
  const Slot span = witness.span_end();
  const auto lb = lower_bounds(inst);
  const Rational ratio = Rational(span) / Rational(lb.max());
  if (!instance_out.empty()) write_json_file(instance_out, to_json(inst));
  if (!schedule_out.empty()) write_json_file(schedule_out, to_json(witness));
  std::cout << "K=" << K << " d=" << d << " coflows=" << inst.jobs[0].coflows.size()
            << " span=" << span << " aggregate=" << lb.aggregate
            << " critical_path=" << lb.critical_path << "\n"
            << "ratio " << span << "/" << lb.max() << " = " << format_rational(ratio)
            << "\n";
  return kExitOk;
}

void add_gen_options(CLI::App* cmd, GenArgs& g) {
  cmd->add_option("--m", g.spec.m, "Number of servers")->capture_default_str();
  cmd->add_option("--jobs", g.spec.jobs, "Number of jobs")->capture_default_str();
  cmd->add_option("--mean-mu", g.spec.mean_mu, "Mean coflows per job")->capture_default_str();
  cmd->add_option("--shape", g.shape, "dag or tree")->capture_default_str();
  cmd->add_option("--weights", g.weights, "equal or uniform01")->capture_default_str();
  cmd->add_option("--a", g.a, "Arrival-rate multiplier; omit for all releases at 0");
  cmd->add_option("--max-width", g.spec.coflow.max_width, "Max flows per coflow")
      ->capture_default_str();
  cmd->add_option("--max-size", g.spec.coflow.max_size, "Max flow size")
      ->capture_default_str();
  cmd->add_option("--trace", g.trace, "Flow trace to partition instead of random coflows");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling multi-stage jobs of coflows on a non-blocking switch"};
  app.require_subcommand(1);

  ScheduleArgs sa;
  auto* sched = app.add_subcommand("schedule", "Schedule an instance with one algorithm");
  sched->add_option("--instance", sa.instance, "Instance JSON")->required();
  sched->add_option("--algo", sa.algo, "dma, dma-rt, gdm, gdm-rt or baseline")->required();
  sched->add_option("--beta", sa.beta, "Delay parameter beta > 1/e")->capture_default_str();
  sched->add_option("--seed", sa.seed, "Random seed (default: $SCHED_SEED or 0)");
  sched->add_flag("--backfill", sa.backfill, "Backfill idle port pairs");
  sched->add_flag("--online", sa.online, "Re-plan at every job arrival");
  sched->add_option("--a", sa.a, "With --online: redraw Poisson releases with this rate multiplier");
  sched->add_option("--out", sa.out, "Schedule JSON output path");
  sched->add_option("--metrics", sa.metrics_out,
                    "Metrics JSON output path (default: <out>.metrics.json)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run a sweep and print CSV");
  bench->add_option("--instance", ba.instance, "Instance JSON");
  bench->add_flag("--gen", ba.use_gen, "Generate the instance from the generator options");
  add_gen_options(bench, ba.gen);
  bench->add_option("--gen-seed", ba.gen.seed, "Seed of the generated instance");
  bench->add_option("--algos", ba.algos, "Algorithms, comma separated")->delimiter(',')->required();
  bench->add_option("--betas", ba.betas, "Beta values, comma separated")->delimiter(',');
  bench->add_option("--seeds", ba.seeds, "Seeds, comma separated")->delimiter(',');
  bench->add_option("--repeats", ba.repeats, "Runs per seed")->capture_default_str();
  bench->add_flag("--backfill", ba.backfill, "Backfill idle port pairs");
  bench->add_flag("--online", ba.online, "Re-plan at every job arrival");
  bench->add_option("--threads", ba.threads, "Worker threads")->capture_default_str();
  bench->add_option("--out", ba.out, "CSV output path (default: stdout)");

  std::string v_instance, v_schedule;
  bool v_ignore_release = false;
  auto* verify = app.add_subcommand("verify", "Check a schedule against an instance");
  verify->add_option("--instance", v_instance, "Instance JSON")->required();
  verify->add_option("--schedule", v_schedule, "Schedule JSON")->required();
  verify->add_flag("--ignore-release", v_ignore_release, "Do not check release times");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  add_gen_options(gen, ga);
  gen->add_option("--seed", ga.seed, "Random seed (default: $SCHED_SEED or 0)");
  gen->add_option("--out", ga.out, "Instance JSON output path (default: stdout)");

  int K = 2;
  std::int64_t d = 1;
  std::string t_instance, t_schedule;
  auto* tight = app.add_subcommand("tightness", "Emit the tightness job and its optimal schedule");
  tight->add_option("--K", K, "Family parameter K >= 1")->capture_default_str();
  tight->add_option("--d", d, "Flow size d >= 1")->capture_default_str();
  tight->add_option("--instance-out", t_instance, "Instance JSON output path");
  tight->add_option("--schedule-out", t_schedule, "Witness schedule JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*sched) return cmd_schedule(sa);
    if (*bench) return cmd_bench(ba);
    if (*verify) return cmd_verify(v_instance, v_schedule, v_ignore_release);
    if (*gen) return cmd_gen(ga);
    if (*tight) return cmd_tightness(K, d, t_instance, t_schedule);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InfeasibleSchedule& e) {
    std::cerr << "infeasible schedule (internal error): " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
