// Copyright 2026 The ShieldSyn Authors
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


#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shieldsyn/shieldsyn.h"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int code;
  std::string message;
};

int ExitCodeFor(shs_status status) {
  switch (status) {
    case SHS_OK: return kExitOk;
    case SHS_ERR_INVALID_ARGUMENT:
    case SHS_ERR_CONFIG:
    case SHS_ERR_PARSE:
    case SHS_ERR_DIMENSION: return kExitUsage;
    default: return kExitFailure;
  }
}

void Check(shs_status status, const std::string& context) {
  if (status == SHS_OK) return;
  throw Failure{ExitCodeFor(status), context + ": " + shs_status_name(status) +
                                         ": " + shs_last_error_message()};
}

std::string Take(char* s) {
  std::string out = s ? s : "";
  shs_string_free(s);
  return out;
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Benchmark =
    std::unique_ptr<shs_benchmark, Deleter<shs_benchmark, shs_benchmark_free>>;
using Oracle = std::unique_ptr<shs_oracle, Deleter<shs_oracle, shs_oracle_free>>;
using Shield = std::unique_ptr<shs_shield, Deleter<shs_shield, shs_shield_free>>;

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{kExitFailure, "cannot write '" + path + "'"};
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitUsage, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// `path` without a trailing ".json".
std::string Stem(const std::string& path) {
  const std::string ext = ".json";
  if (path.size() > ext.size() &&
      path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
    return path.substr(0, path.size() - ext.size());
  }
  return path;
}

std::string Now() {
  char* s = nullptr;
  Check(shs_timestamp(&s), "timestamp");
  return Take(s);
}

Benchmark LoadBenchmark(const std::string& name) {
  shs_benchmark* b = nullptr;
  Check(shs_benchmark_load(name.c_str(), &b), "benchmark '" + name + "'");
  return Benchmark(b);
}

Oracle LoadOracle(const shs_benchmark* b, const std::string& path) {
  shs_oracle* o = nullptr;
  Check(shs_oracle_load(b, path.c_str(), &o), "weights '" + path + "'");
  return Oracle(o);
}

Shield LoadShield(const shs_benchmark* b, const std::string& path) {
  shs_shield* s = nullptr;
  Check(shs_shield_load(b, path.c_str(), &s), "shield '" + path + "'");
  return Shield(s);
}

/// Writes `<stem>.report.json` and `<stem>.report.csv`.
void EmitReport(const std::string& command, const shs_benchmark* b,
                uint64_t seed, const std::string& started,
                const ordered_json& results, const ordered_json& artifacts,
                const std::string& stem) {
  ordered_json all = artifacts;
  all["report_json"] = stem + ".report.json";
  all["report_csv"] = stem + ".report.csv";
  char* json = nullptr;
  char* csv = nullptr;
  Check(shs_report_build(command.c_str(), b, seed, started.c_str(),
                         results.dump().c_str(), all.dump().c_str(), &json,
                         &csv),
        "report");
  WriteText(stem + ".report.json", Take(json) + "\n");
  WriteText(stem + ".report.csv", Take(csv));
  std::cout << "report: " << stem << ".report.json\n";
}

struct TrainArgs {
  std::string benchmark;
  std::vector<int> hidden;
  uint64_t seed = 1;
  std::string out;
};

int RunTrain(const TrainArgs& a) {
  const std::string started = Now();
  Benchmark b = LoadBenchmark(a.benchmark);
  if (!a.hidden.empty()) {
    Check(shs_benchmark_set_hidden(b.get(), a.hidden.data(), a.hidden.size()),
          "--hidden");
  }
  const std::string out =
      a.out.empty() ? a.benchmark + ".weights.json" : a.out;
  const std::string stem = Stem(out);
  shs_oracle* raw = nullptr;
  char* curve = nullptr;
  Check(shs_oracle_train(b.get(), a.seed, &raw, &curve), "train");
  Oracle o(raw);
  const std::string curve_csv = Take(curve);
  Check(shs_oracle_save(o.get(), out.c_str()), "save weights");
  WriteText(stem + ".curve.csv", curve_csv);

  std::istringstream rows(curve_csv);
  std::string line, last;
  int points = -1;
  while (std::getline(rows, line)) {
    if (!line.empty()) {
      last = line;
      ++points;
    }
  }
  const double best = std::stod(last.substr(last.rfind(',') + 1));
  ordered_json results = {{"curve_points", points}, {"best_reward", best}};
  std::cout << "weights: " << out << " (best evaluation reward " << best
            << ")\n";
  EmitReport("train", b.get(), a.seed, started, results,
             {{"weights", out}, {"curve", stem + ".curve.csv"}}, stem);
  return kExitOk;
}

struct CegisArgs {
  std::string benchmark;
  std::string weights;
  int degree = 0;
  double time_budget = -1.0;
  uint64_t seed = 1;
  std::string out;
};

int RunCegis(const CegisArgs& a) {
  const std::string started = Now();
  Benchmark b = LoadBenchmark(a.benchmark);
  if (a.degree != 0) Check(shs_benchmark_set_degree(b.get(), a.degree), "--degree");
  if (a.time_budget >= 0.0) {
    Check(shs_benchmark_set_time_budget(b.get(), a.time_budget),
          "--time-budget");
  }
  Oracle o = LoadOracle(b.get(), a.weights);
  const std::string out =
      a.out.empty() ? a.benchmark + ".shield.json" : a.out;
  shs_shield* raw = nullptr;
  char* report = nullptr;
  const shs_status status =
      shs_cegis_run(b.get(), o.get(), a.seed, &raw, &report);
  const std::string message = shs_last_error_message();
  Shield s(raw);
  const std::string report_text = Take(report);
  if (status != SHS_OK && status != SHS_ERR_NOT_FOUND) Check(status, "cegis");
  if (s) Check(shs_shield_save(b.get(), s.get(), out.c_str()), "save shield");
  ordered_json results = ordered_json::parse(report_text);
  EmitReport("cegis", b.get(), a.seed, started, results, {{"shield", out}},
             Stem(out));
  std::cout << "shield: " << out << " (" << shs_shield_size(s.get())
            << " entries, status " << results["status"].get<std::string>()
            << ")\n";
  if (status != SHS_OK) {
    throw Failure{kExitFailure, "cegis: " + message};
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string benchmark;
  std::string weights;
  std::string shield;
  bool no_shield = false;
  int episodes = 100;
  int steps = 1000;
  uint64_t seed = 1;
  std::string plot_data;
  int plot_resolution = 101;
  std::string step_log;
  std::string out;
};

int RunSimulate(const SimulateArgs& a) {
  const std::string started = Now();
  if (!a.no_shield && a.shield.empty()) {
    throw Failure{kExitUsage, "simulate: --shield is required unless --no-shield"};
  }
  if (a.no_shield && (!a.plot_data.empty() || !a.step_log.empty())) {
    throw Failure{kExitUsage,
                  "simulate: --plot-data and --step-log need a shield"};
  }
  Benchmark b = LoadBenchmark(a.benchmark);
  Oracle o = LoadOracle(b.get(), a.weights);
  Shield s;
  if (!a.no_shield) s = LoadShield(b.get(), a.shield);
  const std::string out =
      a.out.empty() ? a.benchmark + (a.no_shield ? ".unshielded" : ".shielded") +
                          ".json"
                    : a.out;
  const std::string stem = Stem(out);
  char* metrics = nullptr;
  Check(shs_simulate(b.get(), o.get(), s.get(), a.episodes, a.steps, a.seed,
                     a.step_log.empty() ? nullptr : a.step_log.c_str(),
                     &metrics),
        "simulate");
  const ordered_json m = ordered_json::parse(Take(metrics));
  ordered_json results = {{"shielded", !a.no_shield}, {"metrics", m}};
  ordered_json artifacts = ordered_json::object();
  if (s) {
    results["shield_entries"] = shs_shield_size(s.get());
    artifacts["shield"] = a.shield;
  }
  artifacts["weights"] = a.weights;
  if (!a.step_log.empty()) artifacts["step_log"] = a.step_log;
  if (!a.plot_data.empty()) {
    char* grid = nullptr;
    Check(shs_plot_grid(b.get(), s.get(), a.plot_resolution, &grid),
          "--plot-data");
    WriteText(a.plot_data, Take(grid));
    artifacts["plot_data"] = a.plot_data;
  }
  EmitReport("simulate", b.get(), a.seed, started, results, artifacts, stem);
  std::cout << "unshielded unsafe entries: "
            << m["unshielded"]["unsafe_entries"].get<int>() << "\n";
  if (s) {
    std::cout << "shielded unsafe entries: "
              << m["shielded"]["unsafe_entries"].get<int>()
              << ", interventions: " << m["interventions"].get<long long>()
              << "\n";
  }
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> paths;
  std::string out;
};

int RunReport(const ReportArgs& a) {
  if (a.paths.empty()) throw Failure{kExitUsage, "report: no report files given"};
  std::vector<std::string> texts;
  for (const auto& p : a.paths) texts.push_back(ReadText(p));
  std::vector<const char*> ptrs;
  for (const auto& t : texts) ptrs.push_back(t.c_str());
  char* table = nullptr;
  char* csv = nullptr;
  Check(shs_report_aggregate(ptrs.data(), ptrs.size(), &table, &csv),
        "report");
  std::cout << Take(table);
  const std::string csv_text = Take(csv);
  if (!a.out.empty()) WriteText(a.out, csv_text);
  return kExitOk;
}

int RunList() {
  for (size_t i = 0; i < shs_benchmark_count(); ++i) {
    std::cout << shs_benchmark_name_at(i) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shielded synthesis of verified programmatic controllers"};
  app.set_version_flag("--version", std::string(shs_version()));
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a neural oracle");
  t->add_option("benchmark", train.benchmark, "Benchmark name or file")->required();
  t->add_option("--hidden", train.hidden, "Hidden layer sizes, e.g. 32,32")
      ->delimiter(',');
  t->add_option("--seed", train.seed, "Root seed");
  t->add_option("--out", train.out, "Weight file");

  CegisArgs cg;
  auto* c = app.add_subcommand("cegis", "Synthesize a verified shield");
  c->add_option("benchmark", cg.benchmark, "Benchmark name or file")->required();
  c->add_option("--weights", cg.weights, "Oracle weight file")->required();
  c->add_option("--degree", cg.degree, "Invariant degree bound (even)");
  c->add_option("--time-budget", cg.time_budget, "Wall-clock budget in seconds");
  c->add_option("--seed", cg.seed, "Root seed");
  c->add_option("--out", cg.out, "Shield file");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run paired shielded episodes");
  s->add_option("benchmark", sim.benchmark, "Benchmark name or file")->required();
  s->add_option("--weights", sim.weights, "Oracle weight file")->required();
  s->add_option("--shield", sim.shield, "Shield file");
  s->add_flag("--no-shield", sim.no_shield, "Run the unshielded oracle only");
  s->add_option("--episodes", sim.episodes, "Episodes");
  s->add_option("--steps", sim.steps, "Steps per episode");
  s->add_option("--seed", sim.seed, "Root seed");
  s->add_option("--plot-data", sim.plot_data, "Invariant grid CSV");
  s->add_option("--plot-resolution", sim.plot_resolution,
                "Grid points per dimension");
  s->add_option("--step-log", sim.step_log, "Per-step CSV of the shielded run");
  s->add_option("--out", sim.out, "Report path (.json)");

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Aggregate run reports into a table");
  r->add_option("reports", rep.paths, "Report JSON files");
  r->add_option("--out", rep.out, "Table CSV");

  app.add_subcommand("list", "List registered benchmarks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (t->parsed()) return RunTrain(train);
    if (c->parsed()) return RunCegis(cg);
    if (s->parsed()) return RunSimulate(sim);
    if (r->parsed()) return RunReport(rep);
    return RunList();
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
