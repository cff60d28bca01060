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


#include "config_io.hpp"

#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace shieldsyn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <typename T>
T Get(const Json& j, const char* key) {
  try {
    return Field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
void Opt(const Json& j, const char* key, T& out) {
  if (j.is_object() && j.contains(key)) out = Get<T>(j, key);
}

Json BoundsJson(const Vector& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? Json(x) : Json(nullptr));
  return a;
}

Vector BoundsFrom(const Json& a, double null_value, const char* key) {
  if (!a.is_array()) throw ConfigError(std::string(key) + " must be an array");
  Vector v;
  for (const auto& x : a) {
    if (x.is_null()) {
      v.push_back(null_value);
    } else if (x.is_number()) {
      v.push_back(x.get<double>());
    } else {
      throw ConfigError(std::string(key) + " entries must be numbers or null");
    }
  }
  return v;
}

Json BoxJson(const BoxSet& b) {
  return Json{{"lower", BoundsJson(b.lower())},
              {"upper", BoundsJson(b.upper())}};
}

BoxSet BoxFrom(const Json& j, const char* key) {
  if (j.is_null()) return {};
  return BoxSet(BoundsFrom(Field(j, "lower"), -kInf, key),
                BoundsFrom(Field(j, "upper"), kInf, key));
}

void CheckFormat(const Json& j, const char* format) {
  if (!j.is_object()) throw ConfigError("expected a JSON object");
  const std::string got = j.value("format", std::string());
  if (got != format) {
    throw ConfigError("schema mismatch: expected format '" +
                      std::string(format) + "', got '" + got + "'");
  }
}

Json TrainJson(const TrainConfig& c) {
  return Json{{"iterations", c.iterations},
              {"directions", c.directions},
              {"top_directions", c.top_directions},
              {"step_size", c.step_size},
              {"noise", c.noise},
              {"rollouts", c.rollouts},
              {"horizon", c.horizon},
              {"eval_episodes", c.eval_episodes},
              {"eval_every", c.eval_every}};
}

void TrainFrom(const Json& j, TrainConfig& c) {
  Opt(j, "iterations", c.iterations);
  Opt(j, "directions", c.directions);
  Opt(j, "top_directions", c.top_directions);
  Opt(j, "step_size", c.step_size);
  Opt(j, "noise", c.noise);
  Opt(j, "rollouts", c.rollouts);
  Opt(j, "horizon", c.horizon);
  Opt(j, "eval_episodes", c.eval_episodes);
  Opt(j, "eval_every", c.eval_every);
}

Json SynthJson(const SynthConfig& c) {
  return Json{{"step_size", c.step_size},
              {"noise", c.noise},
              {"iterations", c.iterations},
              {"trajectories_per_side", c.trajectories_per_side},
              {"horizon", c.horizon},
              {"max_penalty", c.max_penalty},
              {"tolerance", c.tolerance},
              {"patience", c.patience},
              {"max_step", c.max_step},
              {"eval_trajectories", c.eval_trajectories},
              {"eval_every", c.eval_every}};
}

void SynthFrom(const Json& j, SynthConfig& c) {
  Opt(j, "step_size", c.step_size);
  Opt(j, "noise", c.noise);
  Opt(j, "iterations", c.iterations);
  Opt(j, "trajectories_per_side", c.trajectories_per_side);
  Opt(j, "horizon", c.horizon);
  Opt(j, "max_penalty", c.max_penalty);
  Opt(j, "tolerance", c.tolerance);
  Opt(j, "patience", c.patience);
  Opt(j, "max_step", c.max_step);
  Opt(j, "eval_trajectories", c.eval_trajectories);
  Opt(j, "eval_every", c.eval_every);
}

Json CegisJson(const CegisConfig& c) {
  const CertificateConfig& k = c.certificate;
  return Json{
      {"degree_bound", c.degree_bound},
      {"max_outer_iterations", c.max_outer_iterations},
      {"r_min", c.r_min},
      {"time_budget", c.time_budget},
      {"coverage",
       {{"grid_points", c.coverage.grid_points},
        {"random_samples", c.coverage.random_samples},
        {"ascent_steps", c.coverage.ascent_steps},
        {"ascent_starts", c.coverage.ascent_starts}}},
      {"certificate",
       {{"epsilon", k.sos.epsilon},
        {"facial_reduction", k.sos.facial_reduction},
        {"round_digits", k.round_digits},
        {"domain_inflation", k.domain_inflation},
        {"unbounded_scale", k.unbounded_scale},
        {"falsify_samples", k.falsify.samples},
        {"falsify_offset", k.falsify.offset},
        {"falsify_tolerance", k.falsify.tolerance},
        {"refine_steps", k.falsify.refine_steps}}}};
}

void CegisFrom(const Json& j, CegisConfig& c) {
  Opt(j, "degree_bound", c.degree_bound);
  Opt(j, "max_outer_iterations", c.max_outer_iterations);
  Opt(j, "r_min", c.r_min);
  Opt(j, "time_budget", c.time_budget);
  if (j.contains("coverage")) {
    const Json& v = j.at("coverage");
    Opt(v, "grid_points", c.coverage.grid_points);
    Opt(v, "random_samples", c.coverage.random_samples);
    Opt(v, "ascent_steps", c.coverage.ascent_steps);
    Opt(v, "ascent_starts", c.coverage.ascent_starts);
  }
  if (j.contains("certificate")) {
    const Json& v = j.at("certificate");
    CertificateConfig& k = c.certificate;
    Opt(v, "epsilon", k.sos.epsilon);
    Opt(v, "facial_reduction", k.sos.facial_reduction);
    Opt(v, "round_digits", k.round_digits);
    Opt(v, "domain_inflation", k.domain_inflation);
    Opt(v, "unbounded_scale", k.unbounded_scale);
    Opt(v, "falsify_samples", k.falsify.samples);
    Opt(v, "falsify_offset", k.falsify.offset);
    Opt(v, "falsify_tolerance", k.falsify.tolerance);
    Opt(v, "refine_steps", k.falsify.refine_steps);
  }
}

void Flatten(const Json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      Flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(),
              out);
    }
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string Fixed(double v, int digits) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(digits);
  o << v;
  return o.str();
}

}  // namespace

Json env_to_json(const EnvironmentSpec& env) {
  std::vector<std::string> names = env.var_names;
  Json dyn = Json::array();
  for (const auto& f : env.f) dyn.push_back(f.to_string(names));
  Json j;
  j["format"] = kEnvFormat;
  j["name"] = env.name;
  j["n"] = env.n;
  j["m"] = env.m;
  if (!names.empty()) j["names"] = names;
  j["dynamics"] = dyn;
  j["s0_box"] = BoxJson(env.s0_set);
  j["safe_box"] = BoxJson(env.unsafe.safe_box());
  j["dt"] = env.dt;
  j["horizon"] = env.horizon;
  j["disturbance_bounds"] = env.disturbance;
  j["reward_name"] = env.reward_name;
  j["angle_unit"] = "rad";
  j["angle_dims"] = env.angle_dims;
  return j;
}

EnvironmentSpec env_from_json(const Json& j) {
  CheckFormat(j, kEnvFormat);
  EnvironmentSpec env;
  env.name = j.value("name", std::string());
  env.n = Get<int>(j, "n");
  env.m = Get<int>(j, "m");
  if (env.n < 1 || env.m < 0) throw ConfigError("n must be >= 1, m >= 0");
  Opt(j, "names", env.var_names);
  const auto dyn = Get<std::vector<std::string>>(j, "dynamics");
  if (static_cast<int>(dyn.size()) != env.n) {
    throw ConfigError("dynamics must list n polynomials");
  }
  for (const auto& text : dyn) {
    env.f.push_back(Polynomial::Parse(text, env.n + env.m, env.var_names));
  }
  env.s0_set = BoxFrom(Field(j, "s0_box"), "s0_box");
  const Json& safe = Field(j, "safe_box");
  env.unsafe = UnsafeSet(safe.is_null()
                             ? BoxSet(Vector(env.n, -kInf), Vector(env.n, kInf))
                             : BoxFrom(safe, "safe_box"));
  Opt(j, "dt", env.dt);
  Opt(j, "horizon", env.horizon);
  Opt(j, "disturbance_bounds", env.disturbance);
  Opt(j, "reward_name", env.reward_name);
  Opt(j, "angle_dims", env.angle_dims);
  const std::string unit = j.value("angle_unit", std::string("rad"));
  if (unit != "rad" && unit != "deg") {
    throw ConfigError("angle_unit must be 'rad' or 'deg'");
  }
  if (env.s0_set.dim() != env.n || env.unsafe.safe_box().dim() != env.n) {
    throw ConfigError("box dimension differs from n");
  }
  if (unit == "deg") {
    constexpr double k = std::numbers::pi / 180.0;
    Vector s0l = env.s0_set.lower(), s0u = env.s0_set.upper();
    Vector sl = env.unsafe.safe_box().lower(), su = env.unsafe.safe_box().upper();
    for (int d : env.angle_dims) {
      if (d < 0 || d >= env.n) throw ConfigError("angle dimension out of range");
      s0l[d] *= k, s0u[d] *= k, sl[d] *= k, su[d] *= k;
    }
    env.s0_set = BoxSet(s0l, s0u);
    env.unsafe = UnsafeSet(BoxSet(sl, su));
  }
  env.validate();
  return env;
}

Json benchmark_to_json(const BenchmarkDef& b) {
  Json j = env_to_json(b.env);
  j["name"] = b.name;
  j["presets"] = Json{{"oracle_from", b.oracle_from},
                      {"hidden", b.hidden},
                      {"action_scale", b.action_scale},
                      {"train", TrainJson(b.train)},
                      {"synth", SynthJson(b.synth)},
                      {"cegis", CegisJson(b.cegis)}};
  j["expected"] = b.expected;
  return j;
}

BenchmarkDef benchmark_from_json(const Json& j) {
  BenchmarkDef b;
  b.env = env_from_json(j);
  b.name = b.env.name;
  if (b.name.empty()) throw ConfigError("benchmark needs a name");
  b.action_scale = Vector(b.env.m, 1.0);
  Opt(j, "expected", b.expected);
  if (j.contains("presets")) {
    const Json& p = j.at("presets");
    Opt(p, "oracle_from", b.oracle_from);
    Opt(p, "hidden", b.hidden);
    Opt(p, "action_scale", b.action_scale);
    if (p.contains("train")) TrainFrom(p.at("train"), b.train);
    if (p.contains("synth")) SynthFrom(p.at("synth"), b.synth);
    if (p.contains("cegis")) CegisFrom(p.at("cegis"), b.cegis);
  }
  if (static_cast<int>(b.action_scale.size()) != b.env.m) {
    throw ConfigError("action_scale must have m entries");
  }
  b.train.validate();
  b.synth.validate();
  b.cegis.validate();
  return b;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

BenchmarkDef load_benchmark(const std::string& name_or_path) {
  for (const auto& b : benchmarks()) {
    if (b.name == name_or_path) return b;
  }
  if (std::filesystem::is_regular_file(name_or_path)) {
    return benchmark_from_json(parse_json(read_file(name_or_path)));
  }
  return find_benchmark(name_or_path);
}

Json shield_to_json(const ShieldPolicy& sp,
                    const std::vector<std::string>& state_names) {
  Json entries = Json::array();
  for (const auto& e : sp.entries()) {
    const Eigen::MatrixXd& th = e.program.theta();
    Json theta = Json::array();
    for (int i = 0; i < th.rows(); ++i) {
      Json row = Json::array();
      for (int k = 0; k < th.cols(); ++k) row.push_back(th(i, k));
      theta.push_back(row);
    }
    const BarrierCertificate& c = e.certificate;
    entries.push_back(Json{{"theta", theta},
                           {"includes_bias", e.program.sketch().includes_bias},
                           {"invariant", c.E.to_string(state_names)},
                           {"degree", c.degree},
                           {"epsilon", c.epsilon},
                           {"margin", c.margin},
                           {"mult_degree", c.mult_degree},
                           {"equality_residual", c.equality_residual},
                           {"min_eigenvalue", c.min_eigenvalue},
                           {"falsifier_samples", c.falsifier_samples},
                           {"region", BoxJson(c.region)}});
  }
  Json j;
  j["format"] = kShieldFormat;
  j["n"] = sp.state_dim();
  j["m"] = sp.action_dim();
  if (!state_names.empty()) j["state_names"] = state_names;
  j["entries"] = entries;
  return j;
}

ShieldPolicy shield_from_json(const Json& j) {
  CheckFormat(j, kShieldFormat);
  const int n = Get<int>(j, "n");
  const int m = Get<int>(j, "m");
  std::vector<std::string> names;
  Opt(j, "state_names", names);
  ShieldPolicy sp(n, m);
  for (const Json& e : Field(j, "entries")) {
    const auto rows = Get<std::vector<std::vector<double>>>(e, "theta");
    LinearSketch sketch{n, m, e.value("includes_bias", true)};
    if (static_cast<int>(rows.size()) != m) {
      throw DimensionError("theta must have m rows");
    }
    Eigen::MatrixXd theta(m, n + 1);
    for (int i = 0; i < m; ++i) {
      if (static_cast<int>(rows[i].size()) != n + 1) {
        throw DimensionError("theta rows must have n + 1 entries");
      }
      for (int k = 0; k <= n; ++k) theta(i, k) = rows[i][k];
    }
    BarrierCertificate c;
    c.E = Polynomial::Parse(Get<std::string>(e, "invariant"), n, names);
    c.degree = Get<int>(e, "degree");
    c.epsilon = Get<double>(e, "epsilon");
    Opt(e, "margin", c.margin);
    Opt(e, "mult_degree", c.mult_degree);
    Opt(e, "equality_residual", c.equality_residual);
    Opt(e, "min_eigenvalue", c.min_eigenvalue);
    Opt(e, "falsifier_samples", c.falsifier_samples);
    c.region = BoxFrom(Field(e, "region"), "region");
    sp.add({LinearProgramPolicy(sketch, theta), std::move(c)});
  }
  return sp;
}

ShieldPolicy load_shield(const std::string& path, const EnvironmentSpec& env) {
  ShieldPolicy sp = shield_from_json(parse_json(read_file(path)));
  if (sp.state_dim() != env.n || sp.action_dim() != env.m) {
    throw DimensionError("shield file '" + path +
                         "' does not match the environment dimensions");
  }
  return sp;
}

Json metrics_to_json(const ShieldedRunMetrics& m) {
  auto variant = [](const VariantMetrics& v) {
    return Json{{"unsafe_entries", v.unsafe_entries},
                {"steps_to_steady", v.steps_to_steady},
                {"settled_episodes", v.settled_episodes},
                {"mean_step_seconds", v.mean_step_seconds},
                {"mean_reward", v.mean_reward}};
  };
  return Json{{"episodes", m.episodes},
              {"steps_per_episode", m.steps_per_episode},
              {"unshielded", variant(m.unshielded)},
              {"shielded", variant(m.shielded)},
              {"program", variant(m.program)},
              {"interventions", m.interventions},
              {"decisions", m.decisions},
              {"intervention_rate", m.intervention_rate},
              {"overhead_fraction", m.overhead_fraction},
              {"shield_step_us", m.shield_step_us}};
}

Json cegis_to_json(const CegisResult& r,
                   const std::vector<std::string>& state_names) {
  Json attempts = Json::array();
  for (const auto& a : r.attempts) {
    attempts.push_back(Json{{"outer", a.outer},
                            {"s0", a.s0},
                            {"region", BoxJson(a.region)},
                            {"program", a.program.to_string(state_names)},
                            {"verified", a.verified},
                            {"note", a.note},
                            {"synth_seconds", a.synth_seconds},
                            {"verify_seconds", a.verify_seconds}});
  }
  Json certs = Json::array();
  for (const auto& e : r.policy.entries()) {
    const BarrierCertificate& c = e.certificate;
    certs.push_back(Json{{"program", e.program.to_string(state_names)},
                         {"invariant", c.E.to_string(state_names)},
                         {"degree", c.degree},
                         {"epsilon", c.epsilon},
                         {"margin", c.margin},
                         {"falsifier_samples", c.falsifier_samples},
                         {"equality_residual", c.equality_residual},
                         {"min_eigenvalue", c.min_eigenvalue},
                         {"region", BoxJson(c.region)}});
  }
  return Json{{"status", to_string(r.status)},
              {"message", r.message},
              {"entries", r.policy.size()},
              {"seconds", r.seconds},
              {"attempts", attempts},
              {"certificates", certs}};
}

std::string fnv1a_hex(const std::string& text) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

Json report_to_json(const RunReport& r) {
  Json j;
  j["format"] = kReportFormat;
  j["command"] = r.command;
  j["benchmark"] = r.benchmark;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["started"] = r.started;
  j["finished"] = r.finished;
  j["results"] = r.results;
  j["artifacts"] = r.artifacts;
  return j;
}

RunReport report_from_json(const Json& j) {
  CheckFormat(j, kReportFormat);
  RunReport r;
  r.command = Get<std::string>(j, "command");
  r.benchmark = Get<std::string>(j, "benchmark");
  Opt(j, "config_hash", r.config_hash);
  Opt(j, "seed", r.seed);
  Opt(j, "started", r.started);
  Opt(j, "finished", r.finished);
  if (j.contains("results")) r.results = j.at("results");
  Opt(j, "artifacts", r.artifacts);
  return r;
}

std::string report_to_csv(const RunReport& r) {
  std::vector<std::pair<std::string, std::string>> fields = {
      {"command", r.command},         {"benchmark", r.benchmark},
      {"config_hash", r.config_hash}, {"seed", std::to_string(r.seed)},
      {"started", r.started},         {"finished", r.finished}};
  Flatten(r.results, "", fields);
  std::string head, row;
  for (size_t i = 0; i < fields.size(); ++i) {
    head += (i ? "," : "") + CsvField(fields[i].first);
    row += (i ? "," : "") + CsvField(fields[i].second);
  }
  return head + "\n" + row + "\n";
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<ReportRow> aggregate_reports(
    const std::vector<RunReport>& reports) {
  std::vector<ReportRow> rows;
  auto row_for = [&](const std::string& name) -> ReportRow& {
    for (auto& r : rows) {
      if (r.benchmark == name) return r;
    }
    rows.push_back({});
    rows.back().benchmark = name;
    return rows.back();
  };
  for (const auto& rep : reports) {
    ReportRow& row = row_for(rep.benchmark);
    const Json& res = rep.results;
    if (rep.command == "cegis") {
      if (res.contains("entries")) {
        row.size = std::to_string(res.at("entries").get<int>());
      }
      if (res.contains("seconds")) {
        row.synthesis_time = Fixed(res.at("seconds").get<double>(), 1) + "s";
      }
    } else if (rep.command == "simulate" && res.contains("metrics")) {
      const Json& m = res.at("metrics");
      const bool shielded = res.value("shielded", false);
      row.failures =
          std::to_string(m.at("unshielded").at("unsafe_entries").get<int>());
      if (shielded) {
        row.overhead =
            Fixed(100.0 * m.at("overhead_fraction").get<double>(), 2) + "%";
        row.interventions =
            std::to_string(m.at("interventions").get<long>());
        row.performance =
            Fixed(m.at("shielded").at("steps_to_steady").get<double>(), 1) +
            " / " +
            Fixed(m.at("program").at("steps_to_steady").get<double>(), 1);
        if (res.contains("shield_entries") && row.size == "-") {
          row.size = std::to_string(res.at("shield_entries").get<int>());
        }
      }
    }
  }
  return rows;
}

std::string format_table(const std::vector<ReportRow>& rows) {
  const std::vector<std::string> head = {
      "Benchmark",     "Failures", "Size",       "Synthesis-time",
      "Overhead",      "Interventions", "Performance"};
  std::vector<std::vector<std::string>> cells = {head};
  for (const auto& r : rows) {
    cells.push_back({r.benchmark, r.failures, r.size, r.synthesis_time,
                     r.overhead, r.interventions, r.performance});
  }
  std::vector<size_t> width(head.size(), 0);
  for (const auto& c : cells) {
    for (size_t i = 0; i < c.size(); ++i) width[i] = std::max(width[i], c[i].size());
  }
  std::string out;
  for (const auto& c : cells) {
    for (size_t i = 0; i < c.size(); ++i) {
      out += c[i];
      if (i + 1 < c.size()) out += std::string(width[i] - c[i].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

std::string format_table_csv(const std::vector<ReportRow>& rows) {
  std::string out =
      "benchmark,failures,size,synthesis_time,overhead,interventions,"
      "performance\n";
  for (const auto& r : rows) {
    out += CsvField(r.benchmark) + "," + CsvField(r.failures) + "," +
           CsvField(r.size) + "," + CsvField(r.synthesis_time) + "," +
           CsvField(r.overhead) + "," + CsvField(r.interventions) + "," +
           CsvField(r.performance) + "\n";
  }
  return out;
}

}  // namespace shieldsyn
