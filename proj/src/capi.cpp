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


#include "shieldsyn/shieldsyn.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "benchmarks.hpp"
#include "cegis.hpp"
#include "config_io.hpp"
#include "error.hpp"
#include "oracle.hpp"
#include "shield.hpp"

struct shs_benchmark {
  shieldsyn::BenchmarkDef def;
};

struct shs_oracle {
  shieldsyn::MlpPolicy policy;
};

struct shs_shield {
  shieldsyn::ShieldPolicy policy;
};

namespace {

using namespace shieldsyn;

thread_local std::string g_last_error;

class StatusError : public std::runtime_error {
 public:
  StatusError(shs_status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  shs_status status() const { return status_; }

 private:
  shs_status status_;
};

void Require(bool ok, const char* what) {
  if (!ok) throw StatusError(SHS_ERR_INVALID_ARGUMENT, what);
}

template <typename F>
shs_status Guard(F&& f) {
  g_last_error.clear();
  shs_status status = SHS_ERR_INTERNAL;
  try {
    f();
    return SHS_OK;
  } catch (const StatusError& e) {
    status = e.status();
    g_last_error = e.what();
  } catch (const ConfigError& e) {
    status = SHS_ERR_CONFIG;
    g_last_error = e.what();
  } catch (const ParseError& e) {
    status = SHS_ERR_PARSE;
    g_last_error = e.what();
  } catch (const DimensionError& e) {
    status = SHS_ERR_DIMENSION;
    g_last_error = e.what();
  } catch (const StructuralError& e) {
    status = SHS_ERR_STRUCTURAL;
    g_last_error = e.what();
  } catch (const NumericalError& e) {
    status = SHS_ERR_NUMERICAL;
    g_last_error = e.what();
  } catch (const InvariantBreach& e) {
    status = SHS_ERR_INVARIANT;
    g_last_error = e.what();
  } catch (const Error& e) {
    status = SHS_ERR_IO;
    g_last_error = e.what();
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return status;
}

char* Dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

Json ParseObject(const char* text) {
  if (!text || !*text) return Json::object();
  Json j = parse_json(text);
  if (!j.is_object()) throw StatusError(SHS_ERR_INVALID_ARGUMENT, "expected a JSON object");
  return j;
}

}  // namespace

extern "C" {

const char* shs_version(void) { return "0.1.0"; }

const char* shs_last_error_message(void) { return g_last_error.c_str(); }

const char* shs_status_name(shs_status status) {
  switch (status) {
    case SHS_OK: return "ok";
    case SHS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SHS_ERR_CONFIG: return "configuration error";
    case SHS_ERR_PARSE: return "parse error";
    case SHS_ERR_DIMENSION: return "dimension mismatch";
    case SHS_ERR_STRUCTURAL: return "structural error";
    case SHS_ERR_NUMERICAL: return "numerical error";
    case SHS_ERR_INVARIANT: return "invariant breach";
    case SHS_ERR_IO: return "i/o error";
    case SHS_ERR_NOT_FOUND: return "not found";
    case SHS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void shs_string_free(char* s) { std::free(s); }

size_t shs_benchmark_count(void) { return benchmarks().size(); }

const char* shs_benchmark_name_at(size_t index) {
  return index < benchmarks().size() ? benchmarks()[index].name.c_str()
                                     : nullptr;
}

shs_status shs_benchmark_load(const char* name_or_path, shs_benchmark** out) {
  return Guard([&] {
    Require(name_or_path && out, "null argument");
    *out = new shs_benchmark{load_benchmark(name_or_path)};
  });
}

void shs_benchmark_free(shs_benchmark* b) { delete b; }

const char* shs_benchmark_name(const shs_benchmark* b) {
  return b ? b->def.name.c_str() : nullptr;
}

int shs_benchmark_state_dim(const shs_benchmark* b) {
  return b ? b->def.env.n : 0;
}

int shs_benchmark_action_dim(const shs_benchmark* b) {
  return b ? b->def.env.m : 0;
}

shs_status shs_benchmark_to_json(const shs_benchmark* b, char** out) {
  return Guard([&] {
    Require(b && out, "null argument");
    *out = Dup(benchmark_to_json(b->def).dump(2));
  });
}

shs_status shs_benchmark_set_degree(shs_benchmark* b, int degree) {
  return Guard([&] {
    Require(b, "null argument");
    CegisConfig cfg = b->def.cegis;
    cfg.degree_bound = degree;
    cfg.validate();
    b->def.cegis = cfg;
  });
}

shs_status shs_benchmark_set_hidden(shs_benchmark* b, const int* sizes,
                                    size_t count) {
  return Guard([&] {
    Require(b && (sizes || count == 0), "null argument");
    std::vector<int> hidden(sizes, sizes + count);
    for (int h : hidden) {
      if (h < 1) throw ConfigError("hidden layer sizes must be >= 1");
    }
    b->def.hidden = hidden;
  });
}

shs_status shs_benchmark_set_time_budget(shs_benchmark* b, double seconds) {
  return Guard([&] {
    Require(b, "null argument");
    CegisConfig cfg = b->def.cegis;
    cfg.time_budget = seconds;
    cfg.validate();
    b->def.cegis = cfg;
  });
}

shs_status shs_oracle_train(const shs_benchmark* b, uint64_t seed,
                            shs_oracle** out, char** curve_csv) {
  return Guard([&] {
    Require(b && out, "null argument");
    TrainConfig cfg = b->def.train;
    cfg.seed = seed;
    TrainResult r =
        train(training_env(b->def), b->def.hidden, b->def.action_scale, cfg);
    if (curve_csv) {
      std::ostringstream csv;
      csv.precision(17);
      csv << "iteration,eval_reward,best_reward\n";
      for (const auto& p : r.curve) {
        csv << p.iteration << ',' << p.eval_reward << ',' << p.best_reward
            << '\n';
      }
      *curve_csv = Dup(csv.str());
    }
    *out = new shs_oracle{std::move(r.policy)};
  });
}

shs_status shs_oracle_load(const shs_benchmark* b, const char* path,
                           shs_oracle** out) {
  return Guard([&] {
    Require(b && path && out, "null argument");
    *out = new shs_oracle{load_weights(path, b->def.env)};
  });
}

shs_status shs_oracle_save(const shs_oracle* o, const char* path) {
  return Guard([&] {
    Require(o && path, "null argument");
    o->policy.save(path);
  });
}

void shs_oracle_free(shs_oracle* o) { delete o; }

shs_status shs_oracle_act(const shs_oracle* o, const double* state, size_t n,
                          double* action, size_t m) {
  return Guard([&] {
    Require(o && state && action, "null argument");
    if (static_cast<int>(n) != o->policy.input_dim() ||
        static_cast<int>(m) != o->policy.output_dim()) {
      throw DimensionError("state or action size differs from the network");
    }
    const Vector a = o->policy.forward({state, n});
    std::copy(a.begin(), a.end(), action);
  });
}

shs_status shs_cegis_run(const shs_benchmark* b, const shs_oracle* o,
                         uint64_t seed, shs_shield** out,
                         char** report_json) {
  return Guard([&] {
    Require(b && o && out, "null argument");
    const EnvironmentSpec& env = b->def.env;
    CegisConfig cfg = b->def.cegis;
    cfg.seed = seed;
    cfg.coverage.seed = seed;
    const CegisResult r =
        cegis(o->policy, LinearSketch{env.n, env.m, true}, env, cfg);
    if (report_json) *report_json = Dup(cegis_to_json(r, env.state_names()).dump(2));
    *out = new shs_shield{r.policy};
    if (!r.ok()) {
      throw StatusError(SHS_ERR_NOT_FOUND,
                        std::string("CEGIS stopped (") + to_string(r.status) +
                            "): " + r.message);
    }
  });
}

shs_status shs_shield_load(const shs_benchmark* b, const char* path,
                           shs_shield** out) {
  return Guard([&] {
    Require(b && path && out, "null argument");
    *out = new shs_shield{load_shield(path, b->def.env)};
  });
}

shs_status shs_shield_save(const shs_benchmark* b, const shs_shield* s,
                           const char* path) {
  return Guard([&] {
    Require(b && s && path, "null argument");
    write_file(path,
               shield_to_json(s->policy, b->def.env.state_names()).dump(2) +
                   "\n");
  });
}

void shs_shield_free(shs_shield* s) { delete s; }

size_t shs_shield_size(const shs_shield* s) {
  return s ? s->policy.size() : 0;
}

shs_status shs_shield_step(const shs_benchmark* b, const shs_shield* s,
                           const shs_oracle* o, const double* state, size_t n,
                           double* action, size_t m, int* intervened,
                           int* entry) {
  return Guard([&] {
    Require(b && s && o && state && action, "null argument");
    const EnvironmentSpec& env = b->def.env;
    if (static_cast<int>(n) != env.n || static_cast<int>(m) != env.m) {
      throw DimensionError("state or action size differs from the benchmark");
    }
    const ShieldStep st =
        shield_step({state, n}, env, o->policy.as_fn(), s->policy);
    std::copy(st.action.begin(), st.action.end(), action);
    if (intervened) *intervened = st.intervened ? 1 : 0;
    if (entry) *entry = st.entry;
  });
}

shs_status shs_simulate(const shs_benchmark* b, const shs_oracle* o,
                        const shs_shield* s, int episodes, int steps,
                        uint64_t seed, const char* step_log_path,
                        char** metrics_json) {
  return Guard([&] {
    Require(b && o && metrics_json, "null argument");
    const EnvironmentSpec& env = b->def.env;
    if (o->policy.input_dim() != env.n || o->policy.output_dim() != env.m) {
      throw DimensionError("oracle does not match the benchmark dimensions");
    }
    ShieldRunOptions opt;
    opt.run_shield = s != nullptr;
    std::ofstream log;
    if (step_log_path && s) {
      log.open(step_log_path);
      if (!log) throw Error(std::string("cannot write '") + step_log_path + "'");
      log.precision(17);
      log << "episode,step";
      for (const auto& name : env.state_names()) log << ',' << name;
      log << ",intervened,entry\n";
      opt.step_log = &log;
    }
    const ShieldedRunMetrics m =
        run_shielded(env, o->policy.as_fn(), s ? s->policy : ShieldPolicy(),
                     episodes, steps, seed, opt);
    *metrics_json = Dup(metrics_to_json(m).dump(2));
  });
}

shs_status shs_plot_grid(const shs_benchmark* b, const shs_shield* s,
                         int resolution, char** csv) {
  return Guard([&] {
    Require(b && s && csv, "null argument");
    if (resolution < 2) throw ConfigError("grid resolution must be >= 2");
    const EnvironmentSpec& env = b->def.env;
    const Vector c = env.s0_set.center();
    const Vector w = env.s0_set.half_width();
    const double scale = b->def.cegis.certificate.unbounded_scale;
    const BoxSet& safe = env.unsafe.safe_box();
    const int dims = std::min(env.n, 2);
    Vector lo(dims), hi(dims);
    for (int i = 0; i < dims; ++i) {
      const double r = scale * (w[i] > 0.0 ? w[i] : 1.0);
      lo[i] = std::isfinite(safe.lower()[i]) ? safe.lower()[i] : c[i] - r;
      hi[i] = std::isfinite(safe.upper()[i]) ? safe.upper()[i] : c[i] + r;
    }
    const auto names = env.state_names();
    std::ostringstream out;
    out.precision(10);
    for (int i = 0; i < dims; ++i) out << (i ? "," : "") << names[i];
    for (size_t k = 0; k < s->policy.size(); ++k) out << ",E" << k;
    out << ",min\n";
    const int ny = dims == 2 ? resolution : 1;
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < resolution; ++ix) {
        Vector p = c;
        p[0] = lo[0] + (hi[0] - lo[0]) * ix / (resolution - 1);
        if (dims == 2) p[1] = lo[1] + (hi[1] - lo[1]) * iy / (resolution - 1);
        out << p[0];
        if (dims == 2) out << ',' << p[1];
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : s->policy.entries()) {
          const double v = e.certificate.E.eval(p);
          best = std::min(best, v);
          out << ',' << v;
        }
        out << ',' << best << '\n';
      }
    }
    *csv = Dup(out.str());
  });
}

shs_status shs_report_build(const char* command, const shs_benchmark* b,
                            uint64_t seed, const char* started,
                            const char* results_json,
                            const char* artifacts_json, char** report_json,
                            char** report_csv) {
  return Guard([&] {
    Require(command && b && report_json, "null argument");
    RunReport r;
    r.command = command;
    r.benchmark = b->def.name;
    r.config_hash = fnv1a_hex(std::string(command) + "\n" +
                              benchmark_to_json(b->def).dump());
    r.seed = seed;
    r.started = started ? started : utc_timestamp();
    r.finished = utc_timestamp();
    r.results = ParseObject(results_json);
    const Json artifacts = ParseObject(artifacts_json);
    for (auto it = artifacts.begin(); it != artifacts.end(); ++it) {
      r.artifacts[it.key()] = it.value().is_string()
                                  ? it.value().get<std::string>()
                                  : it.value().dump();
    }
    *report_json = Dup(report_to_json(r).dump(2));
    if (report_csv) *report_csv = Dup(report_to_csv(r));
  });
}

shs_status shs_timestamp(char** out) {
  return Guard([&] {
    Require(out, "null argument");
    *out = Dup(utc_timestamp());
  });
}

shs_status shs_report_aggregate(const char* const* reports, size_t count,
                                char** table_text, char** table_csv) {
  return Guard([&] {
    Require(table_text, "null argument");
    Require(reports && count > 0, "at least one report is required");
    std::vector<RunReport> parsed;
    for (size_t i = 0; i < count; ++i) {
      Require(reports[i], "null report");
      parsed.push_back(report_from_json(parse_json(reports[i])));
    }
    const auto rows = aggregate_reports(parsed);
    *table_text = Dup(format_table(rows));
    if (table_csv) *table_csv = Dup(format_table_csv(rows));
  });
}

}  // extern "C"
