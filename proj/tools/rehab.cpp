/* Copyright 2026 The Rehab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// rehab: command-line front end for generation, validation, simulated
// sessions, evaluation, the retrofit benchmark and the HTTP service.
#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rehab/dsl/parser.hpp"
#include "rehab/experiments/batch.hpp"
#include "rehab/experiments/calibration.hpp"
#include "rehab/experiments/reproduction_suite.hpp"
#include "rehab/genpipe/backend.hpp"
#include "rehab/genpipe/fidelity.hpp"
#include "rehab/genpipe/hallucination.hpp"
#include "rehab/genpipe/prescription.hpp"
#include "rehab/genpipe/prompt.hpp"
#include "rehab/retrofit/corpus.hpp"
#include "rehab/retrofit/retrofit.hpp"
#include "rehab/retrofit/template.hpp"
#include "rehab/runtime/log_codec.hpp"
#include "rehab/runtime/pacing.hpp"
#include "rehab/service/server.hpp"
#include "rehab/sim/scenario.hpp"
#include "rehab/sim/simulator.hpp"
#include "rehab/stats/confusion.hpp"
#include "rehab/stats/report.hpp"

#ifndef REHAB_DEFAULT_DATA_DIR
#define REHAB_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rehab;

namespace {

constexpr int kUsageError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

json failure(const std::string& kind, const std::string& message, json detail = json::object()) {
  return {{"kind", kind}, {"message", message}, {"detail", std::move(detail)}};
}

int report_failures(const json& failures) {
  std::cout << json{{"ok", false}, {"failures", failures}}.dump(2) << "\n";
  return 1;
}

json diagnostics_json(const std::vector<dsl::Diagnostic>& ds) {
  json out = json::array();
  for (const auto& d : ds) out.push_back(failure(d.rule, d.message, {{"line", d.loc().line}, {"column", d.loc().column}}));
  return out;
}

json truth_json(const runtime::GroundTruthTimes& t) {
  json out = json::array();
  for (const auto& x : t) out.push_back(x ? json(to_seconds(*x)) : json(nullptr));
  return out;
}

runtime::GroundTruthTimes truth_from_json(const json& j) {
  runtime::GroundTruthTimes out;
  for (const auto& x : j) out.push_back(x.is_null() ? std::nullopt : std::optional<Micros>(from_seconds(x.get<double>())));
  return out;
}

struct GenerateArgs {
  std::string prescription, backend = "deterministic", prompt_dir, replay_dir, out;
};

int cmd_generate(const GenerateArgs& a) {
  const auto rx = genpipe::load_prescription(a.prescription);
  auto backend = genpipe::make_backend(a.backend, a.replay_dir);
  const auto gen = genpipe::generate_program(rx, *backend, genpipe::load_prompt_config(a.prompt_dir));
  write_output(a.out, gen.text);
  std::cerr << genpipe::provenance_to_json(gen.provenance).dump() << "\n";
  return dsl::parse_program(gen.text).ok() ? 0 : 1;
}

struct ValidateArgs {
  std::string prescription, program;
};

int cmd_validate(const ValidateArgs& a) {
  const auto rx = genpipe::load_prescription(a.prescription);
  const auto pr = dsl::parse_program(read_file(a.program));
  if (!pr.ok()) return report_failures(diagnostics_json(pr.diagnostics));
  json failures = json::array();
  const auto fid = genpipe::validate_fidelity(rx, *pr.program);
  for (const auto& s : fid.steps) {
    if (s.verdict == genpipe::StepVerdict::kMatch) continue;
    json d = {{"similarity", s.similarity}, {"edit_distance", s.edit_distance}};
    if (s.rx_index) d["prescription_step"] = *s.rx_index;
    if (s.program_index) d["program_step"] = *s.program_index;
    failures.push_back(failure(genpipe::to_string(s.verdict), "step does not match the prescription", d));
  }
  for (const auto& f : genpipe::detect_hallucinated_monitors(rx, *pr.program)) {
    failures.push_back(failure("HallucinatedMonitor", "monitor references unspecified content", genpipe::finding_to_json(f)));
  }
  if (!failures.empty()) return report_failures(failures);
  std::cout << json{{"ok", true}, {"fidelity", genpipe::fidelity_to_json(fid)}}.dump(2) << "\n";
  return 0;
}

struct RunArgs {
  std::string program, scenario, out;
  double poll_hz = 10;
};

int cmd_run(const RunArgs& a) {
  const auto pr = dsl::parse_program(read_file(a.program));
  if (!pr.ok()) return report_failures(diagnostics_json(pr.diagnostics));
  const auto sc = sim::load_scenario(a.scenario);
  sim::SimOptions opts;
  opts.hz = sc.hz;
  sim::SimulatedPatient patient(*pr.program, sc.profile, sc.script, sc.noise, opts);
  VirtualClock clock;
  runtime::SessionConfig cfg;
  cfg.poll_hz = a.poll_hz;
  cfg.seed = sc.seed;
  cfg.program_id = fs::path(a.program).stem().string();
  const auto log = runtime::run_session(*pr.program, patient, clock, cfg);
  const auto truth = patient.truth_for(log);
  json pacing = json::array();
  for (auto v : runtime::pacing_of(log, truth)) pacing.push_back(runtime::to_string(v));
  write_output(a.out, json{{"log", runtime::log_to_json(log)}, {"truth", truth_json(truth)}, {"pacing", pacing}}.dump(2) + "\n");
  return 0;
}

struct EvalArgs {
  std::vector<std::string> sessions;
  std::string prelabels;
  double gamma = 0.95;
  bool as_json = false;
};

// Session ids are the file stems of the run outputs.
int cmd_eval(const EvalArgs& a) {
  std::vector<std::string> ids;
  std::vector<runtime::SessionLog> logs;
  std::vector<runtime::PacingVerdict> pacing;
  for (const auto& path : a.sessions) {
    const auto j = json::parse(read_file(path));
    ids.push_back(fs::path(path).stem().string());
    logs.push_back(runtime::log_from_json(j.at("log")));
    const auto v = runtime::pacing_of(logs.back(), truth_from_json(j.at("truth")));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (logs.back().steps[i].monitored) pacing.push_back(v[i]);
    }
  }
  std::vector<stats::PreLabel> labels;
  for (const auto& l : json::parse(read_file(a.prelabels))) labels.push_back(stats::prelabel_from_json(l));
  stats::ErrorAttribution attr;
  attr.steps = static_cast<std::int64_t>(labels.size());
  const auto m = stats::confusion(labels, ids, logs);
  const auto report = stats::build_report(m, pacing, attr, a.gamma);
  std::cout << (a.as_json ? stats::report_to_json(report).dump(2) + "\n" : stats::report_to_text(report));
  return 0;
}

struct RetrofitArgs {
  std::string prescription, template_path, corpus, templates;
};

int cmd_retrofit(const RetrofitArgs& a) {
  if (!a.corpus.empty()) {
    const auto tdir = a.templates.empty() ? (fs::path(a.corpus).parent_path() / "templates").string() : a.templates;
    const auto r = retrofit::evaluate_corpus(retrofit::load_corpus(a.corpus, tdir));
    std::cout << retrofit::corpus_result_to_json(r).dump(2) << "\n" << experiments::category_table_text(r);
    for (const auto& e : r.entries) {
      if (!e.matches_expectation) return 1;
    }
    return 0;
  }
  if (a.prescription.empty() || a.template_path.empty()) {
    std::cerr << "retrofit needs --corpus or both --prescription and --template\n";
    return kUsageError;
  }
  const auto v = retrofit::retrofit_check(genpipe::load_prescription(a.prescription), retrofit::load_template(a.template_path));
  std::cout << retrofit::verdict_to_json(v).dump(2) << "\n";
  return v.translatable ? 0 : 1;
}

struct BenchArgs {
  std::uint64_t seed = 7;
  std::string out = "report";
  std::string data_dir = REHAB_DEFAULT_DATA_DIR;
  bool calibrate = false;
  int seeds = 20;
  int mutations = 100;
};

int cmd_bench(const BenchArgs& a) {
  if (a.calibrate) {
    const auto ws = experiments::load_worksheets((fs::path(a.data_dir) / "worksheets").string());
    std::vector<std::uint64_t> seeds;
    for (int i = 1; i <= a.seeds; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
    const auto c = experiments::calibrate(ws, seeds);
    const auto j = experiments::calibration_to_json(c);
    fs::create_directories(a.out);
    write_output((fs::path(a.out) / "calibration.json").string(), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  experiments::SuiteConfig cfg;
  cfg.data_dir = a.data_dir;
  cfg.seed = a.seed;
  cfg.accuracy_seeds = a.seeds;
  cfg.mutations = a.mutations;
  const auto r = experiments::run_reproduction_suite(cfg);
  experiments::write_suite_report(r, a.out);
  json failures = json::array();
  for (const auto& c : r.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    if (!c.passed) failures.push_back(failure(c.name, c.detail));
  }
  if (!failures.empty()) return report_failures(failures);
  return 0;
}

struct ServeArgs {
  service::ServiceConfig config = service::ServiceConfig::from_env();
};

service::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) std::thread([] { g_service->stop(); }).detach();
}

int cmd_serve(ServeArgs a) {
  service::Service svc(a.config);
  svc.start();
  g_service = &svc;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << a.config.host << ":" << svc.port() << std::endl;
  svc.wait();
  svc.stop();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exercise intervention programs: generate, validate, simulate, evaluate"};
  app.require_subcommand(1);

  GenerateArgs ga;
  ga.prompt_dir = std::string(REHAB_DEFAULT_DATA_DIR) + "/prompt";
  ga.replay_dir = std::string(REHAB_DEFAULT_DATA_DIR) + "/replays";
  auto* gen = app.add_subcommand("generate", "Generate a program from a prescription");
  gen->add_option("--prescription", ga.prescription, "Prescription JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--backend", ga.backend, "deterministic, replay or remote")
      ->check(CLI::IsMember({"deterministic", "replay", "remote"}));
  gen->add_option("--prompt-dir", ga.prompt_dir, "System prompt components");
  gen->add_option("--replay-dir", ga.replay_dir, "Transcripts for the replay backend");
  gen->add_option("--out", ga.out, "Output path (default stdout)");

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "Check a program against its prescription");
  val->add_option("--prescription", va.prescription)->required()->check(CLI::ExistingFile);
  val->add_option("--program", va.program)->required()->check(CLI::ExistingFile);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run a program against a simulated patient");
  run->add_option("--program", ra.program)->required()->check(CLI::ExistingFile);
  run->add_option("--scenario", ra.scenario)->required()->check(CLI::ExistingFile);
  run->add_option("--poll-hz", ra.poll_hz);
  run->add_option("--out", ra.out);

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Confusion matrix and intervals over run outputs");
  ev->add_option("--session", ea.sessions, "Output of `run`; the file stem is the session id")
      ->required()->check(CLI::ExistingFile);
  ev->add_option("--prelabels", ea.prelabels, "JSON array of pre-labels")->required()->check(CLI::ExistingFile);
  ev->add_option("--gamma", ea.gamma)->check(CLI::Range(0.5, 0.9999));
  ev->add_flag("--json", ea.as_json);

  RetrofitArgs fa;
  auto* rf = app.add_subcommand("retrofit", "Template-paradigm retrofit check");
  rf->add_option("--prescription", fa.prescription)->check(CLI::ExistingFile);
  rf->add_option("--template", fa.template_path)->check(CLI::ExistingFile);
  rf->add_option("--corpus", fa.corpus, "Corpus directory with manifest.json")->check(CLI::ExistingDirectory);
  rf->add_option("--templates", fa.templates)->check(CLI::ExistingDirectory);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Reproduce the evaluation statistics and write a report");
  bench->add_option("--seed", ba.seed);
  bench->add_option("--out", ba.out);
  bench->add_option("--data-dir", ba.data_dir)->check(CLI::ExistingDirectory);
  bench->add_flag("--calibrate", ba.calibrate, "Run the noise-rate sweep instead");
  bench->add_option("--seeds", ba.seeds)->check(CLI::PositiveNumber);
  bench->add_option("--mutations", ba.mutations)->check(CLI::PositiveNumber);

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--data-dir", sa.config.data_dir, "Record store root (env DATA_DIR)");
  serve->add_option("--host", sa.config.host);
  serve->add_option("--port", sa.config.port, "0 picks a free port (env PORT)");
  serve->add_option("--rt-factor", sa.config.default_rt_factor);
  serve->add_option("--threads", sa.config.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*gen) return cmd_generate(ga);
    if (*val) return cmd_validate(va);
    if (*run) return cmd_run(ra);
    if (*ev) return cmd_eval(ea);
    if (*rf) return cmd_retrofit(fa);
    if (*bench) return cmd_bench(ba);
    if (*serve) return cmd_serve(sa);
  } catch (const std::exception& e) {
    return report_failures(json::array({failure("error", e.what())}));
  }
  return kUsageError;
}
