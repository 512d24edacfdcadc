// Copyright 2026 The iTrash Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>

#include "itrash/analytics.hpp"
#include "itrash/classifier.hpp"
#include "itrash/error.hpp"
#include "itrash/event_store.hpp"
#include "itrash/gateway.hpp"
#include "itrash/replay.hpp"
#include "itrash/runtime.hpp"

namespace {

using namespace itrash;

std::vector<DisposalRecord> load_records(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open " + path);
  }
  return read_records(in);
}

ScenarioSpec resolve_scenario(const std::string& name)
{
  if (name == "canonical_itrash") {
    return canonical_itrash_scenario();
  }
  if (name == "canonical_control") {
    return canonical_control_scenario();
  }
  return load_scenario(name);
}

void print(const nlohmann::json& j)
{
  std::cout << j.dump(2) << '\n';
}

nlohmann::json ratio_json(const Ratio& r)
{
  return { { "numerator", r.numerator },
           { "denominator", r.denominator },
           { "value", r.value() },
           { "percent", r.percent() } };
}

struct StoreArgs
{
  std::string store;
  std::string file;
  std::string id;
  std::string real;
};

struct AnalyzeArgs
{
  std::string store;
  std::string mode = "prediction";
  std::string pairing = "A";
  std::string slot = "1h";
  int days = 5;
  std::string out;
};

struct ReplayArgs
{
  std::string scenario = "canonical_itrash";
  std::uint64_t seed = 1;
  std::string out;
  std::string trace_out;
  std::string trace_in;
};

struct ServeArgs
{
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store;
  std::string classifier = "scripted";
  std::string confusion;
  std::string remote_config;
  std::uint64_t seed = 1;
  std::string tick = "100ms";
  bool realtime = true;
  bool simulation = true;
};

int serve(const ServeArgs& a)
{
  std::unique_ptr<ClassifierPort> classifier;
  if (a.classifier == "scripted") {
    classifier = std::make_unique<ScriptedClassifier>();
  } else if (a.classifier == "simulated") {
    auto table = a.confusion.empty() ? ConfusionTable::field_trial_fit() : load_confusion_table(a.confusion);
    classifier = std::make_unique<SimulatedClassifier>(table, a.seed);
  } else if (a.classifier == "remote") {
    if (a.remote_config.empty()) {
      throw Error(ErrorCode::missing_field, "--remote-config is required for the remote classifier");
    }
    classifier = std::make_unique<RemoteClassifier>(RemoteClassifierConfig::load(a.remote_config));
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown classifier '" + a.classifier + "'");
  }

  auto store = a.store.empty() ? std::make_unique<EventStore>() : std::make_unique<EventStore>(a.store);
  Ledger ledger(a.seed);
  auto accounts = bootstrap_reward_wallets(ledger);
  DevicePort devices;
  VirtualClock clock(std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now()));
  auto tick = parse_duration(a.tick);
  StimulusScheduler scheduler(clock, tick);
  ControllerRuntime runtime({ ControllerConfig{}, *classifier, ledger, accounts, *store, devices, a.seed });

  GatewayOptions options;
  options.host = a.host;
  options.port = a.port;
  options.simulation = a.simulation;
  if (a.realtime) {
    options.realtime_period = tick;
  }
  Gateway gateway({ runtime, scheduler, clock, ledger, *store }, options);
  std::clog << "listening on http://" << a.host << ":" << a.port << '\n';
  gateway.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "iTrash kiosk simulator and analysis tools", "itrash" };
  app.require_subcommand(1);

  // store
  StoreArgs st;
  auto* store_cmd = app.add_subcommand("store", "Manage a JSONL record store");
  store_cmd->require_subcommand(1);
  auto* imp = store_cmd->add_subcommand("import", "Append records from a JSONL file");
  imp->add_option("--store", st.store, "Store file")->required();
  imp->add_option("--in", st.file, "JSONL file to import")->required();
  auto* exp = store_cmd->add_subcommand("export", "Write all records to a JSONL file");
  exp->add_option("--store", st.store, "Store file")->required();
  exp->add_option("--out", st.file, "Output file (stdout when omitted)");
  auto* ann = store_cmd->add_subcommand("annotate", "Set the ground-truth bin of a record");
  ann->add_option("--store", st.store, "Store file")->required();
  ann->add_option("--id", st.id, "record_id")->required();
  ann->add_option("--real", st.real, "blue, yellow or brown")->required();

  imp->callback([&] {
    EventStore store(st.store);
    auto n = store.import_jsonl(std::filesystem::path(st.file));
    std::cout << "imported " << n << " records\n";
  });
  exp->callback([&] {
    EventStore store(st.store);
    if (st.file.empty()) {
      store.export_jsonl(std::cout);
    } else {
      store.export_jsonl(std::filesystem::path(st.file));
    }
  });
  ann->callback([&] {
    EventStore store(st.store);
    auto r = store.annotate_real(st.id, color_from_string(st.real));
    print(to_json(r));
  });

  // analyze
  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Analyses over a JSONL record store");
  analyze->require_subcommand(1);
  auto* acc = analyze->add_subcommand("accuracy", "Prediction or disposal accuracy");
  acc->add_option("store", an.store, "Store file")->required();
  acc->add_option("--mode", an.mode, "prediction or disposal")
    ->check(CLI::IsMember({ "prediction", "disposal" }));
  auto* flows = analyze->add_subcommand("flows", "3x3 flow matrix");
  flows->add_option("store", an.store, "Store file")->required();
  flows->add_option("--pairing", an.pairing, "A thrown/real, B predicted/real, C correct predicted/thrown")
    ->check(CLI::IsMember({ "A", "B", "C" }));
  auto* temporal = analyze->add_subcommand("temporal", "Disposals per time slot and bin");
  temporal->add_option("store", an.store, "Store file")->required();
  temporal->add_option("--slot", an.slot, "Slot width, e.g. 1h or 30m");
  temporal->add_option("--days", an.days, "Days in the experiment")->check(CLI::PositiveNumber);
  auto* sankey = analyze->add_subcommand("sankey", "Export a flow matrix as Sankey nodes and links");
  sankey->add_option("store", an.store, "Store file")->required();
  sankey->add_option("--pairing", an.pairing, "A, B or C")->check(CLI::IsMember({ "A", "B", "C" }));
  sankey->add_option("--out", an.out, "Output JSON file")->required();
  auto* summary = analyze->add_subcommand("summary", "All headline figures");
  summary->add_option("store", an.store, "Store file")->required();

  acc->callback([&] {
    auto records = load_records(an.store);
    auto mode = an.mode == "disposal" ? AccuracyMode::disposal : AccuracyMode::prediction;
    auto j = ratio_json(accuracy(records, mode));
    j["mode"] = an.mode;
    print(j);
  });
  flows->callback([&] {
    auto records = load_records(an.store);
    print(to_json(flow_matrix(records, parse_pairing(an.pairing))));
  });
  temporal->callback([&] {
    auto records = load_records(an.store);
    auto out = nlohmann::json::array();
    for (const auto& s : temporal_stats(records, parse_duration(an.slot), an.days)) {
      out.push_back(to_json(s));
    }
    print(out);
  });
  sankey->callback([&] {
    auto records = load_records(an.store);
    export_sankey(flow_matrix(records, parse_pairing(an.pairing)), an.out);
    std::cout << "wrote " << an.out << '\n';
  });
  summary->callback([&] { print(summarize(load_records(an.store))); });

  // replay
  ReplayArgs rp;
  auto* replay_cmd = app.add_subcommand("replay", "Generate and replay experiment traces");
  replay_cmd->require_subcommand(1);
  auto* run = replay_cmd->add_subcommand("run", "Replay a scenario or trace into a store");
  run->add_option("--scenario", rp.scenario, "canonical_itrash, canonical_control or a JSON file");
  run->add_option("--trace", rp.trace_in, "Replay this trace file instead of generating one");
  run->add_option("--seed", rp.seed, "Generator seed");
  run->add_option("--out", rp.out, "Store file to write")->required();
  run->add_option("--trace-out", rp.trace_out, "Also write the generated trace");
  auto* trace_cmd = replay_cmd->add_subcommand("trace", "Only generate a trace");
  trace_cmd->add_option("--scenario", rp.scenario, "canonical_itrash, canonical_control or a JSON file");
  trace_cmd->add_option("--seed", rp.seed, "Generator seed");
  trace_cmd->add_option("--out", rp.out, "Trace file (stdout when omitted)");

  run->callback([&] {
    EventTrace trace;
    if (!rp.trace_in.empty()) {
      std::ifstream in(rp.trace_in);
      if (!in) {
        throw Error(ErrorCode::io, "cannot open " + rp.trace_in);
      }
      trace = read_trace(in);
    } else {
      trace = generate_trace(resolve_scenario(rp.scenario), rp.seed);
    }
    if (!rp.trace_out.empty()) {
      std::ofstream out(rp.trace_out);
      write_trace(trace, out);
    }
    if (std::filesystem::exists(rp.out)) {
      std::filesystem::remove(rp.out);
    }
    ReplayOptions options;
    options.store_path = rp.out;
    auto result = replay(trace, options);
    nlohmann::json j{ { "scenario", trace.meta.name },
                      { "seed", trace.meta.seed },
                      { "presented", result.presented },
                      { "records", result.store->size() },
                      { "transfers", result.ledger->transfers().size() },
                      { "out", rp.out } };
    for (const auto& f : result.failures) {
      std::clog << "warning: " << f << '\n';
    }
    print(j);
  });
  trace_cmd->callback([&] {
    auto trace = generate_trace(resolve_scenario(rp.scenario), rp.seed);
    if (rp.out.empty()) {
      write_trace(trace, std::cout);
    } else {
      std::ofstream out(rp.out);
      write_trace(trace, out);
    }
  });

  // serve
  ServeArgs sv;
  auto* serve_cmd = app.add_subcommand("serve", "Run a simulated kiosk behind the HTTP gateway");
  serve_cmd->add_option("--host", sv.host, "Bind address");
  serve_cmd->add_option("--port", sv.port, "Port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--store", sv.store, "Store file (in memory when omitted)");
  serve_cmd->add_option("--classifier", sv.classifier, "scripted, simulated or remote")
    ->check(CLI::IsMember({ "scripted", "simulated", "remote" }));
  serve_cmd->add_option("--confusion", sv.confusion, "Confusion table JSON for the simulated classifier");
  serve_cmd->add_option("--remote-config", sv.remote_config, "Remote classifier config JSON");
  serve_cmd->add_option("--seed", sv.seed, "Seed for the simulated classifier and wallet addresses");
  serve_cmd->add_option("--tick", sv.tick, "Controller tick interval");
  serve_cmd->add_flag("!--manual-clock", sv.realtime, "Advance the clock only via POST /clock/advance");
  serve_cmd->add_flag("!--no-simulation", sv.simulation, "Disable the stimulus and clock endpoints");
  int serve_rc = 0;
  serve_cmd->callback([&] { serve_rc = serve(sv); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return serve_rc;
}
