#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srr/channels.hpp"
#include "srr/experiment.hpp"
#include "srr/verify.hpp"

namespace {

using namespace srr;

// Flags shared by the sweep subcommands. Values land here; merge() only
// picks up the ones the user actually passed, so a JSON config keeps its
// say for everything else.
struct SweepFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  int n_t = 5;
  std::vector<int> n_r;
  std::vector<double> p_db;
  int points = 21;
  std::vector<double> weights;
  double tol = 1e-4;
  int max_outer = 0;
  std::string out_dir = ".";
  std::string channels;
  bool dump_covariances = false;
  bool no_rescale = false;
  bool no_traces = false;
};

void add_sweep_options(CLI::App* cmd, SweepFlags& f, bool with_weights,
                       bool with_points) {
  cmd->add_option("--config", f.config_path,
                  "JSON config; explicit flags override its values");
  cmd->add_option("--seed", f.seed,
                  "channel seed (required unless --channels or the config "
                  "supplies channels)");
  cmd->add_option("--nt", f.n_t, "transmit antennas");
  cmd->add_option("--nr", f.n_r,
                  "receive antennas per receiver, authorized one first");
  cmd->add_option("--p-db", f.p_db, "power grid in dB");
  if (with_points)
    cmd->add_option("--points", f.points, "boundary grid size");
  if (with_weights)
    cmd->add_option("--weights", f.weights, "secrecy weight grid");
  cmd->add_option("--tol", f.tol, "outer stopping tolerance, bits");
  cmd->add_option("--max-outer", f.max_outer,
                  "outer iteration cap (0 keeps the method default)");
  cmd->add_option("--out-dir", f.out_dir, "output directory");
  cmd->add_option("--channels", f.channels,
                  "channel JSON file to load instead of generating");
  cmd->add_flag("--dump-covariances", f.dump_covariances,
                "write per-point covariance JSON");
  cmd->add_flag("--no-rescale", f.no_rescale,
                "skip the exact floor tightening");
  cmd->add_flag("--no-traces", f.no_traces,
                "skip convergence JSONL output");
}

bool given(const CLI::App* cmd, const std::string& name) {
  const CLI::Option* o = cmd->get_option_no_throw(name);
  return o && o->count() > 0;
}

ExperimentConfig merge(const CLI::App* cmd, const SweepFlags& f,
                       const std::string& method) {
  ExperimentConfig c;
  if (given(cmd, "--config")) c = config_from_json_file(f.config_path);
  c.method = method;
  if (given(cmd, "--seed")) {
    c.seed = f.seed;
    c.has_seed = true;
  }
  if (given(cmd, "--nt")) c.n_t = f.n_t;
  if (given(cmd, "--nr")) c.n_r = f.n_r;
  if (given(cmd, "--p-db")) c.p_db = f.p_db;
  if (given(cmd, "--points")) c.points = f.points;
  if (given(cmd, "--weights")) c.weights = f.weights;
  if (given(cmd, "--tol")) c.tol_bits = f.tol;
  if (given(cmd, "--max-outer")) c.max_outer = f.max_outer;
  if (given(cmd, "--out-dir")) c.out_dir = f.out_dir;
  if (given(cmd, "--channels")) c.channels_path = f.channels;
  if (given(cmd, "--dump-covariances")) c.dump_covariances = true;
  if (given(cmd, "--no-rescale")) c.rescale = false;
  if (given(cmd, "--no-traces")) c.write_traces = false;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Secrecy rate regions for joint multicast and confidential "
      "transmission with artificial noise"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-channels",
                                 "Draw a channel set and write it as JSON");
  std::uint64_t gseed = 0;
  int gnt = 5;
  std::vector<int> gnr = {3, 3, 3, 3};
  std::string gout = "channels.json";
  gen->add_option("--seed", gseed, "RNG seed")->required();
  gen->add_option("--nt", gnt, "transmit antennas");
  gen->add_option("--nr", gnr,
                  "receive antennas per receiver, authorized one first");
  gen->add_option("--out", gout, "output path");

  SweepFlags dcf, aof, noanf, tdmaf;
  auto* dc = app.add_subcommand(
      "trace-dc", "Sweep the multicast-floor scalarization");
  add_sweep_options(dc, dcf, false, true);
  auto* ao =
      app.add_subcommand("trace-ao", "Sweep the weighted scalarization");
  add_sweep_options(ao, aof, true, false);
  auto* noan = app.add_subcommand(
      "baseline-noan", "Rerun a tracer with the noise covariance removed");
  std::string algo = "dc";
  noan->add_option("--algo", algo, "which tracer to rerun")
      ->check(CLI::IsMember({"dc", "ao"}));
  add_sweep_options(noan, noanf, true, true);
  auto* tdma = app.add_subcommand("baseline-tdma",
                                  "Time-shared single-service baseline");
  add_sweep_options(tdma, tdmaf, false, true);

  auto* cx = app.add_subcommand(
      "complexity", "Arithmetic-cost figures for the two algorithms");
  int cnt = 5, ck = 4;
  cx->add_option("--nt", cnt, "transmit antennas")->required();
  cx->add_option("--k", ck, "number of receivers")->required();

  auto* ver = app.add_subcommand("verify", "Run the identity battery");
  std::uint64_t vseed = 1;
  ver->add_option("--seed", vseed, "battery seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      ChannelSet ch = generate_channels(gseed, gnt, gnr);
      save_channels(ch, gout, gseed);
      std::printf("wrote %s\n", gout.c_str());
      return 0;
    }
    if (dc->parsed()) return run_experiment(merge(dc, dcf, "dc"));
    if (ao->parsed()) return run_experiment(merge(ao, aof, "ao"));
    if (noan->parsed())
      return run_experiment(merge(noan, noanf, "no-an-" + algo));
    if (tdma->parsed()) return run_experiment(merge(tdma, tdmaf, "tdma"));
    if (cx->parsed()) {
      ComplexityEstimate e = complexity_estimate(cnt, ck);
      std::printf("n1=%.0f n2=%.0f T1=%.10g T2=%.10g\n", e.n1, e.n2, e.t1,
                  e.t2);
      return 0;
    }
    if (ver->parsed()) {
      BatteryResult r = run_identity_battery(vseed);
      for (const BatterySuite& s : r.suites)
        std::printf("[%s] %s: %d/%d, worst %.3g\n",
                    s.pass ? "PASS" : "FAIL", s.name.c_str(), s.passed,
                    s.total, s.worst);
      std::printf("battery wall clock: %.1f ms\n", r.wall_ms);
      return r.pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
