#include "srr/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "srr/channels.hpp"

namespace srr {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double p) {
  if (p <= 0.0) throw DomainError("linear_to_db: power must be positive");
  return 10.0 * std::log10(p);
}

ComplexityEstimate complexity_estimate(int n_t, int k) {
  if (n_t < 1 || k < 1)
    throw DomainError("complexity_estimate: sizes must be at least 1");
  const double cube = static_cast<double>(n_t) * n_t * n_t;
  const double sq = static_cast<double>(n_t) * n_t;
  auto phi = [&](double n) {
    return n * (2.0 * k + 3.0 * cube) + n * n * (2.0 * k + 3.0 * sq) +
           n * n * n;
  };
  ComplexityEstimate e;
  e.n1 = 3.0 * sq + 1.0;
  e.n2 = 3.0 * sq + 2.0;
  const double root = std::sqrt(2.0 * k + 3.0 * n_t);
  e.t1 = root * phi(e.n1);
  e.t2 = root * phi(e.n2);
  return e;
}

RegionBoundary run_no_an(const ChannelSet& ch, double power,
                         const std::string& method, const DcSweepConfig& dcc,
                         const AoSweepConfig& aoc) {
  if (method == "dc") {
    DcSweepConfig sc = dcc;
    sc.dc.include_an = false;
    RegionBoundary b = trace_region_dc(ch, power, sc);
    b.method = "no-an-dc";
    return b;
  }
  if (method == "ao") {
    AoSweepConfig sc = aoc;
    sc.ao.include_an = false;
    RegionBoundary b = trace_region_ao(ch, power, sc);
    b.method = "no-an-ao";
    return b;
  }
  throw DomainError("run_no_an: method must be dc or ao");
}

RegionBoundary run_tdma(const ChannelSet& ch, double power, int points,
                        const DcConfig& dci) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration_cast<
               std::chrono::duration<double, std::milli>>(b - a)
        .count();
  };
  if (points < 2)
    throw DomainError("run_tdma: needs at least the two endpoints");
  RegionBoundary rb;
  rb.method = "tdma";

  auto t0 = clock::now();
  TauMaxResult tm = compute_tau_max(ch, power, dci.kernel);
  auto t1 = clock::now();
  DcConfig dc = dci;
  dc.tau_max_hint_bits = tm.tau_bits;
  DcResult corner = dc_solve(ch, power, 0.0, dc);
  auto t2 = clock::now();
  const bool corner_ok = corner.status == "ok" ||
                         corner.status == "max_outer" ||
                         corner.status == "endpoint";
  const double rc_max = corner_ok ? corner.rates.secrecy_bits : 0.0;

  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    BoundaryRecord rec;
    rec.param = t;
    rec.r0_bits = t * tm.tau_bits;
    rec.rc_bits = (1.0 - t) * rc_max;
    rec.status = corner_ok ? "ok" : corner.status;
    CovarianceTriple sol;  // dimension zero marks a time-shared mixture
    if (i == 0) {
      rec.outer_iters = corner.outer_iters;
      rec.inner_solves = corner.inner_solves;
      rec.wall_ms = ms(t1, t2);
      rec.trace = corner.trace;
      sol = corner.cov;
    } else if (i == points - 1) {
      rec.inner_solves = 1;
      rec.wall_ms = ms(t0, t1);
      sol = CovarianceTriple::zero(ch.n_t, power);
      sol.multicast = tm.q0;
    }
    rb.records.push_back(std::move(rec));
    rb.solutions.push_back(std::move(sol));
  }
  return rb;
}

namespace {

constexpr const char* kCsvHeader =
    "method,seed,P_dB,param,R0_bits,Rc_bits,outer_iters,inner_solves,"
    "wall_ms,status";

std::string fmt_g(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.12g", v);
  return b;
}

std::string fmt_full(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string fmt_db(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%g", v);
  return b;
}

bool point_succeeded(const std::string& status) {
  return status == "ok" || status == "endpoint" || status == "max_outer";
}

void validate_config(const ExperimentConfig& cfg) {
  static const std::set<std::string> methods = {"dc", "ao", "no-an-dc",
                                                "no-an-ao", "tdma"};
  if (!methods.count(cfg.method))
    throw DomainError("config: unknown method '" + cfg.method + "'");
  if (cfg.channels_path.empty()) {
    if (cfg.n_t < 1) throw DomainError("config: N_t must be at least 1");
    if (cfg.n_r.empty()) throw DomainError("config: N_r must be nonempty");
    for (int r : cfg.n_r)
      if (r < 1) throw DomainError("config: N_r entries must be at least 1");
  }
  if (cfg.p_db.empty()) throw DomainError("config: P_dB grid is empty");
  for (double db : cfg.p_db)
    if (!std::isfinite(db)) throw DomainError("config: P_dB must be finite");
  if (cfg.points < 2) throw DomainError("config: points must be at least 2");
  if (cfg.tol_bits <= 0.0) throw DomainError("config: tol must be positive");
  for (double w : cfg.weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DomainError("config: weights must be finite and nonnegative");
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw DomainError(std::string("config JSON: ") + e.what());
  }
  if (!j.is_object())
    throw DomainError("config JSON: top level must be an object");
  static const std::set<std::string> known = {
      "seed",   "N_t",     "N_r",     "K",        "P_dB",
      "method", "points",  "weights", "tol",      "max_outer",
      "out_dir", "channels", "dump_covariances", "rescale", "traces"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw DomainError("config JSON: unknown key '" + item.key() + "'");

  ExperimentConfig c;
  try {
    if (j.contains("seed")) {
      c.seed = j["seed"].get<std::uint64_t>();
      c.has_seed = true;
    }
    if (j.contains("N_t")) c.n_t = j["N_t"].get<int>();
    if (j.contains("N_r")) c.n_r = j["N_r"].get<std::vector<int>>();
    if (j.contains("K") &&
        j["K"].get<int>() != static_cast<int>(c.n_r.size()))
      throw DomainError("config JSON: K must equal the length of N_r");
    if (j.contains("P_dB")) {
      if (j["P_dB"].is_number())
        c.p_db = {j["P_dB"].get<double>()};
      else
        c.p_db = j["P_dB"].get<std::vector<double>>();
    }
    if (j.contains("method")) c.method = j["method"].get<std::string>();
    if (j.contains("points")) c.points = j["points"].get<int>();
    if (j.contains("weights"))
      c.weights = j["weights"].get<std::vector<double>>();
    if (j.contains("tol")) c.tol_bits = j["tol"].get<double>();
    if (j.contains("max_outer")) c.max_outer = j["max_outer"].get<int>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("channels"))
      c.channels_path = j["channels"].get<std::string>();
    if (j.contains("dump_covariances"))
      c.dump_covariances = j["dump_covariances"].get<bool>();
    if (j.contains("rescale")) c.rescale = j["rescale"].get<bool>();
    if (j.contains("traces")) c.write_traces = j["traces"].get<bool>();
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception& e) {
    throw DomainError(std::string("config JSON: ") + e.what());
  }
  return c;
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::string boundary_csv(const RegionBoundary& b) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const BoundaryRecord& r : b.records) {
    char wall[40];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
    os << b.method << ',' << b.seed << ',' << fmt_g(b.p_db) << ','
       << fmt_g(r.param) << ',' << fmt_g(r.r0_bits) << ','
       << fmt_g(r.rc_bits) << ',' << r.outer_iters << ',' << r.inner_solves
       << ',' << wall << ',' << r.status << '\n';
  }
  return os.str();
}

std::string trace_jsonl(const RegionBoundary& b) {
  // n restarts at 1 whenever a new boundary point begins.
  std::ostringstream os;
  for (const BoundaryRecord& r : b.records)
    for (const TraceRow& t : r.trace)
      os << "{\"n\":" << t.n << ",\"objective_nats\":"
         << fmt_full(t.objective_nats) << ",\"multicast_bits\":"
         << fmt_full(t.multicast_bits) << ",\"secrecy_bits\":"
         << fmt_full(t.secrecy_bits) << "}\n";
  return os.str();
}

RegionBoundary parse_boundary_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DomainError("boundary CSV: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw DomainError("boundary CSV: unexpected header");
  RegionBoundary b;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() != 10) throw DomainError("boundary CSV: malformed row");
    if (first) {
      b.method = f[0];
      b.seed = std::stoull(f[1]);
      b.p_db = std::stod(f[2]);
      first = false;
    }
    BoundaryRecord r;
    r.param = std::stod(f[3]);
    r.r0_bits = std::stod(f[4]);
    r.rc_bits = std::stod(f[5]);
    r.outer_iters = std::stoi(f[6]);
    r.inner_solves = std::stoi(f[7]);
    r.wall_ms = std::stod(f[8]);
    r.status = f[9];
    b.records.push_back(std::move(r));
  }
  return b;
}

RegionBoundary run_cell(const ChannelSet& ch, double power,
                        const ExperimentConfig& cfg) {
  if (cfg.method == "dc" || cfg.method == "no-an-dc") {
    DcSweepConfig sc;
    sc.points = cfg.points;
    sc.rescale = cfg.rescale;
    sc.dc.tol_bits = cfg.tol_bits;
    if (cfg.max_outer > 0) sc.dc.max_outer = cfg.max_outer;
    if (cfg.method == "dc") return trace_region_dc(ch, power, sc);
    return run_no_an(ch, power, "dc", sc, {});
  }
  if (cfg.method == "ao" || cfg.method == "no-an-ao") {
    AoSweepConfig sc;
    sc.weights = cfg.weights;
    sc.ao.tol_bits = cfg.tol_bits;
    if (cfg.max_outer > 0) sc.ao.max_outer = cfg.max_outer;
    if (cfg.method == "ao") return trace_region_ao(ch, power, sc);
    return run_no_an(ch, power, "ao", {}, sc);
  }
  if (cfg.method == "tdma") {
    DcConfig dc;
    dc.tol_bits = cfg.tol_bits;
    if (cfg.max_outer > 0) dc.max_outer = cfg.max_outer;
    return run_tdma(ch, power, cfg.points, dc);
  }
  throw DomainError("run_cell: unknown method '" + cfg.method + "'");
}

namespace {

void write_cell_outputs(const RegionBoundary& b, const ExperimentConfig& cfg,
                        int* code, std::string* notes) {
  namespace fs = std::filesystem;
  const std::string stem = b.method + "_P" + fmt_db(b.p_db) + "dB";
  const fs::path dir(cfg.out_dir);
  write_text_atomic((dir / ("boundary_" + stem + ".csv")).string(),
                    boundary_csv(b));
  if (cfg.write_traces)
    write_text_atomic((dir / ("trace_" + stem + ".jsonl")).string(),
                      trace_jsonl(b));
  if (cfg.dump_covariances) {
    for (std::size_t i = 0; i < b.solutions.size(); ++i) {
      if (b.solutions[i].multicast.rows() == 0) continue;
      if (i < b.records.size() && !point_succeeded(b.records[i].status))
        continue;
      save_covariances(
          b.solutions[i],
          (dir / ("cov_" + stem + "_point" + std::to_string(i) + ".json"))
              .string());
    }
  }
  for (const BoundaryRecord& r : b.records) {
    if (point_succeeded(r.status)) continue;
    *code = 2;
    *notes += "point failed: method=" + b.method +
              " seed=" + std::to_string(b.seed) + " P_dB=" + fmt_db(b.p_db) +
              " param=" + fmt_g(r.param) + " status=" + r.status + "\n";
  }
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  ChannelSet ch;
  std::uint64_t seed = cfg.seed;
  try {
    validate_config(cfg);
    if (!cfg.channels_path.empty()) {
      ch = load_channels(cfg.channels_path, &seed);
    } else {
      if (!cfg.has_seed)
        throw DomainError(
            "run_experiment: a seed is required to generate channels");
      ch = generate_channels(cfg.seed, cfg.n_t, cfg.n_r);
    }
    std::filesystem::create_directories(cfg.out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fatal: %s\n", e.what());
    return 1;
  }

  const std::size_t cells = cfg.p_db.size();
  std::vector<int> code(cells, 0);
  std::vector<std::string> notes(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells) return;
      const double db = cfg.p_db[i];
      try {
        RegionBoundary b = run_cell(ch, db_to_linear(db), cfg);
        b.seed = seed;
        b.p_db = db;
        write_cell_outputs(b, cfg, &code[i], &notes[i]);
      } catch (const std::exception& e) {
        code[i] = 1;
        notes[i] = "fatal cell: method=" + cfg.method +
                   " seed=" + std::to_string(seed) + " P_dB=" + fmt_db(db) +
                   ": " + e.what() + "\n";
      }
    }
  };

  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap <= 0) cap = 1;
  if (const char* env = std::getenv("SRR_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) cap = static_cast<int>(std::min<long>(v, 256));
  }
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(cap), cells);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  int worst = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    if (!notes[i].empty()) std::fputs(notes[i].c_str(), stderr);
    if (code[i] == 1)
      worst = 1;
    else if (code[i] == 2 && worst != 1)
      worst = 2;
  }
  return worst;
}

}  // namespace srr
