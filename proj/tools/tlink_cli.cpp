// Link-level MIMO-OFDM simulator front end.
//
//   tlink simulate --config cfg.txt [--trials N] [--seed S] [--receivers ...]
//                  [--ebn0 4:4:24] [--out results.csv] [--workers W]
//   tlink selftest
//   tlink flops --receiver zf --mt 2 --mr 2 --k 8

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "tlink/sim.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void handle_sigint(int) { g_interrupted.store(true); }

std::vector<double> parse_ebn0(const std::string& text) {
  // "start:step:stop" (inclusive) or a comma list
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double start = 0, step = 0, stop = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' ||
        step <= 0)
      throw CLI::ValidationError("--ebn0", "expected start:step:stop");
    for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
  } else {
    std::istringstream is(text);
    std::string part;
    while (std::getline(is, part, ',')) grid.push_back(std::stod(part));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor MIMO-OFDM link simulator"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo SER sweep");
  std::string config_path, out_path = "results.csv", receivers_arg, ebn0_arg;
  int trials = -1;
  long long seed = -1;
  int workers = 1;
  sim->add_option("--config", config_path, "config file (key = value lines)")
      ->required();
  sim->add_option("--trials", trials, "override trial count");
  sim->add_option("--seed", seed, "override master seed");
  sim->add_option("--receivers", receivers_arg,
                  "comma list: zf,ilsp,rlsp,kr,kr_ls,rc_kr,rc_kr_als");
  sim->add_option("--ebn0", ebn0_arg, "grid as start:step:stop or comma list");
  sim->add_option("--out", out_path, "output CSV path");
  sim->add_option("--workers", workers, "worker threads (0 = hardware)");

  // selftest
  auto* self = app.add_subcommand("selftest", "run the invariant suite");

  // flops
  auto* flops = app.add_subcommand("flops", "per-subcarrier operation counts");
  std::string flops_receiver = "zf";
  double fm_t = 2, fm_r = 2, fk = 8;
  flops->add_option("--receiver", flops_receiver, "zf, ilsp or rlsp")->required();
  flops->add_option("--mt", fm_t, "transmit antennas");
  flops->add_option("--mr", fm_r, "receive antennas");
  flops->add_option("--k", fk, "frames");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      tlink::SimConfig cfg = tlink::load_config(config_path);
      if (trials >= 0) cfg.trials = trials;
      if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
      if (!receivers_arg.empty()) {
        cfg.receivers.clear();
        std::istringstream is(receivers_arg);
        std::string part;
        while (std::getline(is, part, ','))
          cfg.receivers.push_back(tlink::receiver_from_name(part));
      }
      if (!ebn0_arg.empty()) cfg.ebn0_grid_db = parse_ebn0(ebn0_arg);
      cfg.validate();
      if (workers == 0)
        workers = static_cast<int>(std::thread::hardware_concurrency());

      std::signal(SIGINT, handle_sigint);
      const auto curves = tlink::run_sweep(cfg, workers, &g_interrupted);
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write " + out_path);
      tlink::write_csv(out, curves);
      if (g_interrupted.load())
        std::cerr << "interrupted; partial results ("
                  << (curves.empty() ? 0 : curves.front().trials)
                  << " trials) written to " << out_path << "\n";
      else
        std::cout << "wrote " << out_path << "\n";
      return 0;
    }

    if (self->parsed()) {
      const auto checks = tlink::run_selftest();
      bool all = true;
      for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name;
        if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
        std::cout << "\n";
        all = all && c.pass;
      }
      std::cout << (all ? "selftest passed" : "selftest FAILED") << "\n";
      return all ? 0 : 1;
    }

    if (flops->parsed()) {
      const auto kind = tlink::receiver_from_name(flops_receiver);
      const double ops = tlink::flop_estimate(kind, fm_t, fm_r, fk);
      std::cout << flops_receiver << " m_t=" << fm_t << " m_r=" << fm_r
                << " k=" << fk << ": " << ops
                << " operations per subcarrier";
      if (kind != tlink::ReceiverKind::Zf) std::cout << " and iteration";
      std::cout << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
