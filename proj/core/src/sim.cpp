#include "tlink/sim.hpp"

#include <cstdio>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "tlink/coding.hpp"
#include "tlink/ofdm.hpp"
#include "tlink/rng.hpp"

namespace tlink {

namespace {

bool is_rc(ReceiverKind r) {
  return r == ReceiverKind::RcKr || r == ReceiverKind::RcKrAls;
}

// Received q=1 spreading block as an (N, M_R, K) observation; the first
// random-coding row is all ones, so this block carries the plain symbols.
DenseTensor first_block(const DenseTensor& y4) {
  const Index n = y4.extent(1), m_r = y4.extent(2), k = y4.extent(3);
  DenseTensor out({n, m_r, k});
  for (Index f = 0; f < k; ++f)
    for (Index rx = 0; rx < m_r; ++rx)
      for (Index sc = 0; sc < n; ++sc) out(sc, rx, f) = y4(sc, rx, f, Index{0});
  return out;
}

// Despread (N, M_R, K) observation for pilot estimation under Khatri-Rao
// coding; only pilot subcarriers are filled, the estimator reads nothing else.
DenseTensor despread_observation(const DenseTensor& y4, const Mat& c_bar,
                                 const FrameGrid& grid) {
  const Index n = y4.extent(1), m_r = y4.extent(2), k = y4.extent(3),
              q = y4.extent(4);
  const Index m_t = grid.m_t;
  DenseTensor out({n, m_r, k});
  for (Index tx = 0; tx < m_t; ++tx)
    for (Index sc : grid.pilot_subcarriers(tx)) {
      const Vec code_col = c_bar.col(tx + m_t * sc);
      for (Index rx = 0; rx < m_r; ++rx)
        for (Index f = 0; f < k; ++f) {
          cxd acc = 0.0;
          for (Index b = 0; b < q; ++b)
            acc += std::conj(code_col(b)) * y4(sc, rx, f, b);
          out(sc, rx, f) = acc / static_cast<double>(m_t);
        }
    }
  return out;
}

struct Scorer {
  const SimConfig& cfg;
  const Constellation& c;
  const FrameGrid& grid;

  SerPoint score_grid(const Mat& s_hat) const {
    SerPoint p;
    for (Index col = 0; col < grid.symbols.cols(); ++col)
      for (Index f = 0; f < grid.k; ++f)
        if (grid.kind(f, col) == CellKind::Data) {
          ++p.symbols;
          if (c.nearest(s_hat(f, col)) != c.nearest(grid.symbols(f, col)))
            ++p.errors;
        }
    return p;
  }

  SerPoint score_code(const Mat& c_hat, const Mat& c_truth) const {
    SerPoint p;
    for (Index col = 0; col < c_truth.cols(); ++col)
      for (Index row = 1; row < c_truth.rows(); ++row) {
        ++p.symbols;
        if (c.nearest(c_hat(row, col)) != c.nearest(c_truth(row, col)))
          ++p.errors;
      }
    return p;
  }
};

}  // namespace

std::vector<std::string> stream_names(const SimConfig& cfg) {
  std::vector<std::string> names;
  for (ReceiverKind r : cfg.receivers) {
    names.push_back(receiver_name(r));
    if (is_rc(r)) {
      names.push_back(receiver_name(r) + "_s");
      names.push_back(receiver_name(r) + "_c");
    }
  }
  return names;
}

TrialResult run_trial(const SimConfig& cfg, std::uint64_t trial_index) {
  cfg.validate();
  const Constellation c = cfg.constellation();
  const PowerDelayProfile pdp = cfg.profile();

  RngStream ch_rng = make_stream(cfg.seed, "channel", trial_index);
  RngStream grid_rng = make_stream(cfg.seed, "grid", trial_index);

  const ChannelRealization ch = draw_channel(ch_rng, pdp, cfg.m_r, cfg.m_t, cfg.n);
  const FrameGrid grid =
      build_grid(grid_rng, cfg.n, cfg.m_t, cfg.k, {cfg.delta_f, cfg.delta_k}, c);

  DenseTensor x;
  Mat c_bar;
  if (cfg.mode == TxMode::Uncoded) {
    x = signal_tensor(grid);
  } else if (cfg.mode == TxMode::Kr) {
    CodedSignal cs = kr_encode(grid, cfg.q);
    x = std::move(cs.x);
    c_bar = std::move(cs.c_bar);
  } else {
    RngStream code_rng = make_stream(cfg.seed, "coding", trial_index);
    CodedSignal cs = rc_encode(code_rng, grid, cfg.q, c);
    x = std::move(cs.x);
    c_bar = std::move(cs.c_bar);
  }

  const DenseTensor tx_time = ofdm_transmit(x, cfg.cp_len);
  const DenseTensor rx_clean = apply_channel(tx_time, ch, cfg.cp_len);

  const auto names = stream_names(cfg);
  TrialResult result;
  result.counts.assign(names.size(),
                       std::vector<SerPoint>(cfg.ebn0_grid_db.size()));

  const Scorer scorer{cfg, c, grid};
  const StopRule stop;

  for (size_t pt = 0; pt < cfg.ebn0_grid_db.size(); ++pt) {
    const double ebn0 = cfg.ebn0_grid_db[pt];
    RngStream noise_rng =
        RngStream(derive_stream(derive_stream(cfg.seed, "noise", trial_index),
                                "point", pt));
    const DenseTensor rx = add_awgn(noise_rng, rx_clean, cfg.sigma2(ebn0));
    const DenseTensor y = ofdm_receive(rx, cfg.cp_len, cfg.n);

    FreqChannelViews h_p;
    if (cfg.mode == TxMode::Uncoded)
      h_p = pilot_channel_estimate(y, grid, pdp.tap_span());
    else if (cfg.mode == TxMode::Rc)
      h_p = pilot_channel_estimate(first_block(y), grid, pdp.tap_span());
    else
      h_p = pilot_channel_estimate(despread_observation(y, c_bar, grid), grid,
                                   pdp.tap_span());

    size_t stream = 0;
    for (ReceiverKind r : cfg.receivers) {
      ReceiverOutput ro;
      switch (r) {
        case ReceiverKind::Zf: ro = zf_receiver(y, h_p); break;
        case ReceiverKind::Ilsp: ro = ilsp(y, h_p, stop, c, grid); break;
        case ReceiverKind::Rlsp: ro = rlsp(y, h_p, 1.0, c, grid); break;
        case ReceiverKind::Kr: ro = kr_receiver(y, h_p, c_bar); break;
        case ReceiverKind::KrLs: ro = kr_ls_receiver(y, h_p, c_bar, c, grid); break;
        case ReceiverKind::RcKr: ro = rc_kr_receiver(y, h_p); break;
        case ReceiverKind::RcKrAls:
          ro = rc_kr_als_receiver(y, h_p, stop, c, grid);
          break;
      }
      const SerPoint s_part = scorer.score_grid(ro.s_hat);
      if (is_rc(r)) {
        const SerPoint c_part = scorer.score_code(*ro.c_hat, c_bar);
        auto& combined = result.counts[stream][pt];
        combined.errors += s_part.errors + c_part.errors;
        combined.symbols += s_part.symbols + c_part.symbols;
        auto& s_stream = result.counts[stream + 1][pt];
        s_stream.errors += s_part.errors;
        s_stream.symbols += s_part.symbols;
        auto& c_stream = result.counts[stream + 2][pt];
        c_stream.errors += c_part.errors;
        c_stream.symbols += c_part.symbols;
        stream += 3;
      } else {
        auto& combined = result.counts[stream][pt];
        combined.errors += s_part.errors;
        combined.symbols += s_part.symbols;
        stream += 1;
      }
    }
  }
  return result;
}

std::vector<SerCurve> run_sweep(const SimConfig& cfg, int workers,
                                const std::atomic<bool>* stop_flag) {
  cfg.validate();
  if (workers < 1) workers = 1;
  const auto names = stream_names(cfg);
  std::vector<std::vector<SerPoint>> totals(
      names.size(), std::vector<SerPoint>(cfg.ebn0_grid_db.size()));
  std::atomic<std::uint64_t> next{0};
  std::atomic<long long> completed{0};
  std::mutex merge_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    std::vector<std::vector<SerPoint>> local(
        names.size(), std::vector<SerPoint>(cfg.ebn0_grid_db.size()));
    long long done = 0;
    try {
      for (;;) {
        const std::uint64_t t = next.fetch_add(1);
        if (t >= static_cast<std::uint64_t>(cfg.trials)) break;
        if (stop_flag && stop_flag->load()) break;
        const TrialResult tr = run_trial(cfg, t);
        for (size_t s = 0; s < local.size(); ++s)
          for (size_t p = 0; p < local[s].size(); ++p) {
            local[s][p].errors += tr.counts[s][p].errors;
            local[s][p].symbols += tr.counts[s][p].symbols;
          }
        ++done;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(merge_mutex);
      if (!first_error) first_error = std::current_exception();
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    for (size_t s = 0; s < totals.size(); ++s)
      for (size_t p = 0; p < totals[s].size(); ++p) {
        totals[s][p].errors += local[s][p].errors;
        totals[s][p].symbols += local[s][p].symbols;
      }
    completed += done;
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<SerCurve> curves(names.size());
  for (size_t s = 0; s < names.size(); ++s) {
    curves[s].receiver = names[s];
    curves[s].trials = static_cast<int>(completed.load());
    curves[s].seed = cfg.seed;
    curves[s].config_digest = cfg.digest();
    curves[s].points.resize(cfg.ebn0_grid_db.size());
    for (size_t p = 0; p < cfg.ebn0_grid_db.size(); ++p) {
      curves[s].points[p].ebn0_db = cfg.ebn0_grid_db[p];
      curves[s].points[p].errors = totals[s][p].errors;
      curves[s].points[p].symbols = totals[s][p].symbols;
    }
  }
  return curves;
}

void write_csv(std::ostream& os, const std::vector<SerCurve>& curves) {
  os << "receiver,ebn0_db,trials,symbols,errors,ser,stderr\n";
  char buf[160];
  for (const auto& curve : curves)
    for (const auto& p : curve.points) {
      std::snprintf(buf, sizeof(buf), "%s,%.10g,%d,%lld,%lld,%.10g,%.10g\n",
                    curve.receiver.c_str(), p.ebn0_db, curve.trials, p.symbols,
                    p.errors, p.ser(), p.std_error());
      os << buf;
    }
}

}  // namespace tlink
