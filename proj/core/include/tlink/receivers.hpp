#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tlink/channel.hpp"
#include "tlink/coding.hpp"
#include "tlink/constellation.hpp"
#include "tlink/frame.hpp"
#include "tlink/tensor.hpp"

namespace tlink {

/// Iteration limits shared by the iterative receivers. max_iterations bounds
/// the ILSP sweeps (default 7) and the ALS sweeps use als_max_iterations
/// (default 5); min_err is the ILSP channel-update difference threshold and
/// min_cost the relative reconstruction error floor of the ALS.
struct StopRule {
  int max_iterations = 7;
  int als_max_iterations = 5;
  double min_err = 1e-6;
  double min_cost = 1e-15;
};

struct ReceiverOutput {
  /// Estimated symbol grid in the frame-grid layout (K x N*M_T, subcarrier-
  /// fastest columns). Projecting receivers return alphabet points on data
  /// positions and the known values on pilot/null positions.
  Mat s_hat;
  std::optional<FreqChannelViews> h_hat;
  /// Random-coding matrix estimate (Q x M_T*N) where applicable.
  std::optional<Mat> c_hat;
  int iterations_used = 0;
  bool converged = true;
  /// ALS relative cost right before and right after each least-squares
  /// update, three pairs per sweep; each update can only lower the cost.
  std::vector<double> ls_cost_before;
  std::vector<double> ls_cost_after;
};

/// Per-subcarrier pseudo-inverse of the pilot channel estimate applied to the
/// received slices. No projection; scoring projects.
ReceiverOutput zf_receiver(const DenseTensor& y, const FreqChannelViews& h_p);

/// Iterative least squares with projection: alternates symbol LS, alphabet
/// projection and a conditional channel update gated on the projected symbol
/// matrix having full row rank. Known pilot/null cells are held at their
/// known values through the projection.
ReceiverOutput ilsp(const DenseTensor& y, const FreqChannelViews& h_p,
                    const StopRule& stop, const Constellation& c,
                    const FrameGrid& grid);

/// Recursive least squares with projection: one LS+projection pass, then a
/// rank-one inverse-correlation channel recursion over the frames with
/// forgetting factor alpha, and a final re-estimate from the updated channel.
ReceiverOutput rlsp(const DenseTensor& y, const FreqChannelViews& h_p,
                    double alpha, const Constellation& c,
                    const FrameGrid& grid);

/// Khatri-Rao receiver: despreads with the known code, factors the result
/// with the least-squares Khatri-Rao factorization and resolves the column
/// scale ambiguity against the pilot channel estimate.
ReceiverOutput kr_receiver(const DenseTensor& y, const FreqChannelViews& h_p,
                           const Mat& c_bar);

/// Khatri-Rao receiver plus one least-squares enhancement: the projected
/// symbols give an improved channel estimate, which re-resolves the scaling.
ReceiverOutput kr_ls_receiver(const DenseTensor& y, const FreqChannelViews& h_p,
                              const Mat& c_bar, const Constellation& c,
                              const FrameGrid& grid);

/// Random-coding Khatri-Rao receiver: strips the channel with the pilot
/// estimate, factors code/symbol matrices and anchors the scale on the
/// all-ones first code row.
ReceiverOutput rc_kr_receiver(const DenseTensor& y, const FreqChannelViews& h_p);

/// Random-coding receiver refined by alternating least squares over channel,
/// code and symbol matrices with alphabet projections; the channel update is
/// gated on the full rank of the code/symbol Khatri-Rao chain.
ReceiverOutput rc_kr_als_receiver(const DenseTensor& y,
                                  const FreqChannelViews& h_p,
                                  const StopRule& stop, const Constellation& c,
                                  const FrameGrid& grid);

enum class ReceiverKind { Zf, Ilsp, Rlsp, Kr, KrLs, RcKr, RcKrAls };

std::string receiver_name(ReceiverKind r);
ReceiverKind receiver_from_name(const std::string& name);

/// Closed-form operation counts per subcarrier (ZF) or per subcarrier and
/// iteration (ILSP, RLSP). Only those three receivers have a cost model.
double flop_estimate(ReceiverKind r, double m_t, double m_r, double k);

}  // namespace tlink
