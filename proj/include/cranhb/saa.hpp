// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "cranhb/channel.hpp"
#include "cranhb/optimizer.hpp"
#include "cranhb/rng.hpp"
#include "cranhb/types.hpp"

namespace cranhb::saa {

struct SaaConfig {
  int sample_count = 10;  // T
  optimizer::BcdConfig bcd;
};

struct SaaDesign {
  std::vector<Mat> rf;  // unit-modulus RF matrices
  optimizer::OptimizationTrace trace;
};

/// RF design from long-term statistics for the WSR objective: T channel
/// samples are drawn from `rng.child("saa-samples")` and frozen, the RF
/// phases are initialized from `rng.child("rf-init")`, and the sample
/// average of the per-sample surrogates is alternated against per-sample
/// digital designs. With T = 1 this is exactly the perfect-CSI WSR design
/// run on the drawn sample.
SaaDesign design_rf_saa_wsr(const CovarianceSet& cov, const SystemConfig& cfg,
                            const SaaConfig& saa, const Rng& rng);

/// RF design for the network-EE objective: per-sample ratios enter through
/// the auxiliary alpha_t (one per sample) whose log bound is refreshed at
/// beta_t = alpha_t, alongside rho_t = P_T on each surrogate refresh.
SaaDesign design_rf_saa_ee(const CovarianceSet& cov, const SystemConfig& cfg,
                           const SaaConfig& saa, const Rng& rng);

/// Internal entry points that take an explicit frozen sample list; the
/// public designs draw the samples and delegate here. Accumulations run in
/// sample-index order, so permuting the list changes results only by
/// floating-point roundoff.
SaaDesign design_rf_from_samples(const std::vector<ChannelRealization>& samples,
                                 const SystemConfig& cfg, const SaaConfig& saa,
                                 optimizer::ObjectiveKind kind, const Rng& rng);

/// Digital design against an estimated effective channel with the
/// estimation error folded into the rates as extra Gaussian noise.
std::pair<HybridSolution, optimizer::OptimizationTrace> design_digital_imperfect(
    const ChannelEstimate& est, const std::vector<Mat>& rf,
    const SystemConfig& cfg, const optimizer::BcdConfig& bcd);

struct GenieReport {
  std::vector<double> ue_rates;  // realized rates on the true channel
  double sum_rate = 0.0;         // weighted by cfg.weights
  double total_power = 0.0;
  double ee = 0.0;
};

/// Realized performance of a solution on the true channel.
GenieReport evaluate_genie(const ChannelRealization& ch,
                           const HybridSolution& sol, const SystemConfig& cfg);

}  // namespace cranhb::saa
