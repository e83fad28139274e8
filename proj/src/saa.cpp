// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include "cranhb/saa.hpp"

#include "cranhb/metrics.hpp"

namespace cranhb::saa {

namespace {

std::vector<ChannelRealization> draw_samples(const CovarianceSet& cov, int count,
                                             Rng rng) {
  std::vector<ChannelRealization> samples;
  samples.reserve(count);
  for (int t = 0; t < count; ++t) {
    Rng sample_rng = rng.child(static_cast<std::uint64_t>(t));
    samples.push_back(channel::sample_channel(cov, sample_rng));
  }
  return samples;
}

}  // namespace

SaaDesign design_rf_from_samples(const std::vector<ChannelRealization>& samples,
                                 const SystemConfig& cfg, const SaaConfig& saa,
                                 optimizer::ObjectiveKind kind, const Rng& rng) {
  optimizer::BcdConfig bcd = saa.bcd;
  bcd.objective = kind;
  std::vector<optimizer::DigitalDesignInput> inputs(samples.size());
  for (size_t t = 0; t < samples.size(); ++t) {
    inputs[t].h_stacked.resize(cfg.num_ue);
    for (int k = 0; k < cfg.num_ue; ++k) {
      inputs[t].h_stacked[k] = samples[t].stacked(k);
    }
  }
  Rng init = rng.child("rf-init");
  const std::vector<Mat> rf0 = optimizer::random_phase_rf(cfg, init);
  optimizer::AlternationResult res =
      optimizer::run_alternation(inputs, rf0, cfg, bcd, true);
  return {res.rf, res.trace};
}

SaaDesign design_rf_saa_wsr(const CovarianceSet& cov, const SystemConfig& cfg,
                            const SaaConfig& saa, const Rng& rng) {
  const auto samples =
      draw_samples(cov, saa.sample_count, rng.child("saa-samples"));
  return design_rf_from_samples(samples, cfg, saa, optimizer::ObjectiveKind::Wsr,
                                rng);
}

SaaDesign design_rf_saa_ee(const CovarianceSet& cov, const SystemConfig& cfg,
                           const SaaConfig& saa, const Rng& rng) {
  const auto samples =
      draw_samples(cov, saa.sample_count, rng.child("saa-samples"));
  return design_rf_from_samples(samples, cfg, saa, optimizer::ObjectiveKind::Ee,
                                rng);
}

std::pair<HybridSolution, optimizer::OptimizationTrace> design_digital_imperfect(
    const ChannelEstimate& est, const std::vector<Mat>& rf,
    const SystemConfig& cfg, const optimizer::BcdConfig& bcd) {
  optimizer::DigitalDesignInput input;
  input.h_stacked.resize(cfg.num_ue);
  input.err_cov.resize(cfg.num_ue);
  for (int k = 0; k < cfg.num_ue; ++k) {
    input.h_stacked[k] = est.stacked(k);
    input.err_cov[k] = est.err_cov[k];
  }
  auto [vars, trace] = optimizer::algorithm1(input, rf, cfg, bcd);
  HybridSolution sol;
  sol.rf = rf;
  sol.digital = vars.digital;
  sol.omega = vars.omega;
  return {sol, trace};
}

GenieReport evaluate_genie(const ChannelRealization& ch,
                           const HybridSolution& sol, const SystemConfig& cfg) {
  GenieReport rep;
  rep.ue_rates.resize(cfg.num_ue);
  for (int k = 0; k < cfg.num_ue; ++k) {
    rep.ue_rates[k] = metrics::user_rate(ch.stacked(k), sol, k, cfg.dl_noise_var);
    rep.sum_rate += cfg.weights[k] * rep.ue_rates[k];
  }
  rep.total_power = metrics::total_power(sol, cfg);
  rep.ee = rep.sum_rate / rep.total_power;
  return rep;
}

}  // namespace cranhb::saa
