// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include "cranhb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cranhb/channel.hpp"
#include "cranhb/metrics.hpp"

namespace cranhb::harness {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> read_per_entry(const json& j, const char* key, int count,
                                   double fallback, bool required) {
  if (!j.contains(key)) {
    if (required) throw std::invalid_argument(std::string("config: missing ") + key);
    return std::vector<double>(count, fallback);
  }
  const auto& v = j.at(key);
  if (v.is_number()) return std::vector<double>(count, v.get<double>());
  std::vector<double> out = v.get<std::vector<double>>();
  if (static_cast<int>(out.size()) != count) {
    throw std::invalid_argument(std::string("config: ") + key +
                                " must be scalar or have one entry per element");
  }
  return out;
}

std::uint64_t value_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ProposedWsr: return "proposed-WSR";
    case Scheme::ProposedEe: return "proposed-EE";
    case Scheme::FullyDigital: return "fully-digital";
    case Scheme::ReducedRank: return "reduced-rank";
    case Scheme::RandomRf: return "random-RF";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "proposed-WSR") return Scheme::ProposedWsr;
  if (name == "proposed-EE") return Scheme::ProposedEe;
  if (name == "fully-digital") return Scheme::FullyDigital;
  if (name == "reduced-rank") return Scheme::ReducedRank;
  if (name == "random-RF") return Scheme::RandomRf;
  throw std::invalid_argument("unknown scheme: " + name);
}

std::string sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::Snr: return "SNR";
    case SweepVariable::RfChains: return "N";
    case SweepVariable::Fronthaul: return "C";
    case SweepVariable::Antennas: return "M";
  }
  return "?";
}

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "SNR") return SweepVariable::Snr;
  if (name == "N") return SweepVariable::RfChains;
  if (name == "C") return SweepVariable::Fronthaul;
  if (name == "M") return SweepVariable::Antennas;
  throw std::invalid_argument("unknown sweep variable: " + name);
}

void ExperimentConfig::validate() const {
  if (sweep_values.empty()) throw std::invalid_argument("config: empty sweep");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (schemes.empty()) throw std::invalid_argument("config: no schemes");
  if (saa_samples < 1) throw std::invalid_argument("config: saa_samples must be >= 1");
  base.validate();
  for (double v : sweep_values) config_at(v).validate();
}

SystemConfig ExperimentConfig::config_at(double sweep_value) const {
  SystemConfig cfg = base;
  switch (sweep_variable) {
    case SweepVariable::Snr: {
      const double p = cfg.dl_noise_var * std::pow(10.0, sweep_value / 10.0);
      cfg.tx_power_limit.assign(cfg.num_rrh, p);
      break;
    }
    case SweepVariable::RfChains:
      cfg.rf_chains = static_cast<int>(sweep_value);
      break;
    case SweepVariable::Fronthaul:
      cfg.fronthaul_capacity.assign(cfg.num_rrh, sweep_value);
      break;
    case SweepVariable::Antennas:
      cfg.antennas_per_rrh = static_cast<int>(sweep_value);
      break;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.sweep_variable = parse_sweep_variable(j.at("sweep_variable").get<std::string>());
    cfg.sweep_values = j.at("sweep_values").get<std::vector<double>>();
    cfg.trials = j.value("trials", 20);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.saa_samples = j.value("saa_samples", 10);
    cfg.threads = j.value("threads", 1);
    const std::string csi = j.value("csi_mode", std::string("perfect"));
    if (csi == "perfect") {
      cfg.csi_mode = CsiMode::Perfect;
    } else if (csi == "imperfect") {
      cfg.csi_mode = CsiMode::Imperfect;
    } else {
      throw std::invalid_argument("config: csi_mode must be perfect|imperfect");
    }
    for (const auto& s : j.at("schemes")) cfg.schemes.push_back(parse_scheme(s));

    const json& b = j.at("base");
    SystemConfig& sc = cfg.base;
    sc.num_rrh = b.at("num_rrh").get<int>();
    sc.num_ue = b.at("num_ue").get<int>();
    sc.antennas_per_rrh = b.at("antennas_per_rrh").get<int>();
    sc.rf_chains = b.at("rf_chains").get<int>();
    sc.fronthaul_capacity = read_per_entry(b, "fronthaul_capacity", sc.num_rrh, 0, true);
    sc.tx_power_limit = read_per_entry(b, "tx_power_limit", sc.num_rrh, 0, true);
    sc.dl_noise_var = b.value("dl_noise_var", 1.0);
    sc.ul_noise_var = b.value("ul_noise_var", 1.0);
    sc.pilot_length = b.value("pilot_length", sc.num_ue);
    sc.ul_tx_power = read_per_entry(b, "ul_tx_power", sc.num_ue, 1.0, false);
    sc.circuit_power_per_rf = b.value("circuit_power_per_rf", 1.0);
    sc.circuit_power_per_ue = b.value("circuit_power_per_ue", 1.0);
    sc.weights = read_per_entry(b, "weights", sc.num_ue, 1.0, false);

    if (j.contains("bcd")) {
      const json& bc = j.at("bcd");
      cfg.bcd.outer_max_iters = bc.value("outer_max_iters", cfg.bcd.outer_max_iters);
      cfg.bcd.inner_max_iters = bc.value("inner_max_iters", cfg.bcd.inner_max_iters);
      cfg.bcd.rel_tol = bc.value("rel_tol", cfg.bcd.rel_tol);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

TrialOutcome run_trial(const ExperimentConfig& cfg, Scheme scheme,
                       double sweep_value, int trial) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialOutcome out;
  out.record.scheme = scheme;
  out.record.sweep_var = cfg.sweep_variable;
  out.record.sweep_value = sweep_value;
  out.record.trial = trial;

  SystemConfig sys = cfg.config_at(sweep_value);
  out.cfg_used = sys;

  // Channel streams depend on (seed, point, trial) only, so every scheme
  // sees the same channel draw (paired comparisons); scheme streams add the
  // scheme name.
  const Rng root(cfg.seed);
  const Rng point_rng = root.child("point").child(value_bits(sweep_value));
  const Rng trial_rng = point_rng.child("trial").child(static_cast<std::uint64_t>(trial));
  out.record.seed = trial_rng.stream_id();
  const Rng scheme_rng = trial_rng.child(scheme_name(scheme));

  optimizer::BcdConfig bcd = cfg.bcd;
  bcd.capture_trace = false;

  try {
    Rng cov_rng = trial_rng.child("covariance");
    const CovarianceSet cov = channel::draw_covariance_set(sys, cov_rng);
    Rng ch_rng = trial_rng.child("channel");
    const ChannelRealization ch = channel::sample_channel(cov, ch_rng);

    HybridSolution sol;
    int iters = 0;
    bool require_modulus = true;

    const bool fully_digital = scheme == Scheme::FullyDigital;
    SystemConfig design_cfg = sys;
    if (fully_digital) {
      design_cfg.rf_chains = design_cfg.antennas_per_rrh;
      require_modulus = false;
    }
    if (scheme == Scheme::ReducedRank) require_modulus = false;

    if (cfg.csi_mode == CsiMode::Perfect) {
      switch (scheme) {
        case Scheme::ProposedWsr: {
          Rng r = scheme_rng;
          auto [s, tr] = optimizer::optimize_wsr_perfect(ch, sys, bcd, r);
          sol = s;
          iters = tr.outer_iters;
          break;
        }
        case Scheme::ProposedEe: {
          Rng r = scheme_rng;
          auto [s, tr] = optimizer::optimize_ee_perfect(ch, sys, bcd, r);
          sol = s;
          iters = tr.outer_iters;
          break;
        }
        case Scheme::FullyDigital: {
          std::vector<Mat> rf(design_cfg.num_rrh,
                              Mat::Identity(design_cfg.antennas_per_rrh,
                                            design_cfg.antennas_per_rrh));
          optimizer::DigitalDesignInput input;
          input.h_stacked.resize(design_cfg.num_ue);
          for (int k = 0; k < design_cfg.num_ue; ++k) {
            input.h_stacked[k] = ch.stacked(k);
          }
          auto [vars, tr] = optimizer::algorithm1(input, rf, design_cfg, bcd);
          sol.rf = rf;
          sol.digital = vars.digital;
          sol.omega = vars.omega;
          iters = tr.outer_iters;
          break;
        }
        case Scheme::ReducedRank: {
          optimizer::DigitalDesignInput input;
          input.h_stacked.resize(sys.num_ue);
          for (int k = 0; k < sys.num_ue; ++k) input.h_stacked[k] = ch.stacked(k);
          Rng init = scheme_rng.child("rf-init");
          const std::vector<Mat> rf0 = optimizer::random_phase_rf(sys, init);
          auto res = optimizer::run_alternation({input}, rf0, sys, bcd, false);
          sol.rf = res.rf;
          sol.digital = res.digitals[0].digital;
          sol.omega = res.digitals[0].omega;
          iters = res.trace.outer_iters;
          break;
        }
        case Scheme::RandomRf: {
          Rng phase_rng = scheme_rng.child("rf-phases");
          const std::vector<Mat> rf = optimizer::random_phase_rf(sys, phase_rng);
          optimizer::DigitalDesignInput input;
          input.h_stacked.resize(sys.num_ue);
          for (int k = 0; k < sys.num_ue; ++k) input.h_stacked[k] = ch.stacked(k);
          auto [vars, tr] = optimizer::algorithm1(input, rf, sys, bcd);
          sol.rf = rf;
          sol.digital = vars.digital;
          sol.omega = vars.omega;
          iters = tr.outer_iters;
          break;
        }
      }
    } else {
      // Imperfect CSI: RF from long-term statistics, digital from the
      // estimated effective channel, metrics from the genie evaluation.
      std::vector<Mat> rf;
      saa::SaaConfig saa_cfg;
      saa_cfg.sample_count = cfg.saa_samples;
      saa_cfg.bcd = bcd;
      switch (scheme) {
        case Scheme::ProposedWsr: {
          auto design = saa::design_rf_saa_wsr(cov, sys, saa_cfg, scheme_rng);
          rf = design.rf;
          iters = design.trace.outer_iters;
          break;
        }
        case Scheme::ProposedEe: {
          auto design = saa::design_rf_saa_ee(cov, sys, saa_cfg, scheme_rng);
          rf = design.rf;
          iters = design.trace.outer_iters;
          break;
        }
        case Scheme::FullyDigital:
          rf.assign(design_cfg.num_rrh,
                    Mat::Identity(design_cfg.antennas_per_rrh,
                                  design_cfg.antennas_per_rrh));
          break;
        case Scheme::ReducedRank: {
          auto samples = [&] {
            std::vector<ChannelRealization> s;
            Rng sample_rng = scheme_rng.child("saa-samples");
            for (int t = 0; t < saa_cfg.sample_count; ++t) {
              Rng r = sample_rng.child(static_cast<std::uint64_t>(t));
              s.push_back(channel::sample_channel(cov, r));
            }
            return s;
          }();
          std::vector<optimizer::DigitalDesignInput> inputs(samples.size());
          for (size_t t = 0; t < samples.size(); ++t) {
            inputs[t].h_stacked.resize(sys.num_ue);
            for (int k = 0; k < sys.num_ue; ++k) {
              inputs[t].h_stacked[k] = samples[t].stacked(k);
            }
          }
          Rng init = scheme_rng.child("rf-init");
          const auto rf0 = optimizer::random_phase_rf(sys, init);
          optimizer::BcdConfig b2 = bcd;
          b2.objective = optimizer::ObjectiveKind::Wsr;
          auto res = optimizer::run_alternation(inputs, rf0, sys, b2, false);
          rf = res.rf;
          iters = res.trace.outer_iters;
          break;
        }
        case Scheme::RandomRf: {
          Rng phase_rng = scheme_rng.child("rf-phases");
          rf = optimizer::random_phase_rf(sys, phase_rng);
          break;
        }
      }

      Rng train_rng = trial_rng.child("pilot-noise");
      const auto rx = channel::uplink_train(ch, rf, design_cfg, train_rng);
      const auto est = channel::mmse_estimate(rx, rf, cov, design_cfg);

      optimizer::BcdConfig digital_bcd = bcd;
      digital_bcd.objective = (scheme == Scheme::ProposedEe)
                                  ? optimizer::ObjectiveKind::Ee
                                  : optimizer::ObjectiveKind::Wsr;
      auto [s, tr] = saa::design_digital_imperfect(est, rf, design_cfg, digital_bcd);
      sol = s;
      if (iters == 0) iters = tr.outer_iters;
    }

    // Realized metrics on the true channel.
    out.solution = sol;
    out.require_unit_modulus = require_modulus;
    out.record.ue_rates.resize(sys.num_ue);
    out.record.sum_rate = 0.0;
    for (int k = 0; k < sys.num_ue; ++k) {
      out.record.ue_rates[k] =
          metrics::user_rate(ch.stacked(k), sol, k, sys.dl_noise_var);
      out.record.sum_rate += sys.weights[k] * out.record.ue_rates[k];
    }
    out.record.rrh_powers.resize(sys.num_rrh);
    for (int i = 0; i < sys.num_rrh; ++i) {
      out.record.rrh_powers[i] =
          metrics::rrh_power(sol.rf[i], sol.digital, sol.omega[i], i);
    }
    out.record.total_power = metrics::total_power(sol, design_cfg);
    out.record.ee = out.record.sum_rate / out.record.total_power;
    out.record.iters = iters;
    out.record.status = "ok";
  } catch (const NumericalFailure& e) {
    out.record.status = "numerical-failure";
    out.record.ue_rates.assign(sys.num_ue, 0.0);
    out.record.rrh_powers.assign(sys.num_rrh, 0.0);
  } catch (const std::exception& e) {
    out.record.status = std::string("error: ") + e.what();
    out.record.ue_rates.assign(sys.num_ue, 0.0);
    out.record.rrh_powers.assign(sys.num_rrh, 0.0);
  }

  const auto t1 = std::chrono::steady_clock::now();
  out.record.wall_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return out;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Item {
    Scheme scheme;
    double value;
    int trial;
  };
  std::vector<Item> items;
  for (Scheme s : cfg.schemes) {
    for (double v : cfg.sweep_values) {
      for (int t = 0; t < cfg.trials; ++t) items.push_back({s, v, t});
    }
  }
  std::vector<ExperimentRecord> records(items.size());
  const int n_threads = std::max(1, cfg.threads);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t idx = next.fetch_add(1);
      if (idx >= items.size()) break;
      const Item& it = items[idx];
      records[idx] = run_trial(cfg, it.scheme, it.value, it.trial).record;
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::sort(records.begin(), records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              if (a.scheme != b.scheme) return a.scheme < b.scheme;
              if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
              return a.trial < b.trial;
            });
  return records;
}

std::vector<Aggregate> aggregate(const std::vector<ExperimentRecord>& records) {
  std::vector<Aggregate> out;
  auto stat = [](std::vector<double> xs, double* mean, double* se, double* med) {
    const int n = static_cast<int>(xs.size());
    double m = 0.0;
    for (double x : xs) m += x;
    m /= n;
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    var = (n > 1) ? var / (n - 1) : 0.0;
    std::sort(xs.begin(), xs.end());
    *mean = m;
    *se = std::sqrt(var / n);
    *med = (n % 2 == 1) ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  };
  for (size_t at = 0; at < records.size();) {
    const Scheme s = records[at].scheme;
    const double v = records[at].sweep_value;
    std::vector<double> rates, ees;
    size_t end = at;
    while (end < records.size() && records[end].scheme == s &&
           records[end].sweep_value == v) {
      if (records[end].status == "ok") {
        rates.push_back(records[end].sum_rate);
        ees.push_back(records[end].ee);
      }
      ++end;
    }
    if (!rates.empty()) {
      Aggregate a;
      a.scheme = s;
      a.sweep_value = v;
      a.trials = static_cast<int>(rates.size());
      stat(rates, &a.mean_sum_rate, &a.stderr_sum_rate, &a.median_sum_rate);
      stat(ees, &a.mean_ee, &a.stderr_ee, &a.median_ee);
      out.push_back(a);
    }
    at = end;
  }
  return out;
}

std::string csv_header(int num_ue, int num_rrh) {
  std::string h =
      "scheme,sweep_var,sweep_value,trial,seed,sum_rate_bpshz,"
      "ee_bpshz_per_watt,total_power,iters,status,wall_ms";
  for (int k = 0; k < num_ue; ++k) h += ",rate_ue_" + std::to_string(k);
  for (int i = 0; i < num_rrh; ++i) h += ",power_rrh_" + std::to_string(i);
  return h;
}

void write_csv(const std::vector<ExperimentRecord>& records, int num_ue,
               int num_rrh, std::ostream& out) {
  out << csv_header(num_ue, num_rrh) << "\n";
  for (const auto& r : records) {
    out << scheme_name(r.scheme) << ',' << sweep_variable_name(r.sweep_var)
        << ',' << fmt_double(r.sweep_value) << ',' << r.trial << ',' << r.seed
        << ',' << fmt_double(r.sum_rate) << ',' << fmt_double(r.ee) << ','
        << fmt_double(r.total_power) << ',' << r.iters << ',' << r.status
        << ',' << fmt_double(r.wall_ms);
    for (int k = 0; k < num_ue; ++k) {
      out << ',' << fmt_double(k < static_cast<int>(r.ue_rates.size())
                                   ? r.ue_rates[k] : 0.0);
    }
    for (int i = 0; i < num_rrh; ++i) {
      out << ',' << fmt_double(i < static_cast<int>(r.rrh_powers.size())
                                   ? r.rrh_powers[i] : 0.0);
    }
    out << "\n";
  }
}

void write_csv_file(const std::vector<ExperimentRecord>& records, int num_ue,
                    int num_rrh, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(records, num_ue, num_rrh, out);
}

std::vector<ExperimentRecord> load_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open records file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty records file");
  // Count the per-UE / per-RRH columns from the header.
  int num_ue = 0, num_rrh = 0;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (col.rfind("rate_ue_", 0) == 0) ++num_ue;
      if (col.rfind("power_rrh_", 0) == 0) ++num_rrh;
    }
  }
  std::vector<ExperimentRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != static_cast<size_t>(11 + num_ue + num_rrh)) {
      throw std::invalid_argument("records file: malformed row: " + line);
    }
    ExperimentRecord r;
    r.scheme = parse_scheme(cols[0]);
    r.sweep_var = parse_sweep_variable(cols[1]);
    r.sweep_value = std::stod(cols[2]);
    r.trial = std::stoi(cols[3]);
    r.seed = std::stoull(cols[4]);
    r.sum_rate = std::stod(cols[5]);
    r.ee = std::stod(cols[6]);
    r.total_power = std::stod(cols[7]);
    r.iters = std::stoi(cols[8]);
    r.status = cols[9];
    r.wall_ms = std::stod(cols[10]);
    for (int k = 0; k < num_ue; ++k) r.ue_rates.push_back(std::stod(cols[11 + k]));
    for (int i = 0; i < num_rrh; ++i) {
      r.rrh_powers.push_back(std::stod(cols[11 + num_ue + i]));
    }
    records.push_back(r);
  }
  return records;
}

void emit_plotdata(const std::vector<ExperimentRecord>& records,
                   const std::string& out_dir) {
  const auto aggs = aggregate(records);
  // Collect scheme and x-value axes in encounter order.
  std::vector<Scheme> schemes;
  std::vector<double> xs;
  for (const auto& a : aggs) {
    if (std::find(schemes.begin(), schemes.end(), a.scheme) == schemes.end()) {
      schemes.push_back(a.scheme);
    }
    if (std::find(xs.begin(), xs.end(), a.sweep_value) == xs.end()) {
      xs.push_back(a.sweep_value);
    }
  }
  std::sort(xs.begin(), xs.end());
  auto emit = [&](const std::string& path, auto mean_of, auto se_of) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "x";
    for (Scheme s : schemes) {
      out << ',' << scheme_name(s) << "_mean," << scheme_name(s) << "_stderr";
    }
    out << "\n";
    for (double x : xs) {
      out << fmt_double(x);
      for (Scheme s : schemes) {
        const Aggregate* found = nullptr;
        for (const auto& a : aggs) {
          if (a.scheme == s && a.sweep_value == x) {
            found = &a;
            break;
          }
        }
        if (found != nullptr) {
          out << ',' << fmt_double(mean_of(*found)) << ','
              << fmt_double(se_of(*found));
        } else {
          out << ",,";
        }
      }
      out << "\n";
    }
  };
  std::filesystem::create_directories(out_dir);
  emit(out_dir + "/plot_sum_rate.csv",
       [](const Aggregate& a) { return a.mean_sum_rate; },
       [](const Aggregate& a) { return a.stderr_sum_rate; });
  emit(out_dir + "/plot_ee.csv", [](const Aggregate& a) { return a.mean_ee; },
       [](const Aggregate& a) { return a.stderr_ee; });
}

std::string emit_outputs(const std::vector<ExperimentRecord>& records,
                         const ExperimentConfig& cfg,
                         const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/records.csv";
  write_csv_file(records, cfg.base.num_ue, cfg.base.num_rrh, path);
  emit_plotdata(records, out_dir);
  return path;
}

AuditResult audit_records(const std::vector<ExperimentRecord>& records,
                          const ExperimentConfig& cfg) {
  AuditResult res;
  for (const auto& r : records) {
    ++res.checked;
    if (r.status != "ok") {
      ++res.violations;
      res.messages.push_back(scheme_name(r.scheme) + " trial " +
                             std::to_string(r.trial) + ": status " + r.status);
      continue;
    }
    const TrialOutcome outcome = run_trial(cfg, r.scheme, r.sweep_value, r.trial);
    const auto audit = metrics::audit_solution(
        outcome.solution, outcome.cfg_used, outcome.require_unit_modulus);
    std::string why;
    if (!audit.ok()) {
      why = "feasibility audit failed";
    } else if (std::abs(outcome.record.sum_rate - r.sum_rate) > 1e-9) {
      why = "sum_rate mismatch on deterministic re-run";
    } else {
      double wsum = 0.0;
      for (size_t k = 0; k < r.ue_rates.size(); ++k) {
        wsum += outcome.cfg_used.weights[k] * r.ue_rates[k];
      }
      if (std::abs(wsum - r.sum_rate) > 1e-9) {
        why = "sum_rate does not match per-UE rates";
      } else if (std::abs(r.ee - r.sum_rate / r.total_power) > 1e-9) {
        why = "ee does not match sum_rate / total_power";
      }
    }
    if (!why.empty()) {
      ++res.violations;
      res.messages.push_back(scheme_name(r.scheme) + " trial " +
                             std::to_string(r.trial) + ": " + why);
    }
  }
  return res;
}

}  // namespace cranhb::harness
