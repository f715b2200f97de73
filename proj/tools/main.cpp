// dqc1lab command-line front end: trace curves, resource sweeps, register
// preparation, and tomography round trips, emitting CSV/JSON for plotting.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dqc1lab/dqc1.hpp"
#include "dqc1lab/io.hpp"
#include "dqc1lab/matqm.hpp"
#include "dqc1lab/noise.hpp"
#include "dqc1lab/prep.hpp"
#include "dqc1lab/rng.hpp"
#include "dqc1lab/tomo.hpp"
#include "dqc1lab/version.hpp"

namespace {

using json = nlohmann::json;
using namespace dqc1lab;

struct RunConfig {
  std::uint64_t seed = 1;
  int phi_points = 65;
  double phi = kPi;  // tomo only
  bool noise_enabled = false;
  noise::NoiseParams noise;
  resources::OptimizerConfig discord;
  int shots = 3000;
  int resamples = 50;
  int sampled_runs = 10000;
  bool phase_model = false;
  bool emit_states = false;
  std::string out_dir = ".";
  std::string format = "both";  // csv | json | both

  bool want_csv() const { return format == "csv" || format == "both"; }
  bool want_json() const { return format == "json" || format == "both"; }
};

std::string discord_mode_name(resources::DiscordMode mode) {
  return mode == resources::DiscordMode::kFull ? "full" : "fock-fixed";
}

resources::DiscordMode discord_mode_from(const std::string& name) {
  if (name == "full") return resources::DiscordMode::kFull;
  if (name == "fock-fixed") return resources::DiscordMode::kFockFixed;
  throw InvalidConfig("unknown discord mode '" + name + "'");
}

void apply_json_config(RunConfig& cfg, const json& j) {
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("phi_points")) cfg.phi_points = j.at("phi_points").get<int>();
  if (j.contains("phi")) cfg.phi = j.at("phi").get<double>();
  if (j.contains("shots")) cfg.shots = j.at("shots").get<int>();
  if (j.contains("resamples")) cfg.resamples = j.at("resamples").get<int>();
  if (j.contains("sampled_runs")) cfg.sampled_runs = j.at("sampled_runs").get<int>();
  if (j.contains("phase_model")) cfg.phase_model = j.at("phase_model").get<bool>();
  if (j.contains("emit_states")) cfg.emit_states = j.at("emit_states").get<bool>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
  if (j.contains("discord")) {
    const json& d = j.at("discord");
    if (d.contains("starts")) cfg.discord.starts = d.at("starts").get<int>();
    if (d.contains("tolerance")) cfg.discord.tolerance = d.at("tolerance").get<double>();
    if (d.contains("max_evals")) cfg.discord.max_evals = d.at("max_evals").get<int>();
    if (d.contains("mode")) cfg.discord.mode = discord_mode_from(d.at("mode").get<std::string>());
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    if (n.contains("enabled")) cfg.noise_enabled = n.at("enabled").get<bool>();
    if (n.contains("t1_us")) cfg.noise.t1_us = n.at("t1_us").get<double>();
    if (n.contains("tphi_us")) cfg.noise.tphi_us = n.at("tphi_us").get<double>();
    if (n.contains("tau_s_us")) cfg.noise.tau_s_us = n.at("tau_s_us").get<double>();
    if (n.contains("chi_over_2pi_mhz")) {
      cfg.noise.chi_over_2pi_mhz = n.at("chi_over_2pi_mhz").get<double>();
    }
    if (n.contains("cavity_truncation")) {
      cfg.noise.cavity_truncation = n.at("cavity_truncation").get<int>();
    }
    if (n.contains("gate_durations")) {
      for (const auto& [name, value] : n.at("gate_durations").items()) {
        cfg.noise.gate_durations[name] = value.get<double>();
      }
    }
  }
}

json effective_config_json(const RunConfig& cfg, const std::string& command) {
  json durations;
  for (const auto& [name, value] : cfg.noise.gate_durations) durations[name] = value;
  return json{
      {"command", command},
      {"seed", cfg.seed},
      {"phi_points", cfg.phi_points},
      {"phi", cfg.phi},
      {"shots", cfg.shots},
      {"resamples", cfg.resamples},
      {"sampled_runs", cfg.sampled_runs},
      {"phase_model", cfg.phase_model},
      {"emit_states", cfg.emit_states},
      {"out", cfg.out_dir},
      {"format", cfg.format},
      {"discord",
       {{"starts", cfg.discord.starts},
        {"tolerance", cfg.discord.tolerance},
        {"max_evals", cfg.discord.max_evals},
        {"mode", discord_mode_name(cfg.discord.mode)}}},
      {"noise",
       {{"enabled", cfg.noise_enabled},
        {"t1_us", cfg.noise.t1_us},
        {"tphi_us", cfg.noise.tphi_us},
        {"tau_s_us", cfg.noise.tau_s_us},
        {"chi_over_2pi_mhz", cfg.noise.chi_over_2pi_mhz},
        {"cavity_truncation", cfg.noise.cavity_truncation},
        {"gate_durations", durations}}},
  };
}

json meta_json(const RunConfig& cfg, const std::string& command) {
  return json{{"tool", "dqc1lab"},
              {"version", kVersion},
              {"config", effective_config_json(cfg, command)}};
}

void stamp_meta(io::CsvWriter& csv, const RunConfig& cfg, const std::string& command) {
  csv.meta("tool", std::string("dqc1lab ") + kVersion);
  csv.meta("command", command);
  csv.meta("seed", std::to_string(cfg.seed));
  csv.meta("config", effective_config_json(cfg, command).dump());
}

dqc1::Dqc1Config circuit_config(const RunConfig& cfg) {
  dqc1::Dqc1Config config;
  config.phi_grid = dqc1::default_phi_grid(cfg.phi_points);
  config.discord = cfg.discord;
  config.discord.seed = cfg.seed;
  if (cfg.noise_enabled) config.noise = cfg.noise;
  return config;
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  return std::filesystem::path(cfg.out_dir) / name;
}

int cmd_trace(const RunConfig& cfg) {
  dqc1::Dqc1Config config = circuit_config(cfg);
  config.validate();

  std::optional<noise::NoisyDqc1> engine;
  if (config.noise) engine.emplace(config);

  io::CsvWriter csv;
  stamp_meta(csv, cfg, "trace");
  std::vector<std::string> columns{"phi", "re_ideal", "im_ideal"};
  if (engine) {
    columns.push_back("re_noisy");
    columns.push_back("im_noisy");
  }
  csv.header(columns);

  json rows = json::array();
  for (double phi : config.phi_grid) {
    const auto [re_ideal, im_ideal] = dqc1::trace_estimate(dqc1::run_circuit(config, phi));
    std::vector<double> row{phi, re_ideal, im_ideal};
    json jrow{{"phi", phi}, {"re_ideal", re_ideal}, {"im_ideal", im_ideal}};
    if (engine) {
      const auto noisy = engine->run(phi);
      const auto [re_noisy, im_noisy] = dqc1::trace_estimate(noisy.state);
      row.push_back(re_noisy);
      row.push_back(im_noisy);
      jrow["re_noisy"] = re_noisy;
      jrow["im_noisy"] = im_noisy;
      jrow["leaked_population"] = noisy.leaked_population;
    }
    csv.numeric_row(row);
    rows.push_back(std::move(jrow));
  }

  if (cfg.want_csv()) csv.write(out_path(cfg, "trace.csv"));
  if (cfg.want_json()) {
    json doc{{"meta", meta_json(cfg, "trace")}, {"rows", rows}};
    io::write_text(out_path(cfg, "trace.json"), doc.dump(2) + "\n");
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  dqc1::Dqc1Config config = circuit_config(cfg);
  config.validate();
  const auto records = dqc1::sweep(config);

  const bool full_mode = cfg.discord.mode == resources::DiscordMode::kFull;
  io::CsvWriter csv;
  stamp_meta(csv, cfg, "sweep");
  std::vector<std::string> columns{"phi",     "delta_C",        "discord", "discord_converged",
                                   "joint_fidelity", "trace_re", "trace_im"};
  if (full_mode) {
    columns.push_back("discord_fock_fixed");
    columns.push_back("discord_gap_flag");
  }
  csv.header(columns);

  double max_gap = -1e300;
  bool any_gap_flag = false;
  json rows = json::array();
  for (const auto& r : records) {
    max_gap = std::max(max_gap, r.discord.value - r.delta_c);
    any_gap_flag = any_gap_flag || r.discord_gap_flag;
    std::vector<std::string> row{io::format_double(r.phi),
                                 io::format_double(r.delta_c),
                                 io::format_double(r.discord.value),
                                 r.discord.converged ? "1" : "0",
                                 io::format_double(r.joint_fidelity),
                                 io::format_double(r.trace_re),
                                 io::format_double(r.trace_im)};
    if (full_mode) {
      row.push_back(io::format_double(r.discord_fock_fixed));
      row.push_back(r.discord_gap_flag ? "1" : "0");
    }
    csv.row(row);

    json jrow{{"phi", r.phi},
              {"delta_C", r.delta_c},
              {"c_before", r.c_before},
              {"c_after", r.c_after},
              {"discord", r.discord.value},
              {"discord_converged", r.discord.converged},
              {"discord_fock_fixed", r.discord_fock_fixed},
              {"discord_gap_flag", r.discord_gap_flag},
              {"joint_fidelity", r.joint_fidelity},
              {"trace_re", r.trace_re},
              {"trace_im", r.trace_im},
              {"leaked_population", r.leaked_population}};
    if (cfg.emit_states) jrow["state"] = io::density_matrix_to_json(r.state);
    rows.push_back(std::move(jrow));
  }

  json summary{{"max_discord_minus_delta_C", max_gap}, {"discord_gap_flagged", any_gap_flag}};
  if (config.noise) {
    const noise::NoisyDqc1 engine(config);
    summary["dt_halving_defect_at_2pi"] = engine.dt_halving_defect(2.0 * kPi);
    double max_leak = 0.0;
    for (const auto& r : records) max_leak = std::max(max_leak, r.leaked_population);
    summary["max_leaked_population"] = max_leak;
  }

  if (cfg.want_csv()) csv.write(out_path(cfg, "sweep.csv"));
  if (cfg.want_json()) {
    json doc{{"meta", meta_json(cfg, "sweep")}, {"summary", summary}, {"rows", rows}};
    io::write_text(out_path(cfg, "sweep.json"), doc.dump(2) + "\n");
  }
  std::cout << "max(discord - delta_C) = " << io::format_double(max_gap) << "\n";
  if (any_gap_flag) {
    std::cout << "warning: full and fock-fixed discord disagree beyond 1e-3 somewhere\n";
  }
  return 0;
}

int cmd_prep(const RunConfig& cfg) {
  const auto mm = DensityMatrix::maximally_mixed(HilbertSpec::single(kRegisterLabel, 8));

  prep::TreeOptions ideal_options;
  ideal_options.with_phase_model = cfg.phase_model;
  const prep::PrepResult ideal = prep::run_binary_tree(ideal_options);
  const double ideal_fidelity = fidelity(ideal.register_state, mm);

  io::CsvWriter csv;
  stamp_meta(csv, cfg, "prep");
  csv.header({"branch", "probability"});
  json branches = json::object();
  for (const auto& [path, p] : ideal.trace.branch_probabilities) {
    csv.row({path, io::format_double(p)});
    branches[path] = p;
  }

  // sampled-mode leaf histogram
  std::map<std::string, int> histogram;
  prep::TreeOptions sampled_options = ideal_options;
  sampled_options.sampled = true;
  for (int run = 0; run < cfg.sampled_runs; ++run) {
    sampled_options.seed = substream_seed(cfg.seed, static_cast<std::uint64_t>(run));
    histogram[prep::run_binary_tree(sampled_options).trace.sampled_path]++;
  }
  json histogram_json = json::object();
  for (const auto& [path, count] : histogram) histogram_json[path] = count;

  json doc{{"meta", meta_json(cfg, "prep")},
           {"fidelity_ideal", ideal_fidelity},
           {"branch_probabilities", branches},
           {"sampled_histogram", histogram_json},
           {"density_matrix", io::density_matrix_to_json(ideal.register_state)}};

  if (cfg.noise_enabled) {
    prep::TreeOptions noisy_options = ideal_options;
    noisy_options.noise = cfg.noise;
    const prep::PrepResult noisy = prep::run_binary_tree(noisy_options);
    doc["fidelity_noisy"] = fidelity(noisy.register_state, mm);
  }

  if (cfg.want_csv()) csv.write(out_path(cfg, "prep_branches.csv"));
  if (cfg.want_json()) io::write_text(out_path(cfg, "prep.json"), doc.dump(2) + "\n");
  std::cout << "prep fidelity (ideal run) = " << io::format_double(ideal_fidelity) << "\n";
  return 0;
}

int cmd_tomo(const RunConfig& cfg) {
  dqc1::Dqc1Config config = circuit_config(cfg);
  config.phi_grid = {cfg.phi};
  config.validate();

  const auto anc_basis =
      resources::ReferenceBasis::computational(HilbertSpec::single(kAncillaLabel, 2));

  // true state and the fixed pre-gate coherence reference entering delta-C
  double c_before = 1.0;
  std::optional<DensityMatrix> true_state;
  if (config.noise) {
    const noise::NoisyDqc1 engine(config);
    c_before =
        resources::coherence(partial_trace(engine.pre_gate().state, {kAncillaLabel}), anc_basis);
    true_state.emplace(engine.run(cfg.phi).state);
  } else {
    true_state.emplace(dqc1::run_circuit(config, cfg.phi));
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    c_before = resources::coherence(DensityMatrix(HilbertSpec::single(kAncillaLabel, 2), plus),
                                    anc_basis);
  }

  const auto grid = tomo::default_beta_grid();
  const auto settings = tomo::all_settings();
  tomo::WignerDataset dataset =
      cfg.shots > 0 ? tomo::sample_shots(*true_state, grid, settings, cfg.shots, cfg.seed)
                    : tomo::joint_wigner_forward(*true_state, grid, settings);

  const tomo::ReconstructionResult rec = tomo::reconstruct(dataset);
  const double fid = fidelity(rec.rho, *true_state);
  const double c_after = resources::coherence(partial_trace(rec.rho, {kAncillaLabel}), anc_basis);
  resources::OptimizerConfig disc_cfg = cfg.discord;
  disc_cfg.seed = cfg.seed;
  const auto discord = resources::global_discord(rec.rho, disc_cfg);

  json doc{{"meta", meta_json(cfg, "tomo")},
           {"fidelity_vs_true", fid},
           {"c_before", c_before},
           {"c_after", c_after},
           {"delta_C", c_before - c_after},
           {"discord", discord.value},
           {"discord_converged", discord.converged},
           {"residual", rec.residual},
           {"residual_unconstrained", rec.residual_unconstrained},
           {"projection_distance", rec.projection_distance},
           {"measurement_rank", rec.measurement_rank},
           {"density_matrix", io::density_matrix_to_json(rec.rho)}};

  if (cfg.shots > 0 && cfg.resamples >= 2) {
    const auto errors =
        tomo::bootstrap_errors(dataset, cfg.resamples, cfg.seed + 1, c_before, disc_cfg);
    doc["sigma_delta_C"] = errors.sigma_delta_c;
    doc["sigma_discord"] = errors.sigma_discord;
  }

  io::CsvWriter csv;
  stamp_meta(csv, cfg, "tomo");
  csv.header({"setting", "re_beta", "im_beta", "value", "shots"});
  for (size_t s = 0; s < settings.size(); ++s) {
    for (size_t b = 0; b < grid.size(); ++b) {
      csv.row({tomo::setting_name(settings[s]), io::format_double(grid[b].real()),
               io::format_double(grid[b].imag()),
               io::format_double(dataset.expectations(static_cast<Eigen::Index>(s),
                                                      static_cast<Eigen::Index>(b))),
               std::to_string(dataset.shots_per_point)});
    }
  }

  if (cfg.want_csv()) csv.write(out_path(cfg, "tomo_dataset.csv"));
  if (cfg.want_json()) {
    io::write_text(out_path(cfg, "tomo.json"), doc.dump(2) + "\n");
    json dataset_doc{{"meta", meta_json(cfg, "tomo")},
                     {"dataset", io::wigner_dataset_to_json(dataset)}};
    io::write_text(out_path(cfg, "tomo_dataset.json"), dataset_doc.dump() + "\n");
  }
  std::cout << "tomo fidelity vs true state = " << io::format_double(fid) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dqc1lab: one-clean-qubit resource-conversion simulator"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::string discord_mode = discord_mode_name(cfg.discord.mode);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override its values");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--format", cfg.format, "csv | json | both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--discord-mode", discord_mode, "fock-fixed | full")
        ->check(CLI::IsMember({"fock-fixed", "full"}));
    sub->add_flag("--noise", cfg.noise_enabled, "enable the decoherence model");
  };

  CLI::App* trace = app.add_subcommand("trace", "normalized trace curve over phi");
  trace->add_option("--phi-points", cfg.phi_points, "phi grid size")->check(CLI::Range(2, 100000));
  add_common(trace);

  CLI::App* sweep = app.add_subcommand("sweep", "delta-C / discord sweep over phi");
  sweep->add_option("--phi-points", cfg.phi_points, "phi grid size")->check(CLI::Range(2, 100000));
  sweep->add_flag("--states", cfg.emit_states, "embed full states in the JSON sidecar");
  add_common(sweep);

  CLI::App* prep_cmd = app.add_subcommand("prep", "binary-tree register preparation");
  prep_cmd->add_option("--sampled-runs", cfg.sampled_runs, "sampled trajectories")
      ->check(CLI::Range(0, 10000000));
  prep_cmd->add_flag("--phase-model", cfg.phase_model, "apply measurement-induced phases");
  add_common(prep_cmd);

  CLI::App* tomo_cmd = app.add_subcommand("tomo", "tomography round trip at one phi");
  tomo_cmd->add_option("--phi", cfg.phi, "controlled-phase angle");
  tomo_cmd->add_option("--shots", cfg.shots, "shots per grid point; 0 = exact expectations")
      ->check(CLI::Range(0, 100000000));
  tomo_cmd->add_option("--resamples", cfg.resamples, "bootstrap resamples");
  add_common(tomo_cmd);

  // Load --config before the CLI11 parse so explicit flags override it.
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) {
        config_path = argv[i + 1];
      } else if (arg.rfind("--config=", 0) == 0) {
        config_path = arg.substr(9);
      }
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InvalidConfig("cannot open config file '" + config_path + "'");
      json j;
      in >> j;
      apply_json_config(cfg, j);
      discord_mode = discord_mode_name(cfg.discord.mode);
    }
    app.parse(argc, argv);
    cfg.discord.mode = discord_mode_from(discord_mode);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (trace->parsed()) return cmd_trace(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
    if (prep_cmd->parsed()) return cmd_prep(cfg);
    if (tomo_cmd->parsed()) return cmd_tomo(cfg);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}
