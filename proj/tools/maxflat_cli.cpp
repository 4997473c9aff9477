// maxflat: design MaxFlat filterbanks and run the detection/tracking studies.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "maxflat/analyze.hpp"
#include "maxflat/design.hpp"
#include "maxflat/detector.hpp"
#include "maxflat/error.hpp"
#include "maxflat/io.hpp"
#include "maxflat/tracker.hpp"

using namespace maxflat;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

struct DesignArgs {
  std::string config;
  std::optional<double> fs, fwb, fnb, bw_factor;
  std::optional<int> kdc, knb, kpi, kt;
  std::string q;
  bool noncausal = false;
  bool per_output = false;
  std::string mapping;
  std::string out;
};

DesignSpec build_spec(const DesignArgs& a) {
  DesignSpec s;
  if (!a.config.empty()) s = spec_from_json(read_json_file(a.config));
  if (a.fs) s.fs_hz = *a.fs;
  if (a.fwb) s.f_wb = *a.fwb;
  if (a.fnb) s.f_nb = *a.fnb;
  if (a.kdc) s.k_w_dc = *a.kdc;
  if (a.knb) s.k_w_nb = *a.knb;
  if (a.kpi) s.k_w_pi = *a.kpi;
  if (a.kt) s.k_t = *a.kt;
  if (a.bw_factor) s.bandwidth_factor = *a.bw_factor;
  if (!a.q.empty()) {
    if (a.q == "optimal") {
      s.group_delay.reset();
    } else {
      try {
        std::size_t used = 0;
        s.group_delay = std::stod(a.q, &used);
        if (used != a.q.size()) throw std::invalid_argument(a.q);
      } catch (const std::exception&) {
        throw ValidationError("--q must be a number or 'optimal'");
      }
    }
  }
  if (a.noncausal) s.causal = false;
  if (a.per_output) s.per_output_delay = true;
  if (!a.mapping.empty()) s.pole_mapping = spec_from_json(Json{{"pole_mapping", a.mapping}}).pole_mapping;
  return s;
}

int cmd_design(const DesignArgs& a) {
  const auto spec = build_spec(a);
  Json out;
  if (spec.causal) {
    const auto d = design_filterbank(spec);
    for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
    out = design_to_json(d);
  } else {
    const auto nc = noncausal_design(spec);
    out["spec"] = spec_to_json(nc.spec);
    Json sigma = Json::array();
    for (Eigen::Index r = 0; r < nc.sigma.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < nc.sigma.cols(); ++c) row.push_back(nc.sigma(r, c));
      sigma.push_back(row);
    }
    out["sigma"] = sigma;
    out["condition"] = nc.condition;
    out["residual"] = nc.residual;
    out["forward"] = design_to_json(nc.forward);
    out["backward"] = design_to_json(nc.backward);
  }
  emit(a.out, out.dump(2) + "\n");
  return 0;
}

int cmd_response(const std::string& design_path, std::size_t points, const std::string& out) {
  const auto d = design_from_json(read_json_file(design_path));
  const auto grid = uniform_grid(points);
  std::vector<std::string> header{"f_cyc_per_smp"};
  for (int kt = 0; kt < d.outputs(); ++kt) {
    for (const char* col : {"re", "im", "magnitude", "phase_unwrapped", "complex_error", "group_delay"})
      header.push_back("h" + std::to_string(kt) + "_" + col);
  }
  std::vector<std::vector<double>> cols;
  for (int kt = 0; kt < d.outputs(); ++kt) {
    const auto& b = d.b[static_cast<std::size_t>(kt)];
    const auto h = frequency_response(b, d.a, grid);
    const double q = kt < static_cast<int>(d.delays.size()) ? d.delays[static_cast<std::size_t>(kt)] : d.q;
    auto err = complex_error(h, ideal_response(kt, q, d.Ts, grid));
    auto ph = unwrapped_phase(h);
    auto gd = measured_group_delay(b, d.a, grid);
    std::vector<double> re(h.size()), im(h.size()), mag(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      re[i] = h[i].real();
      im[i] = h[i].imag();
      mag[i] = std::abs(h[i]);
    }
    for (auto* c : {&re, &im, &mag, &ph, &err, &gd}) cols.push_back(*c);
  }
  CsvWriter csv(header);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i] / kTwoPi};
    for (const auto& c : cols) row.push_back(c[i]);
    csv.add_row(row);
  }
  emit(out, csv.str());
  return 0;
}

struct DetectArgs {
  std::string config;
  std::string tag;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::optional<bool> known_freq;
  std::string scenario;
  std::optional<double> p_int;
  std::string roc_out, summary_out;
};

int cmd_detect(const DetectArgs& a) {
  std::string tag = "IIR_BW1";
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
  DetectionScenario sc;
  std::string roc_out = a.roc_out, summary_out = a.summary_out;
  if (!a.config.empty()) {
    const auto j = read_json_file(a.config);
    reject_unknown_keys(j, {"tag", "trials", "seed", "scenario", "known_signal_freq", "p_int", "roc_csv", "summary_json"},
                        "detect config");
    try {
      if (j.contains("tag")) tag = j["tag"].get<std::string>();
      if (j.contains("trials")) trials = j["trials"].get<std::size_t>();
      if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
      if (j.contains("scenario")) {
        const auto s = j["scenario"].get<std::string>();
        if (s == "non_deterministic") sc = DetectionScenario::non_deterministic();
        else if (s != "deterministic") throw ValidationError("scenario must be 'deterministic' or 'non_deterministic'");
      }
      if (j.contains("known_signal_freq")) sc.known_signal_freq = j["known_signal_freq"].get<bool>();
      if (j.contains("p_int")) sc.p_int = j["p_int"].get<double>();
      if (roc_out.empty() && j.contains("roc_csv")) roc_out = j["roc_csv"].get<std::string>();
      if (summary_out.empty() && j.contains("summary_json")) summary_out = j["summary_json"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("detect config: ") + e.what());
    }
  }
  if (!a.tag.empty()) tag = a.tag;
  if (a.trials) trials = *a.trials;
  if (a.seed) seed = *a.seed;
  if (!a.scenario.empty()) {
    if (a.scenario == "non_deterministic") sc = DetectionScenario::non_deterministic();
    else if (a.scenario != "deterministic") throw ValidationError("--scenario must be deterministic or non_deterministic");
  }
  if (a.known_freq) sc.known_signal_freq = *a.known_freq;
  if (a.p_int) sc.p_int = *a.p_int;
  if (trials == 0) throw ValidationError("trials >= 1 violated");

  DetectorConfig cfg;
  cfg.tag = parse_tag(tag);
  const auto det = build_detector(cfg);
  const auto res = run_detection_mc(det, trials, seed, sc, a.threads);

  CsvWriter csv({"threshold", "p_fa", "p_d"});
  for (const auto& p : res.roc.points) csv.add_row({p.threshold, p.p_fa, p.p_d});
  if (!roc_out.empty()) emit(roc_out, csv.str());

  const auto s = det.summary();
  Json summary;
  summary["tag"] = s.name;
  summary["trials"] = trials;
  summary["seed"] = seed;
  summary["auc"] = res.roc.auc;
  summary["q_smp"] = s.q;
  summary["sigma0"] = s.sigma0;
  summary["h0_at_f_wb"] = s.h_wb;
  summary["h0_at_f_nb"] = s.h_nb;
  emit(summary_out, summary.dump(2) + "\n");
  return 0;
}

struct TrackArgs {
  std::string config;
  std::string tracker;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<double> fnb, p_int, r_orb;
  std::optional<int> revolutions;
  std::string track_out, orbit_out, summary_out;
};

int cmd_track(const TrackArgs& a) {
  std::string tracker = "A", scenario = "LoG";
  std::uint64_t seed = 1;
  TrackerConfig tc;
  TrackingScenario sc;
  double r_orb = 1.0;
  int revolutions = 10;
  std::string track_out = a.track_out, orbit_out = a.orbit_out, summary_out = a.summary_out;
  if (!a.config.empty()) {
    const auto j = read_json_file(a.config);
    reject_unknown_keys(j,
                        {"tracker", "scenario", "seed", "n_samples", "f_nb_cyc_per_smp", "p_int", "r_orb",
                         "revolutions", "track_csv", "orbit_csv", "summary_json"},
                        "track config");
    try {
      if (j.contains("tracker")) tracker = j["tracker"].get<std::string>();
      if (j.contains("scenario")) scenario = j["scenario"].get<std::string>();
      if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
      if (j.contains("n_samples")) sc.N = j["n_samples"].get<std::size_t>();
      if (j.contains("f_nb_cyc_per_smp")) tc.f_nb = j["f_nb_cyc_per_smp"].get<double>();
      if (j.contains("p_int")) sc.p_int = j["p_int"].get<double>();
      if (j.contains("r_orb")) r_orb = j["r_orb"].get<double>();
      if (j.contains("revolutions")) revolutions = j["revolutions"].get<int>();
      if (track_out.empty() && j.contains("track_csv")) track_out = j["track_csv"].get<std::string>();
      if (orbit_out.empty() && j.contains("orbit_csv")) orbit_out = j["orbit_csv"].get<std::string>();
      if (summary_out.empty() && j.contains("summary_json")) summary_out = j["summary_json"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("track config: ") + e.what());
    }
  }
  if (!a.tracker.empty()) tracker = a.tracker;
  if (!a.scenario.empty()) scenario = a.scenario;
  if (a.seed) seed = *a.seed;
  if (a.n) sc.N = *a.n;
  if (a.fnb) tc.f_nb = *a.fnb;
  if (a.p_int) sc.p_int = *a.p_int;
  if (a.r_orb) r_orb = *a.r_orb;
  if (a.revolutions) revolutions = *a.revolutions;
  if (scenario == "LoG") sc.kind = TrackScenario::LoG;
  else if (scenario == "HiG") sc.kind = TrackScenario::HiG;
  else throw ValidationError("scenario must be LoG or HiG");
  tc.tag = parse_tracker(tracker);

  const auto design = design_filterbank(tc.spec());
  const auto res = run_tracking_mc(design, sc, seed);
  CsvWriter track({"n", "truth_x", "truth_y", "meas_x", "meas_y", "est_x", "est_y"});
  for (std::size_t n = 0; n < sc.N; ++n)
    track.add_row({static_cast<double>(n), res.truth_x[n], res.truth_y[n], res.meas_x[n], res.meas_y[n],
                   res.track.est_x()[n], res.track.est_y()[n]});
  if (!track_out.empty()) emit(track_out, track.str());

  CsvWriter orbit({"f_orb", "eps_r_predicted", "eps_r_measured", "eps_theta_predicted", "eps_theta_measured"});
  double orbit_diff = 0.0;
  for (double f : default_orbit_grid()) {
    const auto o = orbit_simulation(design, f, r_orb, revolutions);
    orbit_diff = std::max(orbit_diff, std::abs(o.measured.eps_r - o.predicted.eps_r));
    if (o.angle_defined)
      orbit_diff = std::max(orbit_diff, std::abs(wrap_angle(o.measured.eps_theta - o.predicted.eps_theta)));
    orbit.add_row({f, o.predicted.eps_r, o.measured.eps_r, o.predicted.eps_theta,
                   o.angle_defined ? o.measured.eps_theta : o.predicted.eps_theta});
  }
  if (!orbit_out.empty()) emit(orbit_out, orbit.str());

  Json summary;
  summary["tracker"] = tracker_name(tc.tag);
  summary["scenario"] = scenario;
  summary["seed"] = seed;
  summary["q_smp"] = design.q;
  summary["sigma0"] = design.sigma(0, 0);
  summary["settle_smp"] = res.settle;
  summary["rms_position_error"] = res.rms_error;
  summary["orbit_max_abs_diff"] = orbit_diff;
  emit(summary_out, summary.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MaxFlat IIR filterbank design and simulation"};
  app.footer("Exit codes: 0 success, 2 invalid input or configuration, 3 numerical failure.");
  app.require_subcommand(1);

  DesignArgs da;
  auto* design = app.add_subcommand("design", "Design a filterbank and write its coefficients as JSON");
  design->add_option("--config", da.config, "JSON design spec");
  design->add_option("--fs", da.fs, "Sampling rate (Hz)");
  design->add_option("--fwb", da.fwb, "Bandwidth (cycles/sample)");
  design->add_option("--fnb", da.fnb, "Null frequency (cycles/sample)");
  design->add_option("--kdc", da.kdc, "Derivative constraints at dc");
  design->add_option("--knb", da.knb, "Derivative constraints at each null");
  design->add_option("--kpi", da.kpi, "Derivative constraints at Nyquist");
  design->add_option("--kt", da.kt, "Number of outputs (derivative orders 0..kt-1)");
  design->add_option("--q", da.q, "Group delay in samples, or 'optimal'");
  design->add_option("--bandwidth-factor", da.bw_factor, "Multiplier on the Butterworth cut-off");
  design->add_option("--mapping", da.mapping, "impulse_invariance or bilinear");
  design->add_flag("--noncausal", da.noncausal, "Use all 2K Butterworth poles (forward/backward split)");
  design->add_flag("--per-output-delay", da.per_output, "Optimize the delay of each output separately");
  design->add_option("-o,--out", da.out, "Output file (default stdout)");

  std::string resp_design, resp_out;
  std::size_t resp_points = 2048;
  auto* response = app.add_subcommand("response", "Frequency response CSV of a design file");
  response->add_option("--design", resp_design, "Design JSON")->required();
  response->add_option("--points", resp_points, "Grid points on [0, pi]");
  response->add_option("-o,--out", resp_out, "Output CSV (default stdout)");

  DetectArgs dt;
  auto* detect = app.add_subcommand("detect-sim", "Monte-Carlo pulse detection study");
  detect->add_option("--config", dt.config, "JSON config");
  detect->add_option("--tag", dt.tag, "FIR_NUL_NC, IIR_BW0, IIR_BW1, IIR_BW0_NC or IIR_BW1_NC");
  detect->add_option("--trials", dt.trials, "Paired trials");
  detect->add_option("--seed", dt.seed, "Master seed");
  detect->add_option("--threads", dt.threads, "Worker threads")->check(CLI::PositiveNumber);
  detect->add_option("--scenario", dt.scenario, "deterministic or non_deterministic");
  detect->add_option("--known-freq", dt.known_freq, "Signal frequency known (true/false)");
  detect->add_option("--p-int", dt.p_int, "Interference power");
  detect->add_option("--roc", dt.roc_out, "ROC CSV path");
  detect->add_option("--summary", dt.summary_out, "Summary JSON path (default stdout)");

  TrackArgs tr;
  auto* track = app.add_subcommand("track-sim", "Tracking scenario and orbit check");
  track->add_option("--config", tr.config, "JSON config");
  track->add_option("--tracker", tr.tracker, "A, B, C or D");
  track->add_option("--scenario", tr.scenario, "LoG or HiG");
  track->add_option("--seed", tr.seed, "Master seed");
  track->add_option("--samples", tr.n, "Samples per run");
  track->add_option("--fnb", tr.fnb, "Null frequency (cycles/sample)");
  track->add_option("--p-int", tr.p_int, "Interference power");
  track->add_option("--r-orb", tr.r_orb, "Orbit radius");
  track->add_option("--revolutions", tr.revolutions, "Minimum orbit revolutions");
  track->add_option("--track", tr.track_out, "Track CSV path");
  track->add_option("--orbit", tr.orbit_out, "Orbit check CSV path");
  track->add_option("--summary", tr.summary_out, "Summary JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*design) return cmd_design(da);
    if (*response) return cmd_response(resp_design, resp_points, resp_out);
    if (*detect) return cmd_detect(dt);
    if (*track) return cmd_track(tr);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
